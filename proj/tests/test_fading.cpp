#include "doctest.h"

#include "swipt/fading.hpp"

#include <cmath>

using namespace swipt;

TEST_CASE("discretized exponential marginal") {
  const MarginalFading m = discretize_exponential(0.8, 0.1, 10.0);
  REQUIRE(m.size() == 100);
  CHECK(m.support(0) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(m.support(99) == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(std::abs(m.probs(0) - 0.117503097415404597) < 1e-15);
  CHECK(std::abs(m.probs.sum() - 1.0) < 1e-12);
  CHECK((m.probs.array() >= 0.0).all());
  for (Index i = 1; i < m.size(); ++i) CHECK(m.support(i) > m.support(i - 1));
  // Tail bin: Pr(H >= 9.9).
  CHECK(std::abs(m.probs(99) - std::exp(-9.9 / 0.8)) < 1e-16);
}

TEST_CASE("right-endpoint discretization means") {
  CHECK(std::abs(discretize_exponential(0.8, 0.1, 10.0).mean() - 0.851038223964068) < 1e-12);
  CHECK(std::abs(discretize_exponential(0.8, 0.05, 10.0).mean() - 0.825257324254747) < 1e-12);
  CHECK(std::abs(discretize_exponential(0.8, 0.025, 10.0).mean() - 0.812562074958734) < 1e-12);
  CHECK(std::abs(discretize_exponential(0.5, 0.1, 10.0).mean() - 0.551665555475632) < 1e-12);
  // Within the stated discretization error of the continuous means.
  CHECK(std::abs(discretize_exponential(0.8, 0.1, 10.0).mean() - 0.8) <= 0.06);
}

TEST_CASE("invalid discretization inputs") {
  CHECK_THROWS_AS(discretize_exponential(0.0, 0.1, 10.0), InvalidParameter);
  CHECK_THROWS_AS(discretize_exponential(0.8, -0.1, 10.0), InvalidParameter);
  CHECK_THROWS_AS(discretize_exponential(0.8, 0.3, 1.0), InvalidParameter);
}

TEST_CASE("marginal validation") {
  Vector s(2), p(2);
  s << 0.5, 0.2;
  p << 0.5, 0.5;
  CHECK_THROWS_AS(make_marginal(0, s, p), InvalidParameter);
  s << 0.0, 0.2;
  CHECK_THROWS_AS(make_marginal(0, s, p), InvalidParameter);
  s << 0.1, 0.2;
  p << 0.6, 0.6;
  CHECK_THROWS_AS(make_marginal(0, s, p), InvalidParameter);
}

TEST_CASE("joint product") {
  Vector s(2), p1(2), p2(2);
  s << 1.0, 2.0;
  p1 << 0.3, 0.7;
  p2 << 0.4, 0.6;
  const auto d = joint_product({make_marginal(0, s, p1), make_marginal(1, s, p2)});
  REQUIRE(d.num_states() == 4);
  CHECK(d.probs(0) == doctest::Approx(0.12));
  CHECK(d.probs(1) == doctest::Approx(0.18));
  CHECK(d.probs(2) == doctest::Approx(0.28));
  CHECK(d.probs(3) == doctest::Approx(0.42));
  CHECK((marginalize(d, 0) - p1).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((marginalize(d, 1) - p2).cwiseAbs().maxCoeff() < 1e-15);

  const auto single = joint_product({make_marginal(0, s, p1)});
  CHECK(single.num_states() == 2);
  CHECK(single.gains(1, 0) == 2.0);

  const auto preset = joint_product({discretize_exponential(0.8, 0.1, 10.0, 0),
                                    discretize_exponential(0.5, 0.1, 10.0, 1)});
  CHECK(preset.num_states() == 10000);
  CHECK(std::abs(preset.probs.sum() - 1.0) < 1e-10);
  CHECK(std::abs(expectation(preset, [](const Vector& h) { return h(1); }) - 0.551665555475632) < 1e-12);
}

TEST_CASE("expectation") {
  const auto d = joint_product({discretize_exponential(0.8, 0.1, 10.0, 0),
                                discretize_exponential(0.5, 0.1, 10.0, 1)});
  CHECK(expectation(d, [](const Vector&) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-12));
  const double inv = expectation(d, [](const Vector& h) { return 1.0 / h(0); });
  CHECK(std::isfinite(inv));
  CHECK(inv > 1.0);
}

TEST_CASE("explicit joint states") {
  Matrix g(2, 2);
  g << 1.0, 2.0, 2.0, 1.0;
  Vector p(2);
  p << 0.5, 0.5;
  const auto d = joint_from_states(g, p);
  CHECK_FALSE(d.is_product());
  p << 0.5, 0.6;
  CHECK_THROWS_AS(joint_from_states(g, p), InvalidParameter);
}
