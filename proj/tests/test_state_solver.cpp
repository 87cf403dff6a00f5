#include "doctest.h"

#include "oracles.hpp"
#include "swipt/state_solver.hpp"

#include <array>
#include <cmath>
#include <random>

using namespace swipt;

namespace {

Vector vec(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

Multipliers prices(double lambda, Vector theta) {
  return {Vector::Constant(1, lambda), std::move(theta)};
}

}  // namespace

TEST_CASE("one layer has the water-filling solution") {
  const std::array<double, 1> noise{0.5}, weight{1.3}, floor{0.0}, cost{0.2};
  std::array<double, 1> r{}, t{};
  const layered::Problem p{noise, weight, floor, cost};
  CHECK(layered::bounded(p));
  layered::solve(p, r, t);
  const double level = weight[0] / (2.0 * cost[0]);
  CHECK(t[0] == doctest::Approx(level - noise[0]).epsilon(1e-12));
  CHECK(r[0] == doctest::Approx(0.5 * std::log(level / noise[0])).epsilon(1e-12));

  // Water level below the noise: the floor binds.
  const std::array<double, 1> high_cost{5.0}, rho{0.1};
  const layered::Problem q{noise, weight, rho, high_cost};
  layered::solve(q, r, t);
  CHECK(r[0] == doctest::Approx(0.1));
}

TEST_CASE("zero weights and prices give zero power") {
  SystemConfig cfg = make_config(vec(1, 2), Vector::Zero(2), Vector::Zero(2), 1e-4, 1.0,
                                 {Architecture::Ideal, Architecture::Ideal});
  const StateSolution sol =
      per_state_allocation(vec(0.7, 1.1), Vector::Zero(2), prices(1.0, Vector::Zero(2)), cfg,
                           HarvestFractions::zeros(2));
  CHECK(sol.rates.isZero());
  CHECK(sol.powers.isZero());
}

TEST_CASE("single user matches a 1-D grid") {
  Vector n(1), h(1), w(1);
  n << 0.9;
  h << 1.7;
  w << 1.0;
  const SystemConfig cfg = make_config(n, Vector::Zero(1), Vector::Zero(1), 1e-4, 1.0, {Architecture::Ideal});
  const double lambda = 0.3;
  const StateSolution sol =
      per_state_allocation(h, w, {Vector::Constant(1, lambda), Vector::Zero(1)}, cfg, HarvestFractions::zeros(1));
  const double grid = oracle::grid_max_1d(
      [&](double r) { return r - lambda * std::expm1(2 * r) * 0.9 / 1.7; }, 0.0, 5.0, 50001, 0);
  CHECK(std::abs(sol.objective - grid) < 1e-6);
  CHECK(sol.powers(0) == doctest::Approx(1.0 / (2 * lambda) - 0.9 / 1.7).epsilon(1e-10));
}

TEST_CASE("unbounded per-state objective is reported") {
  const SystemConfig cfg = make_config(vec(1, 2), Vector::Zero(2), Vector::Zero(2), 0.5, 1.0,
                                       {Architecture::Ideal, Architecture::Ideal});
  CHECK_THROWS_AS(per_state_allocation(vec(2.0, 1.0), vec(1, 1), prices(0.5, vec(1.0, 0.0)), cfg,
                                       HarvestFractions::zeros(2)),
                  UnboundedObjective);
}

TEST_CASE("two layers match the exhaustive rate grid") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> g(0.1, 3.0), n(0.3, 2.0), w(0.05, 1.0), rho(0.0, 0.3);
  for (int trial = 0; trial < 12; ++trial) {
    oracle::BcInstance in;
    in.noise = vec(n(rng), n(rng));
    in.rho = vec(rho(rng), rho(rng));
    in.delta = Vector::Zero(2);
    in.eta = 0.3;
    in.gains = Matrix(1, 2);
    in.gains << g(rng), g(rng);
    const Vector gains = in.gains.row(0).transpose();
    const Vector mu = vec(w(rng), w(rng));
    // Rewards kept below the boundedness threshold of either layer.
    const double lambda = 0.2 + w(rng);
    const Vector theta = vec(0.5 * w(rng), 0.5 * w(rng)) * lambda / (in.eta * gains.maxCoeff());
    const SystemConfig cfg = make_config(in.noise, in.rho, Vector::Zero(2), in.eta, 1.0,
                                         {Architecture::Ideal, Architecture::Ideal});
    const StateSolution sol = per_state_allocation(gains, mu, prices(lambda, theta), cfg, HarvestFractions::zeros(2));
    const double ref = oracle::bc_state_max(in, 0, mu, lambda, theta);
    CAPTURE(trial);
    CHECK(sol.objective >= ref - 1e-9);
    CHECK(std::abs(sol.objective - ref) < 1e-6);
    CHECK((sol.rates.array() >= in.rho.array() - 1e-12).all());
  }
}

TEST_CASE("coordinate ascent agrees with the exact two-layer solve") {
  const std::array<double, 2> noise{0.4, 1.2}, weight{0.6, 1.0}, floor{0.05, 0.1}, cost{0.3, 0.25};
  const layered::Problem p{noise, weight, floor, cost};
  std::array<double, 2> r{}, t{}, r2{0.05, 0.1}, t2{};
  const double exact = layered::solve(p, r, t);
  const double ascent = layered::coordinate_ascent(p, r2, t2);
  CHECK(ascent == doctest::Approx(exact).epsilon(1e-9));
}
