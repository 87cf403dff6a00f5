#include "doctest.h"

#include "swipt/gbc.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace swipt;

namespace {

SystemConfig two_user(double n1, double n2, Architecture a1 = Architecture::Ideal,
                      Architecture a2 = Architecture::Ideal) {
  Vector n(2);
  n << n1, n2;
  return make_config(n, Vector::Zero(2), Vector::Zero(2), 1e-4, 10.0, {a1, a2});
}

Vector vec(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("unit conversion") {
  CHECK(kbps_to_nats(300.0) == doctest::Approx(0.3 * std::numbers::ln2).epsilon(1e-15));
  CHECK(nats_to_kbps(kbps_to_nats(150.0)) == doctest::Approx(150.0).epsilon(1e-15));
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(make_config(vec(0.0, 1.0), Vector::Zero(2), Vector::Zero(2), 1e-4, 1.0,
                              {Architecture::Ideal, Architecture::Ideal}),
                  InvalidParameter);
  CHECK_THROWS_AS(make_config(vec(1.0, 1.0), Vector::Zero(2), Vector::Zero(2), 1.5, 1.0,
                              {Architecture::Ideal, Architecture::Ideal}),
                  InvalidParameter);
  CHECK_THROWS_AS(make_config(vec(1.0, 1.0), vec(-1.0, 0.0), Vector::Zero(2), 1e-4, 1.0,
                              {Architecture::Ideal, Architecture::Ideal}),
                  InvalidParameter);
  SystemConfig cfg = two_user(1.0, 1.0);
  cfg.rx_consumption_mean = vec(90e-6, 50e-6);
  cfg.rx_ambient_mean = vec(30e-6, 60e-6);
  cfg.derive_deficits();
  CHECK(cfg.deficits(0) == doctest::Approx(60e-6));
  CHECK(cfg.deficits(1) == 0.0);
  CHECK_NOTHROW(cfg.validate());
  cfg.deficits(1) = 1e-6;
  CHECK_THROWS_AS(cfg.validate(), InvalidParameter);
}

TEST_CASE("degradation order") {
  const auto fr = HarvestFractions::zeros(2);
  CHECK(degradation_order<double>(vec(1, 1), two_user(0.8, 1.6), fr) == std::vector<Index>{0, 1});
  CHECK(degradation_order<double>(vec(1, 2), two_user(1, 2), fr) == std::vector<Index>{0, 1});
  const SystemConfig ps = two_user(1, 1, Architecture::PowerSplitting, Architecture::PowerSplitting);
  HarvestFractions half{vec(0.5, 0.0)};
  CHECK(degradation_order<double>(vec(1, 1), ps, half) == std::vector<Index>{1, 0});
}

TEST_CASE("per-state rates") {
  const auto fr = HarvestFractions::zeros(2);
  Vector n1(1);
  n1 << 1.0;
  const SystemConfig single = make_config(n1, Vector::Zero(1), Vector::Zero(1), 1e-4, 1.0, {Architecture::Ideal});
  Vector one(1);
  one << 1.0;
  CHECK(per_state_rates<double>(one, one, single, HarvestFractions::zeros(1))(0) ==
        doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-15));

  const Vector r = per_state_rates<double>(vec(1, 1), vec(1, 3), two_user(1, 2), fr);
  CHECK(r(0) == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-15));
  CHECK(r(1) == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-15));

  const SystemConfig ts = two_user(1, 2, Architecture::TimeSwitching, Architecture::Ideal);
  const Vector rts = per_state_rates<double>(vec(1, 1), vec(1, 3), ts, HarvestFractions{vec(0.5, 0.0)});
  CHECK(rts(0) == doctest::Approx(0.25 * std::log(2.0)).epsilon(1e-15));
  CHECK(rts(1) == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("power for rates") {
  const auto fr = HarvestFractions::zeros(2);
  const SystemConfig cfg = two_user(1, 2);
  CHECK(power_for_rates<double>(vec(1, 1), Vector::Zero(2), cfg, fr).isZero());
  const Vector t = power_for_rates<double>(vec(1, 1), vec(0.5 * std::log(2.0), 0.5 * std::log(2.0)), cfg, fr);
  CHECK(t(0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(t(1) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK_THROWS_AS(power_for_rates<double>(vec(1, 1), vec(-0.1, 0.0), cfg, fr), InvalidParameter);

  Vector n1(1), h(1), rho(1);
  n1 << 0.7;
  h << 1.3;
  rho << 0.4;
  const SystemConfig single = make_config(n1, rho, Vector::Zero(1), 1e-4, 1.0, {Architecture::Ideal});
  CHECK(min_rate_powers<double>(h, single, HarvestFractions::zeros(1))(0) ==
        doctest::Approx(0.7 * std::expm1(0.8) / 1.3).epsilon(1e-14));
}

TEST_CASE("minimum-rate powers of the published state") {
  SystemConfig cfg = two_user(0.8, 1.6);
  cfg.min_rates = vec(0.3 * std::numbers::ln2, 0.15 * std::numbers::ln2);
  const Vector t = min_rate_powers<double>(vec(0.8, 0.5), cfg, HarvestFractions::zeros(2));
  CHECK(std::abs(t(0) - 0.515716566510398082) < 1e-14);
  CHECK(std::abs(t(1) - 0.858867125922032576) < 1e-14);
  cfg.min_rates.setZero();
  CHECK(min_rate_powers<double>(vec(0.8, 0.5), cfg, HarvestFractions::zeros(2)).isZero());
}

TEST_CASE("round trip of rates and powers") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> g(0.05, 5.0), r(0.0, 1.5), f(0.0, 0.9);
  const Architecture archs[] = {Architecture::Ideal, Architecture::TimeSwitching, Architecture::PowerSplitting};
  for (int trial = 0; trial < 300; ++trial) {
    const SystemConfig cfg = two_user(g(rng), g(rng), archs[trial % 3], archs[(trial / 3) % 3]);
    const HarvestFractions fr{vec(f(rng), f(rng))};
    const Vector gains = vec(g(rng), g(rng));
    const Vector rates = vec(r(rng), r(rng)).cwiseProduct(
        vec(erasure_factor(cfg, fr, 0), erasure_factor(cfg, fr, 1)));
    const Vector back = per_state_rates<double>(gains, power_for_rates<double>(gains, rates, cfg, fr), cfg, fr);
    CHECK((back - rates).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("rates are well defined in extended precision") {
  const SystemConfig cfg = two_user(0.8, 1.6);
  using LD = long double;
  VectorX<LD> gains(2), powers(2);
  gains << 0.8L, 0.5L;
  powers << 2.0L, 3.0L;
  const auto r = per_state_rates<LD>(gains, powers, cfg, HarvestFractions::zeros(2));
  const auto t = power_for_rates<LD>(gains, r, cfg, HarvestFractions::zeros(2));
  CHECK(static_cast<double>((t - powers).cwiseAbs().maxCoeff()) < 1e-15);
}

TEST_CASE("harvested RF energy") {
  SystemConfig cfg = two_user(0.8, 1.6);
  const Vector e = harvested_rf<double>(vec(0.8, 0.5), vec(4.0, 6.0), cfg, HarvestFractions::zeros(2));
  CHECK(e(0) == doctest::Approx(8e-4).epsilon(1e-14));
  cfg.architectures = {Architecture::TimeSwitching, Architecture::TimeSwitching};
  CHECK(harvested_rf<double>(vec(0.8, 0.5), vec(4.0, 6.0), cfg, HarvestFractions::zeros(2)).isZero());
  CHECK(harvested_rf<double>(vec(0.8, 0.5), vec(4.0, 6.0), cfg, HarvestFractions{vec(1.0, 1.0)})(0) ==
        doctest::Approx(8e-4).epsilon(1e-14));
  const Vector own = own_layer_delivery<double>(vec(0.8, 0.5), vec(4.0, 6.0), cfg);
  CHECK(own(0) == doctest::Approx(3.2e-4).epsilon(1e-14));
  CHECK(own(1) == doctest::Approx(3e-4).epsilon(1e-14));
}

TEST_CASE("two-user effective channel") {
  SystemConfig cfg = two_user(0.8, 1.6);
  const EffectiveChannel2 id = effective_channel_two_user(vec(0.8, 0.5), cfg, 0.3);
  CHECK((id.gains - vec(0.8, 0.5)).isZero());
  CHECK((id.noise_vars - vec(0.8, 1.6)).cwiseAbs().maxCoeff() < 1e-15);

  cfg.min_rates = vec(0.3 * std::numbers::ln2, 0.15 * std::numbers::ln2);
  const EffectiveChannel2 ef = effective_channel_two_user(vec(0.8, 0.5), cfg, 0.3);
  CHECK(std::abs(ef.noise_vars(1) - 1.327803164309157704) < 1e-14);
  CHECK(ef.gains(0) == doctest::Approx(0.8 * std::exp(-0.9 * std::numbers::ln2)).epsilon(1e-14));

  SystemConfig eq = two_user(1.0, 1.0);
  eq.min_rates = vec(0.4, 0.1);
  CHECK(effective_channel_two_user(vec(0.8, 0.5), eq, 0.3).noise_vars(1) == doctest::Approx(1.0));
}
