#include "swipt/gbc.hpp"

namespace swipt {

EffectiveChannel2 effective_channel_two_user(const Vector& gains, const SystemConfig& cfg,
                                             double q) {
  if (cfg.num_users() != 2 || gains.size() != 2) {
    throw Unsupported("effective channel transform is only defined for two users");
  }
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidParameter("event probability must lie in [0, 1]");

  const auto order = degradation_order<double>(gains, cfg, HarvestFractions::zeros(2));
  const Index a = order[0];
  const Index b = order[1];
  const Vector& s2 = cfg.noise_vars;
  const Vector& rho = cfg.min_rates;

  EffectiveChannel2 ef;
  ef.q = q;
  ef.q_c = 1.0 - q;
  ef.strong = a;
  ef.p = ((2.0 * rho.array()).exp() - 1.0).matrix();
  ef.gains = gains * std::exp(-2.0 * rho.sum());

  ef.noise_vars.resize(2);
  ef.noise_vars(a) = s2(a);
  ef.noise_vars(b) = (s2(b) - s2(a)) * std::exp(-2.0 * rho(a)) + s2(a);

  // Published aggregate form; it is the same for both events.
  ef.deficits.resize(2);
  ef.deficits(0) = cfg.deficits(0) - s2(0) * ef.p(0) - s2(1) * ef.p(0) * ef.p(1) * ef.q_c;
  ef.deficits(1) = cfg.deficits(1) - s2(1) * ef.p(1) - s2(0) * ef.p(0) * ef.p(1) * ef.q;

  const double na = s2(a) / gains(a);
  const double nb = s2(b) / gains(b);
  ef.normalized_noise.resize(2);
  ef.normalized_noise(a) = std::exp(2.0 * (rho(a) + rho(b))) * na;
  ef.normalized_noise(b) = std::exp(2.0 * rho(b)) * (nb + ef.p(a) * na);
  // A unit of real excess on the strong layer also raises the weak layer's
  // floor energy by p(weak).
  ef.cost_scale = Vector::Ones(2);
  ef.cost_scale(a) = std::exp(2.0 * rho(b));
  return ef;
}

}  // namespace swipt
