#pragma once

// Per-state rate / power / harvest algebra of the degraded fading broadcast
// channel. All functions are pure and templated on the scalar type so tests
// can re-evaluate them in extended precision.

#include "swipt/system.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace swipt {

using StateAllocation = Vector;  // per-user energy per slot in one joint state

template <typename Scalar>
Scalar effective_gain(const SystemConfig& cfg, const HarvestFractions& fr, Index l,
                      const Scalar& gain) {
  return cfg.arch(l) == Architecture::PowerSplitting ? Scalar(fr.complement(l)) * gain
                                                      : gain;
}

/// Multiplier applied to the per-slot rate by the TS erasure channel.
inline double erasure_factor(const SystemConfig& cfg, const HarvestFractions& fr, Index l) {
  return cfg.arch(l) == Architecture::TimeSwitching ? fr.complement(l) : 1.0;
}

/// Users sorted strongest first by gain-to-noise ratio (PS gains scaled by
/// 1 - pi_E). Ties keep ascending user index.
template <typename Scalar>
std::vector<Index> degradation_order(const VectorX<Scalar>& gains, const SystemConfig& cfg,
                                     const HarvestFractions& fr) {
  const Index users = cfg.num_users();
  std::vector<Index> order(static_cast<std::size_t>(users));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    const Scalar ga = effective_gain(cfg, fr, a, gains(a));
    const Scalar gb = effective_gain(cfg, fr, b, gains(b));
    return ga * Scalar(cfg.noise_vars(b)) > gb * Scalar(cfg.noise_vars(a));
  });
  return order;
}

/// Achievable per-state rates (nats/use) under superposition coding with
/// successive decoding along the degradation order.
template <typename Scalar>
VectorX<Scalar> per_state_rates(const VectorX<Scalar>& gains, const VectorX<Scalar>& powers,
                                const SystemConfig& cfg, const HarvestFractions& fr) {
  using std::log1p;
  const auto order = degradation_order(gains, cfg, fr);
  VectorX<Scalar> rates = VectorX<Scalar>::Zero(cfg.num_users());
  Scalar stronger(0);
  for (const Index l : order) {
    const Scalar g = effective_gain(cfg, fr, l, gains(l));
    if (g > Scalar(0)) {
      const Scalar snr = g * powers(l) / (Scalar(cfg.noise_vars(l)) + g * stronger);
      rates(l) = Scalar(erasure_factor(cfg, fr, l)) * log1p(snr) / Scalar(2);
    }
    stronger += powers(l);
  }
  return rates;
}

/// Exact inverse of per_state_rates: minimum energies realising `rates`.
template <typename Scalar>
VectorX<Scalar> power_for_rates(const VectorX<Scalar>& gains, const VectorX<Scalar>& rates,
                                const SystemConfig& cfg, const HarvestFractions& fr) {
  using std::expm1;
  const auto order = degradation_order(gains, cfg, fr);
  VectorX<Scalar> powers = VectorX<Scalar>::Zero(cfg.num_users());
  Scalar stronger(0);
  for (const Index l : order) {
    if (rates(l) < Scalar(0)) throw InvalidParameter("power_for_rates: negative rate");
    if (rates(l) > Scalar(0)) {
      const Scalar erasure(erasure_factor(cfg, fr, l));
      const Scalar g = effective_gain(cfg, fr, l, gains(l));
      if (erasure <= Scalar(0) || g <= Scalar(0)) {
        throw Infeasible("erased-receiver",
                         "receiver " + std::to_string(l) +
                             " harvests every slot (pi_E = 1) but needs a positive rate");
      }
      const Scalar layer_rate = rates(l) / erasure;
      powers(l) = expm1(Scalar(2) * layer_rate) *
                  (Scalar(cfg.noise_vars(l)) / g + stronger);
    }
    stronger += powers(l);
  }
  return powers;
}

template <typename Scalar>
VectorX<Scalar> min_rate_powers(const VectorX<Scalar>& gains, const SystemConfig& cfg,
                                const HarvestFractions& fr) {
  return power_for_rates<Scalar>(gains, cfg.min_rates.cast<Scalar>(), cfg, fr);
}

/// Expected RF energy harvested per slot by each receiver. The rectenna sees
/// the whole transmitted symbol, so the harvest depends on the total energy.
template <typename Scalar>
VectorX<Scalar> harvested_rf(const VectorX<Scalar>& gains, const VectorX<Scalar>& powers,
                             const SystemConfig& cfg, const HarvestFractions& fr) {
  const Scalar total = powers.sum();
  VectorX<Scalar> out(cfg.num_users());
  for (Index l = 0; l < cfg.num_users(); ++l) {
    const Scalar share = cfg.arch(l) == Architecture::Ideal ? Scalar(1) : Scalar(fr.harvest(l));
    out(l) = share * Scalar(cfg.efficiency) * gains(l) * total;
  }
  return out;
}

/// RF energy credited to receiver l by its own layer, eta * h(l) * T_l. This
/// is the quantity constrained against the deficit by the region solver.
template <typename Scalar>
VectorX<Scalar> own_layer_delivery(const VectorX<Scalar>& gains, const VectorX<Scalar>& powers,
                                   const SystemConfig& cfg) {
  return (Scalar(cfg.efficiency) * gains.array() * powers.array()).matrix();
}

/// Two-user effective channel that absorbs the minimum-rate energy.
///
/// `noise_vars`, `gains` and `deficits` follow the closed form published for
/// the two-receiver example, with the strongest receiver of the state playing
/// the role of receiver 1. `normalized_noise` is the exact transform of the
/// state, including the gain ratio h(weak)/h(strong) that the closed form
/// drops; with it, excess energies placed on the effective channel reproduce
/// the direct per-state rates.
struct EffectiveChannel2 {
  Vector gains;             // H_ef(l) = H(l) e^{-2 rho(1) - 2 rho(2)}
  Vector noise_vars;        // published closed form
  Vector deficits;          // published closed form, uses q / q_c
  Vector normalized_noise;  // exact sigma_ef^2 / H_ef per user
  double q = 0.0;           // probability of E_{1,2}
  double q_c = 1.0;
  Vector p;                 // e^{2 rho(l)} - 1
  Index strong = 0;         // receiver acting as "receiver 1"
  // Effective excess of layer l is cost_scale(l) times its real excess
  // energy; total energy = minimum-rate energy + sum of effective excesses.
  Vector cost_scale;
};

EffectiveChannel2 effective_channel_two_user(const Vector& gains, const SystemConfig& cfg,
                                             double q);

/// Probability that receiver 2 is strictly stronger than receiver 1
/// (event E_{1,2} = {sigma_1^2 H(2) > sigma_2^2 H(1)}).
template <typename Dist>
double event_probability_e12(const Dist& dist, const SystemConfig& cfg) {
  double q = 0.0;
  for (Index s = 0; s < dist.num_states(); ++s) {
    if (cfg.noise_vars(0) * dist.gains(s, 1) > cfg.noise_vars(1) * dist.gains(s, 0)) {
      q += dist.probs(s);
    }
  }
  return q;
}

}  // namespace swipt
