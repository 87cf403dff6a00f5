#pragma once

#include "swipt/types.hpp"

#include <optional>
#include <vector>

namespace swipt {

/// Channel uses per second; one slot is one microsecond.
inline constexpr double kChannelUsesPerSecond = 1e6;

double kbps_to_nats(double kbps);
double nats_to_kbps(double nats);

/// Scalar model parameters of the L-user broadcast system. Rates are in nats
/// per real channel use, energies in watts per unit slot.
struct SystemConfig {
  Vector noise_vars;
  Vector min_rates;
  Vector deficits;
  double efficiency = 1e-4;
  double tx_budget = 1.0;
  std::vector<Architecture> architectures;
  // Optional receiver energy means. When present, deficits are derived from
  // them (see derive_deficits).
  std::optional<Vector> rx_ambient_mean;
  std::optional<Vector> rx_consumption_mean;

  Index num_users() const { return noise_vars.size(); }
  Architecture arch(Index l) const { return architectures[static_cast<std::size_t>(l)]; }
  bool all_ideal() const;
  bool needs_fractions() const;  // some TS/PS user with a positive deficit
  void validate() const;
  /// Sets deficits = max(0, consumption - ambient) from the optional means.
  void derive_deficits();
};

SystemConfig make_config(Vector noise_vars, Vector min_rates, Vector deficits,
                         double efficiency, double tx_budget,
                         std::vector<Architecture> architectures);

/// pi_E(l) per user: fraction of slots (TS) or of received power (PS) routed
/// to the rectenna.
struct HarvestFractions {
  Vector harvest;

  static HarvestFractions zeros(Index users) { return {Vector::Zero(users)}; }
  Vector complement() const { return Vector::Ones(harvest.size()) - harvest; }
  double complement(Index l) const { return 1.0 - harvest(l); }
  void validate(Index users) const;
};

}  // namespace swipt
