#pragma once

// Slot-level Monte Carlo of the energy buffers under a stationary policy.

#include "swipt/region.hpp"

#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

namespace swipt {

/// Stationary i.i.d. energy arrivals with a positive almost-sure floor.
struct HarvestProcessSpec {
  enum class Kind { Constant, Uniform, ShiftedExponential };
  Kind kind = Kind::Constant;
  double mean = 1.0;
  double floor = 1.0;  // ignored for Constant

  void validate() const;
  double draw(std::mt19937_64& rng) const;
  static HarvestProcessSpec constant(double mean) { return {Kind::Constant, mean, mean}; }
};

std::string_view to_string(HarvestProcessSpec::Kind kind);
HarvestProcessSpec::Kind harvest_kind_from_string(std::string_view name);

struct SimConfig {
  std::int64_t horizon = 1'000'000;
  std::uint64_t seed = 1;
  HarvestProcessSpec tx_harvest;
  std::vector<HarvestProcessSpec> rx_harvest;      // per receiver, optional
  std::vector<HarvestProcessSpec> rx_consumption;  // per receiver, optional
  double epsilon = 0.0;  // <= 0 selects 1% of the transmitter harvest mean
  double initial_tx_buffer = 0.0;
  int windows = 10;
  bool rescale_policy = false;  // scale an over-budget policy instead of rejecting it

  double margin() const { return epsilon > 0.0 ? epsilon : 0.01 * tx_harvest.mean; }
  void validate(Index users) const;
};

struct SimWindow {
  std::int64_t slots = 0;
  double truncation_fraction = 0.0;
  double avg_spend = 0.0;
  Vector rates;  // nats/use
  Vector rf;     // RF energy routed to each rectenna, per slot
};

struct SimReport {
  std::vector<SimWindow> windows;
  double truncation_fraction = 0.0;
  double empirical_avg_spend = 0.0;
  Vector empirical_rates;
  std::int64_t min_rate_violations = 0;
  Vector rf_harvested;
  Vector ambient_harvested;
  Vector consumed;
  double final_tx_buffer = 0.0;
  Vector final_rx_buffers;
  double drift_slope = 0.0;  // transmitter buffer, second half of the run
  Vector rx_drift_slope;
  std::vector<std::int64_t> rx_deficit_events;
  double policy_scale = 1.0;
  // Exact ledger in units of kEnergyQuantum.
  std::int64_t harvest_quanta = 0;
  std::int64_t spend_quanta = 0;
  std::int64_t initial_quanta = 0;
  std::int64_t final_quanta = 0;

  bool energy_conserved() const {
    return harvest_quanta == spend_quanta + final_quanta - initial_quanta;
  }
};

inline constexpr double kEnergyQuantum = 1.0 / 4294967296.0;  // 2^-32

/// Transmit the plan if the buffer covers its total, else scale every share
/// by available / total.
StateAllocation truncated_policy(double available, const StateAllocation& planned);

/// i.i.d. Bernoulli(p) harvest indicators.
std::vector<std::uint8_t> switching_sequence(std::uint64_t seed, double p, std::int64_t horizon);

SimReport simulate(const SystemConfig& cfg, const PowerPolicy& policy, const HarvestFractions& fr,
                   const JointFadingDistribution& dist, const SimConfig& sim);

void write_window_csv(std::ostream& os, const SimReport& report);

}  // namespace swipt
