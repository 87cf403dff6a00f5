#pragma once

// Fading Gaussian multiple-access channel with energy-harvesting transmitters
// and one RF-harvesting receiver, the dual of the broadcast model.

#include "swipt/region.hpp"

#include <functional>
#include <iosfwd>

namespace swipt {

struct MacConfig {
  Vector budgets;         // average energy per slot, one per transmitter
  double noise_var = 1.0;
  Vector min_rates;       // nats/use
  double deficit = 0.0;   // receiver RF requirement E[eta sum_l H(l) T_l] >= deficit
  double efficiency = 1e-4;
  Architecture receiver = Architecture::Ideal;

  Index num_users() const { return budgets.size(); }
  void validate() const;
};

/// Boundary point of the MAC region at `weights`. Per state the rates sit at
/// the vertex of the capacity pentagon that decodes the transmitter with the
/// larger energy price last, which is the cheapest way to realise any rate
/// pair, so no time sharing is needed. `multipliers.lambda` has one entry
/// per transmitter, `theta` one entry; `policy.delivered` holds the single
/// receiver's RF energy and `policy.source_spend` the per-transmitter spend.
BoundaryPoint mac_boundary(const MacConfig& cfg, const JointFadingDistribution& dist,
                           const Vector& weights, const SolverOptions& opts = {},
                           const Multipliers* warm = nullptr);

struct MacTrace {
  std::string label;
  MacConfig config;
  std::vector<TracePoint> points;

  bool complete() const;
  Matrix rate_matrix() const;
  Matrix weight_matrix() const;
};

MacTrace trace_mac_region(const MacConfig& cfg, const JointFadingDistribution& dist,
                          int num_points, const SolverOptions& opts = {},
                          std::string label = {});

void write_mac_trace_csv(std::ostream& os, const MacTrace& trace);

/// Broadcast system with the summed budget and the same receiver-side
/// parameters, noise sigma^2 for every user and the deficit at each receiver.
SystemConfig dual_broadcast_config(const MacConfig& cfg);

struct DualityReport {
  bool contained = true;
  double tolerance = 1e-6;
  double max_violation = 0.0;   // largest distance of a MAC point outside the BC hull
  double max_support_excess = 0.0;
  Index worst_point = -1;
  int refined = 0;              // broadcast points added along violated directions
  std::vector<double> violations;  // per successful MAC point
};

/// Checks that every MAC boundary point lies in the down-closed hull of the
/// broadcast trace. When `refine` is given, a MAC point found outside triggers
/// a broadcast solve at its weight direction before the final verdict.
DualityReport duality_containment(
    const MacTrace& mac, const RegionTrace& bc, double tolerance = 1e-6,
    const std::function<std::optional<Vector>(const Vector& weights)>& refine = {});

void write_duality_report(std::ostream& os, const DualityReport& report);

}  // namespace swipt
