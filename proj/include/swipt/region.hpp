#pragma once

#include "swipt/fading.hpp"
#include "swipt/state_solver.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace swipt {

struct SolverOptions {
  int max_multiplier_cycles = 100;
  int max_root_iterations = 200;
  double power_cap_factor = 100.0;  // per-state energy guard, x tx_budget
  int max_fixed_point_iterations = 200;
  double fixed_point_tolerance = 1e-6;
  double damping = 0.5;
  // Weights below this fraction of the largest weight are lifted to it, so a
  // zero-weight user can still absorb energy when its deficit binds.
  double weight_floor = 1e-9;
};

/// Per-state allocation for every joint state plus its aggregates.
struct PowerPolicy {
  Matrix powers;          // states x users
  Matrix rates;           // states x users, nats/use
  Vector average_rates;
  double average_spend = 0.0;
  Vector delivered;       // E[eta H(l) T_l]
  Vector harvested;       // expected RF actually routed to the rectenna
  Vector source_spend;    // per-transmitter spend (multiple access only)
  bool hit_cap = false;
};

struct BoundaryPoint {
  Vector weights;
  Vector rates;
  Multipliers multipliers;
  HarvestFractions fractions;
  PowerPolicy policy;
  double objective = 0.0;  // weights . rates
  int evaluations = 0;     // dual-function evaluations spent
};

struct FeasibilityReport {
  bool feasible = true;
  std::string violated;      // "", "min-rate", "rf-delivery", "harvest-fraction"
  std::string detail;
  double min_spend = 0.0;    // E[sum_l min_rate_powers]
  Vector max_delivery;       // largest attainable E[eta H(l) T_l]
  Vector fraction_bound;     // Delta_l / max_delivery_l
};

FeasibilityReport feasibility_check(const SystemConfig& cfg, const JointFadingDistribution& dist,
                                    const HarvestFractions& fr);
FeasibilityReport feasibility_check(const SystemConfig& cfg, const JointFadingDistribution& dist);

/// Aggregates of an explicit per-state allocation.
PowerPolicy summarize_policy(const SystemConfig& cfg, const JointFadingDistribution& dist,
                             const HarvestFractions& fr, Matrix powers);

/// Boundary point maximising weights . E[R] over the feasible policies at
/// fixed harvest fractions, by dual decomposition over the joint states.
BoundaryPoint solve_boundary(const SystemConfig& cfg, const JointFadingDistribution& dist,
                             const Vector& weights, const HarvestFractions& fr,
                             const SolverOptions& opts = {},
                             const Multipliers* warm = nullptr);

/// Damped fixed point between the policy and pi_E(l) = Delta_l / E[eta H(l) T_l].
/// Ideal users keep pi_E = 0.
BoundaryPoint fixed_point_fractions(const SystemConfig& cfg, const JointFadingDistribution& dist,
                                    const Vector& weights, const SolverOptions& opts = {},
                                    const BoundaryPoint* warm = nullptr);

struct TracePoint {
  double angle = 0.0;
  Vector weights;
  std::optional<BoundaryPoint> point;
  std::string error;      // empty on success
  bool envelope = false;  // point taken from another direction's policy
};

struct RegionTrace {
  std::string label;
  SystemConfig config;
  std::vector<TracePoint> points;

  bool complete() const;
  /// Rates of the successful points, one per row.
  Matrix rate_matrix() const;
  Matrix weight_matrix() const;
};

/// For coupled TS/PS receivers the fixed point at a direction need not be
/// the best achievable policy there. Every traced policy is achievable, so
/// each direction keeps the candidate with the largest weighted rate.
void apply_envelope(std::vector<TracePoint>& points);

/// Weight sweep: mu = (cos phi, sin phi), phi uniform on [0, pi/2] for two
/// users; a uniform simplex grid otherwise.
std::vector<Vector> sweep_weights(Index users, int num_points);

RegionTrace trace_region(const SystemConfig& cfg, const JointFadingDistribution& dist,
                         int num_points, const SolverOptions& opts = {},
                         std::string label = {});

void write_trace_csv(std::ostream& os, const RegionTrace& trace);

}  // namespace swipt
