#pragma once

#include "swipt/gbc.hpp"

#include <span>

namespace swipt {

/// Dual prices. For the broadcast channel `lambda` has one entry (total
/// energy); the multiple-access solver uses one per transmitter. `theta`
/// rewards RF delivery, one entry per energy constraint.
struct Multipliers {
  Vector lambda;
  Vector theta;
};

struct StateSolution {
  Vector rates;            // nats/use, erasure-scaled for TS receivers
  StateAllocation powers;
  double objective = 0.0;  // per-state Lagrangian value
};

/// Degraded layered problem in one state, layers sorted strongest first:
///
///   maximise  sum_k weight_k u_k - sum_k cost_k T_k   s.t. u_k >= floor_k
///
/// where layer k sees normalized noise noise_k plus the energy of all
/// stronger layers: T_k = (e^{2 u_k} - 1) (noise_k + sum_{j<k} T_j).
/// `noise` must be nondecreasing; see `bounded` for the admissible costs.
namespace layered {

struct Problem {
  std::span<const double> noise;
  std::span<const double> weight;
  std::span<const double> floor;
  std::span<const double> cost;

  std::size_t size() const { return noise.size(); }
};

/// True when every layer's energy slope is positive with the weaker layers
/// at their floors, i.e. the objective is bounded above. Individual costs may
/// be negative.
bool bounded(const Problem& p);

/// Global maximiser. Closed form for one layer; for two layers every
/// stationary point is enumerated (roots of a quadratic in e^{2 u_0}); longer
/// chains use multi-start coordinate ascent. Returns the objective.
double solve(const Problem& p, std::span<double> rates, std::span<double> powers);

/// Cyclic coordinate ascent with exact coordinate maximisation, started from
/// `rates` (which must be feasible). Returns the objective.
double coordinate_ascent(const Problem& p, std::span<double> rates, std::span<double> powers,
                         int max_sweeps = 2000);

/// Energies of the layers at the given rates; returns the objective.
double evaluate(const Problem& p, std::span<const double> rates, std::span<double> powers);

}  // namespace layered

/// Maximiser of mu.r + sum_l theta_l eta h_l T_l - lambda sum_l T_l over
/// per-state rate vectors r >= rho, with energies from power_for_rates.
/// Throws UnboundedObjective when the objective is unbounded: some layer's
/// energy price, counting the floor energy it forces on weaker layers, is not
/// positive.
StateSolution per_state_allocation(const Vector& gains, const Vector& weights,
                                   const Multipliers& mult, const SystemConfig& cfg,
                                   const HarvestFractions& fr);

}  // namespace swipt
