#include "swipt/state_solver.hpp"

#include <array>
#include <cmath>
#include <limits>

namespace swipt {
namespace layered {

namespace {

// Rate of an unconstrained layer at its stationary point, clamped to the floor.
double clamp_to_floor(double weight, double price_times_noise, double floor) {
  if (weight <= 0.0) return floor;
  const double u = 0.5 * std::log(weight / (2.0 * price_times_noise));
  return u > floor ? u : floor;
}

double solve_one(const Problem& p, std::span<double> rates, std::span<double> powers) {
  rates[0] = clamp_to_floor(p.weight[0], p.cost[0] * p.noise[0], p.floor[0]);
  return evaluate(p, rates, powers);
}

double solve_two(const Problem& p, std::span<double> rates, std::span<double> powers) {
  const double na = p.noise[0], nb = p.noise[1];
  const double wa = p.weight[0], wb = p.weight[1];
  const double ca = p.cost[0], cb = p.cost[1];
  const double fa = p.floor[0], fb = p.floor[1];
  const double x_min = std::exp(2.0 * fa);
  const double z_min = std::exp(2.0 * fb);
  const double m = nb - na;

  // Candidate values of x = e^{2 u_a}; the weak layer is then optimal in
  // closed form. The per-state value is C^1 in x and -> -inf as x -> inf, so
  // its maximiser is x_min or a stationary point of one of the two regimes.
  std::array<double, 6> xs{};
  std::size_t count = 0;
  xs[count++] = x_min;
  if (wa > 0.0) {
    // weak layer pinned to its floor
    xs[count++] = wa / (2.0 * na * (ca + cb * (z_min - 1.0)));
  }
  if (wb > 0.0) {
    // weak layer above its floor: -2(ca-cb) na^2 x^2 + [na(wa-wb) - 2(ca-cb) na m] x + wa m = 0
    xs[count++] = 1.0 + (wb / (2.0 * cb * z_min) - nb) / na;  // regime switch
    const double dc = ca - cb;
    const double qa = -2.0 * dc * na * na;
    const double qb = na * (wa - wb) - 2.0 * dc * na * m;
    const double qc = wa * m;
    const double scale = std::abs(qb) + std::abs(qc) + std::abs(qa);
    if (std::abs(qa) <= 1e-14 * scale) {
      if (qb != 0.0) xs[count++] = -qc / qb;
    } else {
      const double disc = qb * qb - 4.0 * qa * qc;
      if (disc >= 0.0) {
        const double q = -0.5 * (qb + std::copysign(std::sqrt(disc), qb));
        if (q != 0.0) {
          xs[count++] = q / qa;
          xs[count++] = qc / q;
        } else {
          xs[count++] = 0.0;
        }
      }
    }
  }

  double best = -std::numeric_limits<double>::infinity();
  std::array<double, 2> u{};
  std::array<double, 2> t{};
  for (std::size_t i = 0; i < count; ++i) {
    const double x = xs[i];
    if (!std::isfinite(x)) continue;
    u[0] = (i == 0 || x <= x_min) ? fa : 0.5 * std::log(x);
    const double ta = std::expm1(2.0 * u[0]) * na;
    u[1] = clamp_to_floor(wb, cb * (nb + ta), fb);
    const double value = evaluate(p, u, t);
    if (value > best) {
      best = value;
      rates[0] = u[0];
      rates[1] = u[1];
      powers[0] = t[0];
      powers[1] = t[1];
    }
  }
  return best;
}

}  // namespace

double evaluate(const Problem& p, std::span<const double> rates, std::span<double> powers) {
  double stronger = 0.0;
  double value = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    powers[k] = std::expm1(2.0 * rates[k]) * (p.noise[k] + stronger);
    stronger += powers[k];
    value += p.weight[k] * rates[k] - p.cost[k] * powers[k];
  }
  return value;
}

double coordinate_ascent(const Problem& p, std::span<double> rates, std::span<double> powers,
                         int max_sweeps) {
  const std::size_t layers = p.size();
  std::vector<double> growth(layers);
  for (std::size_t k = 0; k < layers; ++k) growth[k] = std::exp(2.0 * rates[k]);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double change = 0.0;
    double magnitude = 1.0;
    for (std::size_t k = 0; k < layers; ++k) {
      double prefix = 0.0;  // energy of the layers stronger than k
      for (std::size_t j = 0; j < k; ++j) prefix = growth[j] * (prefix + p.noise[j]) - p.noise[j];
      // Total cost is linear in the cumulative energy S_k with slope
      // sum_{m>=k} (c_m - c_{m+1}) prod_{k<j<=m} e^{2 u_j}, positive whenever
      // it is positive with the weaker layers at their floors.
      double slope = 0.0;
      double amplification = 1.0;
      for (std::size_t m = k; m < layers; ++m) {
        if (m > k) amplification *= growth[m];
        const double next = (m + 1 < layers) ? p.cost[m + 1] : 0.0;
        slope += (p.cost[m] - next) * amplification;
      }
      const double updated = clamp_to_floor(p.weight[k], slope * (prefix + p.noise[k]), p.floor[k]);
      change = std::max(change, std::abs(updated - rates[k]));
      magnitude = std::max(magnitude, std::abs(updated));
      rates[k] = updated;
      growth[k] = std::exp(2.0 * updated);
    }
    if (change <= 1e-15 * magnitude) break;
  }
  return evaluate(p, rates, powers);
}

bool bounded(const Problem& p) {
  // Energy slope of each layer with every weaker layer at its floor:
  // W_k = c_k - c_{k+1} + e^{2 f_{k+1}} W_{k+1}, W_{K-1} = c_{K-1}.
  double slope = 0.0;
  for (std::size_t k = p.size(); k-- > 0;) {
    slope = k + 1 < p.size() ? p.cost[k] - p.cost[k + 1] + std::exp(2.0 * p.floor[k + 1]) * slope
                             : p.cost[k];
    if (!(slope > 0.0)) return false;
  }
  return true;
}

double solve(const Problem& p, std::span<double> rates, std::span<double> powers) {
  if (!bounded(p)) throw UnboundedObjective("layer energy price is not positive");
  switch (p.size()) {
    case 0: return 0.0;
    case 1: return solve_one(p, rates, powers);
    case 2: return solve_two(p, rates, powers);
    default: break;
  }
  const std::size_t layers = p.size();
  std::vector<double> u(layers), t(layers);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t start = 0; start <= layers; ++start) {
    for (std::size_t k = 0; k < layers; ++k) u[k] = p.floor[k];
    if (start < layers) {
      // all excess initially on one layer
      u[start] = clamp_to_floor(p.weight[start], p.cost[start] * p.noise[start], p.floor[start]);
    }
    const double value = coordinate_ascent(p, u, t);
    if (value > best) {
      best = value;
      std::copy(u.begin(), u.end(), rates.begin());
      std::copy(t.begin(), t.end(), powers.begin());
    }
  }
  return best;
}

}  // namespace layered

StateSolution per_state_allocation(const Vector& gains, const Vector& weights,
                                   const Multipliers& mult, const SystemConfig& cfg,
                                   const HarvestFractions& fr) {
  const Index users = cfg.num_users();
  if (gains.size() != users || weights.size() != users) {
    throw InvalidParameter("per_state_allocation: dimension mismatch");
  }
  if (mult.lambda.size() != 1 || mult.theta.size() != users) {
    throw InvalidParameter("per_state_allocation: multiplier dimension mismatch");
  }
  if (mult.lambda(0) < 0.0 || (mult.theta.array() < 0.0).any()) {
    throw InvalidParameter("per_state_allocation: multipliers must be nonnegative");
  }

  const auto order = degradation_order<double>(gains, cfg, fr);
  std::vector<Index> active;
  std::vector<double> noise, weight, floor, cost, erasure;
  StateSolution out{Vector::Zero(users), Vector::Zero(users), 0.0};
  for (const Index l : order) {
    const double e = erasure_factor(cfg, fr, l);
    const double g = effective_gain(cfg, fr, l, gains(l));
    if (e <= 0.0 || g <= 0.0) {
      if (cfg.min_rates(l) > 0.0) {
        throw Infeasible("erased-receiver", "receiver " + std::to_string(l) +
                                                " cannot decode but has a minimum rate");
      }
      continue;
    }
    active.push_back(l);
    noise.push_back(cfg.noise_vars(l) / g);
    weight.push_back(weights(l) * e);
    floor.push_back(cfg.min_rates(l) / e);
    cost.push_back(mult.lambda(0) - mult.theta(l) * cfg.efficiency * gains(l));
  }
  std::vector<double> u(active.size()), t(active.size());
  layered::solve({noise, weight, floor, cost}, u, t);
  for (std::size_t k = 0; k < active.size(); ++k) {
    const Index l = active[k];
    out.rates(l) = erasure_factor(cfg, fr, l) * u[k];
    out.powers(l) = t[k];
  }
  out.objective = weights.dot(out.rates) +
                  mult.theta.dot(own_layer_delivery<double>(gains, out.powers, cfg)) -
                  mult.lambda(0) * out.powers.sum();
  return out;
}

}  // namespace swipt
