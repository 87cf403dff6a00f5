#include "swipt/region.hpp"

#include "roots.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

namespace swipt {

namespace {

constexpr double kDeliveryTol = 1e-9;   // absolute, power units
constexpr double kSpendTol = 1e-6;
constexpr double kSlackTol = 1e-6;

// Flattened per-state layer data for one (config, fractions, weights).
class BroadcastEngine {
 public:
  BroadcastEngine(const SystemConfig& cfg, const JointFadingDistribution& dist,
                  const HarvestFractions& fr, const Vector& weights)
      : cfg_(cfg), dist_(dist), fr_(fr), users_(cfg.num_users()), states_(dist.num_states()) {
    const auto n = static_cast<std::size_t>(users_ * states_);
    count_.assign(static_cast<std::size_t>(states_), 0);
    user_.resize(n);
    noise_.resize(n);
    weight_.resize(n);
    floor_.resize(n);
    eta_gain_.resize(n);
    erasure_.resize(n);
    rates_.assign(n, 0.0);
    powers_.assign(n, 0.0);
    max_eta_gain_ = Vector::Zero(users_);
    omega_.assign(n * static_cast<std::size_t>(users_), 0.0);

    for (Index s = 0; s < states_; ++s) {
      const Vector h = dist.gains.row(s).transpose();
      const auto order = degradation_order<double>(h, cfg, fr);
      std::size_t k = 0;
      for (const Index l : order) {
        const double e = erasure_factor(cfg, fr, l);
        const double g = effective_gain(cfg, fr, l, h(l));
        if (e <= 0.0 || g <= 0.0) {
          if (cfg.min_rates(l) > 0.0) {
            throw Infeasible("erased-receiver",
                             "receiver " + std::to_string(l) +
                                 " cannot decode any slot but has a minimum rate");
          }
          continue;
        }
        const std::size_t at = slot(s, k++);
        user_[at] = l;
        noise_[at] = cfg.noise_vars(l) / g;
        weight_[at] = weights(l) * e;
        floor_[at] = cfg.min_rates(l) / e;
        eta_gain_[at] = cfg.efficiency * h(l);
        erasure_[at] = e;
        max_eta_gain_(l) = std::max(max_eta_gain_(l), eta_gain_[at]);
      }
      count_[static_cast<std::size_t>(s)] = k;
      // Share of layer m in the energy slope of layer k with the weaker
      // layers at their floors; the per-layer price threshold is the
      // omega-weighted mean of theta eta h.
      for (std::size_t a = 0; a < k; ++a) {
        double z = 1.0, prev = 0.0;
        double* w = &omega_[(slot(s, a)) * static_cast<std::size_t>(users_)];
        for (std::size_t m = a; m < k; ++m) {
          if (m > a) z *= std::exp(2.0 * floor_[slot(s, m)]);
          w[m] = z - prev;
          prev = z;
        }
        for (std::size_t m = a; m < k; ++m) w[m] /= z;
      }
    }
  }

  struct Totals {
    double spend = 0.0;
    Vector delivered;
    bool capped = false;
  };

  // Smallest lambda keeping every per-state objective bounded.
  double price_floor(const Vector& theta) const {
    if (!(theta.array() > 0.0).any()) return 0.0;
    double best = 0.0;
    for (Index s = 0; s < states_; ++s) {
      const std::size_t k = count_[static_cast<std::size_t>(s)];
      for (std::size_t a = 0; a < k; ++a) {
        const double* w = &omega_[slot(s, a) * static_cast<std::size_t>(users_)];
        double v = 0.0;
        for (std::size_t m = a; m < k; ++m) {
          const std::size_t at = slot(s, m);
          v += w[m] * theta(user_[at]) * eta_gain_[at];
        }
        best = std::max(best, v);
      }
    }
    return best;
  }

  // Layer costs are gap + (floor - theta_l eta h_l) with floor = price_floor(theta).
  Totals evaluate(double gap, const Vector& theta, double cap) {
    const double floor = price_floor(theta);
    ++evaluations;
    Totals t;
    t.delivered = Vector::Zero(users_);
    std::array<double, 8> small_cost{};
    std::vector<double> big_cost;
    for (Index s = 0; s < states_; ++s) {
      const std::size_t k = count_[static_cast<std::size_t>(s)];
      if (k == 0) continue;
      const std::size_t at = slot(s, 0);
      std::span<double> cost(small_cost.data(), k);
      if (k > small_cost.size()) {
        big_cost.resize(k);
        cost = std::span<double>(big_cost.data(), k);
      }
      for (std::size_t j = 0; j < k; ++j) {
        cost[j] = gap + (floor - theta(user_[at + j]) * eta_gain_[at + j]);
      }
      const layered::Problem problem{{&noise_[at], k}, {&weight_[at], k}, {&floor_[at], k},
                                     {cost.data(), k}};
      if (!layered::bounded(problem)) {
        // Gap below the rounding of the costs: report an unbounded spend.
        t.spend = std::numeric_limits<double>::infinity();
        t.capped = true;
        return t;
      }
      layered::solve(problem, {&rates_[at], k}, {&powers_[at], k});
      const double p = dist_.probs(s);
      double total = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        total += powers_[at + j];
        t.delivered(user_[at + j]) += p * eta_gain_[at + j] * powers_[at + j];
      }
      t.spend += p * total;
      if (total > cap) t.capped = true;
    }
    return t;
  }

  PowerPolicy policy() const {
    Matrix powers = Matrix::Zero(states_, users_);
    for (Index s = 0; s < states_; ++s) {
      for (std::size_t j = 0; j < count_[static_cast<std::size_t>(s)]; ++j) {
        const std::size_t at = slot(s, j);
        powers(s, user_[at]) = powers_[at];
      }
    }
    PowerPolicy pol = summarize_policy(cfg_, dist_, fr_, std::move(powers));
    // Rates straight from the layer solution (identical up to rounding).
    for (Index s = 0; s < states_; ++s) {
      for (std::size_t j = 0; j < count_[static_cast<std::size_t>(s)]; ++j) {
        const std::size_t at = slot(s, j);
        pol.rates(s, user_[at]) = erasure_[at] * rates_[at];
      }
    }
    pol.average_rates = pol.rates.transpose() * dist_.probs;
    return pol;
  }

  int evaluations = 0;

 private:
  std::size_t slot(Index s, std::size_t k) const {
    return static_cast<std::size_t>(s * users_) + k;
  }

  const SystemConfig& cfg_;
  const JointFadingDistribution& dist_;
  const HarvestFractions& fr_;
  Index users_;
  Index states_;
  std::vector<std::size_t> count_;
  std::vector<Index> user_;
  std::vector<double> noise_, weight_, floor_, eta_gain_, erasure_;
  std::vector<double> rates_, powers_;
  std::vector<double> omega_;  // states x users x users
  Vector max_eta_gain_;
};

PowerPolicy blend(const PowerPolicy& a, const PowerPolicy& b, double beta) {
  if (beta >= 1.0) return a;
  PowerPolicy m;
  const double c = 1.0 - beta;
  m.powers = beta * a.powers + c * b.powers;
  m.rates = beta * a.rates + c * b.rates;
  m.average_rates = beta * a.average_rates + c * b.average_rates;
  m.average_spend = beta * a.average_spend + c * b.average_spend;
  m.delivered = beta * a.delivered + c * b.delivered;
  m.harvested = beta * a.harvested + c * b.harvested;
  m.hit_cap = a.hit_cap || b.hit_cap;
  return m;
}

// Dual coordinate search: lambda clears the energy budget for fixed theta;
// each theta_l clears its delivery constraint with lambda re-cleared inside.
// Where spend or a delivery jumps, the solutions on both sides of the jump
// are optimal at the same multipliers and are time-shared.
class DualSolver {
 public:
  DualSolver(BroadcastEngine& engine, const SystemConfig& cfg, const Vector& weights,
             const SolverOptions& opts)
      : engine_(engine), cfg_(cfg), weights_(weights), opts_(opts),
        cap_(opts.power_cap_factor * cfg.tx_budget) {}

  // Clears the budget for fixed theta; returns lambda and updates `gap` and
  // `last` (mixed across a spend jump).
  double clear_budget(const Vector& theta) {
    const double budget = cfg_.tx_budget;
    auto excess = [&](double g) {
      last = engine_.evaluate(g, theta, cap_);
      return last.spend - budget;
    };
    const double floor = engine_.price_floor(theta);
    if (!(gap > 0.0)) gap = weights_.sum() / (2.0 * budget);
    double below = 0.0;
    gap = detail::clear_price(excess, gap, 1e-14 * floor, opts_.max_root_iterations, "energy budget", &below);
    below_gap_ = gap;
    beta_ = 1.0;
    const double ea = last.spend - budget;
    if (below < gap && ea < 0.0 && (floor + gap) * -ea > 1e-3 * kSlackTol) {
      const Totals top = last;
      const Totals b = engine_.evaluate(below, theta, cap_);
      const double eb = b.spend - budget;
      if (eb > 0.0) {
        below_gap_ = below;
        beta_ = eb / (eb - ea);
        last.spend = beta_ * top.spend + (1.0 - beta_) * b.spend;
        last.delivered = beta_ * top.delivered + (1.0 - beta_) * b.delivered;
        last.capped = top.capped || b.capped;
      }
    }
    return floor + gap;
  }

  auto shortfall(Vector& theta, double& lambda, Index l) {
    return [this, &theta, &lambda, l](double t) {
      theta(l) = t;
      lambda = clear_budget(theta);
      return last.delivered(l) - cfg_.deficits(l);
    };
  }

  double guess(const Vector& theta, double lambda, Index l) const {
    const Index users = cfg_.num_users();
    return theta(l) > 0.0 ? theta(l)
                          : 0.5 * lambda / std::max(engine_.price_floor(Vector::Unit(users, l)), 1e-300);
  }

  void solve(Vector& theta, double& lambda) {
    const Index users = cfg_.num_users();
    lambda = clear_budget(theta);
    for (int cycle = 0; cycle < opts_.max_multiplier_cycles; ++cycle) {
      bool changed = false;
      for (Index l = 0; l < users; ++l) {
        const double target = cfg_.deficits(l);
        const double old = theta(l);
        if (target <= 0.0) {
          if (old != 0.0) {
            theta(l) = 0.0;
            lambda = clear_budget(theta);
            changed = true;
          }
          continue;
        }
        const double have = last.delivered(l) - target;
        if (have >= 0.0 && (old == 0.0 || have <= 1e-3 * kDeliveryTol)) continue;
        detail::reach_target(shortfall(theta, lambda, l), guess(theta, lambda, l), opts_.max_root_iterations,
                             "receiver " + std::to_string(l));
        changed = changed || std::abs(theta(l) - old) > 1e-12 * std::max(1.0, old);
      }
      if (!changed) return;
    }
    std::ostringstream msg;
    msg << "multipliers did not settle after " << opts_.max_multiplier_cycles
        << " cycles; spend=" << last.spend << " delivered=" << last.delivered.transpose();
    throw NonConvergence(msg.str());
  }

  // Policy at the solved multipliers, mixed across any remaining delivery jump.
  PowerPolicy policy(Vector& theta, double& lambda) {
    const Vector solved = theta;
    lambda = clear_budget(theta);
    PowerPolicy pol = cleared_policy(theta);
    for (Index l = 0; l < cfg_.num_users(); ++l) {
      const double target = cfg_.deficits(l);
      const double sa = pol.delivered(l) - target;
      if (!(solved(l) > 0.0) || sa <= 0.0 || solved(l) * sa <= 1e-3 * kSlackTol) continue;
      double below = solved(l);
      detail::reach_target(shortfall(theta, lambda, l), solved(l), opts_.max_root_iterations,
                           "receiver " + std::to_string(l), &below);
      const double top = theta(l);
      if (below < top) {
        theta(l) = below;
        clear_budget(theta);
        const PowerPolicy b = cleared_policy(theta);
        const double sb = b.delivered(l) - target;
        theta(l) = top;
        lambda = clear_budget(theta);
        const PowerPolicy a = cleared_policy(theta);
        const double ea = a.delivered(l) - target;
        pol = sb < 0.0 && ea > 0.0 ? blend(a, b, -sb / (ea - sb)) : a;
      }
    }
    return pol;
  }

  double gap = -1.0;  // lambda minus its floor at the last evaluation
  BroadcastEngine::Totals last;

 private:
  using Totals = BroadcastEngine::Totals;

  // Policy of the last clear_budget, including its spend mixture.
  PowerPolicy cleared_policy(const Vector& theta) {
    auto at = [&](double g) {
      const bool capped = engine_.evaluate(g, theta, cap_).capped;
      PowerPolicy p = engine_.policy();
      p.hit_cap = capped;
      return p;
    };
    if (beta_ >= 1.0) return at(gap);
    const PowerPolicy b = at(below_gap_);
    return blend(at(gap), b, beta_);
  }

  BroadcastEngine& engine_;
  const SystemConfig& cfg_;
  const Vector& weights_;
  const SolverOptions& opts_;
  double cap_;
  double below_gap_ = -1.0;
  double beta_ = 1.0;
};

Vector lifted_weights(const Vector& weights, double floor) {
  const double top = weights.maxCoeff();
  if (!(top > 0.0)) throw InvalidParameter("solve_boundary: weights must not all be zero");
  return weights.cwiseMax(floor * top);
}

}  // namespace

PowerPolicy summarize_policy(const SystemConfig& cfg, const JointFadingDistribution& dist,
                             const HarvestFractions& fr, Matrix powers) {
  PowerPolicy pol;
  const Index users = cfg.num_users();
  pol.rates = Matrix::Zero(dist.num_states(), users);
  pol.delivered = Vector::Zero(users);
  pol.harvested = Vector::Zero(users);
  for (Index s = 0; s < dist.num_states(); ++s) {
    const Vector h = dist.gains.row(s).transpose();
    const Vector t = powers.row(s).transpose();
    pol.rates.row(s) = per_state_rates<double>(h, t, cfg, fr).transpose();
    pol.delivered += dist.probs(s) * own_layer_delivery<double>(h, t, cfg);
    pol.harvested += dist.probs(s) * harvested_rf<double>(h, t, cfg, fr);
  }
  pol.average_rates = pol.rates.transpose() * dist.probs;
  pol.average_spend = (powers * Vector::Ones(users)).dot(dist.probs);
  pol.powers = std::move(powers);
  return pol;
}

FeasibilityReport feasibility_check(const SystemConfig& cfg, const JointFadingDistribution& dist,
                                    const HarvestFractions& fr) {
  cfg.validate();
  dist.validate();
  fr.validate(cfg.num_users());
  if (dist.num_users() != cfg.num_users()) {
    throw InvalidParameter("feasibility_check: distribution and config disagree on users");
  }
  const Index users = cfg.num_users();
  FeasibilityReport rep;
  rep.max_delivery = Vector::Zero(users);
  rep.fraction_bound = Vector::Zero(users);
  Vector base = Vector::Zero(users);
  // Best delivery per unit of average energy for each receiver's layer.
  Vector best_ratio = Vector::Zero(users);
  try {
    for (Index s = 0; s < dist.num_states(); ++s) {
      const Vector h = dist.gains.row(s).transpose();
      const Vector t = min_rate_powers<double>(h, cfg, fr);
      rep.min_spend += dist.probs(s) * t.sum();
      base += dist.probs(s) * own_layer_delivery<double>(h, t, cfg);
      const auto order = degradation_order<double>(h, cfg, fr);
      double amplification = 1.0;  // d(total energy)/d(T_l): weaker floors scale with it
      for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const Index l = *it;
        const double e = erasure_factor(cfg, fr, l);
        const double g = effective_gain(cfg, fr, l, h(l));
        if (e <= 0.0 || g <= 0.0) continue;
        best_ratio(l) = std::max(best_ratio(l), cfg.efficiency * h(l) / amplification);
        amplification *= std::exp(2.0 * cfg.min_rates(l) / e);
      }
    }
  } catch (const Infeasible& e) {
    rep.feasible = false;
    rep.violated = "harvest-fraction";
    rep.detail = e.what();
    return rep;
  }
  const double spare = cfg.tx_budget - rep.min_spend;
  if (spare < 0.0) {
    rep.feasible = false;
    rep.violated = "min-rate";
    std::ostringstream msg;
    msg << "minimum-rate energy " << rep.min_spend << " exceeds budget " << cfg.tx_budget;
    rep.detail = msg.str();
  }
  rep.max_delivery = base + std::max(spare, 0.0) * best_ratio;
  for (Index l = 0; l < users; ++l) {
    const double deficit = cfg.deficits(l);
    rep.fraction_bound(l) = deficit > 0.0 ? deficit / rep.max_delivery(l) : 0.0;
    if (!rep.feasible) continue;
    if (deficit > rep.max_delivery(l)) {
      rep.feasible = false;
      rep.violated = "rf-delivery";
      std::ostringstream msg;
      msg << "receiver " << l << " deficit " << deficit << " exceeds deliverable "
          << rep.max_delivery(l);
      rep.detail = msg.str();
    } else if (cfg.arch(l) != Architecture::Ideal && cfg.min_rates(l) > 0.0 &&
               rep.fraction_bound(l) >= 1.0) {
      rep.feasible = false;
      rep.violated = "harvest-fraction";
      rep.detail = "receiver " + std::to_string(l) + " would have to harvest in every slot";
    }
  }
  return rep;
}

FeasibilityReport feasibility_check(const SystemConfig& cfg, const JointFadingDistribution& dist) {
  return feasibility_check(cfg, dist, HarvestFractions::zeros(cfg.num_users()));
}

BoundaryPoint solve_boundary(const SystemConfig& cfg, const JointFadingDistribution& dist,
                             const Vector& weights, const HarvestFractions& fr,
                             const SolverOptions& opts, const Multipliers* warm) {
  const Index users = cfg.num_users();
  if (weights.size() != users || (weights.array() < 0.0).any()) {
    throw InvalidParameter("solve_boundary: weights must be nonnegative, one per user");
  }
  const FeasibilityReport rep = feasibility_check(cfg, dist, fr);
  if (!rep.feasible) throw Infeasible(rep.violated, rep.detail);

  const Vector lifted = lifted_weights(weights, opts.weight_floor);
  BroadcastEngine engine(cfg, dist, fr, lifted);
  DualSolver dual(engine, cfg, lifted, opts);

  Vector theta = Vector::Zero(users);
  double lambda = -1.0;
  if (warm != nullptr && warm->theta.size() == users && warm->lambda.size() == 1) {
    theta = warm->theta;
    dual.gap = warm->lambda(0) - engine.price_floor(theta);
  }
  dual.solve(theta, lambda);

  BoundaryPoint bp;
  bp.policy = dual.policy(theta, lambda);
  bp.weights = weights;
  bp.fractions = fr;
  bp.multipliers.lambda = Vector::Constant(1, lambda);
  bp.multipliers.theta = theta;
  bp.rates = bp.policy.average_rates;
  bp.objective = weights.dot(bp.rates);
  bp.evaluations = engine.evaluations;

  // Dual feasibility and complementary slackness at the returned point.
  const auto& pol = bp.policy;
  std::ostringstream why;
  if (pol.average_spend > cfg.tx_budget + kSpendTol) why << " spend " << pol.average_spend;
  if (std::abs(lambda * (cfg.tx_budget - pol.average_spend)) > kSlackTol) {
    why << " budget slackness " << lambda * (cfg.tx_budget - pol.average_spend);
  }
  for (Index l = 0; l < users; ++l) {
    if (pol.delivered(l) < cfg.deficits(l) - kDeliveryTol) why << " delivery " << l;
    if (std::abs(theta(l) * (pol.delivered(l) - cfg.deficits(l))) > kSlackTol) {
      why << " delivery slackness " << l;
    }
  }
  if (pol.hit_cap) why << " per-state energy cap reached";
  if (!why.str().empty()) throw NonConvergence("boundary point rejected:" + why.str());
  return bp;
}

BoundaryPoint fixed_point_fractions(const SystemConfig& cfg, const JointFadingDistribution& dist,
                                    const Vector& weights, const SolverOptions& opts,
                                    const BoundaryPoint* warm) {
  const Index users = cfg.num_users();
  HarvestFractions fr = HarvestFractions::zeros(users);
  const Multipliers* prices = nullptr;
  if (warm != nullptr && warm->fractions.harvest.size() == users) {
    fr = warm->fractions;
    prices = &warm->multipliers;
  }
  if (!cfg.needs_fractions()) {
    return solve_boundary(cfg, dist, weights, HarvestFractions::zeros(users), opts, prices);
  }
  std::vector<Vector> trajectory;
  BoundaryPoint bp;
  // Per-user step: halved when that user's residual changes sign, regrown
  // while it keeps its sign.
  Vector step = Vector::Constant(users, opts.damping);
  Vector last_residual = Vector::Zero(users);
  bool repairing = false;
  for (int it = 0; it < opts.max_fixed_point_iterations; ++it) {
    bp = solve_boundary(cfg, dist, weights, fr, opts, prices);
    prices = &bp.multipliers;
    Vector target = Vector::Zero(users);
    for (Index l = 0; l < users; ++l) {
      if (cfg.arch(l) == Architecture::Ideal || cfg.deficits(l) <= 0.0) continue;
      const double delivered = bp.policy.delivered(l);
      target(l) = delivered > 0.0 ? std::min(1.0, cfg.deficits(l) / delivered) : 1.0;
    }
    const Vector residual = target - fr.harvest;
    if (residual.cwiseAbs().maxCoeff() < opts.fixed_point_tolerance) return bp;
    trajectory.push_back(fr.harvest);
    for (Index l = 0; l < users; ++l) {
      if (residual(l) * last_residual(l) < 0.0) {
        step(l) *= 0.5;
      } else {
        step(l) = std::min(opts.damping, 2.0 * step(l));
      }
    }
    last_residual = residual;
    // Across a jump of the map the steps collapse, and near one the iterates
    // can cycle. Then raise the fractions until every receiver harvests at
    // least its deficit.
    repairing = repairing || 4 * it >= opts.max_fixed_point_iterations ||
                step.cwiseProduct(residual).cwiseAbs().maxCoeff() < opts.fixed_point_tolerance;
    if (repairing) {
      if ((residual.array() <= opts.fixed_point_tolerance).all()) return bp;
      fr.harvest = fr.harvest.cwiseMax(target);
      continue;
    }
    fr.harvest += step.cwiseProduct(residual);
  }
  std::ostringstream msg;
  msg << "harvest fractions did not converge; trajectory:";
  for (const auto& v : trajectory) msg << " [" << v.transpose() << "]";
  throw NonConvergence(msg.str());
}

bool RegionTrace::complete() const {
  for (const auto& p : points) {
    if (!p.point) return false;
  }
  return true;
}

Matrix RegionTrace::rate_matrix() const {
  std::vector<const BoundaryPoint*> ok;
  for (const auto& p : points) {
    if (p.point) ok.push_back(&*p.point);
  }
  Matrix out(static_cast<Index>(ok.size()), config.num_users());
  for (std::size_t i = 0; i < ok.size(); ++i) out.row(static_cast<Index>(i)) = ok[i]->rates.transpose();
  return out;
}

Matrix RegionTrace::weight_matrix() const {
  std::vector<const Vector*> ok;
  for (const auto& p : points) {
    if (p.point) ok.push_back(&p.weights);
  }
  Matrix out(static_cast<Index>(ok.size()), config.num_users());
  for (std::size_t i = 0; i < ok.size(); ++i) out.row(static_cast<Index>(i)) = ok[i]->transpose();
  return out;
}

std::vector<Vector> sweep_weights(Index users, int num_points) {
  if (num_points < 2) throw InvalidParameter("trace: at least two points required");
  std::vector<Vector> out;
  if (users == 1) {
    out.assign(static_cast<std::size_t>(num_points), Vector::Ones(1));
    return out;
  }
  if (users == 2) {
    for (int i = 0; i < num_points; ++i) {
      Vector w(2);
      if (i == 0) {
        w << 1.0, 0.0;
      } else if (i == num_points - 1) {
        w << 0.0, 1.0;
      } else {
        const double phi = 0.5 * std::numbers::pi * i / (num_points - 1);
        w << std::cos(phi), std::sin(phi);
      }
      out.push_back(w);
    }
    return out;
  }
  // Simplex grid with resolution 1/m, smallest m giving num_points weights.
  int m = 1;
  auto count = [&](int res) {
    double c = 1.0;
    for (Index k = 1; k < users; ++k) c = c * static_cast<double>(res + k) / static_cast<double>(k);
    return c;
  };
  while (count(m) < num_points) ++m;
  std::vector<int> parts(static_cast<std::size_t>(users), 0);
  auto recurse = [&](auto&& self, Index pos, int left) -> void {
    if (pos == users - 1) {
      parts[static_cast<std::size_t>(pos)] = left;
      Vector w(users);
      for (Index k = 0; k < users; ++k) w(k) = static_cast<double>(parts[static_cast<std::size_t>(k)]) / m;
      out.push_back(w);
      return;
    }
    for (int v = left; v >= 0; --v) {
      parts[static_cast<std::size_t>(pos)] = v;
      self(self, pos + 1, left - v);
    }
  };
  recurse(recurse, 0, m);
  return out;
}

void apply_envelope(std::vector<TracePoint>& points) {
  std::vector<BoundaryPoint> candidates;
  for (const auto& tp : points) {
    if (tp.point) candidates.push_back(*tp.point);
  }
  for (auto& tp : points) {
    if (!tp.point) continue;
    const Vector& w = tp.weights;
    double best = w.dot(tp.point->rates);
    const BoundaryPoint* pick = nullptr;
    for (const auto& c : candidates) {
      const double value = w.dot(c.rates);
      if (value > best + 1e-12 * std::max(1.0, std::abs(best))) {
        best = value;
        pick = &c;
      }
    }
    if (pick == nullptr) continue;
    tp.point = *pick;
    tp.point->weights = w;
    tp.point->objective = best;
    tp.envelope = true;
  }
}

RegionTrace trace_region(const SystemConfig& cfg, const JointFadingDistribution& dist,
                         int num_points, const SolverOptions& opts, std::string label) {
  RegionTrace trace;
  trace.label = std::move(label);
  trace.config = cfg;
  const auto weights = sweep_weights(cfg.num_users(), num_points);
  trace.points.reserve(weights.size());  // warm points into it stay valid
  const BoundaryPoint* warm = nullptr;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    TracePoint tp;
    tp.weights = weights[i];
    tp.angle = cfg.num_users() == 2 ? std::atan2(weights[i](1), weights[i](0))
                                    : static_cast<double>(i);
    try {
      tp.point = fixed_point_fractions(cfg, dist, weights[i], opts, warm);
    } catch (const Error& e) {
      tp.error = e.what();
    }
    trace.points.push_back(std::move(tp));
    if (trace.points.back().point) warm = &*trace.points.back().point;
  }
  if (cfg.needs_fractions()) apply_envelope(trace.points);
  return trace;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string sanitize(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ';';
  }
  return s;
}

}  // namespace

void write_trace_csv(std::ostream& os, const RegionTrace& trace) {
  const Index users = trace.config.num_users();
  os << "phi";
  for (Index l = 1; l <= users; ++l) os << ",mu" << l;
  for (Index l = 1; l <= users; ++l) os << ",R" << l;
  for (Index l = 1; l <= users; ++l) os << ",R" << l << "_kbps";
  os << ",lambda";
  for (Index l = 1; l <= users; ++l) os << ",theta" << l;
  for (Index l = 1; l <= users; ++l) os << ",piE" << l;
  os << ",avg_spend";
  for (Index l = 1; l <= users; ++l) os << ",delivered" << l;
  os << ",status\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& tp : trace.points) {
    os << fmt(tp.angle);
    for (Index l = 0; l < users; ++l) os << ',' << fmt(tp.weights(l));
    const BoundaryPoint* bp = tp.point ? &*tp.point : nullptr;
    for (Index l = 0; l < users; ++l) os << ',' << fmt(bp ? bp->rates(l) : nan);
    for (Index l = 0; l < users; ++l) os << ',' << fmt(bp ? nats_to_kbps(bp->rates(l)) : nan);
    os << ',' << fmt(bp ? bp->multipliers.lambda(0) : nan);
    for (Index l = 0; l < users; ++l) os << ',' << fmt(bp ? bp->multipliers.theta(l) : nan);
    for (Index l = 0; l < users; ++l) os << ',' << fmt(bp ? bp->fractions.harvest(l) : nan);
    os << ',' << fmt(bp ? bp->policy.average_spend : nan);
    for (Index l = 0; l < users; ++l) os << ',' << fmt(bp ? bp->policy.delivered(l) : nan);
    os << ',' << (bp ? std::string(tp.envelope ? "envelope" : "ok") : sanitize(tp.error)) << '\n';
  }
}

}  // namespace swipt
