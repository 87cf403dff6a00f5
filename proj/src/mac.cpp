#include "swipt/mac.hpp"

#include "swipt/hull.hpp"
#include "swipt/system.hpp"

#include "roots.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

namespace swipt {

namespace {

constexpr double kDeliveryTol = 1e-9;
constexpr double kSpendTol = 1e-6;
constexpr double kSlackTol = 1e-6;

// Per-state vertex solutions for given transmitter prices.
class MacEngine {
 public:
  MacEngine(const MacConfig& cfg, const JointFadingDistribution& dist, const Vector& weights)
      : cfg_(cfg), dist_(dist), weights_(weights), users_(cfg.num_users()),
        states_(dist.num_states()), max_gain_(dist.gains.colwise().maxCoeff().transpose()),
        rates_(states_, users_), snr_(states_, users_) {}

  struct Totals {
    Vector spend;
    double delivered = 0.0;
    bool capped = false;
  };

  // Smallest lambda_l keeping the reward-adjusted price of transmitter l positive.
  Vector price_floor(double theta) const { return theta * cfg_.efficiency * max_gain_; }

  Totals evaluate(const Vector& lambda, double theta, double cap) {
    ++evaluations;
    Totals t;
    t.spend = Vector::Zero(users_);
    const std::size_t k = static_cast<std::size_t>(users_);
    std::vector<double> noise(k, 1.0), weight(k), floor(k), cost(k), u(k), y(k);
    std::vector<Index> order(k);
    Vector price(users_);
    for (Index s = 0; s < states_; ++s) {
      for (Index l = 0; l < users_; ++l) {
        const double h = dist_.gains(s, l);
        // Price per unit of received SNR.
        price(l) = (lambda(l) - theta * cfg_.efficiency * h) * cfg_.noise_var / h;
      }
      std::iota(order.begin(), order.end(), Index{0});
      std::stable_sort(order.begin(), order.end(),
                       [&](Index a, Index b) { return price(a) > price(b); });
      for (std::size_t j = 0; j < k; ++j) {
        weight[j] = weights_(order[j]);
        floor[j] = cfg_.min_rates(order[j]);
        cost[j] = price(order[j]);
      }
      const layered::Problem problem{noise, weight, floor, cost};
      if (!layered::bounded(problem)) {
        t.spend.setConstant(std::numeric_limits<double>::infinity());
        t.capped = true;
        return t;
      }
      layered::solve(problem, u, y);
      const double p = dist_.probs(s);
      double total = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        const Index l = order[j];
        const double h = dist_.gains(s, l);
        const double energy = y[j] * cfg_.noise_var / h;
        rates_(s, l) = u[j];
        snr_(s, l) = y[j];
        total += energy;
        t.spend(l) += p * energy;
        t.delivered += p * cfg_.efficiency * h * energy;
      }
      if (total > cap) t.capped = true;
    }
    return t;
  }

  void snapshot(Matrix& rates, Matrix& snr) const {
    rates = rates_;
    snr = snr_;
  }

  PowerPolicy policy(const Matrix& rates, const Matrix& snr) const {
    PowerPolicy pol;
    pol.powers = Matrix(states_, users_);
    for (Index s = 0; s < states_; ++s) {
      for (Index l = 0; l < users_; ++l) {
        pol.powers(s, l) = snr(s, l) * cfg_.noise_var / dist_.gains(s, l);
      }
    }
    pol.rates = rates;
    pol.average_rates = rates.transpose() * dist_.probs;
    pol.source_spend = pol.powers.transpose() * dist_.probs;
    pol.average_spend = pol.source_spend.sum();
    const Vector received = (pol.powers.cwiseProduct(dist_.gains)).rowwise().sum();
    pol.delivered = Vector::Constant(1, cfg_.efficiency * received.dot(dist_.probs));
    pol.harvested = pol.delivered;
    return pol;
  }

  int evaluations = 0;

 private:
  const MacConfig& cfg_;
  const JointFadingDistribution& dist_;
  const Vector& weights_;
  Index users_;
  Index states_;
  Vector max_gain_;
  Matrix rates_, snr_;
};

// A stationary policy, possibly a time-shared mixture of per-state vertex
// solutions at (numerically) equal prices.
struct Mix {
  Matrix rates, snr;
  Vector spend;
  double delivered = 0.0;
  bool capped = false;
};

Mix blend(const Mix& a, const Mix& b, double beta) {
  if (beta >= 1.0) return a;
  Mix m;
  m.rates = beta * a.rates + (1.0 - beta) * b.rates;
  m.snr = beta * a.snr + (1.0 - beta) * b.snr;
  m.spend = beta * a.spend + (1.0 - beta) * b.spend;
  m.delivered = beta * a.delivered + (1.0 - beta) * b.delivered;
  m.capped = a.capped || b.capped;
  return m;
}

// Weight on `a` (excess ea <= 0) that zeroes the mixed excess against `b`
// (eb > 0).
double zero_weight(double ea, double eb) {
  return eb - ea > 0.0 && ea < 0.0 ? eb / (eb - ea) : 1.0;
}

// Prices are nested: the outer search clears transmitter 0's budget, the
// inner one transmitter 1's, and a root search on the delivery reward wraps
// both. Per-user spend jumps where two transmitters' prices tie in some
// state; at such a price both sides are optimal and the policies are mixed.
class MacDual {
 public:
  MacDual(MacEngine& engine, const MacConfig& cfg, const Vector& weights, const SolverOptions& opts)
      : engine_(engine), cfg_(cfg), weights_(weights), opts_(opts),
        cap_(opts.power_cap_factor * cfg.budgets.sum()),
        gap(Vector::Constant(cfg.num_users(), -1.0)) {}

  Mix at(const Vector& lambda, double theta) {
    const auto t = engine_.evaluate(lambda, theta, cap_);
    Mix m;
    engine_.snapshot(m.rates, m.snr);
    m.spend = t.spend;
    m.delivered = t.delivered;
    m.capped = t.capped;
    return m;
  }

  // Clears the budget of transmitter l with the later ones cleared inside.
  Mix clear_from(Index l, Vector& lambda, double theta, const Vector& floor) {
    if (l == cfg_.num_users()) return at(lambda, theta);
    if (!(gap(l) > 0.0)) gap(l) = weights_(l) / (2.0 * cfg_.budgets(l));
    Mix cur;
    auto excess = [&](double g) {
      lambda(l) = floor(l) + g;
      cur = clear_from(l + 1, lambda, theta, floor);
      return cur.spend(l) - cfg_.budgets(l);
    };
    double below = 0.0;
    const double g = detail::clear_price(excess, gap(l), 1e-14 * floor(l), opts_.max_root_iterations,
                                         "transmitter " + std::to_string(l) + " budget", &below);
    Mix hi = std::move(cur);
    const double ea = hi.spend(l) - cfg_.budgets(l);
    const Vector inner = gap, prices = lambda;
    if (below < g && ea < 0.0 && std::abs(lambda(l) * ea) > 1e-3 * kSlackTol) {
      excess(below);
      const double eb = cur.spend(l) - cfg_.budgets(l);
      hi = blend(hi, cur, zero_weight(ea, eb));
      gap = inner;
      lambda = prices;
    }
    gap(l) = g;
    lambda(l) = floor(l) + g;
    return hi;
  }

  Mix clear_budgets(double theta, Vector& lambda) {
    const Vector floor = engine_.price_floor(theta);
    lambda = floor + gap.cwiseMax(0.0);
    return clear_from(0, lambda, theta, floor);
  }

  Mix solve(double& theta, Vector& lambda) {
    Mix cur = clear_budgets(theta, lambda);
    if (cfg_.deficit <= 0.0) {
      theta = 0.0;
      return cur;
    }
    if (cur.delivered >= cfg_.deficit && theta == 0.0) return cur;
    auto shortfall = [&](double t) {
      theta = t;
      cur = clear_budgets(theta, lambda);
      return cur.delivered - cfg_.deficit;
    };
    const double guess = theta > 0.0 ? theta : 0.5 * lambda.minCoeff() / engine_.price_floor(1.0).maxCoeff();
    double below = 0.0;
    theta = detail::reach_target(shortfall, guess, opts_.max_root_iterations, "receiver", &below);
    Mix hi = std::move(cur);
    const Vector lam = lambda, gaps = gap;
    const double top = theta;
    const double sa = hi.delivered - cfg_.deficit;
    if (below < top && sa > 0.0 && top * sa > 1e-3 * kSlackTol) {
      const double sb = shortfall(below);
      hi = blend(hi, cur, sa - sb > 0.0 ? -sb / (sa - sb) : 1.0);
    }
    theta = top;
    lambda = lam;
    gap = gaps;
    return hi;
  }

 private:
  MacEngine& engine_;
  const MacConfig& cfg_;
  const Vector& weights_;
  const SolverOptions& opts_;
  double cap_;

 public:
  Vector gap;
};

Vector lifted(const Vector& weights, double floor) {
  const double top = weights.maxCoeff();
  if (!(top > 0.0)) throw InvalidParameter("mac_boundary: weights must not all be zero");
  return weights.cwiseMax(floor * top);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

void MacConfig::validate() const {
  const Index users = num_users();
  if (users < 1) throw InvalidParameter("mac: at least one transmitter");
  if ((budgets.array() <= 0.0).any()) throw InvalidParameter("mac: budgets must be positive");
  if (!(noise_var > 0.0)) throw InvalidParameter("mac: noise variance must be positive");
  if (min_rates.size() != users || (min_rates.array() < 0.0).any()) {
    throw InvalidParameter("mac: one nonnegative minimum rate per transmitter");
  }
  if (!(deficit >= 0.0)) throw InvalidParameter("mac: deficit must be nonnegative");
  if (!(efficiency > 0.0 && efficiency <= 1.0)) throw InvalidParameter("mac: efficiency in (0, 1]");
}

BoundaryPoint mac_boundary(const MacConfig& cfg, const JointFadingDistribution& dist,
                           const Vector& weights, const SolverOptions& opts, const Multipliers* warm) {
  cfg.validate();
  dist.validate();
  if (cfg.receiver != Architecture::Ideal) {
    throw Unsupported("mac: only an ideal receiver is supported");
  }
  const Index users = cfg.num_users();
  if (dist.num_users() != users) throw InvalidParameter("mac: fading has the wrong number of users");
  if (weights.size() != users || (weights.array() < 0.0).any()) {
    throw InvalidParameter("mac_boundary: weights must be nonnegative, one per transmitter");
  }
  const Vector w = lifted(weights, opts.weight_floor);
  MacEngine engine(cfg, dist, w);
  MacDual dual(engine, cfg, w, opts);

  double theta = 0.0;
  Vector lambda;
  if (warm != nullptr && warm->lambda.size() == users && warm->theta.size() == 1) {
    theta = warm->theta(0);
    dual.gap = (warm->lambda - engine.price_floor(theta)).cwiseMax(0.0);
  }
  const Mix mix = dual.solve(theta, lambda);

  BoundaryPoint bp;
  bp.weights = weights;
  bp.fractions = HarvestFractions::zeros(users);
  bp.multipliers.lambda = lambda;
  bp.multipliers.theta = Vector::Constant(1, theta);
  bp.policy = engine.policy(mix.rates, mix.snr);
  bp.policy.hit_cap = mix.capped;
  bp.rates = bp.policy.average_rates;
  bp.objective = weights.dot(bp.rates);
  bp.evaluations = engine.evaluations;

  const auto& pol = bp.policy;
  std::ostringstream why;
  for (Index l = 0; l < users; ++l) {
    if (pol.source_spend(l) > cfg.budgets(l) + kSpendTol) why << " spend " << l;
    if (std::abs(lambda(l) * (cfg.budgets(l) - pol.source_spend(l))) > kSlackTol) {
      why << " budget slackness " << l;
    }
  }
  if (pol.delivered(0) < cfg.deficit - kDeliveryTol) why << " delivery";
  if (std::abs(theta * (pol.delivered(0) - cfg.deficit)) > kSlackTol) why << " delivery slackness";
  if (pol.hit_cap) why << " per-state energy cap reached";
  if (!why.str().empty()) throw NonConvergence("mac boundary point rejected:" + why.str());
  return bp;
}

bool MacTrace::complete() const {
  return std::all_of(points.begin(), points.end(), [](const TracePoint& p) { return p.point.has_value(); });
}

Matrix MacTrace::rate_matrix() const {
  RegionTrace tmp;
  tmp.config.noise_vars = Vector::Ones(config.num_users());
  tmp.points = points;
  return tmp.rate_matrix();
}

Matrix MacTrace::weight_matrix() const {
  RegionTrace tmp;
  tmp.config.noise_vars = Vector::Ones(config.num_users());
  tmp.points = points;
  return tmp.weight_matrix();
}

MacTrace trace_mac_region(const MacConfig& cfg, const JointFadingDistribution& dist, int num_points,
                          const SolverOptions& opts, std::string label) {
  MacTrace trace;
  trace.label = std::move(label);
  trace.config = cfg;
  const auto weights = sweep_weights(cfg.num_users(), num_points);
  trace.points.reserve(weights.size());
  const Multipliers* warm = nullptr;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    TracePoint tp;
    tp.weights = weights[i];
    tp.angle = cfg.num_users() == 2 ? std::atan2(weights[i](1), weights[i](0)) : static_cast<double>(i);
    try {
      tp.point = mac_boundary(cfg, dist, weights[i], opts, warm);
    } catch (const Error& e) {
      tp.error = e.what();
    }
    trace.points.push_back(std::move(tp));
    if (trace.points.back().point) warm = &trace.points.back().point->multipliers;
  }
  return trace;
}

void write_mac_trace_csv(std::ostream& os, const MacTrace& trace) {
  const Index users = trace.config.num_users();
  os << "phi";
  for (Index l = 1; l <= users; ++l) os << ",mu" << l;
  for (Index l = 1; l <= users; ++l) os << ",R" << l;
  for (Index l = 1; l <= users; ++l) os << ",R" << l << "_kbps";
  for (Index l = 1; l <= users; ++l) os << ",lambda" << l;
  os << ",theta";
  for (Index l = 1; l <= users; ++l) os << ",spend" << l;
  os << ",delivered,status\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& tp : trace.points) {
    os << fmt(tp.angle);
    for (Index l = 0; l < users; ++l) os << ',' << fmt(tp.weights(l));
    const BoundaryPoint* bp = tp.point ? &*tp.point : nullptr;
    for (Index l = 0; l < users; ++l) os << ',' << fmt(bp ? bp->rates(l) : nan);
    for (Index l = 0; l < users; ++l) os << ',' << fmt(bp ? nats_to_kbps(bp->rates(l)) : nan);
    for (Index l = 0; l < users; ++l) os << ',' << fmt(bp ? bp->multipliers.lambda(l) : nan);
    os << ',' << fmt(bp ? bp->multipliers.theta(0) : nan);
    for (Index l = 0; l < users; ++l) os << ',' << fmt(bp ? bp->policy.source_spend(l) : nan);
    os << ',' << fmt(bp ? bp->policy.delivered(0) : nan);
    std::string status = bp ? "ok" : tp.error;
    std::replace(status.begin(), status.end(), ',', ';');
    std::replace(status.begin(), status.end(), '\n', ' ');
    os << ',' << status << '\n';
  }
}

SystemConfig dual_broadcast_config(const MacConfig& cfg) {
  const Index users = cfg.num_users();
  return make_config(Vector::Constant(users, cfg.noise_var), cfg.min_rates,
                     Vector::Constant(users, cfg.deficit), cfg.efficiency, cfg.budgets.sum(),
                     std::vector<Architecture>(static_cast<std::size_t>(users), cfg.receiver));
}

DualityReport duality_containment(const MacTrace& mac, const RegionTrace& bc, double tolerance,
                                  const std::function<std::optional<Vector>(const Vector&)>& refine) {
  DualityReport rep;
  rep.tolerance = tolerance;
  Matrix hull_pts = bc.rate_matrix();
  const Matrix mac_pts = mac.rate_matrix();
  const Matrix mac_w = mac.weight_matrix();
  auto distance = [&](Index i) {
    return hull::outside_distance(mac_pts.row(i).transpose(), hull_pts);
  };
  if (refine && hull_pts.rows() > 0) {
    // Sample the broadcast boundary along the facet a MAC point crosses until
    // the point is inside or the new samples stop moving the facet.
    constexpr int kMaxRefine = 24;
    for (Index i = 0; i < mac_pts.rows(); ++i) {
      for (int r = 0; r < kMaxRefine; ++r) {
        const double before = distance(i);
        if (!(before > tolerance)) break;
        const Vector dir = hull::worst_direction(mac_pts.row(i).transpose(), hull_pts);
        const auto extra = refine(dir);
        if (!extra) break;
        hull_pts.conservativeResize(hull_pts.rows() + 1, Eigen::NoChange);
        hull_pts.row(hull_pts.rows() - 1) = extra->transpose();
        ++rep.refined;
        if (!(distance(i) < before - 0.5 * tolerance)) break;
      }
    }
  }
  rep.max_violation = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < mac_pts.rows(); ++i) {
    const double d = distance(i);
    rep.violations.push_back(d);
    if (d > rep.max_violation) {
      rep.max_violation = d;
      rep.worst_point = i;
    }
  }
  // Support gap along each MAC direction against the best broadcast point.
  rep.max_support_excess = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < mac_pts.rows(); ++i) {
    const Vector w = mac_w.row(i).transpose();
    const double n = w.norm();
    if (!(n > 0.0) || hull_pts.rows() == 0) continue;
    const double gap = (w.dot(mac_pts.row(i).transpose()) - (hull_pts * w).maxCoeff()) / n;
    rep.max_support_excess = std::max(rep.max_support_excess, gap);
  }
  rep.contained = mac_pts.rows() > 0 && hull_pts.rows() > 0 && rep.max_violation <= tolerance;
  return rep;
}

void write_duality_report(std::ostream& os, const DualityReport& rep) {
  os << "contained,tolerance,max_violation,max_support_excess,worst_point,refined\n"
     << (rep.contained ? "true" : "false") << ',' << fmt(rep.tolerance) << ','
     << fmt(rep.max_violation) << ',' << fmt(rep.max_support_excess) << ',' << rep.worst_point
     << ',' << rep.refined << '\n';
  os << "point,violation\n";
  for (std::size_t i = 0; i < rep.violations.size(); ++i) os << i << ',' << fmt(rep.violations[i]) << '\n';
}

}  // namespace swipt
