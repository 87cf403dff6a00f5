// Acceptance run on the published two-user configuration: one PASS/FAIL line
// per criterion, details in <out>/acceptance_report.txt.

#include "instances.hpp"
#include "oracles.hpp"
#include "swipt/experiment.hpp"
#include "swipt/hull.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

using namespace swipt;
namespace fs = std::filesystem;

namespace {

constexpr double kTol = 1e-6;
constexpr Architecture I = Architecture::Ideal;
constexpr Architecture T = Architecture::TimeSwitching;
constexpr Architecture P = Architecture::PowerSplitting;

struct Verdict {
  bool pass = true;
  bool soft = false;
  std::string detail;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

class Context {
 public:
  Context(int points, std::ostream& log) : points_(points), log_(log), dist_(preset_fading().build()) {}

  const JointFadingDistribution& dist() const { return dist_; }

  const RegionTrace& trace(const std::string& name, const SystemConfig& cfg) {
    auto it = traces_.find(name);
    if (it != traces_.end()) return it->second;
    const auto t0 = std::chrono::steady_clock::now();
    RegionTrace t = trace_region(cfg, dist_, points_, {}, name);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    log_ << "trace " << name << ": " << t.rate_matrix().rows() << "/" << t.points.size() << " points, "
         << num(secs) << " s\n";
    for (const auto& p : t.points) {
      if (!p.point) log_ << "  failed at phi=" << p.angle << ": " << p.error << '\n';
    }
    return traces_.emplace(name, std::move(t)).first->second;
  }

  int points() const { return points_; }

 private:
  int points_;
  std::ostream& log_;
  JointFadingDistribution dist_;
  std::map<std::string, RegionTrace> traces_;
};

SystemConfig scaled(SystemConfig cfg, double factor) {
  cfg.rx_ambient_mean.reset();
  cfg.rx_consumption_mean.reset();
  cfg.deficits *= factor;
  return cfg;
}

// How far `inner` pokes out of `outer`: per-direction weighted-rate excess,
// hull distance and componentwise excess at common directions.
struct Nesting {
  double support = -INFINITY;
  double hull = -INFINITY;
  double componentwise = -INFINITY;
  bool complete = true;
};

Nesting nesting(const RegionTrace& inner, const RegionTrace& outer) {
  Nesting n;
  n.complete = inner.complete() && outer.complete();
  const Matrix outer_pts = outer.rate_matrix();
  for (std::size_t i = 0; i < inner.points.size() && i < outer.points.size(); ++i) {
    const auto& a = inner.points[i].point;
    const auto& b = outer.points[i].point;
    if (!a || !b) continue;
    const Vector& w = inner.points[i].weights;
    n.support = std::max(n.support, w.dot(a->rates) - w.dot(b->rates));
    n.componentwise = std::max(n.componentwise, (a->rates - b->rates).maxCoeff());
  }
  const Matrix inner_pts = inner.rate_matrix();
  for (Index i = 0; i < inner_pts.rows(); ++i) {
    n.hull = std::max(n.hull, hull::outside_distance(inner_pts.row(i).transpose(), outer_pts));
  }
  return n;
}

bool nested(const Nesting& n) { return n.complete && n.support <= kTol && n.hull <= kTol; }

std::string describe(const std::string& what, const Nesting& n) {
  return what + " (support " + num(n.support) + ", hull " + num(n.hull) + ", componentwise " +
         num(n.componentwise) + (n.complete ? "" : ", incomplete trace") + ")";
}

Verdict criterion1(Context& ctx) {
  const auto& ideal = ctx.trace("ideal", preset_system(I, I));
  const auto& ps = ctx.trace("ps", preset_system(P, P));
  const auto& ts = ctx.trace("ts", preset_system(T, T));
  const Nesting a = nesting(ts, ps), b = nesting(ps, ideal);
  Verdict v;
  v.pass = nested(a) && nested(b);
  v.detail = describe("TS in PS", a) + "; " + describe("PS in Ideal", b);
  return v;
}

Verdict criterion2(Context& ctx) {
  Verdict v;
  std::ostringstream os;
  const std::pair<const char*, SystemConfig> archs[] = {
      {"ideal", preset_system(I, I)}, {"ts", preset_system(T, T)}, {"ps", preset_system(P, P)}};
  for (const auto& [name, cfg] : archs) {
    const double lo = kDeficitLevels[0], hi = kDeficitLevels[1];
    const auto& small = ctx.trace(std::string(name) + "-deficit-x" + num(lo), scaled(cfg, lo));
    const auto& large = hi == 1.0 ? ctx.trace(name, cfg) : ctx.trace(std::string(name) + "-deficit-x" + num(hi), scaled(cfg, hi));
    const Nesting n = nesting(large, small);
    v.pass = v.pass && nested(n);
    os << describe(std::string(name) + " Delta x" + num(hi) + " in x" + num(lo), n) << "; ";
  }
  SystemConfig mixed = preset_system(P, T);
  const auto& b10 = ctx.trace("ps-ts-budget-10", mixed);
  mixed.tx_budget = 15.0;
  const auto& b15 = ctx.trace("ps-ts-budget-15", mixed);
  const Nesting n = nesting(b10, b15);
  v.pass = v.pass && nested(n);
  os << describe("PS/TS budget 10 in 15", n);
  v.detail = os.str();
  return v;
}

Verdict criterion3() {
  std::mt19937_64 rng(20240601);
  double bc_gap = 0.0, mac_gap = 0.0;
  int bc_fail = 0, mac_fail = 0;
  constexpr int kConfigs = 20;
  for (int i = 0; i < kConfigs; ++i) {
    const bool deficits = i % 2 == 1;
    const instances::Bc b = instances::random_bc(rng, deficits);
    try {
      const BoundaryPoint bp = solve_boundary(b.config, b.dist, b.weights, HarvestFractions::zeros(2));
      double gap = std::abs(oracle::bc_dual(b.oracle, b.weights, bp.multipliers.lambda(0), bp.multipliers.theta) -
                            bp.objective);
      if (!deficits) {
        const double best = oracle::bc_optimum_no_deficit(b.oracle, b.weights, 4.0 * bp.multipliers.lambda(0) + 1.0);
        gap = std::max(gap, std::abs(best - bp.objective));
      }
      bc_gap = std::max(bc_gap, gap);
    } catch (const Error&) {
      ++bc_fail;
    }
  }
  for (int i = 0; i < kConfigs; ++i) {
    const instances::Mac m = instances::random_mac(rng, i % 2 == 1);
    try {
      const BoundaryPoint bp = mac_boundary(m.config, m.dist, m.weights);
      const double tmax = 4.0 * m.config.budgets.sum() / m.dist.probs.minCoeff();
      mac_gap = std::max(mac_gap, std::abs(oracle::mac_dual(m.oracle, m.weights, bp.multipliers.lambda,
                                                            bp.multipliers.theta(0), tmax) -
                                           bp.objective));
    } catch (const Error&) {
      ++mac_fail;
    }
  }
  Verdict v;
  v.pass = bc_fail == 0 && mac_fail == 0 && bc_gap <= 1e-4 && mac_gap <= 1e-4;
  v.detail = std::to_string(kConfigs) + " broadcast configs: max gap " + num(bc_gap) + ", " +
             std::to_string(bc_fail) + " failures; " + std::to_string(kConfigs) +
             " multiple-access configs: max gap " + num(mac_gap) + ", " + std::to_string(mac_fail) + " failures";
  return v;
}

Verdict criterion4(Context& ctx) {
  Vector n(1);
  n << 0.8;
  const SystemConfig single = make_config(n, Vector::Zero(1), Vector::Zero(1), 1e-4, 10.0, {I});
  const auto marginal = joint_product({discretize_exponential(0.8, 0.1, 10.0)});
  const double wf = oracle::waterfilling_capacity(marginal.gains.col(0), marginal.probs, 0.8, 10.0);
  const double got = solve_boundary(single, marginal, Vector::Ones(1), HarvestFractions::zeros(1)).rates(0);
  const double wf_err = std::abs(got - wf);

  bool identical = true;
  const auto zero = HarvestFractions::zeros(2);
  for (const Vector& mu : {instances::pair(1, 0), instances::pair(1, 1), instances::pair(0, 1)}) {
    const Vector r = solve_boundary(preset_system(I, I), ctx.dist(), mu, zero).rates;
    identical = identical && solve_boundary(preset_system(T, T), ctx.dist(), mu, zero).rates == r &&
                solve_boundary(preset_system(P, P), ctx.dist(), mu, zero).rates == r;
  }
  Verdict v;
  v.pass = wf_err <= 1e-5 && identical;
  v.detail = "water-filling error " + num(wf_err) + "; zero fractions give identical TS/PS/Ideal points: " +
             (identical ? "yes" : "no");
  return v;
}

Verdict criterion5(Context& ctx) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> g(0.05, 10.0), r(0.0, 2.0), f(0.0, 0.95);
  double roundtrip = 0.0;
  const Architecture archs[] = {I, T, P};
  for (int k = 0; k < 3000; ++k) {
    const SystemConfig cfg = make_config(instances::pair(0.8, 1.6), Vector::Zero(2), Vector::Zero(2), 1e-4, 10.0,
                                         {archs[k % 3], archs[(k / 3) % 3]});
    const HarvestFractions fr{instances::pair(f(rng), f(rng))};
    const Vector h = instances::pair(g(rng), g(rng));
    Vector rates = instances::pair(r(rng), r(rng));
    for (Index l = 0; l < 2; ++l) rates(l) *= erasure_factor(cfg, fr, l);
    const Vector back = per_state_rates<double>(h, power_for_rates<double>(h, rates, cfg, fr), cfg, fr);
    roundtrip = std::max(roundtrip, (back - rates).cwiseAbs().maxCoeff());
  }

  // Every boundary point traced for the other criteria.
  int checked = 0, bad = 0;
  double worst_rate = -INFINITY, worst_spend = -INFINITY, worst_delivery = -INFINITY;
  for (const char* name : {"ideal", "ts", "ps", "ps-ts-budget-10", "ps-ts-budget-15"}) {
    SystemConfig cfg = std::string(name) == "ideal" ? preset_system(I, I)
                       : std::string(name) == "ts"  ? preset_system(T, T)
                       : std::string(name) == "ps"  ? preset_system(P, P)
                                                    : preset_system(P, T);
    if (std::string(name) == "ps-ts-budget-15") cfg.tx_budget = 15.0;
    const RegionTrace& t = ctx.trace(name, cfg);
    for (const auto& tp : t.points) {
      if (!tp.point) continue;
      const BoundaryPoint& bp = *tp.point;
      ++checked;
      const double rate = (cfg.min_rates - bp.rates).maxCoeff();
      const double spend = bp.policy.average_spend - cfg.tx_budget;
      double delivery = -INFINITY;
      for (Index l = 0; l < 2; ++l) {
        const double pi = cfg.arch(l) == I ? 1.0 : bp.fractions.harvest(l);
        delivery = std::max(delivery, cfg.deficits(l) - pi * bp.policy.delivered(l));
        for (Index s = 0; s < bp.policy.rates.rows(); ++s) {
          worst_rate = std::max(worst_rate, cfg.min_rates(l) * erasure_factor(cfg, bp.fractions, l) -
                                                bp.policy.rates(s, l));
        }
      }
      worst_rate = std::max(worst_rate, rate);
      worst_spend = std::max(worst_spend, spend);
      worst_delivery = std::max(worst_delivery, delivery);
      if (rate > 1e-9 || spend > 1e-6 || delivery > 1e-9) ++bad;
    }
  }
  Verdict v;
  v.pass = roundtrip <= 1e-10 && bad == 0 && worst_rate <= 1e-9;
  v.detail = "round trip " + num(roundtrip) + "; " + std::to_string(checked) +
             " boundary points: worst rate floor " + num(worst_rate) + ", spend over budget " +
             num(worst_spend) + ", delivery shortfall " + num(worst_delivery);
  return v;
}

Verdict criterion6(Context& ctx, std::ostream& log) {
  const ExperimentConfig exp = preset_experiment(ExperimentKind::Simulate);
  Verdict v;
  std::ostringstream os;
  for (const auto& [name, archs] : {std::pair{"ideal", std::pair{I, I}}, std::pair{"ts", std::pair{T, T}}}) {
    SystemConfig sys = preset_system(archs.first, archs.second);
    sys.tx_budget = std::min(sys.tx_budget, exp.sim->tx_harvest.mean - exp.sim->margin());
    const BoundaryPoint bp = fixed_point_fractions(sys, ctx.dist(), exp.policy_weights);
    const SimReport rep = simulate(sys, bp.policy, bp.fractions, ctx.dist(), *exp.sim);
    const double last = rep.windows.back().truncation_fraction;
    const double rate_err = (rep.empirical_rates - bp.rates).cwiseQuotient(bp.rates).cwiseAbs().maxCoeff();
    const double rf = rep.rf_harvested.cwiseQuotient(sys.deficits).minCoeff();
    const bool ok = last < 1e-3 && rate_err <= 0.02 && rf >= 0.98 && rep.energy_conserved();
    v.pass = v.pass && ok;
    os << name << ": last-window truncation " << num(last) << ", rate error " << num(100 * rate_err)
       << "%, RF/deficit " << num(rf) << ", energy conserved " << (rep.energy_conserved() ? "yes" : "no") << "; ";
    log << "simulate " << name << ": overall truncation " << rep.truncation_fraction << ", empirical rates "
        << rep.empirical_rates.transpose() << " vs " << bp.rates.transpose() << '\n';
  }
  v.detail = os.str();
  return v;
}

Verdict criterion7(Context& ctx) {
  const MacConfig cfg = preset_mac();
  const MacTrace mac = trace_mac_region(cfg, ctx.dist(), ctx.points(), {}, "mac");
  const RegionTrace bc = trace_region(dual_broadcast_config(cfg), ctx.dist(), ctx.points(), {}, "bc");
  const DualityReport rep = check_duality(mac, bc, ctx.dist());
  Verdict v;
  v.pass = mac.complete() && bc.complete() && rep.contained && rep.max_violation <= kTol;
  v.detail = "max violation " + num(rep.max_violation) + ", refined broadcast points " + std::to_string(rep.refined) +
             (mac.complete() && bc.complete() ? "" : ", incomplete trace");
  return v;
}

Verdict criterion8(Context& ctx, const fs::path& out) {
  const SystemConfig cfg = preset_system(I, I);
  const auto& ideal = ctx.trace("ideal", cfg);
  const auto& base = ctx.trace("no-rf-transfer", without_rf_transfer(cfg));
  const RateGainReport rep = rate_gain_report(ideal, base, cfg);
  Verdict v;
  v.soft = true;
  v.pass = rep.within_tolerance;
  v.detail = rep.summary;
  if (!v.pass) {
    std::ofstream os(out / "rate_gain_deviation.txt");
    os << "Deviation report: corner-point rate gains are outside 30% of the quoted values.\n"
       << rep.summary << '\n'
       << "With the deficit constraint simply dropped the baseline keeps the same budget and "
          "minimum rates, so it differs from the ideal region only through the RF-delivery "
          "constraint, which costs almost nothing at the corners.\n";
    v.detail += " (deviation report written)";
  }
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks on the published configuration"};
  std::string out = "acceptance_out";
  int points = 32;
  app.add_option("--out", out, "directory for the report");
  app.add_option("--points", points, "boundary points per trace")->check(CLI::Range(2, 1000));
  CLI11_PARSE(app, argc, argv);
  fs::create_directories(out);
  std::ofstream log(fs::path(out) / "acceptance_report.txt");

  Context ctx(points, log);
  std::vector<std::pair<int, std::function<Verdict()>>> criteria = {
      {1, [&] { return criterion1(ctx); }},
      {2, [&] { return criterion2(ctx); }},
      {3, [&] { return criterion3(); }},
      {4, [&] { return criterion4(ctx); }},
      {5, [&] { return criterion5(ctx); }},
      {6, [&] { return criterion6(ctx, log); }},
      {7, [&] { return criterion7(ctx); }},
      {8, [&] { return criterion8(ctx, out); }},
  };
  int hard_failures = 0;
  for (auto& [id, run] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("error: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const char* tag = v.pass ? "PASS" : (v.soft ? "FAIL (soft)" : "FAIL");
    const std::string line = "criterion " + std::to_string(id) + ": " + tag + " - " + v.detail;
    std::cout << line << std::endl;
    log << line << " [" << num(secs) << " s]\n";
    log.flush();
    if (!v.pass && !v.soft) ++hard_failures;
  }
  return hard_failures == 0 ? 0 : 1;
}
