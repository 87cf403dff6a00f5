// Batch front end: region traces, simulations, multiple-access duality checks
// and the preset figures, all written as CSV.

#include "swipt/experiment.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace swipt;

namespace {

enum Exit { kOk = 0, kUsage = 64, kInfeasible = 65, kNonConvergence = 70, kIo = 74 };

struct Options {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> points;
  bool quiet = false;
  std::string figure;
};

class Log {
 public:
  explicit Log(bool quiet) : quiet_(quiet) {}
  template <typename... Args>
  void operator()(const Args&... args) const {
    if (quiet_) return;
    (std::cout << ... << args) << std::endl;
  }

 private:
  bool quiet_;
};

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path.string());
  body(os);
  os.flush();
  if (!os) throw IoError("error writing " + path.string());
}

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
}

ExperimentConfig load(const Options& o, ExperimentKind kind) {
  if (o.config.empty()) throw ConfigError("--config is required for this command");
  ExperimentConfig cfg = load_config(o.config);
  if (cfg.kind != kind) {
    throw ConfigError("config is a '" + std::string(to_string(cfg.kind)) + "' experiment, not '" +
                      std::string(to_string(kind)) + "'");
  }
  if (o.points) cfg.points = *o.points;
  if (o.seed && cfg.sim) cfg.sim->seed = *o.seed;
  cfg.validate();
  return cfg;
}

void snapshot(const fs::path& dir, const ExperimentConfig& cfg) {
  write_file(dir / "config.resolved.json", [&](std::ostream& os) { os << dump_config(cfg); });
}

int trace_status(bool complete, const Log& log) {
  if (complete) return kOk;
  log("some boundary points failed; see the status column");
  return kNonConvergence;
}

int run_region(const Options& o) {
  const Log log(o.quiet);
  const ExperimentConfig cfg = load(o, ExperimentKind::Region);
  const fs::path dir(o.out);
  prepare_dir(dir);
  snapshot(dir, cfg);
  const JointFadingDistribution dist = cfg.fading.build();
  const FeasibilityReport rep = feasibility_check(cfg.system, dist);
  if (!rep.feasible) throw Infeasible(rep.violated, rep.detail);
  log("tracing ", cfg.points, " boundary points over ", dist.num_states(), " joint states");
  const RegionTrace trace = trace_region(cfg.system, dist, cfg.points, cfg.solver, cfg.label);
  write_file(dir / "trace.csv", [&](std::ostream& os) { write_trace_csv(os, trace); });
  log("wrote ", (dir / "trace.csv").string());
  return trace_status(trace.complete(), log);
}

void write_sim_summary(std::ostream& os, const BoundaryPoint& bp, const SimReport& r) {
  const Index users = bp.rates.size();
  os << "quantity,user,value\n";
  auto row = [&](const char* name, Index user, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    os << name << ',' << user << ',' << buf << '\n';
  };
  row("policy_scale", 0, r.policy_scale);
  row("truncation_fraction", 0, r.truncation_fraction);
  row("last_window_truncation", 0, r.windows.empty() ? 0.0 : r.windows.back().truncation_fraction);
  row("analytic_avg_spend", 0, bp.policy.average_spend);
  row("empirical_avg_spend", 0, r.empirical_avg_spend);
  row("final_tx_buffer", 0, r.final_tx_buffer);
  row("drift_slope", 0, r.drift_slope);
  row("min_rate_violations", 0, static_cast<double>(r.min_rate_violations));
  row("energy_conserved", 0, r.energy_conserved() ? 1.0 : 0.0);
  for (Index l = 0; l < users; ++l) {
    const Index u = l + 1;
    row("analytic_rate", u, bp.rates(l));
    row("empirical_rate", u, r.empirical_rates(l));
    row("analytic_delivered", u, bp.policy.delivered(l));
    row("rf_harvested", u, r.rf_harvested(l));
    row("ambient_harvested", u, r.ambient_harvested(l));
    row("consumed", u, r.consumed(l));
    row("final_rx_buffer", u, r.final_rx_buffers(l));
    row("rx_drift_slope", u, r.rx_drift_slope(l));
    row("rx_deficit_events", u, static_cast<double>(r.rx_deficit_events[static_cast<std::size_t>(l)]));
  }
}

int run_simulate(const Options& o) {
  const Log log(o.quiet);
  ExperimentConfig cfg = load(o, ExperimentKind::Simulate);
  const fs::path dir(o.out);
  prepare_dir(dir);
  snapshot(dir, cfg);
  const JointFadingDistribution dist = cfg.fading.build();
  // The stationary policy must leave a margin below the mean harvest.
  SystemConfig sys = cfg.system;
  sys.tx_budget = std::min(sys.tx_budget, cfg.sim->tx_harvest.mean - cfg.sim->margin());
  const Vector weights = cfg.policy_weights.size() ? cfg.policy_weights : Vector::Ones(sys.num_users());
  log("solving the boundary point at budget ", sys.tx_budget);
  const BoundaryPoint bp = fixed_point_fractions(sys, dist, weights, cfg.solver);
  log("simulating ", cfg.sim->horizon, " slots");
  const SimReport rep = simulate(sys, bp.policy, bp.fractions, dist, *cfg.sim);
  write_file(dir / "sim_windows.csv", [&](std::ostream& os) { write_window_csv(os, rep); });
  write_file(dir / "sim_summary.csv", [&](std::ostream& os) { write_sim_summary(os, bp, rep); });
  log("wrote ", (dir / "sim_windows.csv").string(), " and ", (dir / "sim_summary.csv").string());
  return kOk;
}

void write_duality(const fs::path& path, const DualityReport& rep) {
  write_file(path, [&](std::ostream& os) { write_duality_report(os, rep); });
}

int run_mac(const Options& o) {
  const Log log(o.quiet);
  const ExperimentConfig cfg = load(o, ExperimentKind::MacRegion);
  const fs::path dir(o.out);
  prepare_dir(dir);
  snapshot(dir, cfg);
  const JointFadingDistribution dist = cfg.fading.build();
  log("tracing the multiple-access region (", cfg.points, " points)");
  const MacTrace mac = trace_mac_region(*cfg.mac, dist, cfg.points, cfg.solver, "mac");
  write_file(dir / "mac_trace.csv", [&](std::ostream& os) { write_mac_trace_csv(os, mac); });
  log("tracing the broadcast region at the summed budget");
  const RegionTrace bc = trace_region(dual_broadcast_config(*cfg.mac), dist, cfg.points, cfg.solver, "bc");
  write_file(dir / "bc_trace.csv", [&](std::ostream& os) { write_trace_csv(os, bc); });
  const DualityReport rep = check_duality(mac, bc, dist, cfg.solver);
  write_duality(dir / "duality.csv", rep);
  log("containment ", rep.contained ? "holds" : "FAILS", " (max violation ", rep.max_violation, ")");
  return trace_status(mac.complete() && bc.complete(), log);
}

int run_preset(const Options& o) {
  const Log log(o.quiet);
  ExperimentConfig cfg = preset_experiment(ExperimentKind::FigurePreset);
  if (!o.config.empty()) cfg = load(o, ExperimentKind::FigurePreset);
  if (o.points) cfg.points = *o.points;
  cfg.preset = o.figure;
  cfg.validate();
  const fs::path dir(o.out);
  prepare_dir(dir);
  const JointFadingDistribution dist = cfg.fading.build();
  log("running ", o.figure, " with ", cfg.points, " points per curve");
  const FigureResult fig = run_figure(o.figure, dist, cfg.points, cfg.solver);
  for (const auto& r : fig.regions) {
    const fs::path path = dir / (o.figure + "_" + r.label + ".csv");
    write_file(path, [&](std::ostream& os) { write_trace_csv(os, r); });
    log("wrote ", path.string());
  }
  if (fig.mac) {
    const fs::path path = dir / (o.figure + "_" + fig.mac->label + ".csv");
    write_file(path, [&](std::ostream& os) { write_mac_trace_csv(os, *fig.mac); });
    log("wrote ", path.string());
  }
  if (fig.duality) {
    write_duality(dir / (o.figure + "_duality.csv"), *fig.duality);
    log("containment ", fig.duality->contained ? "holds" : "FAILS");
  }
  if (fig.rate_gain) {
    write_file(dir / (o.figure + "_rate_gain.txt"), [&](std::ostream& os) {
      os << fig.rate_gain->summary << '\n'
         << (fig.rate_gain->within_tolerance ? "within 30% of the quoted gains\n"
                                             : "deviation: outside 30% of the quoted gains\n");
    });
    log(fig.rate_gain->summary);
  }
  return trace_status(fig.complete(), log);
}

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const InvalidParameter& e) {
    std::cerr << "invalid parameter: " << e.what() << '\n';
    return kUsage;
  } catch (const Unsupported& e) {
    std::cerr << "unsupported: " << e.what() << '\n';
    return kUsage;
  } catch (const Infeasible& e) {
    std::cerr << "infeasible (" << e.constraint() << "): " << e.what() << '\n';
    return kInfeasible;
  } catch (const NonConvergence& e) {
    std::cerr << "solver did not converge: " << e.what() << '\n';
    return kNonConvergence;
  } catch (const UnboundedObjective& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kNonConvergence;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimum-rate capacity regions of fading broadcast channels with RF energy transfer"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("--config", o.config, "experiment configuration (JSON)");
    if (config_required) c->required();
    sub->add_option("--out", o.out, "output directory")->capture_default_str();
    sub->add_option("--seed", o.seed, "simulation seed (overrides the config)");
    sub->add_option("--points", o.points, "boundary points per trace")->check(CLI::Range(2, 100000));
    sub->add_flag("--quiet", o.quiet, "suppress progress output");
  };
  auto* region = app.add_subcommand("region", "trace a broadcast capacity region");
  common(region, true);
  auto* sim = app.add_subcommand("simulate", "simulate the energy buffers under a boundary policy");
  common(sim, true);
  auto* mac = app.add_subcommand("mac-region", "trace the multiple-access region and check duality");
  common(mac, true);
  auto* preset = app.add_subcommand("figure-preset", "reproduce one of the preset figures");
  common(preset, false);
  preset->add_option("figure", o.figure, "fig2 | fig3 | fig4 | fig5 | fig6")
      ->required()
      ->check(CLI::IsMember(figure_names()));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  if (*region) return guarded([&] { return run_region(o); });
  if (*sim) return guarded([&] { return run_simulate(o); });
  if (*mac) return guarded([&] { return run_mac(o); });
  return guarded([&] { return run_preset(o); });
}
