#include "swipt/experiment.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <fstream>
#include <set>
#include <sstream>

namespace swipt {

namespace {

using nlohmann::json;

constexpr double kMicro = 1e-6;

struct Reader {
  const json& node;
  std::string where;
  std::set<std::string> seen{};

  bool has(const std::string& key) {
    seen.insert(key);
    return node.contains(key) && !node.at(key).is_null();
  }
  const json& at(const std::string& key) {
    if (!has(key)) throw ConfigError(where + ": missing '" + key + "'");
    return node.at(key);
  }
  double number(const std::string& key) {
    const json& v = at(key);
    if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
    return v.get<double>();
  }
  double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }
  std::int64_t integer(const std::string& key, std::int64_t fallback) {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (v.is_number_integer() || v.is_number_unsigned()) return v.get<std::int64_t>();
    if (v.is_number_float() && std::trunc(v.get<double>()) == v.get<double>()) {
      return static_cast<std::int64_t>(v.get<double>());
    }
    throw ConfigError(where + "." + key + ": expected an integer");
  }
  std::string text(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_string()) throw ConfigError(where + "." + key + ": expected a string");
    return v.get<std::string>();
  }
  bool flag(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_boolean()) throw ConfigError(where + "." + key + ": expected true or false");
    return v.get<bool>();
  }
  Vector vector(const std::string& key, double scale = 1.0) {
    const json& v = at(key);
    if (!v.is_array()) throw ConfigError(where + "." + key + ": expected an array");
    Vector out(static_cast<Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) throw ConfigError(where + "." + key + ": expected numbers");
      out(static_cast<Index>(i)) = v[i].get<double>() * scale;
    }
    return out;
  }
  Reader child(const std::string& key) {
    const json& v = at(key);
    if (!v.is_object()) throw ConfigError(where + "." + key + ": expected an object");
    return Reader{v, where + "." + key};
  }
  void finish() const {
    for (const auto& item : node.items()) {
      if (!seen.count(item.key())) throw ConfigError(where + ": unknown key '" + item.key() + "'");
    }
  }
};

// Unit conversions leave trailing digits (59.99999999999999 uW); 15
// significant digits give back the typed value and read back identically.
double tidy(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return std::strtod(buf, nullptr);
}

json array(const Vector& v, double scale = 1.0) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(scale == 1.0 ? v(i) : tidy(v(i) * scale));
  return out;
}

Vector kbps_vector(const Vector& kbps) { return kbps.unaryExpr([](double x) { return kbps_to_nats(x); }); }
Vector nats_vector(const Vector& nats) { return nats.unaryExpr([](double x) { return tidy(nats_to_kbps(x)); }); }

// Receiver processes are stated in uW, the transmitter's in W.
HarvestProcessSpec read_process(Reader r, double unit, const std::string& suffix) {
  HarvestProcessSpec spec;
  try {
    spec.kind = harvest_kind_from_string(r.text("kind", "constant"));
  } catch (const Error& e) {
    throw ConfigError(r.where + ": " + e.what());
  }
  spec.mean = r.number("mean_" + suffix) * unit;
  spec.floor = spec.kind == HarvestProcessSpec::Kind::Constant
                   ? spec.mean
                   : r.number("floor_" + suffix) * unit;
  r.finish();
  return spec;
}

json write_process(const HarvestProcessSpec& spec, double unit, const std::string& suffix) {
  json out;
  out["kind"] = std::string(to_string(spec.kind));
  out["mean_" + suffix] = unit == 1.0 ? spec.mean : tidy(spec.mean / unit);
  if (spec.kind != HarvestProcessSpec::Kind::Constant) {
    out["floor_" + suffix] = unit == 1.0 ? spec.floor : tidy(spec.floor / unit);
  }
  return out;
}

std::vector<HarvestProcessSpec> read_processes(Reader& r, const std::string& key) {
  std::vector<HarvestProcessSpec> out;
  if (!r.has(key)) return out;
  const json& v = r.at(key);
  if (!v.is_array()) throw ConfigError(r.where + "." + key + ": expected an array");
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_object()) throw ConfigError(r.where + "." + key + ": expected objects");
    out.push_back(read_process(Reader{v[i], r.where + "." + key + "[" + std::to_string(i) + "]"},
                               kMicro, "uW"));
  }
  return out;
}

SystemConfig read_system(Reader r) {
  SystemConfig cfg;
  cfg.noise_vars = r.vector("noise_vars");
  cfg.min_rates = kbps_vector(r.vector("min_rates_kbps"));
  cfg.efficiency = r.number("efficiency");
  cfg.tx_budget = r.number("tx_budget_W");
  const json& arch = r.at("architectures");
  if (!arch.is_array()) throw ConfigError(r.where + ".architectures: expected an array");
  for (const auto& a : arch) {
    if (!a.is_string()) throw ConfigError(r.where + ".architectures: expected strings");
    try {
      cfg.architectures.push_back(architecture_from_string(a.get<std::string>()));
    } catch (const Error& e) {
      throw ConfigError(r.where + ".architectures: " + e.what());
    }
  }
  const bool ambient = r.has("rx_ambient_uW");
  const bool consumption = r.has("rx_consumption_uW");
  if (ambient != consumption) {
    throw ConfigError(r.where + ": rx_ambient_uW and rx_consumption_uW go together");
  }
  if (ambient) {
    const Vector ambient_uW = r.vector("rx_ambient_uW"), consumption_uW = r.vector("rx_consumption_uW");
    cfg.rx_ambient_mean = ambient_uW * kMicro;
    cfg.rx_consumption_mean = consumption_uW * kMicro;
    if (ambient_uW.size() != consumption_uW.size()) {
      throw ConfigError(r.where + ": rx_ambient_uW and rx_consumption_uW differ in length");
    }
    cfg.deficits = (consumption_uW - ambient_uW).cwiseMax(0.0) * kMicro;
    if (r.has("deficits_uW")) {
      const Vector given = r.vector("deficits_uW", kMicro);
      if (given.size() != cfg.deficits.size() ||
          ((given - cfg.deficits).array().abs() > 1e-9 * kMicro).any()) {
        throw ConfigError(r.where + ": deficits_uW disagree with consumption - ambient");
      }
    }
  } else {
    cfg.deficits = r.vector("deficits_uW", kMicro);
  }
  r.finish();
  try {
    cfg.validate();
  } catch (const InvalidParameter& e) {
    throw ConfigError(r.where + ": " + e.what());
  }
  return cfg;
}

json write_system(const SystemConfig& cfg) {
  json out;
  out["noise_vars"] = array(cfg.noise_vars);
  out["min_rates_kbps"] = array(nats_vector(cfg.min_rates));
  out["deficits_uW"] = array(cfg.deficits, 1.0 / kMicro);
  out["efficiency"] = cfg.efficiency;
  out["tx_budget_W"] = cfg.tx_budget;
  json arch = json::array();
  for (const auto a : cfg.architectures) arch.push_back(std::string(to_string(a)));
  out["architectures"] = arch;
  if (cfg.rx_ambient_mean && cfg.rx_consumption_mean) {
    out["rx_ambient_uW"] = array(*cfg.rx_ambient_mean, 1.0 / kMicro);
    out["rx_consumption_uW"] = array(*cfg.rx_consumption_mean, 1.0 / kMicro);
  }
  return out;
}

FadingSpec read_fading(Reader r) {
  FadingSpec spec;
  if (r.has("joint")) {
    Reader j = r.child("joint");
    const json& rows = j.at("gains");
    if (!rows.is_array() || rows.empty() || !rows[0].is_array()) {
      throw ConfigError(j.where + ".gains: expected an array of rows");
    }
    Matrix gains(static_cast<Index>(rows.size()), static_cast<Index>(rows[0].size()));
    for (std::size_t s = 0; s < rows.size(); ++s) {
      if (!rows[s].is_array() || rows[s].size() != rows[0].size()) {
        throw ConfigError(j.where + ".gains: rows must have equal length");
      }
      for (std::size_t l = 0; l < rows[s].size(); ++l) {
        if (!rows[s][l].is_number()) throw ConfigError(j.where + ".gains: expected numbers");
        gains(static_cast<Index>(s), static_cast<Index>(l)) = rows[s][l].get<double>();
      }
    }
    spec.joint_gains = gains;
    spec.joint_probs = j.vector("probs");
    j.finish();
  }
  if (r.has("marginals")) {
    const json& v = r.at("marginals");
    if (!v.is_array()) throw ConfigError(r.where + ".marginals: expected an array");
    for (std::size_t i = 0; i < v.size(); ++i) {
      Reader m{v[i], r.where + ".marginals[" + std::to_string(i) + "]"};
      if (!v[i].is_object()) throw ConfigError(m.where + ": expected an object");
      MarginalSpec ms;
      const std::string type = m.text("type", "discretized-exponential");
      if (type == "discretized-exponential") {
        ms.kind = MarginalSpec::Kind::DiscretizedExponential;
        ms.mean = m.number("mean");
        ms.step = m.number("step", 0.1);
        ms.cap = m.number("cap", 10.0);
      } else if (type == "explicit") {
        ms.kind = MarginalSpec::Kind::Explicit;
        ms.support = m.vector("support");
        ms.probs = m.vector("probs");
      } else {
        throw ConfigError(m.where + ": unknown marginal type '" + type + "'");
      }
      ms.coherence_slots = static_cast<int>(m.integer("coherence_slots", 1));
      m.finish();
      spec.marginals.push_back(std::move(ms));
    }
  }
  r.finish();
  if (spec.marginals.empty() == !spec.joint_gains) {
    throw ConfigError(r.where + ": give exactly one of 'marginals' or 'joint'");
  }
  return spec;
}

json write_fading(const FadingSpec& spec) {
  json out;
  if (spec.joint_gains) {
    json rows = json::array();
    for (Index s = 0; s < spec.joint_gains->rows(); ++s) {
      rows.push_back(array(spec.joint_gains->row(s).transpose()));
    }
    out["joint"] = {{"gains", rows}, {"probs", array(*spec.joint_probs)}};
    return out;
  }
  json ms = json::array();
  for (const auto& m : spec.marginals) {
    json j;
    if (m.kind == MarginalSpec::Kind::DiscretizedExponential) {
      j["type"] = "discretized-exponential";
      j["mean"] = m.mean;
      j["step"] = m.step;
      j["cap"] = m.cap;
    } else {
      j["type"] = "explicit";
      j["support"] = array(m.support);
      j["probs"] = array(m.probs);
    }
    j["coherence_slots"] = m.coherence_slots;
    ms.push_back(j);
  }
  out["marginals"] = ms;
  return out;
}

SolverOptions read_solver(Reader r, int& points) {
  SolverOptions o;
  points = static_cast<int>(r.integer("points", points));
  o.max_multiplier_cycles = static_cast<int>(r.integer("max_multiplier_cycles", o.max_multiplier_cycles));
  o.max_root_iterations = static_cast<int>(r.integer("max_root_iterations", o.max_root_iterations));
  o.power_cap_factor = r.number("power_cap_factor", o.power_cap_factor);
  o.max_fixed_point_iterations =
      static_cast<int>(r.integer("max_fixed_point_iterations", o.max_fixed_point_iterations));
  o.fixed_point_tolerance = r.number("fixed_point_tolerance", o.fixed_point_tolerance);
  o.damping = r.number("damping", o.damping);
  o.weight_floor = r.number("weight_floor", o.weight_floor);
  r.finish();
  return o;
}

json write_solver(const SolverOptions& o, int points) {
  return {{"points", points},
          {"max_multiplier_cycles", o.max_multiplier_cycles},
          {"max_root_iterations", o.max_root_iterations},
          {"power_cap_factor", o.power_cap_factor},
          {"max_fixed_point_iterations", o.max_fixed_point_iterations},
          {"fixed_point_tolerance", o.fixed_point_tolerance},
          {"damping", o.damping},
          {"weight_floor", o.weight_floor}};
}

SimConfig read_sim(Reader r) {
  SimConfig s;
  s.horizon = r.integer("horizon", s.horizon);
  const std::int64_t seed = r.integer("seed", static_cast<std::int64_t>(s.seed));
  if (seed < 0) throw ConfigError(r.where + ".seed: must be nonnegative");
  s.seed = static_cast<std::uint64_t>(seed);
  s.tx_harvest = read_process(r.child("tx_harvest"), 1.0, "W");
  s.rx_harvest = read_processes(r, "rx_harvest");
  s.rx_consumption = read_processes(r, "rx_consumption");
  s.epsilon = r.number("epsilon_W", s.epsilon);
  s.initial_tx_buffer = r.number("initial_tx_buffer_W", s.initial_tx_buffer);
  s.windows = static_cast<int>(r.integer("windows", s.windows));
  s.rescale_policy = r.flag("rescale_policy", s.rescale_policy);
  r.finish();
  return s;
}

json write_sim(const SimConfig& s) {
  json out;
  out["horizon"] = s.horizon;
  out["seed"] = s.seed;
  out["tx_harvest"] = write_process(s.tx_harvest, 1.0, "W");
  if (!s.rx_harvest.empty()) {
    json a = json::array();
    for (const auto& p : s.rx_harvest) a.push_back(write_process(p, kMicro, "uW"));
    out["rx_harvest"] = a;
  }
  if (!s.rx_consumption.empty()) {
    json a = json::array();
    for (const auto& p : s.rx_consumption) a.push_back(write_process(p, kMicro, "uW"));
    out["rx_consumption"] = a;
  }
  out["epsilon_W"] = s.epsilon;
  out["initial_tx_buffer_W"] = s.initial_tx_buffer;
  out["windows"] = s.windows;
  out["rescale_policy"] = s.rescale_policy;
  return out;
}

MacConfig read_mac(Reader r) {
  MacConfig m;
  m.budgets = r.vector("budgets_W");
  m.noise_var = r.number("noise_var");
  m.min_rates = kbps_vector(r.vector("min_rates_kbps"));
  m.deficit = r.number("deficit_uW") * kMicro;
  m.efficiency = r.number("efficiency");
  try {
    m.receiver = architecture_from_string(r.text("receiver", "ideal"));
    r.finish();
    m.validate();
  } catch (const InvalidParameter& e) {
    throw ConfigError(r.where + ": " + e.what());
  }
  return m;
}

json write_mac(const MacConfig& m) {
  return {{"budgets_W", array(m.budgets)},
          {"noise_var", m.noise_var},
          {"min_rates_kbps", array(nats_vector(m.min_rates))},
          {"deficit_uW", tidy(m.deficit / kMicro)},
          {"efficiency", m.efficiency},
          {"receiver", std::string(to_string(m.receiver))}};
}

Vector unit_corner(const RegionTrace& trace, Index l) {
  for (const auto& p : trace.points) {
    if (p.point && p.weights(l) == 1.0) return p.point->rates;
  }
  throw NonConvergence("trace '" + trace.label + "' has no solved corner for user " + std::to_string(l));
}

}  // namespace

MarginalFading MarginalSpec::build(int user) const {
  if (kind == Kind::DiscretizedExponential) {
    return discretize_exponential(mean, step, cap, user, coherence_slots);
  }
  return make_marginal(user, support, probs, coherence_slots);
}

JointFadingDistribution FadingSpec::build() const {
  if (joint_gains) return joint_from_states(*joint_gains, *joint_probs);
  std::vector<MarginalFading> ms;
  for (std::size_t i = 0; i < marginals.size(); ++i) ms.push_back(marginals[i].build(static_cast<int>(i)));
  return joint_product(ms);
}

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Region: return "region";
    case ExperimentKind::Simulate: return "simulate";
    case ExperimentKind::MacRegion: return "mac-region";
    case ExperimentKind::FigurePreset: return "figure-preset";
  }
  return "region";
}

ExperimentKind experiment_kind_from_string(std::string_view name) {
  if (name == "region") return ExperimentKind::Region;
  if (name == "simulate") return ExperimentKind::Simulate;
  if (name == "mac-region") return ExperimentKind::MacRegion;
  if (name == "figure-preset") return ExperimentKind::FigurePreset;
  throw ConfigError("unknown experiment kind '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
  try {
    system.validate();
    if (points < 2) throw ConfigError("solver.points must be at least 2");
    const JointFadingDistribution dist = fading.build();
    if (kind != ExperimentKind::MacRegion && dist.num_users() != system.num_users()) {
      throw ConfigError("fading has " + std::to_string(dist.num_users()) + " users, system has " +
                        std::to_string(system.num_users()));
    }
    if (policy_weights.size() != 0 &&
        (policy_weights.size() != system.num_users() || (policy_weights.array() < 0.0).any())) {
      throw ConfigError("policy_weights: one nonnegative weight per user");
    }
    if (kind == ExperimentKind::Simulate && !sim) throw ConfigError("simulate needs a 'sim' block");
    if (sim) sim->validate(system.num_users());
    if (kind == ExperimentKind::MacRegion) {
      if (!mac) throw ConfigError("mac-region needs a 'mac' block");
      if (dist.num_users() != mac->num_users()) throw ConfigError("fading and mac sizes differ");
    }
    if (mac) mac->validate();
    if (kind == ExperimentKind::FigurePreset) {
      const auto names = figure_names();
      if (std::find(names.begin(), names.end(), preset) == names.end()) {
        throw ConfigError("unknown figure preset '" + preset + "'");
      }
    }
  } catch (const InvalidParameter& e) {
    throw ConfigError(e.what());
  }
}

ExperimentConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config: expected a JSON object");
  try {
    Reader r{doc, "config"};
    ExperimentConfig cfg;
    cfg.kind = experiment_kind_from_string(r.text("kind", "region"));
    cfg.label = r.text("label", "");
    cfg.preset = r.text("preset", cfg.kind == ExperimentKind::FigurePreset ? "fig2" : "");
    if (cfg.kind == ExperimentKind::FigurePreset && !r.has("system")) {
      const std::string preset = cfg.preset;
      cfg = preset_experiment(ExperimentKind::FigurePreset);
      cfg.preset = preset;
      cfg.label = r.text("label", "");
    } else {
      cfg.system = read_system(r.child("system"));
      cfg.fading = read_fading(r.child("fading"));
    }
    if (r.has("solver")) cfg.solver = read_solver(r.child("solver"), cfg.points);
    if (r.has("policy_weights")) cfg.policy_weights = r.vector("policy_weights");
    if (r.has("sim")) cfg.sim = read_sim(r.child("sim"));
    if (r.has("mac")) cfg.mac = read_mac(r.child("mac"));
    r.finish();
    cfg.validate();
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const InvalidParameter& e) {
    throw ConfigError(e.what());
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error reading " + path.string());
  return parse_config(buf.str());
}

std::string dump_config(const ExperimentConfig& cfg) {
  json doc;
  doc["kind"] = std::string(to_string(cfg.kind));
  if (!cfg.label.empty()) doc["label"] = cfg.label;
  if (!cfg.preset.empty()) doc["preset"] = cfg.preset;
  doc["system"] = write_system(cfg.system);
  doc["fading"] = write_fading(cfg.fading);
  doc["solver"] = write_solver(cfg.solver, cfg.points);
  if (cfg.policy_weights.size() > 0) doc["policy_weights"] = array(cfg.policy_weights);
  if (cfg.sim) doc["sim"] = write_sim(*cfg.sim);
  if (cfg.mac) doc["mac"] = write_mac(*cfg.mac);
  return doc.dump(2) + "\n";
}

SystemConfig preset_system(Architecture rx1, Architecture rx2) {
  SystemConfig cfg;
  cfg.noise_vars = Vector(2);
  cfg.noise_vars << 0.8, 1.6;
  cfg.min_rates = Vector(2);
  cfg.min_rates << kbps_to_nats(300.0), kbps_to_nats(150.0);
  cfg.rx_consumption_mean = Vector(2);
  *cfg.rx_consumption_mean << 90.0 * kMicro, 50.0 * kMicro;
  cfg.rx_ambient_mean = Vector(2);
  *cfg.rx_ambient_mean << 30.0 * kMicro, 20.0 * kMicro;
  cfg.derive_deficits();
  cfg.efficiency = 1e-4;
  cfg.tx_budget = 10.0;
  cfg.architectures = {rx1, rx2};
  cfg.validate();
  return cfg;
}

FadingSpec preset_fading() {
  FadingSpec spec;
  for (const double mean : {0.8, 0.5}) {
    MarginalSpec m;
    m.mean = mean;
    spec.marginals.push_back(m);
  }
  return spec;
}

MacConfig preset_mac() {
  MacConfig m;
  m.budgets = Vector(2);
  m.budgets << 6.0, 4.0;
  m.noise_var = 1.0;
  m.min_rates = Vector(2);
  m.min_rates << kbps_to_nats(300.0), kbps_to_nats(150.0);
  m.deficit = 60.0 * kMicro;
  m.efficiency = 1e-4;
  return m;
}

ExperimentConfig preset_experiment(ExperimentKind kind) {
  ExperimentConfig cfg;
  cfg.kind = kind;
  cfg.system = preset_system(Architecture::Ideal, Architecture::Ideal);
  cfg.fading = preset_fading();
  if (kind == ExperimentKind::Simulate) {
    SimConfig s;
    s.tx_harvest = {HarvestProcessSpec::Kind::Uniform, 10.0, 1.0};
    s.epsilon = 0.1;
    for (Index l = 0; l < 2; ++l) {
      s.rx_harvest.push_back(HarvestProcessSpec::constant((*cfg.system.rx_ambient_mean)(l)));
      s.rx_consumption.push_back(HarvestProcessSpec::constant((*cfg.system.rx_consumption_mean)(l)));
    }
    cfg.sim = s;
    cfg.policy_weights = Vector::Ones(2);
  }
  if (kind == ExperimentKind::MacRegion) cfg.mac = preset_mac();
  if (kind == ExperimentKind::FigurePreset) cfg.preset = "fig2";
  return cfg;
}

SystemConfig without_rf_transfer(SystemConfig cfg) {
  cfg.deficits.setZero();
  cfg.rx_ambient_mean.reset();
  cfg.rx_consumption_mean.reset();
  cfg.architectures.assign(cfg.architectures.size(), Architecture::Ideal);
  return cfg;
}

std::vector<std::string> figure_names() { return {"fig2", "fig3", "fig4", "fig5", "fig6"}; }

namespace {

SystemConfig scaled_deficits(SystemConfig cfg, double factor) {
  cfg.deficits *= factor;
  cfg.rx_ambient_mean.reset();
  cfg.rx_consumption_mean.reset();
  return cfg;
}

std::string level_name(double factor) {
  std::ostringstream os;
  os << factor;
  return os.str();
}

}  // namespace

std::vector<Curve> figure_curves(std::string_view figure) {
  constexpr auto I = Architecture::Ideal;
  constexpr auto T = Architecture::TimeSwitching;
  constexpr auto P = Architecture::PowerSplitting;
  std::vector<Curve> out;
  if (figure == "fig2") {
    out.push_back({"ideal", preset_system(I, I), {}});
    out.push_back({"ts", preset_system(T, T), {}});
    out.push_back({"ps", preset_system(P, P), {}});
    SystemConfig free = without_rf_transfer(preset_system(I, I));
    free.min_rates.setZero();
    out.push_back({"ideal-no-min-rates", free, {}});
    out.push_back({"no-rf-transfer", without_rf_transfer(preset_system(I, I)), {}});
  } else if (figure == "fig3") {
    out.push_back({"ts-budget-10", preset_system(T, T), {}});
    out.push_back({"ps-budget-10", preset_system(P, P), {}});
    out.push_back({"ps-ts-budget-10", preset_system(P, T), {}});
    SystemConfig big = preset_system(P, T);
    big.tx_budget = 15.0;
    out.push_back({"ps-ts-budget-15", big, {}});
  } else if (figure == "fig4" || figure == "fig5") {
    const Architecture a = figure == "fig4" ? T : P;
    const std::string tag = figure == "fig4" ? "ts" : "ps";
    for (const double f : kDeficitLevels) {
      out.push_back({tag + "-deficit-x" + level_name(f), scaled_deficits(preset_system(a, a), f), {}});
    }
  } else if (figure == "fig6") {
    const MacConfig mac = preset_mac();
    out.push_back({"mac", dual_broadcast_config(mac), mac});
    out.push_back({"bc", dual_broadcast_config(mac), {}});
  } else {
    throw ConfigError("unknown figure preset '" + std::string(figure) + "'");
  }
  return out;
}

RateGainReport rate_gain_report(const RegionTrace& ideal, const RegionTrace& baseline,
                                const SystemConfig& cfg) {
  const Index users = cfg.num_users();
  RateGainReport rep;
  rep.ideal_corner = Vector(users);
  rep.baseline_corner = Vector(users);
  for (Index l = 0; l < users; ++l) {
    rep.ideal_corner(l) = unit_corner(ideal, l)(l);
    rep.baseline_corner(l) = unit_corner(baseline, l)(l);
  }
  rep.gain = rep.ideal_corner.cwiseQuotient(rep.baseline_corner).array() - 1.0;
  // Without RF transfer a receiver can only stay on for the fraction of time
  // its ambient harvest covers its consumption.
  rep.duty_cycle_gain = Vector::Constant(users, std::numeric_limits<double>::quiet_NaN());
  if (cfg.rx_ambient_mean && cfg.rx_consumption_mean) {
    const Vector duty = cfg.rx_ambient_mean->cwiseQuotient(*cfg.rx_consumption_mean).cwiseMin(1.0);
    rep.duty_cycle_gain =
        rep.ideal_corner.cwiseQuotient(rep.baseline_corner.cwiseProduct(duty)).array() - 1.0;
  }
  rep.quoted = Vector(2);
  rep.quoted << 2.0, 0.67;
  rep.within_tolerance = users == 2;
  for (Index l = 0; l < std::min<Index>(users, 2); ++l) {
    rep.within_tolerance = rep.within_tolerance && std::abs(rep.gain(l) - rep.quoted(l)) <= 0.3 * rep.quoted(l);
  }
  std::ostringstream os;
  os << "corner rate gain of ideal RF transfer over the no-RF baseline (constraint dropped):";
  for (Index l = 0; l < users; ++l) os << " rx" << (l + 1) << " " << 100.0 * rep.gain(l) << "%";
  os << "; quoted:";
  for (Index l = 0; l < rep.quoted.size(); ++l) os << " rx" << (l + 1) << " " << 100.0 * rep.quoted(l) << "%";
  os << "; duty-cycle baseline reading:";
  for (Index l = 0; l < users; ++l) os << " rx" << (l + 1) << " " << 100.0 * rep.duty_cycle_gain(l) << "%";
  rep.summary = os.str();
  return rep;
}

bool FigureResult::complete() const {
  for (const auto& r : regions) {
    if (!r.complete()) return false;
  }
  if (mac && !mac->complete()) return false;
  return true;
}

DualityReport check_duality(const MacTrace& mac, const RegionTrace& bc,
                            const JointFadingDistribution& dist, const SolverOptions& opts) {
  const SystemConfig cfg = bc.config;
  auto refine = [&](const Vector& w) -> std::optional<Vector> {
    try {
      return fixed_point_fractions(cfg, dist, w, opts).rates;
    } catch (const Error&) {
      return std::nullopt;
    }
  };
  return duality_containment(mac, bc, 1e-6, refine);
}

FigureResult run_figure(std::string_view figure, const JointFadingDistribution& dist, int points,
                        const SolverOptions& opts) {
  FigureResult out;
  out.figure = std::string(figure);
  for (const auto& curve : figure_curves(figure)) {
    if (curve.mac) {
      out.mac = trace_mac_region(*curve.mac, dist, points, opts, curve.name);
    } else {
      out.regions.push_back(trace_region(curve.system, dist, points, opts, curve.name));
    }
  }
  if (out.mac && !out.regions.empty()) out.duality = check_duality(*out.mac, out.regions.front(), dist, opts);
  if (figure == "fig2") {
    const RegionTrace* ideal = nullptr;
    const RegionTrace* base = nullptr;
    for (const auto& r : out.regions) {
      if (r.label == "ideal") ideal = &r;
      if (r.label == "no-rf-transfer") base = &r;
    }
    if (ideal && base) {
      try {
        out.rate_gain = rate_gain_report(*ideal, *base, preset_system(Architecture::Ideal, Architecture::Ideal));
      } catch (const Error&) {
        // a missing corner leaves the report out
      }
    }
  }
  return out;
}

}  // namespace swipt
