#pragma once

// Experiment configurations (JSON documents in kbps / W / uW) and the built-in
// presets for the published two-user example.

#include "swipt/mac.hpp"
#include "swipt/simulator.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace swipt {

struct MarginalSpec {
  enum class Kind { DiscretizedExponential, Explicit };
  Kind kind = Kind::DiscretizedExponential;
  double mean = 1.0;
  double step = 0.1;
  double cap = 10.0;
  Vector support;  // Explicit only
  Vector probs;
  int coherence_slots = 1;

  MarginalFading build(int user) const;
};

/// Either independent marginals (product law) or an explicit joint table.
struct FadingSpec {
  std::vector<MarginalSpec> marginals;
  std::optional<Matrix> joint_gains;
  std::optional<Vector> joint_probs;

  JointFadingDistribution build() const;
};

enum class ExperimentKind { Region, Simulate, MacRegion, FigurePreset };

std::string_view to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(std::string_view name);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Region;
  std::string label;
  SystemConfig system;
  FadingSpec fading;
  SolverOptions solver;
  int points = 32;
  Vector policy_weights;         // boundary point simulated by `simulate`
  std::optional<SimConfig> sim;
  std::optional<MacConfig> mac;
  std::string preset;            // figure-preset name

  void validate() const;
};

/// Parses a JSON document; throws ConfigError on malformed input or bad units.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Canonical JSON (SI units) that parse_config maps back to the same config.
std::string dump_config(const ExperimentConfig& cfg);

/// The published parameter block: sigma^2 = (0.8, 1.6), budget 10 W,
/// rho = (300, 150) kbps, Delta = (60, 30) uW, eta = 1e-4, with the given
/// receiver architectures.
SystemConfig preset_system(Architecture rx1, Architecture rx2);
/// Discretized Rayleigh fading with means (0.8, 0.5), step 0.1 on (0, 10].
FadingSpec preset_fading();
/// Two-transmitter setup: budgets (6, 4) W, sigma^2 = 1, Delta = 60 uW.
MacConfig preset_mac();
ExperimentConfig preset_experiment(ExperimentKind kind);

/// No-RF-transfer baseline: deficits and harvesting dropped, same budget
/// and minimum rates, ideal receivers.
SystemConfig without_rf_transfer(SystemConfig cfg);

/// Scale factors on the published deficits used for the deficit sweeps.
inline constexpr double kDeficitLevels[] = {0.5, 1.0};

struct Curve {
  std::string name;
  SystemConfig system;
  std::optional<MacConfig> mac;  // set for multiple-access curves
};

std::vector<std::string> figure_names();
/// Curves of one preset figure (fig2 ... fig6). Throws ConfigError otherwise.
std::vector<Curve> figure_curves(std::string_view figure);

/// Corner-point rate ratios of the ideal region over the no-RF baseline.
struct RateGainReport {
  Vector ideal_corner;      // R_l at mu = e_l, nats/use
  Vector baseline_corner;
  Vector gain;              // ideal / baseline - 1
  Vector duty_cycle_gain;   // 1 / (1 - Delta_l / E[T^r(l)]) - 1
  Vector quoted{Vector::Zero(0)};
  bool within_tolerance = false;
  std::string summary;
};

RateGainReport rate_gain_report(const RegionTrace& ideal, const RegionTrace& baseline,
                                const SystemConfig& cfg);

struct FigureResult {
  std::string figure;
  std::vector<RegionTrace> regions;     // broadcast curves, labelled by name
  std::optional<MacTrace> mac;
  std::optional<DualityReport> duality;
  std::optional<RateGainReport> rate_gain;

  bool complete() const;
};

/// Traces every curve of a preset figure on the given fading law.
FigureResult run_figure(std::string_view figure, const JointFadingDistribution& dist, int points,
                        const SolverOptions& opts = {});

/// Duality check with broadcast refinement along violated facets.
DualityReport check_duality(const MacTrace& mac, const RegionTrace& bc,
                            const JointFadingDistribution& dist, const SolverOptions& opts = {});

}  // namespace swipt
