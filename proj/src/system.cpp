#include "swipt/system.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace swipt {

std::string_view to_string(Architecture arch) {
  switch (arch) {
    case Architecture::Ideal: return "ideal";
    case Architecture::TimeSwitching: return "ts";
    case Architecture::PowerSplitting: return "ps";
  }
  return "ideal";
}

Architecture architecture_from_string(std::string_view name) {
  if (name == "ideal") return Architecture::Ideal;
  if (name == "ts" || name == "time-switching") return Architecture::TimeSwitching;
  if (name == "ps" || name == "power-splitting") return Architecture::PowerSplitting;
  throw InvalidParameter("unknown receiver architecture '" + std::string(name) + "'");
}

double kbps_to_nats(double kbps) {
  return kbps * 1e3 / kChannelUsesPerSecond * std::numbers::ln2;
}

double nats_to_kbps(double nats) {
  return nats / std::numbers::ln2 * kChannelUsesPerSecond / 1e3;
}

bool SystemConfig::all_ideal() const {
  return std::all_of(architectures.begin(), architectures.end(),
                     [](Architecture a) { return a == Architecture::Ideal; });
}

bool SystemConfig::needs_fractions() const {
  for (Index l = 0; l < num_users(); ++l) {
    if (arch(l) != Architecture::Ideal && deficits(l) > 0.0) return true;
  }
  return false;
}

void SystemConfig::validate() const {
  const Index users = num_users();
  auto require = [](bool c, const char* msg) {
    if (!c) throw InvalidParameter(msg);
  };
  require(users >= 1, "config: at least one user required");
  require(min_rates.size() == users && deficits.size() == users &&
              static_cast<Index>(architectures.size()) == users,
          "config: per-user vectors must have num_users entries");
  require((noise_vars.array() > 0.0).all(), "config: noise variances must be positive");
  require((min_rates.array() >= 0.0).all(), "config: min rates must be nonnegative");
  require((deficits.array() >= 0.0).all(), "config: deficits must be nonnegative");
  require(efficiency > 0.0 && efficiency <= 1.0, "config: efficiency must lie in (0, 1]");
  require(tx_budget > 0.0, "config: tx budget must be positive");
  if (rx_ambient_mean || rx_consumption_mean) {
    require(rx_ambient_mean && rx_consumption_mean,
            "config: ambient and consumption means must be given together");
    require(rx_ambient_mean->size() == users && rx_consumption_mean->size() == users,
            "config: receiver energy means must have num_users entries");
    const Vector derived = (*rx_consumption_mean - *rx_ambient_mean).cwiseMax(0.0);
    require(((derived - deficits).array().abs() <= 1e-15 + 1e-12 * derived.array()).all(),
            "config: deficits inconsistent with receiver energy means");
  }
}

void SystemConfig::derive_deficits() {
  if (rx_ambient_mean && rx_consumption_mean) {
    deficits = (*rx_consumption_mean - *rx_ambient_mean).cwiseMax(0.0);
  }
}

SystemConfig make_config(Vector noise_vars, Vector min_rates, Vector deficits,
                         double efficiency, double tx_budget,
                         std::vector<Architecture> architectures) {
  SystemConfig cfg;
  cfg.noise_vars = std::move(noise_vars);
  cfg.min_rates = std::move(min_rates);
  cfg.deficits = std::move(deficits);
  cfg.efficiency = efficiency;
  cfg.tx_budget = tx_budget;
  cfg.architectures = std::move(architectures);
  cfg.validate();
  return cfg;
}

void HarvestFractions::validate(Index users) const {
  if (harvest.size() != users) throw InvalidParameter("harvest fractions: wrong size");
  if (!((harvest.array() >= 0.0) && (harvest.array() <= 1.0)).all()) {
    throw InvalidParameter("harvest fractions must lie in [0, 1]");
  }
}

}  // namespace swipt
