#include "swipt/simulator.hpp"

#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>

namespace swipt {

namespace {

enum Stream : std::uint32_t {
  kTxHarvest = 1,
  kFading = 2,
  kSwitching = 10,   // + receiver
  kAmbient = 100,    // + receiver
  kConsumption = 200 // + receiver
};

std::mt19937_64 make_stream(std::uint64_t seed, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream};
  return std::mt19937_64(seq);
}

std::int64_t to_quanta(double energy) { return std::llround(energy / kEnergyQuantum); }
double from_quanta(std::int64_t q) { return static_cast<double>(q) * kEnergyQuantum; }

// Joint state sampler honouring per-user coherence blocks for product laws.
class FadingSampler {
 public:
  FadingSampler(const JointFadingDistribution& dist, std::mt19937_64 rng) : rng_(std::move(rng)) {
    if (dist.is_product()) {
      const std::size_t users = dist.marginals.size();
      stride_.assign(users, 1);
      for (std::size_t l = users - 1; l > 0; --l) {
        stride_[l - 1] = stride_[l] * dist.marginals[l].size();
      }
      for (const auto& m : dist.marginals) {
        per_user_.emplace_back(m.probs.data(), m.probs.data() + m.probs.size());
        coherence_.push_back(std::max(1, m.coherence_slots));
      }
      index_.assign(users, 0);
    } else {
      joint_ = std::discrete_distribution<Index>(dist.probs.data(), dist.probs.data() + dist.probs.size());
    }
  }

  Index next(std::int64_t slot) {
    if (per_user_.empty()) return joint_(rng_);
    Index state = 0;
    for (std::size_t l = 0; l < per_user_.size(); ++l) {
      if (slot % coherence_[l] == 0) index_[l] = per_user_[l](rng_);
      state += index_[l] * stride_[l];
    }
    return state;
  }

 private:
  std::mt19937_64 rng_;
  std::discrete_distribution<Index> joint_;
  std::vector<std::discrete_distribution<Index>> per_user_;
  std::vector<int> coherence_;
  std::vector<Index> stride_;
  std::vector<Index> index_;
};

}  // namespace

std::string_view to_string(HarvestProcessSpec::Kind kind) {
  switch (kind) {
    case HarvestProcessSpec::Kind::Constant: return "constant";
    case HarvestProcessSpec::Kind::Uniform: return "uniform";
    case HarvestProcessSpec::Kind::ShiftedExponential: return "shifted-exponential";
  }
  return "constant";
}

HarvestProcessSpec::Kind harvest_kind_from_string(std::string_view name) {
  if (name == "constant") return HarvestProcessSpec::Kind::Constant;
  if (name == "uniform") return HarvestProcessSpec::Kind::Uniform;
  if (name == "shifted-exponential") return HarvestProcessSpec::Kind::ShiftedExponential;
  throw InvalidParameter("unknown harvest process kind '" + std::string(name) + "'");
}

void HarvestProcessSpec::validate() const {
  if (!(mean > 0.0) || !std::isfinite(mean)) throw InvalidParameter("harvest mean must be positive");
  if (kind != Kind::Constant && !(floor > 0.0 && floor <= mean)) {
    throw InvalidParameter("harvest floor must lie in (0, mean]");
  }
}

double HarvestProcessSpec::draw(std::mt19937_64& rng) const {
  switch (kind) {
    case Kind::Constant: return mean;
    case Kind::Uniform:
      return floor == mean ? mean : std::uniform_real_distribution<double>(floor, 2.0 * mean - floor)(rng);
    case Kind::ShiftedExponential:
      return floor == mean ? mean
                           : floor + std::exponential_distribution<double>(1.0 / (mean - floor))(rng);
  }
  return mean;
}

void SimConfig::validate(Index users) const {
  if (horizon < 1) throw InvalidParameter("simulation horizon must be at least one slot");
  if (windows < 1 || windows > horizon) throw InvalidParameter("window count must lie in [1, horizon]");
  tx_harvest.validate();
  if (!(margin() > 0.0 && margin() < tx_harvest.mean)) {
    throw InvalidParameter("epsilon must lie in (0, transmitter harvest mean)");
  }
  if (initial_tx_buffer < 0.0) throw InvalidParameter("initial buffer must be nonnegative");
  for (const auto* v : {&rx_harvest, &rx_consumption}) {
    if (!v->empty() && static_cast<Index>(v->size()) != users) {
      throw InvalidParameter("receiver process list must have one entry per receiver");
    }
    for (const auto& spec : *v) spec.validate();
  }
}

StateAllocation truncated_policy(double available, const StateAllocation& planned) {
  if (available < 0.0) throw InvalidParameter("truncated_policy: available energy is negative");
  const double total = planned.sum();
  if (total <= available) return planned;
  return planned * (available / total);
}

std::vector<std::uint8_t> switching_sequence(std::uint64_t seed, double p, std::int64_t horizon) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidParameter("switching probability must lie in [0, 1]");
  auto rng = make_stream(seed, kSwitching);
  std::bernoulli_distribution coin(p);
  std::vector<std::uint8_t> out(static_cast<std::size_t>(std::max<std::int64_t>(horizon, 0)));
  for (auto& x : out) x = coin(rng) ? 1 : 0;
  return out;
}

SimReport simulate(const SystemConfig& cfg, const PowerPolicy& policy, const HarvestFractions& fr,
                   const JointFadingDistribution& dist, const SimConfig& sim) {
  const Index users = cfg.num_users();
  cfg.validate();
  dist.validate();
  fr.validate(users);
  sim.validate(users);
  if (dist.num_users() != users || policy.powers.rows() != dist.num_states() ||
      policy.powers.cols() != users) {
    throw InvalidParameter("simulate: policy, distribution and config dimensions disagree");
  }

  SimReport rep;
  Matrix powers = policy.powers;
  const double spend = (powers * Vector::Ones(users)).dot(dist.probs);
  const double limit = sim.tx_harvest.mean - sim.margin();
  if (spend > limit * (1.0 + 1e-12)) {
    if (!sim.rescale_policy) {
      throw InvalidParameter("simulate: policy spends " + std::to_string(spend) +
                             " per slot, above harvest mean minus margin " + std::to_string(limit));
    }
    rep.policy_scale = limit / spend;
    powers *= rep.policy_scale;
  }

  // Receiver processes: explicit specs, else constants from the config means,
  // with consumption defaulting to ambient plus deficit. Absent means zero.
  std::vector<std::optional<HarvestProcessSpec>> ambient(static_cast<std::size_t>(users));
  std::vector<std::optional<HarvestProcessSpec>> consumption(static_cast<std::size_t>(users));
  for (Index l = 0; l < users; ++l) {
    const auto i = static_cast<std::size_t>(l);
    if (!sim.rx_harvest.empty()) {
      ambient[i] = sim.rx_harvest[i];
    } else if (cfg.rx_ambient_mean && (*cfg.rx_ambient_mean)(l) > 0.0) {
      ambient[i] = HarvestProcessSpec::constant((*cfg.rx_ambient_mean)(l));
    }
    if (!sim.rx_consumption.empty()) {
      consumption[i] = sim.rx_consumption[i];
    } else {
      double c = cfg.rx_consumption_mean ? (*cfg.rx_consumption_mean)(l) : 0.0;
      if (!(c > 0.0)) c = (ambient[i] ? ambient[i]->mean : 0.0) + cfg.deficits(l);
      if (c > 0.0) consumption[i] = HarvestProcessSpec::constant(c);
    }
  }

  // Decoding-slot rates: TS receivers lose whole slots, not SNR.
  HarvestFractions decode_fr = fr;
  for (Index l = 0; l < users; ++l) {
    if (cfg.arch(l) == Architecture::TimeSwitching) decode_fr.harvest(l) = 0.0;
  }
  Matrix planned_rates(dist.num_states(), users);
  Vector planned_total = powers * Vector::Ones(users);
  std::vector<std::int64_t> planned_quanta(static_cast<std::size_t>(dist.num_states()));
  for (Index s = 0; s < dist.num_states(); ++s) {
    const Vector h = dist.gains.row(s).transpose();
    planned_rates.row(s) = per_state_rates<double>(h, powers.row(s).transpose(), cfg, decode_fr).transpose();
    planned_quanta[static_cast<std::size_t>(s)] = to_quanta(planned_total(s));
  }

  auto tx_rng = make_stream(sim.seed, kTxHarvest);
  FadingSampler fading(dist, make_stream(sim.seed, kFading));
  std::vector<std::mt19937_64> switch_rng, ambient_rng, consume_rng;
  std::vector<std::bernoulli_distribution> coin;
  for (Index l = 0; l < users; ++l) {
    const auto u = static_cast<std::uint32_t>(l);
    switch_rng.push_back(make_stream(sim.seed, kSwitching + u));
    ambient_rng.push_back(make_stream(sim.seed, kAmbient + u));
    consume_rng.push_back(make_stream(sim.seed, kConsumption + u));
    coin.emplace_back(cfg.arch(l) == Architecture::TimeSwitching ? fr.harvest(l) : 0.0);
  }

  rep.empirical_rates = Vector::Zero(users);
  rep.rf_harvested = Vector::Zero(users);
  rep.ambient_harvested = Vector::Zero(users);
  rep.consumed = Vector::Zero(users);
  rep.final_rx_buffers = Vector::Zero(users);
  rep.rx_drift_slope = Vector::Zero(users);
  rep.rx_deficit_events.assign(static_cast<std::size_t>(users), 0);

  std::int64_t buffer = to_quanta(sim.initial_tx_buffer);
  rep.initial_quanta = buffer;
  Vector rx_buffer = Vector::Zero(users);
  std::int64_t truncated_slots = 0;
  double spent_energy = 0.0;

  const std::int64_t half = sim.horizon / 2;
  std::int64_t buffer_at_half = buffer;
  Vector rx_at_half = rx_buffer;

  Vector rate(users), rf(users), tx(users);
  for (int w = 0; w < sim.windows; ++w) {
    const std::int64_t begin = sim.horizon * w / sim.windows;
    const std::int64_t end = sim.horizon * (w + 1) / sim.windows;
    SimWindow win;
    win.slots = end - begin;
    win.rates = Vector::Zero(users);
    win.rf = Vector::Zero(users);
    std::int64_t win_truncated = 0;
    double win_spend = 0.0;
    for (std::int64_t k = begin; k < end; ++k) {
      if (k == half) {
        buffer_at_half = buffer;
        rx_at_half = rx_buffer;
      }
      const std::int64_t harvest = to_quanta(sim.tx_harvest.draw(tx_rng));
      rep.harvest_quanta += harvest;
      buffer += harvest;

      const Index s = fading.next(k);
      const std::int64_t want = planned_quanta[static_cast<std::size_t>(s)];
      bool truncated = false;
      std::int64_t spend_q = want;
      tx = powers.row(s).transpose();
      if (want > buffer) {
        truncated = true;
        spend_q = buffer;
        tx = truncated_policy(from_quanta(buffer), tx);
        ++win_truncated;
      }
      buffer -= spend_q;
      rep.spend_quanta += spend_q;
      const double sent = from_quanta(spend_q);
      win_spend += sent;

      const Vector h = dist.gains.row(s).transpose();
      if (truncated) {
        rate = per_state_rates<double>(h, tx, cfg, decode_fr);
      } else {
        rate = planned_rates.row(s).transpose();
      }
      const double total = tx.sum();
      for (Index l = 0; l < users; ++l) {
        const double incident = cfg.efficiency * h(l) * total;
        bool erased = false;
        switch (cfg.arch(l)) {
          case Architecture::Ideal: rf(l) = incident; break;
          case Architecture::PowerSplitting: rf(l) = fr.harvest(l) * incident; break;
          case Architecture::TimeSwitching:
            erased = coin[static_cast<std::size_t>(l)](switch_rng[static_cast<std::size_t>(l)]);
            rf(l) = erased ? incident : 0.0;
            break;
        }
        if (erased) rate(l) = 0.0;
        if (!truncated && !erased && rate(l) < cfg.min_rates(l) - 1e-9) ++rep.min_rate_violations;

        const auto i = static_cast<std::size_t>(l);
        const double amb = ambient[i] ? ambient[i]->draw(ambient_rng[i]) : 0.0;
        const double use = consumption[i] ? consumption[i]->draw(consume_rng[i]) : 0.0;
        rep.ambient_harvested(l) += amb;
        rep.consumed(l) += use;
        rx_buffer(l) += amb + rf(l) - use;
        if (rx_buffer(l) < 0.0) {
          rx_buffer(l) = 0.0;
          ++rep.rx_deficit_events[static_cast<std::size_t>(l)];
        }
      }
      win.rates += rate;
      win.rf += rf;
    }
    rep.empirical_rates += win.rates;
    rep.rf_harvested += win.rf;
    spent_energy += win_spend;
    truncated_slots += win_truncated;
    const double n = static_cast<double>(win.slots);
    win.truncation_fraction = win.slots > 0 ? win_truncated / n : 0.0;
    win.avg_spend = win.slots > 0 ? win_spend / n : 0.0;
    if (win.slots > 0) {
      win.rates /= n;
      win.rf /= n;
    }
    rep.windows.push_back(std::move(win));
  }

  const double horizon = static_cast<double>(sim.horizon);
  rep.empirical_rates /= horizon;
  rep.rf_harvested /= horizon;
  rep.ambient_harvested /= horizon;
  rep.consumed /= horizon;
  rep.empirical_avg_spend = spent_energy / horizon;
  rep.truncation_fraction = static_cast<double>(truncated_slots) / horizon;
  rep.final_quanta = buffer;
  rep.final_tx_buffer = from_quanta(buffer);
  rep.final_rx_buffers = rx_buffer;
  const double span = static_cast<double>(sim.horizon - half);
  rep.drift_slope = from_quanta(buffer - buffer_at_half) / span;
  rep.rx_drift_slope = (rx_buffer - rx_at_half) / span;
  return rep;
}

void write_window_csv(std::ostream& os, const SimReport& report) {
  const Index users = report.empirical_rates.size();
  os << "window_index,truncation_fraction,avg_spend";
  for (Index l = 1; l <= users; ++l) os << ",rate" << l;
  for (Index l = 1; l <= users; ++l) os << ",rf" << l;
  os << '\n';
  char buf[40];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.12g", v);
    os << ',' << buf;
  };
  for (std::size_t w = 0; w < report.windows.size(); ++w) {
    const auto& win = report.windows[w];
    os << w;
    put(win.truncation_fraction);
    put(win.avg_spend);
    for (Index l = 0; l < users; ++l) put(win.rates(l));
    for (Index l = 0; l < users; ++l) put(win.rf(l));
    os << '\n';
  }
}

}  // namespace swipt
