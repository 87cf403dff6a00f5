#include "swipt/fading.hpp"

#include <cmath>
#include <sstream>

namespace swipt {

namespace {

constexpr double kMarginalNormTol = 1e-12;
constexpr double kJointNormTol = 1e-10;

void require(bool cond, const std::string& msg) {
  if (!cond) throw InvalidParameter(msg);
}

}  // namespace

void MarginalFading::validate() const {
  require(support.size() > 0, "marginal fading: empty support");
  require(support.size() == probs.size(), "marginal fading: support/probs size mismatch");
  require(coherence_slots >= 1, "marginal fading: coherence_slots must be >= 1");
  for (Index i = 0; i < support.size(); ++i) {
    require(std::isfinite(support(i)) && support(i) > 0.0,
            "marginal fading: gains must be strictly positive");
    require(probs(i) >= 0.0, "marginal fading: negative probability");
    if (i > 0) require(support(i) > support(i - 1), "marginal fading: support must increase");
  }
  require(std::abs(probs.sum() - 1.0) <= kMarginalNormTol,
          "marginal fading: probabilities do not sum to 1");
}

void JointFadingDistribution::validate() const {
  require(gains.rows() > 0 && gains.cols() > 0, "joint fading: no states");
  require(gains.rows() == probs.size(), "joint fading: gains/probs size mismatch");
  require((gains.array() > 0.0).all(), "joint fading: gains must be strictly positive");
  require((probs.array() >= 0.0).all(), "joint fading: negative probability");
  require(std::abs(probs.sum() - 1.0) <= kJointNormTol,
          "joint fading: probabilities do not sum to 1");
}

MarginalFading discretize_exponential(double mean_gain, double step, double cap, int user,
                                      int coherence_slots) {
  require(mean_gain > 0.0 && step > 0.0 && cap > 0.0,
          "discretize_exponential: parameters must be positive");
  const double ratio = cap / step;
  const auto bins = static_cast<Index>(std::llround(ratio));
  require(bins >= 1 && std::abs(ratio - static_cast<double>(bins)) <= 1e-9 * ratio,
          "discretize_exponential: cap must be a positive multiple of step");

  MarginalFading m;
  m.user = user;
  m.coherence_slots = coherence_slots;
  m.support.resize(bins);
  m.probs.resize(bins);
  // Pr(h - step < H <= h) = e^{-(h-step)/m} (1 - e^{-step/m})
  const double bin_mass = -std::expm1(-step / mean_gain);
  for (Index k = 0; k < bins; ++k) {
    const double h = step * static_cast<double>(k + 1);
    m.support(k) = h;
    const double left = step * static_cast<double>(k);
    m.probs(k) = (k + 1 < bins) ? std::exp(-left / mean_gain) * bin_mass
                                : std::exp(-left / mean_gain);
  }
  m.validate();
  return m;
}

MarginalFading make_marginal(int user, Vector support, Vector probs, int coherence_slots) {
  MarginalFading m{user, std::move(support), std::move(probs), coherence_slots};
  m.validate();
  return m;
}

JointFadingDistribution joint_product(const std::vector<MarginalFading>& marginals) {
  require(!marginals.empty(), "joint_product: no marginals");
  Index count = 1;
  for (const auto& m : marginals) {
    m.validate();
    count *= m.size();
  }
  const auto users = static_cast<Index>(marginals.size());
  JointFadingDistribution dist;
  dist.gains.resize(count, users);
  dist.probs.resize(count);
  dist.marginals = marginals;
  for (Index s = 0; s < count; ++s) {
    Index rest = s;
    double p = 1.0;
    for (Index l = users - 1; l >= 0; --l) {
      const auto& m = marginals[static_cast<std::size_t>(l)];
      const Index k = rest % m.size();
      rest /= m.size();
      dist.gains(s, l) = m.support(k);
      p *= m.probs(k);
    }
    dist.probs(s) = p;
  }
  dist.validate();
  return dist;
}

JointFadingDistribution joint_from_states(Matrix gains, Vector probs) {
  JointFadingDistribution dist;
  dist.gains = std::move(gains);
  dist.probs = std::move(probs);
  dist.validate();
  return dist;
}

Vector marginalize(const JointFadingDistribution& dist, int user) {
  require(dist.is_product(), "marginalize: distribution has no product structure");
  const auto& m = dist.marginals.at(static_cast<std::size_t>(user));
  Index inner = 1;
  for (std::size_t l = static_cast<std::size_t>(user) + 1; l < dist.marginals.size(); ++l) {
    inner *= dist.marginals[l].size();
  }
  Vector out = Vector::Zero(m.size());
  for (Index s = 0; s < dist.num_states(); ++s) {
    out((s / inner) % m.size()) += dist.probs(s);
  }
  return out;
}

}  // namespace swipt
