#pragma once

#include "swipt/types.hpp"

#include <functional>
#include <vector>

namespace swipt {

/// Discrete fading-gain law of one receiver.
struct MarginalFading {
  int user = 0;
  Vector support;  // strictly increasing, strictly positive gains
  Vector probs;
  int coherence_slots = 1;

  Index size() const { return support.size(); }
  double mean() const { return support.dot(probs); }
  void validate() const;
};

/// Joint channel-gain states. `gains` is states x users.
struct JointFadingDistribution {
  Matrix gains;
  Vector probs;
  // Present when built by joint_product; the joint state index is then the
  // row-major (user 0 most significant) mixed-radix index of the marginals.
  std::vector<MarginalFading> marginals;

  Index num_states() const { return gains.rows(); }
  Index num_users() const { return gains.cols(); }
  bool is_product() const { return !marginals.empty(); }
  void validate() const;
};

/// Right-endpoint discretization of an exponential gain law on
/// {step, 2 step, ..., cap}. The zero bin is merged into `step` and the tail
/// beyond cap - step into `cap`.
MarginalFading discretize_exponential(double mean_gain, double step, double cap,
                                      int user = 0, int coherence_slots = 1);

MarginalFading make_marginal(int user, Vector support, Vector probs,
                             int coherence_slots = 1);

JointFadingDistribution joint_product(const std::vector<MarginalFading>& marginals);

/// Explicit (possibly correlated) state list.
JointFadingDistribution joint_from_states(Matrix gains, Vector probs);

template <typename F>
double expectation(const JointFadingDistribution& dist, F&& f) {
  double acc = 0.0;
  for (Index s = 0; s < dist.num_states(); ++s) {
    acc += dist.probs(s) * f(dist.gains.row(s).transpose().eval());
  }
  return acc;
}

/// Marginal probabilities of `user` recovered by summing joint probabilities.
Vector marginalize(const JointFadingDistribution& dist, int user);

}  // namespace swipt
