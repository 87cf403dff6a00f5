#pragma once

// Bracketing plus TOMS 748 for the monotone one-dimensional dual searches.

#include "swipt/types.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

namespace swipt::detail {

// Bracket width relative to the larger end, so brackets touching zero still
// terminate.
inline bool narrow(double a, double b) {
  return std::abs(a - b) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b));
}

/// Gap g > 0 above the price floor with excess(g) <= 0 as close to the
/// crossing as doubles allow, for excess nonincreasing in g. The search runs
/// on log g, so gaps many orders of magnitude below the guess are reached in
/// a handful of steps. Gaps below `min_gap` (relative precision of the
/// floor) count as zero; if the budget is still slack there, min_gap is
/// returned. The last call to `excess` is made at the returned gap. When
/// `below` is given it receives the nearest smaller gap seen with positive
/// excess (or the returned gap when there is none), so callers can mix the
/// two sides of a jump.
template <typename F>
double clear_price(F&& excess, double guess, double min_gap, int max_iter, const std::string& what,
                   double* below = nullptr) {
  // Tightest points seen on either side; re-evaluations near the crossing
  // may differ in the last bits, so the answer is taken from these.
  double best_slack = std::numeric_limits<double>::infinity();
  double best_over = -std::numeric_limits<double>::infinity();
  auto f = [&](double x) {
    const double v = excess(std::exp(x));
    if (v <= 0.0) {
      best_slack = std::min(best_slack, x);
    } else {
      best_over = std::max(best_over, x);
    }
    return v;
  };
  constexpr double kLogMax = 700.0;
  const double log_min = min_gap > 0.0 ? std::max(std::log(min_gap), -kLogMax) : -kLogMax;
  double x = std::max(std::log(guess > 0.0 ? guess : 1.0), log_min);
  double fx = f(x);
  double lo = x, hi = x, flo = fx, fhi = fx;
  double step = 1.0;
  if (fx > 0.0) {
    while (fhi > 0.0) {
      if (hi > kLogMax) throw Infeasible("min-rate", what + ": no price brings the spend within budget");
      lo = hi;
      flo = fhi;
      hi = std::min(hi + step, kLogMax + 1.0);
      step *= 2.0;
      fhi = f(hi);
    }
  } else {
    while (flo <= 0.0) {
      if (lo <= log_min) {  // budget slack at the floor
        if (below != nullptr) *below = std::exp(lo);
        return std::exp(lo);
      }
      hi = lo;
      fhi = flo;
      lo = std::max(lo - step, log_min);
      step *= 2.0;
      flo = f(lo);
    }
  }
  if (fhi != 0.0) {
    std::uintmax_t iters = static_cast<std::uintmax_t>(max_iter);
    boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, narrow, iters);
  }
  const double root = best_slack;
  f(root);
  if (below != nullptr) *below = std::exp(best_over < root ? best_over : root);
  return std::exp(root);
}

/// Smallest-found t >= 0 with shortfall(t) >= 0, for shortfall nondecreasing
/// in t. Returns 0 when shortfall(0) >= 0. The last call to `shortfall` is
/// made at the returned value. `below`, when given, receives the nearest
/// smaller value seen with negative shortfall (or the returned value).
template <typename F>
double reach_target(F&& shortfall, double guess, int max_iter, const std::string& what,
                    double* below = nullptr) {
  double best_met = std::numeric_limits<double>::infinity();
  double best_short = -std::numeric_limits<double>::infinity();
  auto f = [&](double t) {
    const double v = shortfall(t);
    if (v >= 0.0) {
      best_met = std::min(best_met, t);
    } else {
      best_short = std::max(best_short, t);
    }
    return v;
  };
  double lo = 0.0;
  double flo = f(lo);
  if (flo >= 0.0) {
    if (below != nullptr) *below = 0.0;
    return 0.0;
  }
  double hi = guess > 0.0 ? guess : 1.0;
  double fhi = f(hi);
  for (int it = 0; fhi < 0.0; ++it) {
    if (it >= max_iter) throw Infeasible("rf-delivery", what + ": deficit exceeds the deliverable RF energy");
    lo = hi;
    flo = fhi;
    hi *= 2.0;
    fhi = f(hi);
  }
  if (fhi > 0.0) {
    std::uintmax_t iters = static_cast<std::uintmax_t>(max_iter);
    boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, narrow, iters);
  }
  const double root = best_met;
  f(root);
  if (below != nullptr) *below = best_short < root ? best_short : root;
  return root;
}

}  // namespace swipt::detail
