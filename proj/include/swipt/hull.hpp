#pragma once

// Tests on the down-closure of the convex hull of rate points, the shape of
// every region traced here.

#include "swipt/types.hpp"

namespace swipt::hull {

/// Largest signed distance by which `x` leaves the down-closed convex hull of
/// the rows of `points` (<= 0 when inside). Exact for two users; for more
/// users only the supplied `directions` (rows) are checked.
double outside_distance(const Vector& x, const Matrix& points);
double outside_distance(const Vector& x, const Matrix& points, const Matrix& directions);

/// Unit normal attaining outside_distance(x, points).
Vector worst_direction(const Vector& x, const Matrix& points);

/// Depth of row i inside the down-closed hull of the other rows
/// (negative when it lies outside). A traced boundary is convex when no
/// point is deeper than the tolerance.
double interior_depth(const Matrix& points, Index i);

/// Largest interior depth over all points, or -inf for fewer than 2 points.
double convexity_violation(const Matrix& points);

/// max over common directions of (w . a - w . b) / |w| for matched rows; the
/// support-function gap of trace a over trace b.
double support_excess(const Matrix& weights, const Matrix& a, const Matrix& b);

}  // namespace swipt::hull
