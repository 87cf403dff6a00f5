#include "swipt/hull.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace swipt::hull {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Unit normals containing every facet normal of the down-closed hull of the
// given rows (2-D), or axis and diagonal directions in higher dimension.
Matrix facet_directions(const Matrix& pts) {
  const Index dim = pts.cols();
  std::vector<Vector> dirs;
  for (Index k = 0; k < dim; ++k) dirs.push_back(Vector::Unit(dim, k));
  if (dim == 2) {
    for (Index i = 0; i < pts.rows(); ++i) {
      for (Index j = i + 1; j < pts.rows(); ++j) {
        const double dx = pts(j, 0) - pts(i, 0);
        const double dy = pts(j, 1) - pts(i, 1);
        if (dx * dy < 0.0) {
          Vector d(2);
          d << std::abs(dy), std::abs(dx);
          dirs.push_back(d.normalized());
        }
      }
    }
  } else {
    dirs.push_back(Vector::Ones(dim).normalized());
  }
  Matrix out(static_cast<Index>(dirs.size()), dim);
  for (std::size_t r = 0; r < dirs.size(); ++r) out.row(static_cast<Index>(r)) = dirs[r].transpose();
  return out;
}

double support(const Matrix& pts, const Vector& d) { return (pts * d).maxCoeff(); }

}  // namespace

double outside_distance(const Vector& x, const Matrix& points, const Matrix& directions) {
  if (points.rows() == 0) return kInf;
  double worst = -kInf;
  for (Index r = 0; r < directions.rows(); ++r) {
    const Vector d = directions.row(r).transpose().normalized();
    worst = std::max(worst, d.dot(x) - support(points, d));
  }
  return worst;
}

double outside_distance(const Vector& x, const Matrix& points) {
  return outside_distance(x, points, facet_directions(points));
}

Vector worst_direction(const Vector& x, const Matrix& points) {
  const Matrix dirs = facet_directions(points);
  Vector best = dirs.row(0).transpose().normalized();
  double worst = -kInf;
  for (Index r = 0; r < dirs.rows(); ++r) {
    const Vector d = dirs.row(r).transpose().normalized();
    const double v = d.dot(x) - (points.rows() > 0 ? support(points, d) : -kInf);
    if (v > worst) {
      worst = v;
      best = d;
    }
  }
  return best;
}

double interior_depth(const Matrix& points, Index i) {
  if (points.rows() < 2) return -kInf;
  Matrix others(points.rows() - 1, points.cols());
  for (Index r = 0, k = 0; r < points.rows(); ++r) {
    if (r != i) others.row(k++) = points.row(r);
  }
  const Vector x = points.row(i).transpose();
  const Matrix dirs = facet_directions(others);
  double depth = kInf;
  for (Index r = 0; r < dirs.rows(); ++r) {
    const Vector d = dirs.row(r).transpose();
    depth = std::min(depth, support(others, d) - d.dot(x));
  }
  return depth;
}

double convexity_violation(const Matrix& points) {
  double worst = -kInf;
  for (Index i = 0; i < points.rows(); ++i) worst = std::max(worst, interior_depth(points, i));
  return worst;
}

double support_excess(const Matrix& weights, const Matrix& a, const Matrix& b) {
  double worst = -kInf;
  for (Index r = 0; r < weights.rows(); ++r) {
    const Vector w = weights.row(r).transpose();
    const double norm = w.norm();
    if (norm == 0.0) continue;
    worst = std::max(worst, (w.dot(a.row(r).transpose()) - w.dot(b.row(r).transpose())) / norm);
  }
  return worst;
}

}  // namespace swipt::hull
