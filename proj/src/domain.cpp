#include "pimsbo/domain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace pimsbo {

void Box::validate() const {
  if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("box: r must be positive and finite");
  if (d < 1) throw std::invalid_argument("box: d must be >= 1");
}

FiniteGrid::FiniteGrid(PointMatrix points) : points_(std::move(points)) {
  if (points_.rows() < 1) throw std::invalid_argument("finite grid: empty");
  if (points_.cols() < 1) throw std::invalid_argument("finite grid: zero dimension");
  if (!points_.allFinite()) throw std::invalid_argument("finite grid: non-finite coordinate");

  std::vector<Index> order(static_cast<std::size_t>(points_.rows()));
  std::iota(order.begin(), order.end(), Index{0});
  auto row_less = [this](Index a, Index b) {
    for (Index j = 0; j < points_.cols(); ++j) {
      if (points_(a, j) != points_(b, j)) return points_(a, j) < points_(b, j);
    }
    return false;
  };
  std::sort(order.begin(), order.end(), row_less);
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (!row_less(order[i - 1], order[i]))
      throw std::invalid_argument("finite grid: duplicate point at rows " +
                                  std::to_string(order[i - 1]) + " and " + std::to_string(order[i]));
  }
}

PointMatrix make_lattice(const Box& box, std::int64_t divisions, std::int64_t max_points) {
  box.validate();
  if (divisions < 1) throw std::invalid_argument("lattice: divisions must be >= 1");
  std::int64_t count = 1;
  for (Index k = 0; k < box.d; ++k) {
    if (count > max_points / divisions)
      throw std::invalid_argument("lattice: " + std::to_string(divisions) + "^" +
                                  std::to_string(box.d) + " points exceeds the limit of " +
                                  std::to_string(max_points));
    count *= divisions;
  }
  const double step = box.r / static_cast<double>(divisions);
  PointMatrix points(count, box.d);
  for (std::int64_t i = 0; i < count; ++i) {
    std::int64_t rem = i;
    for (Index k = box.d - 1; k >= 0; --k) {
      points(i, k) = (static_cast<double>(rem % divisions) + 0.5) * step;
      rem /= divisions;
    }
  }
  return points;
}

}  // namespace pimsbo
