#ifndef PIMSBO_DOMAIN_HPP
#define PIMSBO_DOMAIN_HPP

#include <cstdint>

#include "pimsbo/kernel.hpp"

namespace pimsbo {

/// Box [0, r]^d.
struct Box {
  double r = 1.0;
  Index d = 1;

  void validate() const;
};

/// Non-empty set of distinct points, one per row.
class FiniteGrid {
 public:
  explicit FiniteGrid(PointMatrix points);

  Index size() const { return points_.rows(); }
  Index dim() const { return points_.cols(); }
  const PointMatrix& points() const { return points_; }
  auto point(Index i) const { return points_.row(i).transpose(); }

 private:
  PointMatrix points_;
};

/// Default cap on lattice size for grids built from a box.
inline constexpr std::int64_t kMaxLatticePoints = 1 << 22;

/// Cell-centred lattice with `divisions` points per axis: coordinates
/// (j + 1/2) r / divisions. Row order is lexicographic, last axis fastest.
PointMatrix make_lattice(const Box& box, std::int64_t divisions,
                         std::int64_t max_points = kMaxLatticePoints);

}  // namespace pimsbo

#endif  // PIMSBO_DOMAIN_HPP
