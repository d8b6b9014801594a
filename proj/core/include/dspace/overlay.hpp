#pragma once

// Overlay arrangement: the refinement of the attribute axes induced by a set
// of boundary coordinates. Every axis with sorted distinct coordinates
// c_0 < ... < c_{k-1} is cut into 2k-1 elementary pieces: the points {c_i}
// (even slots) and the open gaps (c_i, c_{i+1}) (odd slots). Any box whose
// endpoints are among the coordinates covers a contiguous slot range on each
// axis, so painting boxes onto the product grid is exact.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dspace/geometry.hpp"

namespace dspace {

class OverlayGrid {
 public:
  explicit OverlayGrid(std::vector<std::vector<double>> coordinates);

  // Grid over every endpoint of the given regions.
  static OverlayGrid from_regions(std::size_t dim, const std::vector<const Region*>& regions);

  std::size_t dim() const noexcept { return axes_.size(); }
  std::size_t slots(std::size_t axis) const noexcept;
  std::size_t cell_count() const noexcept { return cells_; }

  // Representative coordinate of a slot (the point or the gap midpoint).
  double representative(std::size_t axis, std::size_t slot) const;
  std::vector<double> representative_point(std::size_t cell) const;

  // Calls fn(cell) for every cell covered by the box. Every endpoint of the
  // box must be one of the grid coordinates.
  template <typename Fn>
  void for_each_cell(const Box& box, Fn&& fn) const {
    std::vector<std::size_t> lo(dim()), hi(dim()), idx(dim());
    for (std::size_t d = 0; d < dim(); ++d) {
      if (!slot_range(d, box[d], lo[d], hi[d])) return;
      idx[d] = lo[d];
    }
    while (true) {
      std::size_t cell = 0;
      for (std::size_t d = 0; d < dim(); ++d) cell = cell * slots(d) + idx[d];
      fn(cell);
      std::size_t d = dim();
      while (d > 0) {
        --d;
        if (idx[d] < hi[d]) {
          ++idx[d];
          break;
        }
        idx[d] = lo[d];
        if (d == 0) return;
      }
    }
  }

 private:
  bool slot_range(std::size_t axis, const Interval& iv, std::size_t& lo, std::size_t& hi) const;

  std::vector<std::vector<double>> axes_;
  std::size_t cells_ = 0;
};

}  // namespace dspace
