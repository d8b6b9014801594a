#include "dspace/overlay.hpp"

#include <algorithm>

#include "dspace/error.hpp"

namespace dspace {

OverlayGrid::OverlayGrid(std::vector<std::vector<double>> coordinates) : axes_(std::move(coordinates)) {
  cells_ = axes_.empty() ? 0 : 1;
  for (auto& axis : axes_) {
    std::sort(axis.begin(), axis.end());
    axis.erase(std::unique(axis.begin(), axis.end()), axis.end());
    cells_ *= axis.empty() ? 0 : 2 * axis.size() - 1;
  }
}

OverlayGrid OverlayGrid::from_regions(std::size_t dim, const std::vector<const Region*>& regions) {
  std::vector<std::vector<double>> coords(dim);
  for (const Region* r : regions) {
    if (r->dim() != dim) throw DimensionError("overlay grid: dimension mismatch");
    for (const auto& b : r->boxes()) {
      for (std::size_t d = 0; d < dim; ++d) {
        coords[d].push_back(b[d].lo());
        coords[d].push_back(b[d].hi());
      }
    }
  }
  return OverlayGrid(std::move(coords));
}

std::size_t OverlayGrid::slots(std::size_t axis) const noexcept {
  const auto k = axes_[axis].size();
  return k == 0 ? 0 : 2 * k - 1;
}

double OverlayGrid::representative(std::size_t axis, std::size_t slot) const {
  const auto& c = axes_[axis];
  if (slot % 2 == 0) return c[slot / 2];
  return 0.5 * (c[slot / 2] + c[slot / 2 + 1]);
}

std::vector<double> OverlayGrid::representative_point(std::size_t cell) const {
  std::vector<double> p(dim());
  for (std::size_t d = dim(); d-- > 0;) {
    const auto n = slots(d);
    p[d] = representative(d, cell % n);
    cell /= n;
  }
  return p;
}

bool OverlayGrid::slot_range(std::size_t axis, const Interval& iv, std::size_t& lo,
                             std::size_t& hi) const {
  const auto& c = axes_[axis];
  const auto lo_it = std::lower_bound(c.begin(), c.end(), iv.lo());
  const auto hi_it = std::lower_bound(c.begin(), c.end(), iv.hi());
  if (lo_it == c.end() || *lo_it != iv.lo() || hi_it == c.end() || *hi_it != iv.hi()) {
    throw GeometryError("overlay grid: box endpoint is not a grid coordinate");
  }
  const auto i = static_cast<std::size_t>(lo_it - c.begin());
  const auto j = static_cast<std::size_t>(hi_it - c.begin());
  lo = iv.lo_closed() ? 2 * i : 2 * i + 1;
  if (iv.hi_closed()) {
    hi = 2 * j;
  } else {
    if (j == 0) return false;
    hi = 2 * j - 1;
  }
  return lo <= hi;
}

}  // namespace dspace
