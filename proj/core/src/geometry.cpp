#include "dspace/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "dspace/error.hpp"

namespace dspace {

namespace {

bool nonempty_bounds(double lo, double hi, bool lo_closed, bool hi_closed) {
  if (std::isnan(lo) || std::isnan(hi)) return false;
  if (lo < hi) return true;
  return lo == hi && lo_closed && hi_closed;
}

void require_same_dim(std::size_t a, std::size_t b, const char* op) {
  if (a != b) {
    throw DimensionError(std::string(op) + ": dimension mismatch (" + std::to_string(a) +
                         " vs " + std::to_string(b) + ")");
  }
}

// Compares two boxes on every axis except `skip`.
int compare_except(std::span<const Interval> a, std::span<const Interval> b, std::size_t skip) {
  for (std::size_t d = 0; d < a.size(); ++d) {
    if (d == skip) continue;
    const auto c = a[d] <=> b[d];
    if (c < 0) return -1;
    if (c > 0) return 1;
  }
  return 0;
}

bool abut(const Interval& left, const Interval& right) {
  return left.hi() == right.lo() && left.hi_closed() != right.lo_closed();
}

// One coalescing sweep along `axis`. Returns true if anything merged.
bool coalesce_axis(std::vector<Box>& boxes, std::size_t axis) {
  if (boxes.size() < 2) return false;
  std::sort(boxes.begin(), boxes.end(), [axis](const Box& a, const Box& b) {
    const int c = compare_except(a.bounds(), b.bounds(), axis);
    if (c != 0) return c < 0;
    return (a[axis] <=> b[axis]) < 0;
  });

  bool merged = false;
  std::vector<Box> out;
  out.reserve(boxes.size());
  std::vector<Interval> run(boxes.front().bounds().begin(), boxes.front().bounds().end());
  for (std::size_t i = 1; i < boxes.size(); ++i) {
    const Box& next = boxes[i];
    if (compare_except(run, next.bounds(), axis) == 0 && abut(run[axis], next[axis])) {
      run[axis] = Interval(run[axis].lo(), next[axis].hi(), run[axis].lo_closed(),
                           next[axis].hi_closed());
      merged = true;
      continue;
    }
    out.emplace_back(std::move(run));
    run.assign(next.bounds().begin(), next.bounds().end());
  }
  out.emplace_back(std::move(run));
  boxes = std::move(out);
  return merged;
}

}  // namespace

// ---------------------------------------------------------------- Interval

Interval::Interval(double lo, double hi, bool lo_closed, bool hi_closed)
    : lo_(lo), hi_(hi), lo_closed_(lo_closed), hi_closed_(hi_closed) {
  if (!nonempty_bounds(lo, hi, lo_closed, hi_closed)) {
    throw GeometryError("empty interval " + std::string(lo_closed ? "[" : "(") +
                        std::to_string(lo) + ", " + std::to_string(hi) +
                        (hi_closed ? "]" : ")"));
  }
}

std::optional<Interval> Interval::make(double lo, double hi, bool lo_closed, bool hi_closed) {
  if (!nonempty_bounds(lo, hi, lo_closed, hi_closed)) return std::nullopt;
  return Interval(Unchecked{}, lo, hi, lo_closed, hi_closed);
}

bool Interval::contains(double x) const noexcept {
  const bool above = lo_closed_ ? x >= lo_ : x > lo_;
  const bool below = hi_closed_ ? x <= hi_ : x < hi_;
  return above && below;
}

bool Interval::covers(const Interval& o) const noexcept {
  const bool lo_ok = lo_ < o.lo_ || (lo_ == o.lo_ && (lo_closed_ || !o.lo_closed_));
  const bool hi_ok = hi_ > o.hi_ || (hi_ == o.hi_ && (hi_closed_ || !o.hi_closed_));
  return lo_ok && hi_ok;
}

std::strong_ordering operator<=>(const Interval& a, const Interval& b) noexcept {
  // Doubles here are never NaN (rejected on construction), so the partial
  // order is total.
  if (a.lo_ != b.lo_) return a.lo_ < b.lo_ ? std::strong_ordering::less : std::strong_ordering::greater;
  if (a.lo_closed_ != b.lo_closed_) {
    return a.lo_closed_ ? std::strong_ordering::less : std::strong_ordering::greater;
  }
  if (a.hi_ != b.hi_) return a.hi_ < b.hi_ ? std::strong_ordering::less : std::strong_ordering::greater;
  if (a.hi_closed_ != b.hi_closed_) {
    return a.hi_closed_ ? std::strong_ordering::greater : std::strong_ordering::less;
  }
  return std::strong_ordering::equal;
}

std::optional<Interval> interval_intersect(const Interval& a, const Interval& b) {
  double lo = a.lo();
  bool lo_closed = a.lo_closed();
  if (b.lo() > lo) {
    lo = b.lo();
    lo_closed = b.lo_closed();
  } else if (b.lo() == lo) {
    lo_closed = lo_closed && b.lo_closed();
  }

  double hi = a.hi();
  bool hi_closed = a.hi_closed();
  if (b.hi() < hi) {
    hi = b.hi();
    hi_closed = b.hi_closed();
  } else if (b.hi() == hi) {
    hi_closed = hi_closed && b.hi_closed();
  }
  return Interval::make(lo, hi, lo_closed, hi_closed);
}

// --------------------------------------------------------------------- Box

Box::Box(std::vector<Interval> bounds) : bounds_(std::move(bounds)) {
  if (bounds_.empty()) throw GeometryError("box must have at least one dimension");
}

double Box::volume() const noexcept {
  double v = 1.0;
  for (const auto& iv : bounds_) v *= iv.measure();
  return v;
}

bool Box::contains(std::span<const double> point) const {
  require_same_dim(point.size(), dim(), "box contains");
  for (std::size_t d = 0; d < dim(); ++d) {
    if (!bounds_[d].contains(point[d])) return false;
  }
  return true;
}

std::strong_ordering operator<=>(const Box& a, const Box& b) noexcept {
  const std::size_t n = std::min(a.dim(), b.dim());
  for (std::size_t d = 0; d < n; ++d) {
    const auto c = a.bounds_[d] <=> b.bounds_[d];
    if (c != 0) return c;
  }
  return a.dim() <=> b.dim();
}

std::optional<Box> box_intersect(const Box& a, const Box& b) {
  require_same_dim(a.dim(), b.dim(), "box intersect");
  std::vector<Interval> out;
  out.reserve(a.dim());
  for (std::size_t d = 0; d < a.dim(); ++d) {
    auto iv = interval_intersect(a[d], b[d]);
    if (!iv) return std::nullopt;
    out.push_back(*iv);
  }
  return Box(std::move(out));
}

std::vector<Box> box_subtract(const Box& a, const Box& b) {
  const auto common = box_intersect(a, b);
  if (!common) return {a};

  std::vector<Box> pieces;
  std::vector<Interval> cur(a.bounds().begin(), a.bounds().end());
  for (std::size_t d = 0; d < a.dim(); ++d) {
    const Interval ad = cur[d];
    const Interval& bd = b[d];
    if (auto below = Interval::make(ad.lo(), bd.lo(), ad.lo_closed(), !bd.lo_closed())) {
      auto piece = cur;
      piece[d] = *below;
      pieces.emplace_back(std::move(piece));
    }
    if (auto above = Interval::make(bd.hi(), ad.hi(), !bd.hi_closed(), ad.hi_closed())) {
      auto piece = cur;
      piece[d] = *above;
      pieces.emplace_back(std::move(piece));
    }
    cur[d] = (*common)[d];
  }
  return pieces;
}

// ------------------------------------------------------------------ Region

std::vector<Box> canonicalize(std::vector<Box> boxes) {
  if (boxes.size() > 1) {
    const std::size_t m = boxes.front().dim();
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t d = 0; d < m; ++d) changed |= coalesce_axis(boxes, d);
    }
  }
  std::sort(boxes.begin(), boxes.end());
  return boxes;
}

Region::Region(Box box) : dim_(box.dim()) { boxes_.push_back(std::move(box)); }

Region::Region(std::size_t dim, std::vector<Box> boxes, bool canonical) : dim_(dim) {
  for (const auto& b : boxes) require_same_dim(b.dim(), dim, "region");
  boxes_ = canonical ? std::move(boxes) : canonicalize(std::move(boxes));
}

Region Region::from_disjoint(std::size_t dim, std::vector<Box> boxes) {
  return Region(dim, std::move(boxes), false);
}

Region Region::from_boxes(std::size_t dim, std::vector<Box> boxes) {
  Region acc(dim);
  for (auto& b : boxes) {
    require_same_dim(b.dim(), dim, "region");
    acc = region_union(acc, Region(std::move(b)));
  }
  return acc;
}

double Region::volume() const noexcept {
  double v = 0.0;
  for (const auto& b : boxes_) v += b.volume();
  return v;
}

Region region_intersect(const Region& a, const Region& b) {
  require_same_dim(a.dim(), b.dim(), "region intersect");
  std::vector<Box> out;
  for (const auto& ba : a.boxes()) {
    for (const auto& bb : b.boxes()) {
      if (auto c = box_intersect(ba, bb)) out.push_back(std::move(*c));
    }
  }
  return Region::from_disjoint(a.dim(), std::move(out));
}

Region region_subtract(const Region& a, const Region& b) {
  require_same_dim(a.dim(), b.dim(), "region subtract");
  std::vector<Box> out;
  for (const auto& ba : a.boxes()) {
    std::vector<Box> pieces{ba};
    for (const auto& bb : b.boxes()) {
      std::vector<Box> next;
      for (const auto& p : pieces) {
        auto cut = box_subtract(p, bb);
        next.insert(next.end(), std::make_move_iterator(cut.begin()),
                    std::make_move_iterator(cut.end()));
      }
      pieces = std::move(next);
      if (pieces.empty()) break;
    }
    out.insert(out.end(), std::make_move_iterator(pieces.begin()),
               std::make_move_iterator(pieces.end()));
  }
  return Region::from_disjoint(a.dim(), std::move(out));
}

Region region_union(const Region& a, const Region& b) {
  require_same_dim(a.dim(), b.dim(), "region union");
  if (b.empty()) return a;
  if (a.empty()) return b;
  const Region extra = region_subtract(b, a);
  std::vector<Box> all(a.boxes().begin(), a.boxes().end());
  all.insert(all.end(), extra.boxes().begin(), extra.boxes().end());
  return Region::from_disjoint(a.dim(), std::move(all));
}

double projection_measure(const Region& r, std::size_t attr_index) {
  if (attr_index >= r.dim()) {
    throw DimensionError("projection_measure: attribute index " + std::to_string(attr_index) +
                         " out of range for dimension " + std::to_string(r.dim()));
  }
  std::vector<std::pair<double, double>> spans;
  spans.reserve(r.boxes().size());
  for (const auto& b : r.boxes()) spans.emplace_back(b[attr_index].lo(), b[attr_index].hi());
  std::sort(spans.begin(), spans.end());

  double total = 0.0;
  bool open = false;
  double run_lo = 0.0;
  double run_hi = 0.0;
  for (const auto& [lo, hi] : spans) {
    if (!open) {
      run_lo = lo;
      run_hi = hi;
      open = true;
    } else if (lo <= run_hi) {
      run_hi = std::max(run_hi, hi);
    } else {
      total += run_hi - run_lo;
      run_lo = lo;
      run_hi = hi;
    }
  }
  if (open) total += run_hi - run_lo;
  return total;
}

bool region_contains_point(const Region& r, std::span<const double> point) {
  require_same_dim(point.size(), r.dim(), "region contains");
  return std::any_of(r.boxes().begin(), r.boxes().end(),
                     [&](const Box& b) { return b.contains(point); });
}

bool regions_intersect(const Region& a, const Region& b) {
  require_same_dim(a.dim(), b.dim(), "regions intersect");
  for (const auto& ba : a.boxes()) {
    for (const auto& bb : b.boxes()) {
      if (box_intersect(ba, bb)) return true;
    }
  }
  return false;
}

bool region_subset(const Region& inner, const Region& outer) {
  return region_subtract(inner, outer).empty();
}

bool region_set_equal(const Region& a, const Region& b) {
  return region_subset(a, b) && region_subset(b, a);
}

Box bounding_box(const Region& r) {
  if (r.empty()) throw GeometryError("bounding box of an empty region");
  std::vector<Interval> hull(r.boxes().front().bounds().begin(), r.boxes().front().bounds().end());
  for (const auto& b : r.boxes()) {
    for (std::size_t d = 0; d < r.dim(); ++d) {
      const Interval& h = hull[d];
      const Interval& x = b[d];
      double lo = h.lo();
      bool lo_closed = h.lo_closed();
      if (x.lo() < lo || (x.lo() == lo && x.lo_closed())) {
        lo_closed = x.lo() < lo ? x.lo_closed() : true;
        lo = x.lo();
      }
      double hi = h.hi();
      bool hi_closed = h.hi_closed();
      if (x.hi() > hi || (x.hi() == hi && x.hi_closed())) {
        hi_closed = x.hi() > hi ? x.hi_closed() : true;
        hi = x.hi();
      }
      hull[d] = Interval(lo, hi, lo_closed, hi_closed);
    }
  }
  return Box(std::move(hull));
}

}  // namespace dspace
