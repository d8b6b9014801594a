#pragma once

// Exact rectilinear set algebra over m-dimensional axis-aligned boxes.
//
// Coordinates are never computed, only copied from inputs, so all endpoint
// comparisons are exact. Endpoint inclusivity is tracked per bound; it never
// affects measures but does affect membership and disjointness.

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace dspace {

class Interval {
 public:
  // Throws GeometryError if the bounds describe an empty set.
  Interval(double lo, double hi, bool lo_closed = true, bool hi_closed = true);

  // Returns nullopt instead of throwing when the set would be empty.
  static std::optional<Interval> make(double lo, double hi, bool lo_closed, bool hi_closed);
  static Interval point(double x) { return Interval(x, x, true, true); }

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  bool lo_closed() const noexcept { return lo_closed_; }
  bool hi_closed() const noexcept { return hi_closed_; }

  double measure() const noexcept { return hi_ - lo_; }
  bool is_point() const noexcept { return lo_ == hi_; }
  bool contains(double x) const noexcept;
  // True iff every point of `other` is in this interval.
  bool covers(const Interval& other) const noexcept;

  friend bool operator==(const Interval&, const Interval&) = default;
  // Orders by lower endpoint (closed before open), then upper endpoint.
  friend std::strong_ordering operator<=>(const Interval& a, const Interval& b) noexcept;

 private:
  struct Unchecked {};
  Interval(Unchecked, double lo, double hi, bool lo_closed, bool hi_closed) noexcept
      : lo_(lo), hi_(hi), lo_closed_(lo_closed), hi_closed_(hi_closed) {}

  double lo_;
  double hi_;
  bool lo_closed_;
  bool hi_closed_;
};

std::optional<Interval> interval_intersect(const Interval& a, const Interval& b);

class Box {
 public:
  explicit Box(std::vector<Interval> bounds);

  std::size_t dim() const noexcept { return bounds_.size(); }
  const Interval& operator[](std::size_t i) const { return bounds_[i]; }
  std::span<const Interval> bounds() const noexcept { return bounds_; }

  double volume() const noexcept;
  bool contains(std::span<const double> point) const;

  friend bool operator==(const Box&, const Box&) = default;
  friend std::strong_ordering operator<=>(const Box& a, const Box& b) noexcept;

 private:
  std::vector<Interval> bounds_;
};

std::optional<Box> box_intersect(const Box& a, const Box& b);
// Axis-sweep decomposition: at most 2m pairwise-disjoint pieces.
std::vector<Box> box_subtract(const Box& a, const Box& b);

// A finite union of pairwise-disjoint boxes. Every constructor leaves the
// box list canonical: coalesced along each axis and sorted.
class Region {
 public:
  explicit Region(std::size_t dim) : dim_(dim) {}
  explicit Region(Box box);

  // Boxes may overlap; overlapping parts are unioned.
  static Region from_boxes(std::size_t dim, std::vector<Box> boxes);
  // Precondition: boxes are pairwise disjoint. Only coalesces and sorts.
  static Region from_disjoint(std::size_t dim, std::vector<Box> boxes);

  std::size_t dim() const noexcept { return dim_; }
  std::span<const Box> boxes() const noexcept { return boxes_; }
  bool empty() const noexcept { return boxes_.empty(); }
  // Product (Lebesgue) measure.
  double volume() const noexcept;

  friend bool operator==(const Region&, const Region&) = default;

 private:
  Region(std::size_t dim, std::vector<Box> boxes, bool canonical);

  std::size_t dim_;
  std::vector<Box> boxes_;
};

Region region_intersect(const Region& a, const Region& b);
Region region_subtract(const Region& a, const Region& b);
Region region_union(const Region& a, const Region& b);

// Measure of the projection of `r` onto one attribute; overlaps count once.
double projection_measure(const Region& r, std::size_t attr_index);
bool region_contains_point(const Region& r, std::span<const double> point);

// Non-empty point-set intersection (a shared face between closed boxes counts).
bool regions_intersect(const Region& a, const Region& b);
bool region_subset(const Region& inner, const Region& outer);
// Point-set equality, independent of box decomposition.
bool region_set_equal(const Region& a, const Region& b);

// Smallest box enclosing the region. Precondition: !r.empty().
Box bounding_box(const Region& r);

// Coalesces boxes that agree on m-1 axes and abut on the remaining one
// (one endpoint closed, the other open), then sorts. Exposed for callers that
// assemble box lists themselves.
std::vector<Box> canonicalize(std::vector<Box> boxes);

}  // namespace dspace
