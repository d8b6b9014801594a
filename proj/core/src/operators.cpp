#include "dspace/operators.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "dspace/error.hpp"

namespace dspace {

namespace {

Region projection(const Region& r, std::size_t axis) {
  std::vector<Box> spans;
  spans.reserve(r.boxes().size());
  for (const auto& b : r.boxes()) spans.emplace_back(std::vector<Interval>{b[axis]});
  return Region::from_boxes(1, std::move(spans));
}

bool hulls_touch(const Region& a, const Region& b) {
  if (a.empty() || b.empty()) return false;
  return box_intersect(bounding_box(a), bounding_box(b)).has_value();
}

// Reconciles class labels of two operands.
std::pair<DecisionSpace, DecisionSpace> aligned(const DecisionSpace& x, const DecisionSpace& y,
                                                const char* op) {
  require_same_schema(x.schema(), y.schema(), op);
  auto labels = union_class_labels(x.class_labels(), y.class_labels());
  return {x.with_class_labels(labels), y.with_class_labels(std::move(labels))};
}

// drop[i] is set when element i of `space` is strictly subsumed by an element
// of `other` carrying the same value.
std::vector<bool> subsumed_with_equal_value(const DecisionSpace& space, const DecisionSpace& other,
                                            double tol) {
  std::vector<bool> drop(space.size(), false);
  for (std::size_t i = 0; i < space.size(); ++i) {
    for (const auto& o : other.elements()) {
      if (o.value().approx_equal(space[i].value(), tol) && strictly_subsumes(o, space[i])) {
        drop[i] = true;
        break;
      }
    }
  }
  return drop;
}

ClassDistribution combine_or_average(const MergeOptions& options,
                                     std::span<const ClassDistribution> values,
                                     std::span<const double> weights) {
  const bool all_zero =
      std::all_of(weights.begin(), weights.end(), [](double w) { return w == 0.0; });
  if (all_zero) {
    // Every operand is a single point: no extent to weight by.
    const std::vector<double> equal(weights.size(), 1.0);
    return options.combiner ? options.combiner(values, equal) : combine_values(values, equal);
  }
  return options.combiner ? options.combiner(values, weights) : combine_values(values, weights);
}

enum class Weighting {
  // Conflicts weighted by the specialization of each operand element;
  // copied and remainder elements get the specialization of their region.
  kSpecialization,
  // Conflicts weighted by the stored (accumulated) mass; every output
  // element carries the summed mass of its contributors.
  kAccumulated,
};

DecisionSpace binary_merge(const DecisionSpace& x_in, const DecisionSpace& y_in,
                           const MergeOptions& options, Weighting weighting, const char* op) {
  auto [xs, ys] = aligned(x_in, y_in, op);
  const auto drop_x = subsumed_with_equal_value(xs, ys, options.value_tolerance);
  const auto drop_y = subsumed_with_equal_value(ys, xs, options.value_tolerance);

  auto weight_of = [&](const Element& e) {
    return weighting == Weighting::kSpecialization ? specialization(e.region()) : e.mass();
  };
  std::vector<double> wx(xs.size()), wy(ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) wx[i] = weight_of(xs[i]);
  for (std::size_t j = 0; j < ys.size(); ++j) wy[j] = weight_of(ys[j]);

  auto leftover = [&](Region region, const Element& source, double weight) {
    if (weighting == Weighting::kAccumulated) {
      return Element(std::move(region), source.value(), weight);
    }
    return Element(std::move(region), source.value());
  };

  std::vector<Element> out;
  // Remaining (not yet conflicting) space of each y that met some x.
  std::map<std::size_t, Region> pending;

  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (drop_x[i]) continue;
    const Element& x = xs[i];
    const Region& initial = x.region();
    Region rest = initial;
    bool conflicted = false;
    for (std::size_t j = 0; j < ys.size(); ++j) {
      if (drop_y[j]) continue;
      const Element& y = ys[j];
      if (!hulls_touch(initial, y.region())) continue;
      Region shared = region_intersect(initial, y.region());
      if (shared.empty()) continue;
      conflicted = true;

      const ClassDistribution values[] = {x.value(), y.value()};
      const double weights[] = {wx[i], wy[j]};
      auto value = combine_or_average(options, values, weights);

      auto [it, fresh] = pending.try_emplace(j, y.region());
      it->second = region_subtract(it->second, shared);
      rest = region_subtract(rest, shared);
      out.emplace_back(std::move(shared), std::move(value), wx[i] + wy[j]);
    }
    if (!conflicted) {
      out.push_back(leftover(initial, x, wx[i]));
    } else if (!rest.empty()) {
      out.push_back(leftover(std::move(rest), x, wx[i]));
    }
  }

  for (std::size_t j = 0; j < ys.size(); ++j) {
    if (drop_y[j] || pending.contains(j)) continue;
    out.push_back(leftover(ys[j].region(), ys[j], wy[j]));
  }
  for (auto& [j, rest] : pending) {
    if (!rest.empty()) out.push_back(leftover(std::move(rest), ys[j], wy[j]));
  }

  auto labels = std::vector<std::string>(xs.class_labels().begin(), xs.class_labels().end());
  return DecisionSpace(xs.schema(), std::move(labels), std::move(out));
}

}  // namespace

// ------------------------------------------------------------- subsumption

bool subsumes(const Element& x, const Element& y) {
  if (x.region().dim() != y.region().dim()) throw SchemaError("subsumes: dimension mismatch");
  return region_subset(y.region(), x.region());
}

bool strictly_subsumes(const Element& x, const Element& y) {
  if (!subsumes(x, y)) return false;
  for (std::size_t a = 0; a < x.region().dim(); ++a) {
    const Region px = projection(x.region(), a);
    const Region py = projection(y.region(), a);
    // py is already a subset of px; proper iff px has points py lacks.
    if (region_subtract(px, py).empty()) return false;
  }
  return true;
}

std::vector<std::size_t> intersecting_indices(const Element& x, const DecisionSpace& space) {
  if (x.region().dim() != space.dim()) throw SchemaError("intersect_with_space: dimension mismatch");
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < space.size(); ++j) {
    const Region& r = space[j].region();
    if (hulls_touch(x.region(), r) && regions_intersect(x.region(), r)) out.push_back(j);
  }
  return out;
}

std::vector<Element> intersect_with_space(const Element& x, const DecisionSpace& space) {
  std::vector<Element> out;
  for (auto j : intersecting_indices(x, space)) out.push_back(space[j]);
  return out;
}

IntersectionReport intersection_report(const DecisionSpace& x_space, const DecisionSpace& y_space) {
  require_same_schema(x_space.schema(), y_space.schema(), "intersection_report");
  IntersectionReport report;
  for (std::size_t i = 0; i < x_space.size(); ++i) {
    const Region& xr = x_space[i].region();
    for (auto j : intersecting_indices(x_space[i], y_space)) {
      Region shared = region_intersect(xr, y_space[j].region());
      auto [xi, x_new] = report.x_remainders.try_emplace(i, xr);
      xi->second = region_subtract(xi->second, shared);
      auto [yj, y_new] = report.y_remainders.try_emplace(j, y_space[j].region());
      yj->second = region_subtract(yj->second, shared);
      report.pairs.push_back({i, j, std::move(shared)});
    }
  }
  return report;
}

// ---------------------------------------------------------- combine_values

ClassDistribution combine_values(std::span<const ClassDistribution> values,
                                 std::span<const double> masses) {
  if (values.empty()) throw OperatorError("combine_values: no values");
  if (values.size() != masses.size()) {
    throw OperatorError("combine_values: " + std::to_string(values.size()) + " values but " +
                        std::to_string(masses.size()) + " masses");
  }
  double total = 0.0;
  for (double m : masses) {
    if (!(m >= 0.0) || !std::isfinite(m)) throw OperatorError("combine_values: invalid mass");
    total += m;
  }
  if (total == 0.0) throw OperatorError("combine_values: all masses are zero, weight undefined");

  const std::size_t classes = values.front().size();
  std::vector<double> out(classes, 0.0);
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (values[k].size() != classes) throw OperatorError("combine_values: distributions differ in size");
    // Weight first, then scale: equal masses give weights of exactly 1/n.
    const double w = masses[k] / total;
    for (std::size_t c = 0; c < classes; ++c) out[c] += values[k][c] * w;
  }
  return ClassDistribution(std::move(out));
}

// ------------------------------------------------------------------ merges

DecisionSpace merge(const DecisionSpace& x, const DecisionSpace& y, const MergeOptions& options) {
  return binary_merge(x, y, options, Weighting::kSpecialization, "merge");
}

DecisionSpace merge_streaming(const DecisionSpace& accumulator, const DecisionSpace& next,
                              const MergeOptions& options) {
  return binary_merge(accumulator, next, options, Weighting::kAccumulated, "merge_streaming");
}

DecisionSpace merge_nary(std::span<const DecisionSpace> spaces, const MergeOptions& options) {
  if (spaces.empty()) throw OperatorError("merge_nary: no spaces");
  std::vector<std::string> labels(spaces.front().class_labels().begin(),
                                  spaces.front().class_labels().end());
  for (const auto& s : spaces.subspan(1)) {
    require_same_schema(spaces.front().schema(), s.schema(), "merge_nary");
    labels = union_class_labels(labels, s.class_labels());
  }
  std::vector<DecisionSpace> in;
  in.reserve(spaces.size());
  for (const auto& s : spaces) in.push_back(s.with_class_labels(labels));
  if (in.size() == 1) return std::move(in.front());

  const std::size_t n = in.size();
  std::vector<std::vector<bool>> drop(n);
  std::vector<std::vector<double>> weight(n);
  for (std::size_t s = 0; s < n; ++s) {
    drop[s].assign(in[s].size(), false);
    weight[s].resize(in[s].size());
    for (std::size_t i = 0; i < in[s].size(); ++i) {
      weight[s][i] = specialization(in[s][i].region());
      for (std::size_t t = 0; t < n && !drop[s][i]; ++t) {
        if (t == s) continue;
        for (const auto& o : in[t].elements()) {
          if (o.value().approx_equal(in[s][i].value(), options.value_tolerance) &&
              strictly_subsumes(o, in[s][i])) {
            drop[s][i] = true;
            break;
          }
        }
      }
    }
  }

  // Overlay refinement: each fragment is a maximal region covered by the
  // same element of every contributing space.
  struct Fragment {
    Region region;
    std::vector<std::pair<std::size_t, std::size_t>> contributors;
  };
  std::vector<Fragment> fragments;
  const std::size_t dim = in.front().dim();

  for (std::size_t s = 0; s < n; ++s) {
    const DecisionSpace& space = in[s];
    std::vector<Region> claimed(space.size(), Region(dim));
    std::vector<Fragment> next;
    next.reserve(fragments.size() + space.size());
    for (auto& f : fragments) {
      Region rest = f.region;
      for (std::size_t i = 0; i < space.size(); ++i) {
        if (drop[s][i] || !hulls_touch(rest, space[i].region())) continue;
        Region piece = region_intersect(rest, space[i].region());
        if (piece.empty()) continue;
        rest = region_subtract(rest, piece);
        claimed[i] = region_union(claimed[i], piece);
        auto contributors = f.contributors;
        contributors.emplace_back(s, i);
        next.push_back({std::move(piece), std::move(contributors)});
      }
      if (!rest.empty()) next.push_back({std::move(rest), std::move(f.contributors)});
    }
    for (std::size_t i = 0; i < space.size(); ++i) {
      if (drop[s][i]) continue;
      Region own = region_subtract(space[i].region(), claimed[i]);
      if (!own.empty()) next.push_back({std::move(own), {{s, i}}});
    }
    fragments = std::move(next);
  }

  std::vector<Element> out;
  out.reserve(fragments.size());
  for (auto& f : fragments) {
    if (f.contributors.size() == 1) {
      const auto [s, i] = f.contributors.front();
      out.emplace_back(std::move(f.region), in[s][i].value());
      continue;
    }
    std::vector<ClassDistribution> values;
    std::vector<double> weights;
    double mass = 0.0;
    for (const auto& [s, i] : f.contributors) {
      values.push_back(in[s][i].value());
      weights.push_back(weight[s][i]);
      mass += weight[s][i];
    }
    out.emplace_back(std::move(f.region), combine_or_average(options, values, weights), mass);
  }
  return DecisionSpace(in.front().schema(), std::move(labels), std::move(out));
}

// -------------------------------------------------------------- restriction

DecisionSpace restrict(const DecisionSpace& x, const DecisionSpace& y) {
  require_same_schema(x.schema(), y.schema(), "restrict");
  std::vector<Element> out;
  for (const auto& e : x.elements()) {
    Region kept(x.dim());
    bool touched = false;
    for (auto j : intersecting_indices(e, y)) {
      kept = region_union(kept, region_intersect(e.region(), y[j].region()));
      touched = true;
    }
    if (touched && !kept.empty()) out.emplace_back(std::move(kept), e.value(), e.mass());
  }
  std::vector<std::string> labels(x.class_labels().begin(), x.class_labels().end());
  return DecisionSpace(x.schema(), std::move(labels), std::move(out));
}

DecisionSpace op_plus(const DecisionSpace& x, const DecisionSpace& y) {
  return restrict(restrict(merge(x, y), x), y);
}

DecisionSpace op_barodot(const DecisionSpace& x, const DecisionSpace& y) {
  return merge(restrict(x, y), restrict(y, x));
}

}  // namespace dspace
