#include "dspace/decision_space.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <sstream>

#include "dspace/error.hpp"
#include "dspace/overlay.hpp"

namespace dspace {

// ---------------------------------------------------------- AttributeSchema

AttributeSchema::AttributeSchema(std::vector<Attribute> attributes)
    : attributes_(std::move(attributes)) {
  std::set<std::string_view> seen;
  for (const auto& a : attributes_) {
    if (a.name.empty()) throw SchemaError("attribute name must not be empty");
    if (!seen.insert(a.name).second) throw SchemaError("duplicate attribute '" + a.name + "'");
    if (!(a.min < a.max)) {
      throw SchemaError("attribute '" + a.name + "' needs min < max");
    }
  }
}

std::optional<std::size_t> AttributeSchema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    if (attributes_[i].name == name) return i;
  }
  return std::nullopt;
}

Box AttributeSchema::domain_box() const {
  std::vector<Interval> bounds;
  bounds.reserve(attributes_.size());
  for (const auto& a : attributes_) bounds.emplace_back(a.min, a.max, true, true);
  return Box(std::move(bounds));
}

void require_same_schema(const AttributeSchema& a, const AttributeSchema& b, const char* op) {
  if (a == b) return;
  std::ostringstream msg;
  msg << op << ": schema mismatch";
  if (a.size() != b.size()) {
    msg << " (" << a.size() << " vs " << b.size() << " attributes)";
  } else {
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!(a[i] == b[i])) {
        msg << " at attribute " << i << " ('" << a[i].name << "' [" << a[i].min << ", " << a[i].max
            << "] vs '" << b[i].name << "' [" << b[i].min << ", " << b[i].max << "])";
        break;
      }
    }
  }
  throw SchemaError(msg.str());
}

std::vector<std::string> union_class_labels(std::span<const std::string> a,
                                            std::span<const std::string> b) {
  std::vector<std::string> out(a.begin(), a.end());
  for (const auto& label : b) {
    if (std::find(out.begin(), out.end(), label) == out.end()) out.push_back(label);
  }
  return out;
}

// -------------------------------------------------------- ClassDistribution

ClassDistribution ClassDistribution::one_hot(std::size_t classes, std::size_t index) {
  if (index >= classes) throw std::out_of_range("one_hot: class index out of range");
  std::vector<double> w(classes, 0.0);
  w[index] = 1.0;
  return ClassDistribution(std::move(w));
}

double ClassDistribution::sum() const noexcept {
  double s = 0.0;
  for (double w : weights_) s += w;
  return s;
}

std::size_t ClassDistribution::argmax() const {
  if (weights_.empty()) throw std::out_of_range("argmax of an empty distribution");
  std::size_t best = 0;
  for (std::size_t i = 1; i < weights_.size(); ++i) {
    if (weights_[i] > weights_[best]) best = i;
  }
  return best;
}

bool ClassDistribution::approx_equal(const ClassDistribution& other, double tol) const {
  if (weights_.size() != other.weights_.size()) return false;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (!(std::abs(weights_[i] - other.weights_[i]) <= tol)) return false;
  }
  return true;
}

// ------------------------------------------------------------------ Element

double specialization(const Region& region) {
  if (region.dim() == 0) return 0.0;
  double total = 0.0;
  for (std::size_t a = 0; a < region.dim(); ++a) total += projection_measure(region, a);
  return total / static_cast<double>(region.dim());
}

Element::Element(Region region, ClassDistribution value)
    : region_(std::move(region)), value_(std::move(value)), mass_(specialization(region_)) {}

Element::Element(Region region, ClassDistribution value, double mass)
    : region_(std::move(region)), value_(std::move(value)), mass_(mass) {}

double specialization(const Element& e, const AttributeSchema& schema) {
  if (e.region().dim() != schema.size()) {
    throw DimensionError("specialization: element dimension does not match schema");
  }
  return specialization(e.region());
}

// ------------------------------------------------------------ DecisionSpace

DecisionSpace::DecisionSpace(AttributeSchema schema, std::vector<std::string> class_labels,
                             std::vector<Element> elements)
    : schema_(std::move(schema)),
      class_labels_(std::move(class_labels)),
      elements_(std::move(elements)) {}

std::optional<std::size_t> DecisionSpace::class_index(std::string_view label) const {
  for (std::size_t i = 0; i < class_labels_.size(); ++i) {
    if (class_labels_[i] == label) return i;
  }
  return std::nullopt;
}

DecisionSpace DecisionSpace::with_class_labels(std::vector<std::string> labels) const {
  if (labels == class_labels_) return *this;
  std::vector<std::size_t> target(class_labels_.size());
  for (std::size_t i = 0; i < class_labels_.size(); ++i) {
    const auto it = std::find(labels.begin(), labels.end(), class_labels_[i]);
    if (it == labels.end()) {
      throw SchemaError("with_class_labels: label '" + class_labels_[i] + "' would be dropped");
    }
    target[i] = static_cast<std::size_t>(it - labels.begin());
  }
  std::vector<Element> out;
  out.reserve(elements_.size());
  for (const auto& e : elements_) {
    std::vector<double> w(labels.size(), 0.0);
    for (std::size_t i = 0; i < e.value().size() && i < target.size(); ++i) {
      w[target[i]] = e.value()[i];
    }
    out.emplace_back(e.region(), ClassDistribution(std::move(w)), e.mass());
  }
  return DecisionSpace(schema_, std::move(labels), std::move(out));
}

Region DecisionSpace::footprint() const {
  std::vector<Box> boxes;
  for (const auto& e : elements_) boxes.insert(boxes.end(), e.region().boxes().begin(), e.region().boxes().end());
  // Element regions are disjoint in a valid space.
  return Region::from_disjoint(dim(), std::move(boxes));
}

// ----------------------------------------------------------------- validate

namespace {

std::string describe(std::size_t i) { return "element " + std::to_string(i); }

}  // namespace

std::vector<Violation> validate(const DecisionSpace& space) {
  std::vector<Violation> out;
  const auto& schema = space.schema();
  const std::size_t m = schema.size();
  const std::size_t c = space.class_labels().size();

  if (m == 0) out.push_back({"schema-empty", {}, "schema has no attributes"});
  {
    std::set<std::string_view> seen;
    for (const auto& label : space.class_labels()) {
      if (!seen.insert(label).second) {
        out.push_back({"class-duplicate", {}, "duplicate class label '" + label + "'"});
      }
    }
  }
  if (c == 0) out.push_back({"classes-empty", {}, "space has no class labels"});

  bool dims_ok = true;
  for (std::size_t i = 0; i < space.size(); ++i) {
    const Element& e = space[i];
    if (e.region().dim() != m) {
      out.push_back({"region-dimension", {i}, describe(i) + " has dimension " +
                                                  std::to_string(e.region().dim()) + ", schema has " +
                                                  std::to_string(m)});
      dims_ok = false;
      continue;
    }
    if (e.region().empty()) out.push_back({"region-empty", {i}, describe(i) + " has an empty region"});

    const auto boxes = e.region().boxes();
    for (const auto& b : boxes) {
      for (std::size_t d = 0; d < m; ++d) {
        if (b[d].lo() < schema[d].min || b[d].hi() > schema[d].max) {
          out.push_back({"outside-domain", {i}, describe(i) + " leaves the domain of '" +
                                                    schema[d].name + "'"});
        }
      }
    }
    for (std::size_t p = 0; p < boxes.size(); ++p) {
      for (std::size_t q = p + 1; q < boxes.size(); ++q) {
        if (box_intersect(boxes[p], boxes[q])) {
          out.push_back({"box-overlap", {i}, describe(i) + " has overlapping boxes"});
        }
      }
    }

    const auto& v = e.value();
    if (v.size() != c) {
      out.push_back({"distribution-size", {i}, describe(i) + " has " + std::to_string(v.size()) +
                                                   " weights for " + std::to_string(c) + " classes"});
    } else {
      bool in_range = true;
      for (double w : v.weights()) in_range = in_range && w >= 0.0 && w <= 1.0;
      if (!in_range) out.push_back({"distribution-range", {i}, describe(i) + " has a weight outside [0,1]"});
      if (!(std::abs(v.sum() - 1.0) <= kDefaultTolerance)) {
        std::ostringstream msg;
        msg << describe(i) << " weights sum to " << v.sum();
        out.push_back({"distribution-sum", {i}, msg.str()});
      }
    }
    if (!(e.mass() >= 0.0) || !std::isfinite(e.mass())) {
      out.push_back({"mass-negative", {i}, describe(i) + " has a negative or non-finite mass"});
    }
  }

  if (!dims_ok) return out;

  // Pairwise element disjointness, pruned by bounding boxes sorted on axis 0.
  struct Entry {
    std::size_t element;
    Box hull;
  };
  std::vector<Entry> hulls;
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (!space[i].region().empty()) hulls.push_back({i, bounding_box(space[i].region())});
  }
  std::sort(hulls.begin(), hulls.end(),
            [](const Entry& a, const Entry& b) { return a.hull[0].lo() < b.hull[0].lo(); });
  for (std::size_t p = 0; p < hulls.size(); ++p) {
    for (std::size_t q = p + 1; q < hulls.size(); ++q) {
      if (hulls[q].hull[0].lo() > hulls[p].hull[0].hi()) break;
      if (!box_intersect(hulls[p].hull, hulls[q].hull)) continue;
      const auto i = std::min(hulls[p].element, hulls[q].element);
      const auto j = std::max(hulls[p].element, hulls[q].element);
      if (regions_intersect(space[i].region(), space[j].region())) {
        out.push_back({"element-overlap", {i, j}, describe(i) + " overlaps " + describe(j)});
      }
    }
  }
  return out;
}

// ------------------------------------------------------ semantically_equal

namespace {

constexpr std::int32_t kUncovered = -1;

std::vector<std::int32_t> paint(const OverlayGrid& grid, const DecisionSpace& s) {
  std::vector<std::int32_t> owner(grid.cell_count(), kUncovered);
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (const auto& b : s[i].region().boxes()) {
      grid.for_each_cell(b, [&](std::size_t cell) { owner[cell] = static_cast<std::int32_t>(i); });
    }
  }
  return owner;
}

}  // namespace

SpaceComparison compare_spaces(const DecisionSpace& a, const DecisionSpace& b) {
  require_same_schema(a.schema(), b.schema(), "compare_spaces");

  std::vector<std::size_t> to_a(b.class_labels().size());
  {
    const auto la = a.class_labels();
    const auto lb = b.class_labels();
    if (la.size() != lb.size()) throw SchemaError("compare_spaces: class label sets differ");
    for (std::size_t j = 0; j < lb.size(); ++j) {
      const auto it = std::find(la.begin(), la.end(), lb[j]);
      if (it == la.end()) throw SchemaError("compare_spaces: class label sets differ");
      to_a[j] = static_cast<std::size_t>(it - la.begin());
    }
  }

  SpaceComparison out;
  std::vector<const Region*> regions;
  for (const auto& e : a.elements()) regions.push_back(&e.region());
  for (const auto& e : b.elements()) regions.push_back(&e.region());
  if (regions.empty()) return out;
  const auto grid = OverlayGrid::from_regions(a.dim(), regions);
  const auto pa = paint(grid, a);
  const auto pb = paint(grid, b);

  for (std::size_t cell = 0; cell < grid.cell_count(); ++cell) {
    const auto ia = pa[cell];
    const auto ib = pb[cell];
    if ((ia == kUncovered) != (ib == kUncovered)) {
      out.same_coverage = false;
      continue;
    }
    if (ia == kUncovered) continue;
    const auto& va = a[static_cast<std::size_t>(ia)].value();
    const auto& vb = b[static_cast<std::size_t>(ib)].value();
    if (va.size() != to_a.size() || vb.size() != to_a.size()) {
      out.max_value_difference = std::numeric_limits<double>::infinity();
      continue;
    }
    for (std::size_t j = 0; j < vb.size(); ++j) {
      const double d = std::abs(vb[j] - va[to_a[j]]);
      if (!(d <= out.max_value_difference)) {
        out.max_value_difference = std::isnan(d) ? std::numeric_limits<double>::infinity() : d;
      }
    }
  }
  return out;
}

bool semantically_equal(const DecisionSpace& a, const DecisionSpace& b, double tol) {
  const auto c = compare_spaces(a, b);
  return c.same_coverage && c.max_value_difference <= tol;
}

// ----------------------------------------------------------------- classify

std::optional<Prediction> classify(const DecisionSpace& space, std::span<const double> instance) {
  if (instance.size() != space.dim()) {
    throw DimensionError("classify: instance has " + std::to_string(instance.size()) +
                         " coordinates, schema has " + std::to_string(space.dim()));
  }
  for (std::size_t i = 0; i < space.size(); ++i) {
    const Element& e = space[i];
    if (!region_contains_point(e.region(), instance)) continue;
    Prediction p;
    p.element = i;
    p.distribution = e.value();
    p.label_index = e.value().argmax();
    if (p.label_index < space.class_labels().size()) p.label = space.class_labels()[p.label_index];
    return p;
  }
  return std::nullopt;
}

}  // namespace dspace
