#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dspace/geometry.hpp"

namespace dspace {

inline constexpr double kDefaultTolerance = 1e-9;

struct Attribute {
  std::string name;
  double min = 0.0;
  double max = 0.0;

  friend bool operator==(const Attribute&, const Attribute&) = default;
};

// Ordered attributes with closed numeric domains [min, max].
class AttributeSchema {
 public:
  AttributeSchema() = default;
  // Throws SchemaError on duplicate names or min >= max.
  explicit AttributeSchema(std::vector<Attribute> attributes);

  std::size_t size() const noexcept { return attributes_.size(); }
  const Attribute& operator[](std::size_t i) const { return attributes_[i]; }
  std::span<const Attribute> attributes() const noexcept { return attributes_; }
  std::optional<std::size_t> index_of(std::string_view name) const;

  // The whole domain as a closed box.
  Box domain_box() const;

  friend bool operator==(const AttributeSchema&, const AttributeSchema&) = default;

 private:
  std::vector<Attribute> attributes_;
};

// Per-class fractions. The labels live on the owning DecisionSpace; a
// distribution is always interpreted against that space's class order.
class ClassDistribution {
 public:
  ClassDistribution() = default;
  explicit ClassDistribution(std::vector<double> weights) : weights_(std::move(weights)) {}

  static ClassDistribution one_hot(std::size_t classes, std::size_t index);

  std::size_t size() const noexcept { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }
  std::span<const double> weights() const noexcept { return weights_; }
  double sum() const noexcept;
  // Lowest index among the maximal weights.
  std::size_t argmax() const;

  bool approx_equal(const ClassDistribution& other, double tol = kDefaultTolerance) const;

  friend bool operator==(const ClassDistribution&, const ClassDistribution&) = default;

 private:
  std::vector<double> weights_;
};

// Mean over attributes of the projected extent of a region.
double specialization(const Region& region);

class Element {
 public:
  // Mass starts as the specialization of the region.
  Element(Region region, ClassDistribution value);
  Element(Region region, ClassDistribution value, double mass);

  const Region& region() const noexcept { return region_; }
  const ClassDistribution& value() const noexcept { return value_; }
  // Accumulated specialization of every element that contributed to this one.
  double mass() const noexcept { return mass_; }

 private:
  Region region_;
  ClassDistribution value_;
  double mass_;
};

// Throws DimensionError if the element does not fit the schema.
double specialization(const Element& e, const AttributeSchema& schema);

class DecisionSpace {
 public:
  DecisionSpace(AttributeSchema schema, std::vector<std::string> class_labels,
                std::vector<Element> elements = {});

  const AttributeSchema& schema() const noexcept { return schema_; }
  std::size_t dim() const noexcept { return schema_.size(); }
  std::span<const std::string> class_labels() const noexcept { return class_labels_; }
  std::span<const Element> elements() const noexcept { return elements_; }
  const Element& operator[](std::size_t i) const { return elements_[i]; }
  std::size_t size() const noexcept { return elements_.size(); }
  bool empty() const noexcept { return elements_.empty(); }

  void add(Element e) { elements_.push_back(std::move(e)); }
  std::optional<std::size_t> class_index(std::string_view label) const;

  // Same space with distributions re-expressed over `labels`, which must
  // contain every current label. New classes get zero weight.
  DecisionSpace with_class_labels(std::vector<std::string> labels) const;

  // Union of all element regions.
  Region footprint() const;

 private:
  AttributeSchema schema_;
  std::vector<std::string> class_labels_;
  std::vector<Element> elements_;
};

struct Violation {
  std::string rule;
  std::vector<std::size_t> elements;
  std::string message;
};

// Empty result iff every structural invariant holds.
std::vector<Violation> validate(const DecisionSpace& space);

struct SpaceComparison {
  bool same_coverage = true;
  // Largest per-class gap over cells covered by both spaces.
  double max_value_difference = 0.0;
};

// Walks the overlay arrangement of both spaces. Class labels are matched by
// name; throws SchemaError if the label sets differ.
SpaceComparison compare_spaces(const DecisionSpace& a, const DecisionSpace& b);

// Covered point sets are equal and, on every cell of the overlay arrangement
// of both spaces, the covering distributions agree within `tol` per class.
// Class labels are matched by name; their order may differ.
bool semantically_equal(const DecisionSpace& a, const DecisionSpace& b,
                        double tol = kDefaultTolerance);

struct Prediction {
  std::size_t element = 0;
  ClassDistribution distribution;
  std::size_t label_index = 0;
  std::string label;
};

std::optional<Prediction> classify(const DecisionSpace& space, std::span<const double> instance);

// Throws SchemaError unless both spaces share attribute names and domains.
void require_same_schema(const AttributeSchema& a, const AttributeSchema& b, const char* op);

// Labels of `a` in order, followed by labels only in `b` in their order.
std::vector<std::string> union_class_labels(std::span<const std::string> a,
                                            std::span<const std::string> b);

}  // namespace dspace
