#pragma once

// Merging schemes: trees whose leaves reference input spaces by index and
// whose internal nodes apply an m-ary merge to their children.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dspace/decision_space.hpp"

namespace dspace {

class MergeScheme {
 public:
  // A single leaf.
  explicit MergeScheme(std::size_t leaf) : node_(leaf) {}
  // An internal node. Throws SchemeError with fewer than two children.
  explicit MergeScheme(std::vector<MergeScheme> children);

  bool is_leaf() const noexcept { return std::holds_alternative<std::size_t>(node_); }
  std::size_t leaf() const { return std::get<std::size_t>(node_); }
  std::span<const MergeScheme> children() const;

  std::size_t leaf_count() const;
  // Leaf indices in left-to-right order.
  std::vector<std::size_t> leaves() const;

  // Nested JSON arrays of leaf indices, e.g. [[0,1],[2,3]]. A bare integer is
  // a single-leaf scheme.
  static MergeScheme parse_json(std::string_view text);
  std::string to_json() const;

  friend bool operator==(const MergeScheme&, const MergeScheme&) = default;

 private:
  std::variant<std::size_t, std::vector<MergeScheme>> node_;
};

// Throws SchemeError unless leaves are exactly {0, ..., n-1}, each once.
void check_scheme(const MergeScheme& scheme, std::size_t space_count);

DecisionSpace execute(const MergeScheme& scheme, std::span<const DecisionSpace> spaces);

// Structural impact of every leaf: product over its ancestors of
// 1 / (number of operands). Indexed by leaf number.
std::vector<double> impacts(const MergeScheme& scheme);

// ((X0 X1) (X2 X3)) ...; m must be a power of two.
MergeScheme build_balanced(std::size_t m);
// (((X0 X1) X2) ... X(m-1))
MergeScheme build_chain(std::size_t m);
// Uniform tree whose level arities, root first, are `factors`.
MergeScheme build_factored(std::span<const std::size_t> factors);

// "chain", "balanced", "chain:N", "balanced:N", "factored:3x2x2". Bare
// "chain"/"balanced" use `default_count` leaves.
MergeScheme parse_scheme_spec(std::string_view spec, std::size_t default_count);

}  // namespace dspace
