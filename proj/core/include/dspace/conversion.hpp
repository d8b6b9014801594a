#pragma once

// Rule sets and decision trees, and their conversion to decision spaces.
//
// Rule DSL, one rule per line (line breaks are otherwise insignificant):
//
//   IF age >= 0 AND age < 4 AND degree >= 0 AND degree < 2 THEN A
//   IF degree > 3 THEN class = Yes
//   IF age <= 7 THEN {Yes: 40%, No: 60%}
//
// Keywords are case-insensitive; `<=`/`>=` may also be written `≤`/`≥`.
// Names that are not plain identifiers are double-quoted. `#` starts a
// comment. Each attribute may carry at most one lower and one upper bound.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dspace/decision_space.hpp"

namespace dspace {

enum class BoundOp { kLess, kLessEqual, kGreater, kGreaterEqual };

std::string_view to_string(BoundOp op);
inline bool is_upper(BoundOp op) { return op == BoundOp::kLess || op == BoundOp::kLessEqual; }

struct Condition {
  std::string attribute;
  BoundOp op = BoundOp::kLess;
  double threshold = 0.0;

  bool holds(double x) const;
  friend bool operator==(const Condition&, const Condition&) = default;
};

// Explicit distribution, in percent, keyed by class label.
struct LabeledDistribution {
  std::vector<std::string> classes;
  std::vector<double> percents;

  friend bool operator==(const LabeledDistribution&, const LabeledDistribution&) = default;
};

// A hard label or an explicit distribution.
using RuleTarget = std::variant<std::string, LabeledDistribution>;

struct Rule {
  std::vector<Condition> conditions;
  RuleTarget target;

  friend bool operator==(const Rule&, const Rule&) = default;
};

struct RuleSet {
  std::vector<Rule> rules;

  friend bool operator==(const RuleSet&, const RuleSet&) = default;
};

// Throws SyntaxError (with line/column) on malformed text, a repeated bound
// on the same side of an attribute, or a lower bound not below its upper
// bound.
RuleSet parse_ruleset(std::string_view text);
std::string emit_ruleset(const RuleSet& rules);

// Class labels in order of first appearance across targets.
std::vector<std::string> collect_class_labels(const RuleSet& rules);

// One element per rule. Missing bounds fall back to the attribute domain;
// `<`/`>` give open endpoints, `<=`/`>=` closed ones. With empty
// `class_labels` the labels are collected from the rules.
// Throws ConversionError on unknown attributes or labels, thresholds outside
// the domain, or a rule whose region is empty. Overlapping rules are not an
// error here; validate() reports them.
DecisionSpace rules_to_space(const RuleSet& rules, const AttributeSchema& schema,
                             std::vector<std::string> class_labels = {});

// Binary decision tree. A split sends `attr < threshold` left and
// `attr >= threshold` right; with left_inclusive the test is `<=` / `>`.
class DecisionTree {
 public:
  struct Split {
    std::string attribute;
    double threshold = 0.0;
    bool left_inclusive = false;
    std::size_t left = 0;
    std::size_t right = 0;
  };
  struct Leaf {
    RuleTarget target;
  };
  using Node = std::variant<Split, Leaf>;

  DecisionTree() = default;
  explicit DecisionTree(std::vector<std::string> classes) : classes_(std::move(classes)) {}

  // {"classes": [...], "root": node}, or a bare node when every leaf uses
  // "label". node = {"attr", "threshold", "left", "right"[, "left_op"]}
  //               | {"value": [percent, ...]} | {"label": "..."}
  static DecisionTree parse_json(std::string_view text);
  std::string to_json() const;

  std::size_t add_leaf(RuleTarget target);
  std::size_t add_split(std::string attribute, double threshold, std::size_t left, std::size_t right,
                        bool left_inclusive = false);
  void set_root(std::size_t root) { root_ = root; }

  std::span<const std::string> classes() const noexcept { return classes_; }
  std::span<const Node> nodes() const noexcept { return nodes_; }
  std::size_t root() const noexcept { return root_; }
  std::size_t leaf_count() const;

  // One rule per leaf, bounds tightened along the path.
  RuleSet to_rules(const AttributeSchema& schema) const;

 private:
  std::vector<std::string> classes_;
  std::vector<Node> nodes_;
  std::size_t root_ = 0;
};

DecisionSpace tree_to_space(const DecisionTree& tree, const AttributeSchema& schema);

}  // namespace dspace
