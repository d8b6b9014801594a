#pragma once

// The decision-space algebra: merge, m-ary merge, streaming (beta-weighted)
// merge, restriction, and the two composites built from them.
//
// Every operator is a pure function of its operands. Spaces must share an
// attribute schema; differing class label lists are reconciled by extending
// every distribution with zero weights over the union of labels (left operand
// order first).

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "dspace/decision_space.hpp"

namespace dspace {

// y is subsumed by x: region(y) is a subset of region(x).
bool subsumes(const Element& x, const Element& y);
// y's projection on every attribute is a proper subset of x's projection,
// and y is subsumed by x.
bool strictly_subsumes(const Element& x, const Element& y);

// Elements of `space` whose regions share at least one point with x.
std::vector<Element> intersect_with_space(const Element& x, const DecisionSpace& space);
std::vector<std::size_t> intersecting_indices(const Element& x, const DecisionSpace& space);

struct IntersectionPair {
  std::size_t x = 0;
  std::size_t y = 0;
  Region shared;
};

// Every non-empty pairwise intersection between X and Y, plus what is left of
// each element once all of its shared parts are removed. Elements with no
// intersection at all do not appear in the remainder maps.
struct IntersectionReport {
  std::vector<IntersectionPair> pairs;
  std::map<std::size_t, Region> x_remainders;
  std::map<std::size_t, Region> y_remainders;
};

IntersectionReport intersection_report(const DecisionSpace& x_space, const DecisionSpace& y_space);

// Mass-weighted average of distributions. Throws OperatorError when the
// lists differ in length, a mass is negative, or every mass is zero.
ClassDistribution combine_values(std::span<const ClassDistribution> values,
                                 std::span<const double> masses);

// Hook for application-specific value formulas. Receives the conflicting
// values and their weights and must return a distribution.
using ValueCombiner = std::function<ClassDistribution(std::span<const ClassDistribution>,
                                                      std::span<const double>)>;

struct MergeOptions {
  // Component-wise tolerance for "same value" in the subsumption rule.
  double value_tolerance = kDefaultTolerance;
  // Empty means combine_values.
  ValueCombiner combiner;
};

DecisionSpace merge(const DecisionSpace& x, const DecisionSpace& y, const MergeOptions& options = {});
DecisionSpace merge_nary(std::span<const DecisionSpace> spaces, const MergeOptions& options = {});
// Weights each conflict by accumulated mass, so folding this over a sequence
// gives every input the weight an m-ary merge would.
DecisionSpace merge_streaming(const DecisionSpace& accumulator, const DecisionSpace& next,
                              const MergeOptions& options = {});

DecisionSpace restrict(const DecisionSpace& x, const DecisionSpace& y);

// (X merge Y) restricted by X, then by Y.
DecisionSpace op_plus(const DecisionSpace& x, const DecisionSpace& y);
// (X restricted by Y) merged with (Y restricted by X).
DecisionSpace op_barodot(const DecisionSpace& x, const DecisionSpace& y);

}  // namespace dspace
