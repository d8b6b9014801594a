#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "dspace/error.hpp"
#include "dspace/json_io.hpp"
#include "dspace/operators.hpp"
#include "dspace/random.hpp"
#include "oracles.hpp"

using namespace dspace;

namespace {

Interval co(double lo, double hi) { return Interval(lo, hi, true, false); }
Interval cc(double lo, double hi) { return Interval(lo, hi, true, true); }
Region rect(Interval a, Interval b) { return Region(Box({a, b})); }

AttributeSchema square(double max = 6) { return AttributeSchema({{"a0", 0, max}, {"a1", 0, max}}); }

Element el(Region r, std::vector<double> v) { return Element(std::move(r), ClassDistribution(std::move(v))); }

DecisionSpace single(Region r, std::vector<double> v, std::vector<std::string> labels = {"A", "B"}) {
  DecisionSpace s(square(), std::move(labels));
  s.add(el(std::move(r), std::move(v)));
  return s;
}

DecisionSpace load(const std::string& name) {
  std::ifstream in(std::string(DSPACE_TEST_DATA_DIR) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return space_from_json(ss.str());
}

double at(const DecisionSpace& s, std::vector<double> p, const std::string& label) {
  const auto got = classify(s, p);
  if (!got) return -1.0;
  return got->distribution[*s.class_index(label)];
}

}  // namespace

TEST(Subsumption, ProperlyInsideIsStrict) {
  const auto x = el(rect(co(0, 4), co(0, 4)), {1, 0});
  const auto y = el(rect(co(1, 2), co(1, 2)), {1, 0});
  EXPECT_TRUE(subsumes(x, y));
  EXPECT_TRUE(strictly_subsumes(x, y));
  EXPECT_FALSE(subsumes(y, x));
}

TEST(Subsumption, EqualRegionsAreNotStrict) {
  const auto x = el(rect(co(0, 4), co(0, 4)), {1, 0});
  EXPECT_TRUE(subsumes(x, x));
  EXPECT_FALSE(strictly_subsumes(x, x));
}

TEST(Subsumption, SharedEdgeStillStrictWhenEveryProjectionIsProper) {
  // [0,2) is a proper subset of [0,4) and [1,2) of [0,4).
  const auto x = el(rect(co(0, 4), co(0, 4)), {1, 0});
  const auto y = el(rect(co(0, 2), co(1, 2)), {1, 0});
  EXPECT_TRUE(strictly_subsumes(x, y));
  // Full extent on one axis: that projection is not proper.
  EXPECT_FALSE(strictly_subsumes(x, el(rect(co(0, 4), co(1, 2)), {1, 0})));
}

TEST(Intersection, ReportListsPairsAndRemainders) {
  DecisionSpace x(square(), {"A", "B"});
  x.add(el(rect(co(0, 4), co(0, 4)), {1, 0}));
  x.add(el(rect(co(4, 6), co(0, 4)), {0, 1}));
  const auto y = single(rect(co(2, 5), co(2, 6)), {0.5, 0.5});
  const auto r = intersection_report(x, y);
  ASSERT_EQ(r.pairs.size(), 2u);
  EXPECT_EQ(r.pairs[0].shared, rect(co(2, 4), co(2, 4)));
  EXPECT_EQ(r.pairs[1].shared, rect(co(4, 5), co(2, 4)));
  EXPECT_DOUBLE_EQ(r.x_remainders.at(0).volume(), 12.0);
  EXPECT_DOUBLE_EQ(r.y_remainders.at(0).volume(), 12.0 - 6.0);
  EXPECT_EQ(intersecting_indices(y[0], x), (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(intersect_with_space(y[0], x).size(), 2u);
}

TEST(CombineValues, WeightedAverage) {
  const ClassDistribution v[] = {ClassDistribution({1, 0}), ClassDistribution({0, 1})};
  const double m[] = {3, 1};
  EXPECT_TRUE(combine_values(v, m).approx_equal(ClassDistribution({0.75, 0.25})));
}

TEST(CombineValues, EqualMassesGiveExactFractions) {
  std::vector<ClassDistribution> v;
  for (std::size_t k = 0; k < 4; ++k) v.push_back(ClassDistribution::one_hot(4, k));
  const std::vector<double> m(4, 2.5);
  EXPECT_EQ(combine_values(v, m), ClassDistribution({0.25, 0.25, 0.25, 0.25}));
}

TEST(CombineValues, Errors) {
  const ClassDistribution v[] = {ClassDistribution({1, 0}), ClassDistribution({0, 1})};
  const double zero[] = {0, 0};
  const double negative[] = {1, -1};
  const double one[] = {1};
  EXPECT_THROW(combine_values(v, zero), OperatorError);
  EXPECT_THROW(combine_values(v, negative), OperatorError);
  EXPECT_THROW(combine_values(v, one), OperatorError);
  const ClassDistribution ragged[] = {ClassDistribution({1, 0}), ClassDistribution({1})};
  const double ok[] = {1, 1};
  EXPECT_THROW(combine_values(ragged, ok), OperatorError);
}

TEST(Merge, WorkedConflictValue) {
  const auto m = merge(load("conflict_left.json"), load("conflict_right.json"));
  EXPECT_TRUE(validate(m).empty());
  // Left element mass 7.5 at 40/60, right element mass 6.5 at 0/100.
  EXPECT_NEAR(at(m, {7.5, 5}, "Yes"), 0.4 * 7.5 / 14.0, 1e-12);
  EXPECT_NEAR(at(m, {7.5, 5}, "Yes") * 100, 21.4286, 1e-4);
  EXPECT_EQ(classify(m, std::vector<double>{7.5, 5})->label, "No");
  // Only one side covers these.
  EXPECT_DOUBLE_EQ(at(m, {1, 14}, "Yes"), 0.8);
  EXPECT_DOUBLE_EQ(at(m, {8.5, 12}, "No"), -1.0);
}

TEST(Merge, EmptyIsIdentityAndSelfMergeIsIdempotent) {
  const auto x = load("conflict_left.json");
  const DecisionSpace empty(x.schema(), {"Yes", "No"});
  EXPECT_TRUE(semantically_equal(merge(x, empty), x, 0.0));
  EXPECT_TRUE(semantically_equal(merge(empty, x), x, 0.0));
  EXPECT_TRUE(semantically_equal(merge(x, x), x, 0.0));
}

TEST(Merge, EqualValueSubsumedElementIsAbsorbed) {
  const auto x = single(rect(cc(0, 6), cc(0, 6)), {0.3, 0.7});
  const auto y = single(rect(co(2, 4), co(2, 4)), {0.3, 0.7});
  const auto m = merge(x, y);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0].region(), x[0].region());
}

TEST(Merge, ClassLabelsAreUnited) {
  const auto x = single(rect(co(0, 4), co(0, 4)), {1, 0}, {"A", "B"});
  const auto y = single(rect(co(0, 4), co(0, 4)), {1, 0}, {"C", "A"});
  const auto m = merge(x, y);
  EXPECT_EQ(std::vector<std::string>(m.class_labels().begin(), m.class_labels().end()),
            (std::vector<std::string>{"A", "B", "C"}));
  EXPECT_DOUBLE_EQ(at(m, {1, 1}, "A"), 0.5);
  EXPECT_DOUBLE_EQ(at(m, {1, 1}, "C"), 0.5);
}

TEST(Merge, SchemaMismatchThrows) {
  const DecisionSpace a(square(6), {"A"});
  const DecisionSpace b(square(7), {"A"});
  EXPECT_THROW(merge(a, b), SchemaError);
}

TEST(Merge, CustomCombinerIsUsed) {
  MergeOptions opts;
  opts.combiner = [](std::span<const ClassDistribution> v, std::span<const double>) { return v.back(); };
  const auto m = merge(single(rect(co(0, 4), co(0, 4)), {1, 0}), single(rect(co(2, 6), co(0, 4)), {0, 1}), opts);
  EXPECT_DOUBLE_EQ(at(m, {3, 1}, "B"), 1.0);
}

TEST(Merge, PointTouchingElementsStillCombine) {
  const auto x = single(rect(cc(0, 2), cc(0, 2)), {1, 0});
  const auto y = single(rect(cc(2, 4), cc(0, 2)), {0, 1});
  const auto m = merge(x, y);
  EXPECT_TRUE(validate(m).empty());
  EXPECT_DOUBLE_EQ(at(m, {2, 1}, "A"), 0.5);
  EXPECT_DOUBLE_EQ(at(m, {1, 1}, "A"), 1.0);
}

TEST(MergeNary, FourOneHotInputsGetAQuarterEach) {
  std::vector<DecisionSpace> in;
  const std::vector<std::string> labels{"A", "B", "C", "D"};
  for (std::size_t k = 0; k < 4; ++k) {
    DecisionSpace s(square(), labels);
    s.add(Element(rect(co(0, 4), co(0, 4)), ClassDistribution::one_hot(4, k)));
    in.push_back(std::move(s));
  }
  const auto m = merge_nary(in);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0].value(), ClassDistribution({0.25, 0.25, 0.25, 0.25}));
  EXPECT_DOUBLE_EQ(m[0].mass(), 16.0);
}

TEST(MergeNary, SingleInputIsReturnedAndEmptyListThrows) {
  const auto x = load("conflict_right.json");
  EXPECT_TRUE(semantically_equal(merge_nary(std::span<const DecisionSpace>(&x, 1)), x, 0.0));
  EXPECT_THROW(merge_nary(std::span<const DecisionSpace>()), OperatorError);
}

TEST(MergeStreaming, FreshInputsMatchPlainMerge) {
  const auto x = load("conflict_left.json");
  const auto y = load("conflict_right.json");
  const auto s = merge_streaming(x, y);
  EXPECT_TRUE(semantically_equal(s, merge(x, y), 0.0));
  // The conflict element carries the summed mass.
  const auto p = classify(s, std::vector<double>{7.5, 5});
  EXPECT_DOUBLE_EQ(s[p->element].mass(), 14.0);
}

TEST(MergeStreaming, AccumulatedMassSetsTheWeight) {
  const auto acc = single(rect(co(0, 4), co(0, 4)), {1, 0});
  DecisionSpace heavy(square(), {"A", "B"});
  heavy.add(Element(rect(co(0, 4), co(0, 4)), ClassDistribution({1, 0}), 12.0));
  const auto next = single(rect(co(0, 4), co(0, 4)), {0, 1});
  EXPECT_DOUBLE_EQ(at(merge_streaming(acc, next), {1, 1}, "A"), 0.5);
  EXPECT_DOUBLE_EQ(at(merge_streaming(heavy, next), {1, 1}, "A"), 0.75);
}

// The equal-value absorption rule looks at the operands it is given. In an
// m-ary merge those are the original inputs; in a streaming fold the third
// input meets an already-mixed accumulator, so an element that the m-ary
// merge absorbs survives the fold.
TEST(MergeStreaming, RepeatedValuesCanDivergeFromNaryMerge) {
  const std::vector<DecisionSpace> in{single(rect(cc(0, 6), cc(0, 6)), {1, 0}),
                                      single(rect(co(1, 5), co(1, 5)), {0, 1}),
                                      single(rect(co(2, 4), co(2, 4)), {1, 0})};
  const auto nary = merge_nary(in);
  const auto fold = merge_streaming(merge_streaming(in[0], in[1]), in[2]);
  EXPECT_DOUBLE_EQ(at(nary, {3, 3}, "A"), 0.6);
  EXPECT_NEAR(at(fold, {3, 3}, "A"), 8.0 / 12.0, 1e-12);
  EXPECT_DOUBLE_EQ(at(fold, {1.5, 1.5}, "A"), 0.6);
}

TEST(Restrict, KeepsOnlySharedSpace) {
  const auto x = single(rect(co(0, 4), co(0, 4)), {1, 0});
  const auto y = single(rect(co(2, 6), co(2, 6)), {0, 1});
  const auto r = restrict(x, y);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].region(), rect(co(2, 4), co(2, 4)));
  EXPECT_EQ(r[0].value(), ClassDistribution({1, 0}));
  EXPECT_DOUBLE_EQ(r[0].mass(), x[0].mass());
}

TEST(Restrict, ByEmptyOrSelf) {
  const auto x = load("conflict_right.json");
  EXPECT_TRUE(restrict(x, DecisionSpace(x.schema(), {"Yes", "No"})).empty());
  EXPECT_TRUE(semantically_equal(restrict(x, x), x, 0.0));
}

TEST(Composites, DisjointInputsGiveEmptySpaces) {
  const auto x = single(rect(co(0, 2), co(0, 2)), {1, 0});
  const auto y = single(rect(co(3, 6), co(3, 6)), {0, 1});
  EXPECT_TRUE(op_plus(x, y).empty());
  EXPECT_TRUE(op_barodot(x, y).empty());
}

TEST(Composites, OverlapIsTheMergedSharedPart) {
  const auto x = single(rect(co(0, 4), co(0, 4)), {1, 0});
  const auto y = single(rect(co(2, 6), co(0, 4)), {0, 1});
  for (const auto& r : {op_plus(x, y), op_barodot(x, y)}) {
    EXPECT_TRUE(validate(r).empty());
    EXPECT_TRUE(region_set_equal(r.footprint(), rect(co(2, 4), co(0, 4))));
  }
  // Both operands have mass 4 in the plain merge.
  EXPECT_DOUBLE_EQ(at(op_plus(x, y), {3, 1}, "A"), 0.5);
  // The barodot merge sees the restricted pieces, both of mass 3.
  EXPECT_DOUBLE_EQ(at(op_barodot(x, y), {3, 1}, "A"), 0.5);
}

TEST(MergeProperty, CellValuesMatchBruteForceOracle) {
  RandomSpaceOptions opts;
  opts.one_hot_probability = 0.0;  // no equal values, so nothing is absorbed
  const auto points = oracle::lattice(2, opts.grid);
  for (std::uint64_t t = 0; t < 60; ++t) {
    Rng rng = Rng::derive(101, t);
    const auto x = random_space(rng, opts);
    const auto y = random_space(rng, opts);
    const auto m = merge(x, y);
    ASSERT_TRUE(validate(m).empty()) << "trial " << t;
    const std::vector<std::string> labels(m.class_labels().begin(), m.class_labels().end());
    for (const auto& p : points) {
      const auto want = oracle::merge_cell(x, y, labels, p);
      const auto got = oracle::covering(m, p);
      ASSERT_EQ(got.has_value(), want.covered) << "trial " << t << " at " << p[0] << "," << p[1];
      if (!got) continue;
      for (std::size_t k = 0; k < labels.size(); ++k) {
        ASSERT_NEAR(m[*got].value()[k], want.value[k], 1e-12) << "trial " << t;
      }
    }
  }
}

TEST(MergeProperty, OutputsAreValidAndCoverTheUnion) {
  RandomSpaceOptions opts;
  for (std::uint64_t t = 0; t < 100; ++t) {
    Rng rng = Rng::derive(102, t);
    const auto x = random_space(rng, opts);
    const auto y = random_space(rng, opts);
    for (const auto& r : {merge(x, y), op_plus(x, y), op_barodot(x, y), restrict(x, y)}) {
      ASSERT_TRUE(validate(r).empty()) << "trial " << t;
    }
    EXPECT_TRUE(region_set_equal(merge(x, y).footprint(), region_union(x.footprint(), y.footprint())));
    EXPECT_TRUE(region_set_equal(restrict(x, y).footprint(), region_intersect(x.footprint(), y.footprint())));
  }
}
