#include <gtest/gtest.h>

#include "dspace/conversion.hpp"
#include "dspace/decision_space.hpp"
#include "dspace/error.hpp"
#include "dspace/random.hpp"
#include "oracles.hpp"

using namespace dspace;

namespace {

Interval co(double lo, double hi) { return Interval(lo, hi, true, false); }
Interval cc(double lo, double hi) { return Interval(lo, hi, true, true); }

AttributeSchema square(double max = 6) { return AttributeSchema({{"age", 0, max}, {"degree", 0, max}}); }

DecisionSpace five_rule_space() {
  const RuleSet rules = parse_ruleset(
      "IF age >= 0 AND age < 4 AND degree >= 0 AND degree < 2 THEN A\n"
      "IF age >= 4 AND age < 6 AND degree >= 0 AND degree < 4 THEN B\n"
      "IF age >= 0 AND age < 2 AND degree >= 2 AND degree < 6 THEN C\n"
      "IF age >= 2 AND age < 6 AND degree >= 4 AND degree < 6 THEN D\n"
      "IF age >= 2 AND age < 4 AND degree >= 2 AND degree < 4 THEN E\n");
  return rules_to_space(rules, square());
}

bool has_rule(const std::vector<Violation>& v, const std::string& rule) {
  for (const auto& x : v) {
    if (x.rule == rule) return true;
  }
  return false;
}

}  // namespace

TEST(Schema, RejectsDuplicateNamesAndEmptyDomains) {
  EXPECT_THROW(AttributeSchema({{"a", 0, 1}, {"a", 0, 2}}), SchemaError);
  EXPECT_THROW(AttributeSchema({{"a", 1, 1}}), SchemaError);
  EXPECT_THROW(AttributeSchema({{"a", 2, 1}}), SchemaError);
}

TEST(Schema, IndexAndDomain) {
  const auto s = square(8);
  EXPECT_EQ(s.index_of("degree"), 1u);
  EXPECT_FALSE(s.index_of("height"));
  EXPECT_EQ(s.domain_box(), Box({cc(0, 8), cc(0, 8)}));
}

TEST(Distribution, ArgmaxTieBreaksOnLowestIndex) {
  EXPECT_EQ(ClassDistribution({0.5, 0.5}).argmax(), 0u);
  EXPECT_EQ(ClassDistribution({0.2, 0.4, 0.4}).argmax(), 1u);
}

TEST(Element, MassDefaultsToSpecialization) {
  const Element e(Region(Box({cc(7, 8), cc(0, 14)})), ClassDistribution({0.4, 0.6}));
  EXPECT_DOUBLE_EQ(e.mass(), 7.5);
  EXPECT_DOUBLE_EQ(specialization(e, square(15)), 7.5);
}

TEST(Specialization, PointIsZero) {
  const Element e(Region(Box({Interval::point(1), Interval::point(2)})), ClassDistribution({1.0, 0.0}));
  EXPECT_EQ(specialization(e, square()), 0.0);
}

TEST(Specialization, LShapeIsMeanOfUnionMeasures) {
  const auto l = Region::from_boxes(2, {Box({co(0, 3), co(0, 5)}), Box({co(0, 5), co(5, 6)})});
  const double expected = (oracle::union_length({{0, 3}, {0, 5}}) + oracle::union_length({{0, 5}, {5, 6}})) / 2.0;
  EXPECT_DOUBLE_EQ(specialization(l), expected);
  EXPECT_DOUBLE_EQ(specialization(l), 5.5);
}

TEST(Specialization, DimensionMismatchThrows) {
  const Element e(Region(Box({co(0, 1)})), ClassDistribution({1.0}));
  EXPECT_THROW(specialization(e, square()), DimensionError);
}

TEST(Validate, FiveRulePartitionIsValid) {
  const auto s = five_rule_space();
  EXPECT_EQ(s.size(), 5u);
  EXPECT_TRUE(validate(s).empty());
}

TEST(Validate, DuplicateElementOverlaps) {
  DecisionSpace s(square(), {"Yes", "No"});
  const Element e(Region(Box({co(0, 2), co(0, 2)})), ClassDistribution({1, 0}));
  s.add(e);
  s.add(e);
  const auto v = validate(s);
  ASSERT_TRUE(has_rule(v, "element-overlap"));
  for (const auto& x : v) {
    if (x.rule == "element-overlap") EXPECT_EQ(x.elements, (std::vector<std::size_t>{0, 1}));
  }
}

TEST(Validate, DistributionMustSumToOne) {
  DecisionSpace s(square(), {"Yes", "No"});
  s.add(Element(Region(Box({co(0, 2), co(0, 2)})), ClassDistribution({0.5, 0.4})));
  EXPECT_TRUE(has_rule(validate(s), "distribution-sum"));
}

TEST(Validate, OtherStructuralRules) {
  DecisionSpace s(square(), {"Yes", "No"});
  s.add(Element(Region(Box({co(0, 7), co(0, 2)})), ClassDistribution({1, 0})));
  s.add(Element(Region(Box({co(2, 3), co(0, 2)})), ClassDistribution({1.2, -0.2})));
  s.add(Element(Region(Box({co(3, 4), co(0, 2)})), ClassDistribution({1})));
  s.add(Element(Region(2), ClassDistribution({1, 0})));
  s.add(Element(Region(Box({co(4, 5), co(0, 2)})), ClassDistribution({1, 0}), -1.0));
  const auto v = validate(s);
  EXPECT_TRUE(has_rule(v, "outside-domain"));
  EXPECT_TRUE(has_rule(v, "distribution-range"));
  EXPECT_TRUE(has_rule(v, "distribution-size"));
  EXPECT_TRUE(has_rule(v, "region-empty"));
  EXPECT_TRUE(has_rule(v, "mass-negative"));
  EXPECT_TRUE(has_rule(validate(DecisionSpace(square(), {"Yes", "Yes"})), "class-duplicate"));
}

TEST(SemanticEquality, Reflexive) {
  const auto s = five_rule_space();
  EXPECT_TRUE(semantically_equal(s, s));
}

TEST(SemanticEquality, SplittingABoxDoesNotMatter) {
  DecisionSpace a(square(), {"Yes", "No"});
  a.add(Element(Region(Box({co(0, 4), co(0, 4)})), ClassDistribution({0.3, 0.7})));
  DecisionSpace b(square(), {"Yes", "No"});
  b.add(Element(Region(Box({co(0, 2), co(0, 4)})), ClassDistribution({0.3, 0.7})));
  b.add(Element(Region(Box({co(2, 4), co(0, 4)})), ClassDistribution({0.3, 0.7})));
  EXPECT_TRUE(semantically_equal(a, b, 0.0));
}

TEST(SemanticEquality, PerturbationBeyondToleranceIsDetected) {
  const double tol = 1e-9;
  DecisionSpace a(square(), {"Yes", "No"});
  a.add(Element(Region(Box({co(0, 4), co(0, 4)})), ClassDistribution({0.3, 0.7})));
  DecisionSpace b(square(), {"Yes", "No"});
  b.add(Element(Region(Box({co(0, 4), co(0, 4)})), ClassDistribution({0.3 + 2 * tol, 0.7 - 2 * tol})));
  EXPECT_FALSE(semantically_equal(a, b, tol));
  EXPECT_TRUE(semantically_equal(a, b, 3 * tol));
}

TEST(SemanticEquality, CoverageDifferenceIsDetectedEvenAtAPoint) {
  DecisionSpace a(square(), {"Yes", "No"});
  a.add(Element(Region(Box({co(0, 4), co(0, 4)})), ClassDistribution({1, 0})));
  DecisionSpace b(square(), {"Yes", "No"});
  b.add(Element(Region(Box({cc(0, 4), co(0, 4)})), ClassDistribution({1, 0})));
  EXPECT_FALSE(semantically_equal(a, b));
  EXPECT_FALSE(compare_spaces(a, b).same_coverage);
}

TEST(SemanticEquality, MatchesClassesByName) {
  DecisionSpace a(square(), {"Yes", "No"});
  a.add(Element(Region(Box({co(0, 4), co(0, 4)})), ClassDistribution({0.3, 0.7})));
  DecisionSpace b(square(), {"No", "Yes"});
  b.add(Element(Region(Box({co(0, 4), co(0, 4)})), ClassDistribution({0.7, 0.3})));
  EXPECT_TRUE(semantically_equal(a, b));
}

TEST(SemanticEquality, SchemaMismatchThrows) {
  EXPECT_THROW(semantically_equal(DecisionSpace(square(6), {"Y"}), DecisionSpace(square(7), {"Y"})), SchemaError);
}

TEST(SemanticEquality, IsAnEquivalenceOnRandomSpacesAtZeroTolerance) {
  RandomSpaceOptions opts;
  for (std::uint64_t t = 0; t < 50; ++t) {
    Rng rng = Rng::derive(11, t);
    const auto a = random_space(rng, opts);
    // Same content, different decomposition: split every box at its
    // midpoint on axis 0 where possible.
    DecisionSpace b(a.schema(), {a.class_labels().begin(), a.class_labels().end()});
    for (const auto& e : a.elements()) {
      std::vector<Box> pieces;
      for (const auto& bx : e.region().boxes()) {
        const auto& iv = bx[0];
        if (iv.hi() - iv.lo() >= 2) {
          const double mid = std::floor((iv.lo() + iv.hi()) / 2);
          std::vector<Interval> l(bx.bounds().begin(), bx.bounds().end()), r = l;
          l[0] = Interval(iv.lo(), mid, iv.lo_closed(), false);
          r[0] = Interval(mid, iv.hi(), true, iv.hi_closed());
          pieces.emplace_back(l);
          pieces.emplace_back(r);
        } else {
          pieces.push_back(bx);
        }
      }
      b.add(Element(Region::from_disjoint(2, pieces), e.value()));
    }
    const auto c = random_space(rng, opts);
    EXPECT_TRUE(semantically_equal(a, a, 0.0));
    EXPECT_TRUE(semantically_equal(a, b, 0.0));
    EXPECT_TRUE(semantically_equal(b, a, 0.0));
    EXPECT_EQ(semantically_equal(a, c, 0.0), semantically_equal(c, a, 0.0));
    EXPECT_EQ(semantically_equal(b, c, 0.0), semantically_equal(a, c, 0.0));
  }
}

TEST(Classify, FiveRulePointIsClassE) {
  const auto s = five_rule_space();
  const auto p = classify(s, std::vector<double>{3, 3});
  ASSERT_TRUE(p);
  EXPECT_EQ(p->label, "E");
}

TEST(Classify, UncoveredPointIsAbsent) {
  const auto s = five_rule_space();
  EXPECT_FALSE(classify(s, std::vector<double>{6, 6}));
}

TEST(Classify, TieBreaksByLabelOrder) {
  DecisionSpace s(square(), {"No", "Yes"});
  s.add(Element(Region(square().domain_box()), ClassDistribution({0.5, 0.5})));
  EXPECT_EQ(classify(s, std::vector<double>{1, 1})->label, "No");
}

TEST(Classify, DimensionMismatchThrows) {
  EXPECT_THROW(classify(five_rule_space(), std::vector<double>{1}), DimensionError);
}

TEST(ClassLabels, ExtensionAddsZeroWeights) {
  DecisionSpace s(square(), {"Yes", "No"});
  s.add(Element(Region(Box({co(0, 4), co(0, 4)})), ClassDistribution({0.3, 0.7})));
  const auto t = s.with_class_labels({"Maybe", "No", "Yes"});
  EXPECT_EQ(t[0].value(), ClassDistribution({0.0, 0.7, 0.3}));
  EXPECT_THROW(s.with_class_labels({"Yes"}), SchemaError);
}
