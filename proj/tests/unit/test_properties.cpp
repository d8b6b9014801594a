#include <gtest/gtest.h>

#include <numeric>

#include "dspace/conversion.hpp"
#include "dspace/operators.hpp"
#include "dspace/random.hpp"
#include "dspace/schemes.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace dspace;

namespace {

// Every lattice point lies in at most one element, and every value sums to 1.
void expect_conserved(const DecisionSpace& s, const std::vector<std::vector<double>>& points) {
  for (const auto& e : s.elements()) ASSERT_NEAR(e.value().sum(), 1.0, 1e-9);
  for (const auto& p : points) ASSERT_LE(oracle::covering_count(s, p), 1u);
}

std::vector<DecisionSpace> probe_inputs(std::size_t m) {
  const AttributeSchema schema = grid_schema(2, 4);
  const auto labels = class_names(m);
  std::vector<DecisionSpace> out;
  for (std::size_t i = 0; i < m; ++i) {
    DecisionSpace s(schema, labels);
    s.add(Element(Region(schema.domain_box()), ClassDistribution::one_hot(m, i)));
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

TEST(Properties, OperatorOutputsConserveCoverageAndMass) {
  RandomSpaceOptions opts;
  const auto points = oracle::lattice(2, opts.grid);
  for (std::uint64_t t = 0; t < 60; ++t) {
    Rng rng = Rng::derive(201, t);
    const auto x = random_space(rng, opts);
    const auto y = random_space(rng, opts);
    const auto z = random_space(rng, opts);
    const DecisionSpace three[] = {x, y, z};
    for (const auto& r : {merge(x, y), merge_nary(three), merge_streaming(merge(x, y), z), restrict(x, y),
                          op_plus(x, y), op_barodot(x, y)}) {
      ASSERT_TRUE(validate(r).empty()) << "trial " << t;
      expect_conserved(r, points);
    }
  }
}

TEST(Properties, ConvertedSpacesAreValid) {
  const AttributeSchema schema({{"x", 0, 10}, {"y", 0, 10}});
  for (std::uint64_t t = 0; t < 40; ++t) {
    Rng rng = Rng::derive(202, t);
    const auto tree = gen::random_tree(rng, schema, 5, {"a", "b"});
    const auto from_tree = tree_to_space(tree, schema);
    ASSERT_TRUE(validate(from_tree).empty());
    // The tree's rule list converts to the same space.
    EXPECT_TRUE(semantically_equal(rules_to_space(tree.to_rules(schema), schema, {"a", "b"}), from_tree, 0.0));
  }
}

TEST(Properties, ClassifyUsesTheUniqueCoveringElement) {
  RandomSpaceOptions opts;
  const auto points = oracle::lattice(2, opts.grid);
  for (std::uint64_t t = 0; t < 30; ++t) {
    Rng rng = Rng::derive(203, t);
    const auto s = merge(random_space(rng, opts), random_space(rng, opts));
    for (const auto& p : points) {
      const auto got = classify(s, p);
      const auto want = oracle::covering(s, p);
      ASSERT_EQ(got.has_value(), want.has_value());
      if (got) ASSERT_EQ(got->element, *want);
    }
  }
}

TEST(Properties, SubsumingElementIsUnique) {
  RandomSpaceOptions opts;
  for (std::uint64_t t = 0; t < 50; ++t) {
    Rng rng = Rng::derive(204, t);
    const auto x = random_space(rng, opts);
    const auto y = random_space(rng, opts);
    for (const auto& e : y.elements()) {
      std::size_t n = 0;
      for (const auto& o : x.elements()) n += subsumes(o, e) ? 1 : 0;
      ASSERT_LE(n, 1u);
    }
  }
}

TEST(Properties, OneHotProbeReproducesImpacts) {
  for (const char* spec : {"balanced:8", "chain:6", "factored:3x2x2", "factored:2x3", "chain:2"}) {
    const auto scheme = parse_scheme_spec(spec, 0);
    const auto in = probe_inputs(scheme.leaf_count());
    const auto out = execute(scheme, in);
    ASSERT_EQ(out.size(), 1u) << spec;
    const auto want = impacts(scheme);
    for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(out[0].value()[i], want[i], 1e-9) << spec;
  }
}

TEST(Properties, ChainExecutionIsALeftFold) {
  RandomSpaceOptions opts;
  for (std::uint64_t t = 0; t < 10; ++t) {
    std::vector<DecisionSpace> in;
    for (std::size_t i = 0; i < 5; ++i) {
      Rng rng = Rng::derive(205, t, i);
      in.push_back(random_space(rng, opts));
    }
    DecisionSpace acc = in[0];
    for (std::size_t i = 1; i < in.size(); ++i) acc = merge(acc, in[i]);
    EXPECT_TRUE(semantically_equal(execute(build_chain(5), in), acc, 0.0));
  }
}

TEST(Properties, StreamingFoldEqualsNaryMerge) {
  RandomSpaceOptions opts;
  opts.drop_probability = 0.0;
  opts.one_hot_probability = 0.0;
  for (std::uint64_t t = 0; t < 30; ++t) {
    Rng rng = Rng::derive(206, t);
    const std::size_t n = 3 + rng.index(4);
    std::vector<DecisionSpace> in;
    for (std::size_t i = 0; i < n; ++i) in.push_back(random_space(rng, opts));
    DecisionSpace acc = in[0];
    for (std::size_t i = 1; i < n; ++i) acc = merge_streaming(acc, in[i]);
    EXPECT_TRUE(semantically_equal(acc, merge_nary(in), 1e-9)) << "trial " << t;
  }
}

TEST(Properties, MergeIsCommutativeAndRestrictionAssociative) {
  RandomSpaceOptions opts;
  for (std::uint64_t t = 0; t < 50; ++t) {
    Rng rng = Rng::derive(207, t);
    const auto x = random_space(rng, opts);
    const auto y = random_space(rng, opts);
    const auto z = random_space(rng, opts);
    EXPECT_TRUE(semantically_equal(merge(x, y), merge(y, x), 1e-9));
    EXPECT_TRUE(semantically_equal(restrict(restrict(x, y), z), restrict(x, restrict(y, z)), 0.0));
  }
}
