#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "dspace/conversion.hpp"
#include "dspace/operators.hpp"
#include "dspace/random.hpp"

using namespace dspace;

namespace {

RandomSpaceOptions options_for(int cuts) {
  RandomSpaceOptions opts;
  opts.grid = 64;
  opts.cuts = static_cast<std::size_t>(cuts);
  opts.one_hot_probability = 0.0;
  return opts;
}

std::vector<DecisionSpace> spaces(int cuts, std::size_t n, std::uint64_t seed = 1) {
  std::vector<DecisionSpace> out;
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(cuts), i);
    out.push_back(random_space(rng, options_for(cuts)));
  }
  return out;
}

void BM_Merge(benchmark::State& state) {
  const auto in = spaces(static_cast<int>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(merge(in[0], in[1]));
  state.counters["elements"] = static_cast<double>(in[0].size() + in[1].size());
}
BENCHMARK(BM_Merge)->RangeMultiplier(2)->Range(8, 128);

void BM_MergeNary(benchmark::State& state) {
  const auto in = spaces(32, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(merge_nary(in));
}
BENCHMARK(BM_MergeNary)->DenseRange(2, 8, 2);

void BM_StreamingFold(benchmark::State& state) {
  const auto in = spaces(32, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    DecisionSpace acc = in[0];
    for (std::size_t i = 1; i < in.size(); ++i) acc = merge_streaming(acc, in[i]);
    benchmark::DoNotOptimize(acc);
  }
}
BENCHMARK(BM_StreamingFold)->DenseRange(2, 8, 2);

void BM_SemanticallyEqual(benchmark::State& state) {
  const auto in = spaces(static_cast<int>(state.range(0)), 2);
  const auto m = merge(in[0], in[1]);
  const auto n = merge(in[1], in[0]);
  for (auto _ : state) benchmark::DoNotOptimize(semantically_equal(m, n));
}
BENCHMARK(BM_SemanticallyEqual)->RangeMultiplier(2)->Range(8, 64);

void BM_RegionSubtract(benchmark::State& state) {
  const auto in = spaces(static_cast<int>(state.range(0)), 2);
  const Region a = in[0].footprint();
  const Region b = in[1].footprint();
  for (auto _ : state) benchmark::DoNotOptimize(region_subtract(a, b));
}
BENCHMARK(BM_RegionSubtract)->RangeMultiplier(2)->Range(8, 128);

void BM_RegionUnion(benchmark::State& state) {
  const auto in = spaces(static_cast<int>(state.range(0)), 2);
  const Region a = in[0].footprint();
  const Region b = in[1].footprint();
  for (auto _ : state) benchmark::DoNotOptimize(region_union(a, b));
}
BENCHMARK(BM_RegionUnion)->RangeMultiplier(2)->Range(8, 128);

void BM_TreeToSpace(benchmark::State& state) {
  const AttributeSchema schema({{"x", 0, 1000}, {"y", 0, 1000}, {"z", 0, 1000}});
  // A complete tree cycling through the attributes with halving thresholds.
  DecisionTree tree({"a", "b"});
  std::size_t leaf_label = 0;
  auto build = [&](auto& self, int depth, std::vector<std::pair<double, double>> range) -> std::size_t {
    if (depth == 0) return tree.add_leaf(std::string(leaf_label++ % 2 ? "a" : "b"));
    const std::size_t attr = static_cast<std::size_t>(depth) % 3;
    const double t = (range[attr].first + range[attr].second) / 2;
    auto left = range, right = range;
    left[attr].second = t;
    right[attr].first = t;
    const auto l = self(self, depth - 1, left);
    const auto r = self(self, depth - 1, right);
    return tree.add_split(schema[attr].name, t, l, r);
  };
  tree.set_root(build(build, static_cast<int>(state.range(0)), {{0, 1000}, {0, 1000}, {0, 1000}}));
  for (auto _ : state) benchmark::DoNotOptimize(tree_to_space(tree, schema));
}
BENCHMARK(BM_TreeToSpace)->DenseRange(4, 10, 2);

void BM_ParseRules(benchmark::State& state) {
  std::string text;
  for (int i = 0; i < state.range(0); ++i) {
    text += "IF x >= " + std::to_string(i) + " AND x < " + std::to_string(i + 1) + " AND y <= 5 THEN {a: 25%, b: 75%}\n";
  }
  for (auto _ : state) benchmark::DoNotOptimize(parse_ruleset(text));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_ParseRules)->RangeMultiplier(8)->Range(8, 4096);

}  // namespace
BENCHMARK_MAIN();
