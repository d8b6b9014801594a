#pragma once

// Seeded pseudo-random generation that is reproducible across standard
// library implementations: the engine is std::mt19937_64 (fully specified by
// the standard), seeded through splitmix64, and every derived draw is
// computed here rather than by the implementation-defined distributions.

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "dspace/decision_space.hpp"

namespace dspace {

std::uint64_t splitmix64(std::uint64_t& state);

class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Independent stream for a (seed, a, b) triple, e.g. (seed, batch, learner).
  static Rng derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

  std::uint64_t next() { return engine_(); }
  // 53-bit uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform in [0, n). n must be positive.
  std::size_t index(std::size_t n);
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

struct RandomSpaceOptions {
  std::size_t dims = 2;
  // Attributes span the integer range [0, grid]; every cut is an integer.
  int grid = 6;
  std::size_t classes = 3;
  // Guillotine cuts applied to the full domain before dropping/grouping.
  std::size_t cuts = 6;
  // Chance that a piece is left uncovered.
  double drop_probability = 0.25;
  // Chance that a piece joins an earlier element instead of starting its own.
  double group_probability = 0.2;
  // Chance that an element gets a one-hot value instead of a random mix.
  double one_hot_probability = 0.25;
};

AttributeSchema grid_schema(std::size_t dims, int grid);
std::vector<std::string> class_names(std::size_t classes);

// A valid space over grid_schema(opts.dims, opts.grid) with labels
// class_names(opts.classes). Pieces come from random guillotine cuts with
// random endpoint inclusivity; with drop_probability 0 the footprint is the
// whole domain.
DecisionSpace random_space(Rng& rng, const RandomSpaceOptions& opts);

// A distribution over `classes` classes drawn from a flat Dirichlet.
ClassDistribution random_distribution(Rng& rng, std::size_t classes);

}  // namespace dspace
