#include "dspace/random.hpp"

#include <cmath>

#include "dspace/error.hpp"

namespace dspace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed) {
  std::uint64_t state = seed;
  engine_.seed(splitmix64(state));
}

Rng Rng::derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::uint64_t state = seed;
  std::uint64_t mixed = splitmix64(state);
  state ^= a * 0xd1b54a32d192ed03ULL;
  mixed ^= splitmix64(state);
  state ^= b * 0x8cb92ba72f3d8dd7ULL;
  mixed ^= splitmix64(state);
  return Rng(mixed);
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::size_t Rng::index(std::size_t n) {
  if (n == 0) throw Error("Rng::index: empty range");
  // Rejection sampling keeps the draw exactly uniform.
  const std::uint64_t range = n;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return static_cast<std::size_t>(x % range);
}

AttributeSchema grid_schema(std::size_t dims, int grid) {
  std::vector<Attribute> attrs;
  for (std::size_t d = 0; d < dims; ++d) {
    attrs.push_back({"a" + std::to_string(d), 0.0, static_cast<double>(grid)});
  }
  return AttributeSchema(std::move(attrs));
}

std::vector<std::string> class_names(std::size_t classes) {
  std::vector<std::string> out;
  for (std::size_t c = 0; c < classes; ++c) out.push_back("c" + std::to_string(c));
  return out;
}

ClassDistribution random_distribution(Rng& rng, std::size_t classes) {
  std::vector<double> w(classes);
  double total = 0.0;
  for (auto& x : w) {
    x = -std::log(1.0 - rng.uniform());
    total += x;
  }
  if (!(total > 0.0)) return ClassDistribution::one_hot(classes, 0);
  for (auto& x : w) x /= total;
  return ClassDistribution(std::move(w));
}

DecisionSpace random_space(Rng& rng, const RandomSpaceOptions& opts) {
  const auto schema = grid_schema(opts.dims, opts.grid);
  std::vector<Box> pieces{schema.domain_box()};

  for (std::size_t cut = 0; cut < opts.cuts; ++cut) {
    // A few attempts to find a piece that is at least two units wide somewhere.
    for (int attempt = 0; attempt < 8; ++attempt) {
      const std::size_t p = rng.index(pieces.size());
      const std::size_t axis = rng.index(opts.dims);
      const Interval iv = pieces[p][axis];
      const auto lo = static_cast<long>(iv.lo());
      const auto hi = static_cast<long>(iv.hi());
      if (hi - lo < 2) continue;
      const double at = static_cast<double>(lo + 1 + static_cast<long>(rng.index(static_cast<std::size_t>(hi - lo - 1))));
      const bool left_takes_cut = rng.bernoulli(0.5);

      std::vector<Interval> left(pieces[p].bounds().begin(), pieces[p].bounds().end());
      std::vector<Interval> right = left;
      left[axis] = Interval(iv.lo(), at, iv.lo_closed(), left_takes_cut);
      right[axis] = Interval(at, iv.hi(), !left_takes_cut, iv.hi_closed());
      pieces[p] = Box(std::move(left));
      pieces.emplace_back(std::move(right));
      break;
    }
  }

  std::vector<std::vector<Box>> groups;
  for (auto& piece : pieces) {
    if (rng.bernoulli(opts.drop_probability)) continue;
    if (!groups.empty() && rng.bernoulli(opts.group_probability)) {
      groups[rng.index(groups.size())].push_back(std::move(piece));
    } else {
      groups.push_back({std::move(piece)});
    }
  }

  DecisionSpace space(schema, class_names(opts.classes));
  for (auto& g : groups) {
    ClassDistribution value = rng.bernoulli(opts.one_hot_probability)
                                  ? ClassDistribution::one_hot(opts.classes, rng.index(opts.classes))
                                  : random_distribution(rng, opts.classes);
    space.add(Element(Region::from_disjoint(opts.dims, std::move(g)), std::move(value)));
  }
  return space;
}

}  // namespace dspace
