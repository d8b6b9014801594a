#pragma once

// Randomized checks of the algebraic laws of the operators, plus a report on
// the stronger properties sometimes claimed for the two composite operators.
//
// A "law" is a property that follows from the operator definitions; a
// failing law is a bug. A "claim" is reported with whatever evidence the
// trials produce and never affects the overall verdict.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dspace/decision_space.hpp"
#include "dspace/random.hpp"

namespace dspace {

struct LawResult {
  std::string name;
  std::size_t trials = 0;
  std::size_t failures = 0;
  // First failing input and both sides, as a JSON object of space documents.
  std::optional<std::string> counterexample;

  bool passed() const noexcept { return failures == 0; }
};

struct ClaimResult {
  std::string name;
  // What the composite operator is claimed to satisfy: "holds" or "fails".
  std::string claimed;
  // What the trials showed: "holds" (no violation seen) or "fails".
  std::string observed;
  std::size_t trials = 0;
  std::size_t violations = 0;
  std::optional<std::string> counterexample;
  std::string note;

  bool consistent() const { return claimed == observed; }
};

struct LawReport {
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  std::vector<LawResult> laws;
  std::vector<ClaimResult> claims;

  bool laws_hold() const;
  const LawResult* law(std::string_view name) const;
  const ClaimResult* claim(std::string_view name) const;
  std::string to_json() const;
  std::string to_text() const;
};

struct LawOptions {
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  double tolerance = kDefaultTolerance;
  RandomSpaceOptions spaces;
};

LawReport run_laws(const LawOptions& options);

// Three single-element spaces on a 6x6 domain whose elements overlap
// pairwise and share a common core; merging them in the two orders gives the
// same footprint but different values in the core.
std::array<DecisionSpace, 3> associativity_witness();

}  // namespace dspace
