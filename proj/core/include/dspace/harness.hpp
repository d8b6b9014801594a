#pragma once

// Synthetic drifting-stream experiments. Each batch, every learner draws a
// labeled sample, induces a grid-majority rule set, and the resulting spaces
// are folded into a running model according to a strategy.
//
// Ground truth is two-class ("pos"/"neg"). Before the drift point an instance
// is "pos" iff a0 < min0 + 0.3 * range0; from the drift point on it is "pos"
// iff a1 >= min1 + 0.4 * range1.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dspace/conversion.hpp"
#include "dspace/decision_space.hpp"

namespace dspace {

struct StreamConfig {
  std::uint64_t seed = 7;
  std::size_t num_learners = 4;
  std::size_t drift_at = 10;
  std::size_t batches = 20;
  std::size_t batch_size = 200;
  AttributeSchema domain{{{"a0", 0.0, 10.0}, {"a1", 0.0, 10.0}}};
  // Learner resolution: cells per attribute.
  std::size_t grid = 5;
  std::size_t test_size = 2000;
  // Probability of flipping a training label.
  double noise = 0.0;
  // With drift disabled the pre-drift concept holds throughout.
  bool drift_enabled = true;
  // Level arities for the factored strategy; empty means the prime
  // factorization of num_learners.
  std::vector<std::size_t> factors;

  // Throws Error on inconsistent settings.
  void check() const;
};

enum class Strategy { kChain, kStreamingUnbiased, kBalanced, kFactored };

std::string_view to_string(Strategy s);
// "chain", "streaming-unbiased", "balanced", "factored".
Strategy parse_strategy(std::string_view name);

struct LabeledInstance {
  std::vector<double> point;
  std::size_t label = 0;
};

const std::vector<std::string>& stream_classes();

// The concept in force at a batch, applied to a point.
std::size_t true_label(const StreamConfig& cfg, std::size_t batch_index, std::span<const double> point);

// Deterministic in (seed, batch_index, learner).
std::vector<LabeledInstance> generate_batch(const StreamConfig& cfg, std::size_t batch_index,
                                            std::size_t learner = 0);
// Noise-free sample of the concept at a batch, from a stream disjoint from
// every training stream.
std::vector<LabeledInstance> generate_test_set(const StreamConfig& cfg, std::size_t batch_index);

// Majority label per grid cell (empty cells take the overall majority),
// with same-label cells coalesced into as few boxes as possible; one rule
// per box. Throws Error on an empty instance set or grid 0.
RuleSet induce_rules(std::span<const LabeledInstance> instances, const AttributeSchema& schema,
                     std::span<const std::string> classes, std::size_t grid);

double accuracy(const DecisionSpace& model, std::span<const LabeledInstance> test);

struct ExperimentResult {
  Strategy strategy = Strategy::kChain;
  std::vector<double> accuracy;  // one per batch
  double mean = 0.0;
  // Mean over batches at or after the drift point.
  double post_drift_mean = 0.0;
  double final_accuracy = 0.0;
};

// Throws SchemeError when the strategy's scheme cannot be built for
// num_learners, and Error if an intermediate model fails validation.
ExperimentResult run_experiment(const StreamConfig& cfg, Strategy strategy);

// The configuration used by the drift experiment: 20 batches, drift at 10.
StreamConfig reference_config();

struct SimulationSpec {
  StreamConfig stream;
  std::vector<Strategy> strategies{Strategy::kChain, Strategy::kStreamingUnbiased};
};

// JSON keys mirror the StreamConfig fields, plus "schema" (as in space
// documents) and "strategies". Every key is optional.
SimulationSpec parse_simulation_spec(std::string_view json);

// Rows "batch_index,strategy,accuracy".
std::string results_csv(std::span<const ExperimentResult> results);
std::string results_summary_json(const SimulationSpec& spec, std::span<const ExperimentResult> results);

}  // namespace dspace
