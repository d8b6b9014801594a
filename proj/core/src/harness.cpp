#include "dspace/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <nlohmann/json.hpp>
#include <optional>

#include "dspace/error.hpp"
#include "dspace/operators.hpp"
#include "dspace/random.hpp"
#include "dspace/schemes.hpp"

namespace dspace {

namespace {

using ojson = nlohmann::ordered_json;

constexpr std::size_t kPos = 0;
constexpr std::size_t kNeg = 1;

// Cell boundary i of `grid` equal cells on an attribute. Neighbouring cells
// evaluate the same expression, so shared boundaries compare exactly.
double cell_edge(const Attribute& a, std::size_t i, std::size_t grid) {
  if (i == grid) return a.max;
  return a.min + (a.max - a.min) * static_cast<double>(i) / static_cast<double>(grid);
}

std::size_t cell_of(const Attribute& a, double x, std::size_t grid) {
  const double t = (x - a.min) / (a.max - a.min) * static_cast<double>(grid);
  if (!(t > 0.0)) return 0;
  return std::min(static_cast<std::size_t>(t), grid - 1);
}

std::vector<std::size_t> prime_factors(std::size_t n) {
  std::vector<std::size_t> out;
  for (std::size_t p = 2; p * p <= n; ++p) {
    while (n % p == 0) {
      out.push_back(p);
      n /= p;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

std::vector<LabeledInstance> sample(const StreamConfig& cfg, std::size_t batch_index, Rng rng,
                                    std::size_t count, double noise) {
  std::vector<LabeledInstance> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    LabeledInstance inst;
    for (const auto& a : cfg.domain.attributes()) inst.point.push_back(rng.uniform(a.min, a.max));
    inst.label = true_label(cfg, batch_index, inst.point);
    if (noise > 0.0 && rng.bernoulli(noise)) inst.label = inst.label == kPos ? kNeg : kPos;
    out.push_back(std::move(inst));
  }
  return out;
}

Rule rule_for_box(const Box& box, const AttributeSchema& schema, const std::string& label) {
  Rule r;
  for (std::size_t d = 0; d < schema.size(); ++d) {
    const auto& a = schema[d];
    const auto& iv = box[d];
    if (iv.lo() > a.min || !iv.lo_closed()) {
      r.conditions.push_back({a.name, iv.lo_closed() ? BoundOp::kGreaterEqual : BoundOp::kGreater, iv.lo()});
    }
    if (iv.hi() < a.max || !iv.hi_closed()) {
      r.conditions.push_back({a.name, iv.hi_closed() ? BoundOp::kLessEqual : BoundOp::kLess, iv.hi()});
    }
  }
  r.target = label;
  return r;
}

}  // namespace

void StreamConfig::check() const {
  if (num_learners == 0) throw Error("stream config: num_learners must be at least 1");
  if (batches == 0 || drift_at >= batches) throw Error("stream config: need batches > drift_at >= 0");
  if (batch_size == 0) throw Error("stream config: batch_size must be at least 1");
  if (grid == 0) throw Error("stream config: grid must be at least 1");
  if (test_size == 0) throw Error("stream config: test_size must be at least 1");
  if (domain.size() < 2) throw Error("stream config: the drifting concept needs at least two attributes");
  if (!(noise >= 0.0 && noise < 1.0)) throw Error("stream config: noise must be in [0, 1)");
  if (!factors.empty()) {
    std::size_t product = 1;
    for (auto f : factors) product *= f;
    if (product != num_learners) throw Error("stream config: factors must multiply to num_learners");
  }
}

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::kChain:
      return "chain";
    case Strategy::kStreamingUnbiased:
      return "streaming-unbiased";
    case Strategy::kBalanced:
      return "balanced";
    case Strategy::kFactored:
      return "factored";
  }
  return "?";
}

Strategy parse_strategy(std::string_view name) {
  for (auto s : {Strategy::kChain, Strategy::kStreamingUnbiased, Strategy::kBalanced, Strategy::kFactored}) {
    if (to_string(s) == name) return s;
  }
  throw Error("unknown strategy '" + std::string(name) + "'");
}

const std::vector<std::string>& stream_classes() {
  static const std::vector<std::string> classes{"pos", "neg"};
  return classes;
}

std::size_t true_label(const StreamConfig& cfg, std::size_t batch_index, std::span<const double> point) {
  const bool drifted = cfg.drift_enabled && batch_index >= cfg.drift_at;
  if (!drifted) {
    const auto& a = cfg.domain[0];
    return point[0] < a.min + 0.3 * (a.max - a.min) ? kPos : kNeg;
  }
  const auto& a = cfg.domain[1];
  return point[1] >= a.min + 0.4 * (a.max - a.min) ? kPos : kNeg;
}

std::vector<LabeledInstance> generate_batch(const StreamConfig& cfg, std::size_t batch_index, std::size_t learner) {
  if (batch_index >= cfg.batches) {
    throw Error("batch index " + std::to_string(batch_index) + " out of range for " +
                std::to_string(cfg.batches) + " batches");
  }
  return sample(cfg, batch_index, Rng::derive(cfg.seed, batch_index, learner + 1), cfg.batch_size, cfg.noise);
}

std::vector<LabeledInstance> generate_test_set(const StreamConfig& cfg, std::size_t batch_index) {
  if (batch_index >= cfg.batches) {
    throw Error("batch index " + std::to_string(batch_index) + " out of range for " +
                std::to_string(cfg.batches) + " batches");
  }
  return sample(cfg, batch_index, Rng::derive(cfg.seed, batch_index, 0), cfg.test_size, 0.0);
}

RuleSet induce_rules(std::span<const LabeledInstance> instances, const AttributeSchema& schema,
                     std::span<const std::string> classes, std::size_t grid) {
  if (instances.empty()) throw Error("induce_rules: no instances");
  if (grid == 0) throw Error("induce_rules: grid must be at least 1");
  const std::size_t dim = schema.size();
  std::size_t cells = 1;
  for (std::size_t d = 0; d < dim; ++d) cells *= grid;

  std::vector<std::size_t> counts(cells * classes.size(), 0);
  std::vector<std::size_t> totals(classes.size(), 0);
  for (const auto& inst : instances) {
    if (inst.point.size() != dim) throw DimensionError("induce_rules: instance dimension mismatch");
    if (inst.label >= classes.size()) throw Error("induce_rules: label index out of range");
    std::size_t cell = 0;
    for (std::size_t d = 0; d < dim; ++d) cell = cell * grid + cell_of(schema[d], inst.point[d], grid);
    ++counts[cell * classes.size() + inst.label];
    ++totals[inst.label];
  }
  const auto overall = static_cast<std::size_t>(std::max_element(totals.begin(), totals.end()) - totals.begin());

  std::vector<std::vector<Box>> by_label(classes.size());
  std::vector<std::size_t> idx(dim, 0);
  for (std::size_t cell = 0; cell < cells; ++cell) {
    std::size_t rest = cell;
    for (std::size_t d = dim; d-- > 0;) {
      idx[d] = rest % grid;
      rest /= grid;
    }
    const auto* c = &counts[cell * classes.size()];
    std::size_t best = overall;
    std::size_t best_count = 0;
    for (std::size_t k = 0; k < classes.size(); ++k) {
      if (c[k] > best_count) {
        best = k;
        best_count = c[k];
      }
    }
    std::vector<Interval> bounds;
    for (std::size_t d = 0; d < dim; ++d) {
      const bool last = idx[d] + 1 == grid;
      bounds.emplace_back(cell_edge(schema[d], idx[d], grid), cell_edge(schema[d], idx[d] + 1, grid), true, last);
    }
    by_label[best].emplace_back(std::move(bounds));
  }

  RuleSet out;
  for (std::size_t k = 0; k < classes.size(); ++k) {
    if (by_label[k].empty()) continue;
    const Region region = Region::from_disjoint(dim, std::move(by_label[k]));
    for (const auto& box : region.boxes()) out.rules.push_back(rule_for_box(box, schema, classes[k]));
  }
  return out;
}

double accuracy(const DecisionSpace& model, std::span<const LabeledInstance> test) {
  if (test.empty()) return 0.0;
  std::size_t correct = 0;
  const auto& classes = stream_classes();
  for (const auto& inst : test) {
    const auto p = classify(model, inst.point);
    if (p && p->label == classes[inst.label]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

ExperimentResult run_experiment(const StreamConfig& cfg, Strategy strategy) {
  cfg.check();
  const auto& classes = stream_classes();
  const std::size_t learners = cfg.num_learners;

  std::optional<MergeScheme> scheme;
  if (learners > 1 && strategy == Strategy::kBalanced) scheme = build_balanced(learners);
  if (learners > 1 && strategy == Strategy::kFactored) {
    const auto factors = cfg.factors.empty() ? prime_factors(learners) : cfg.factors;
    scheme = build_factored(factors);
  }

  ExperimentResult result;
  result.strategy = strategy;
  std::optional<DecisionSpace> model;
  auto fold = [&](const DecisionSpace& next, bool streaming) {
    if (!model) {
      model = next;
    } else {
      model = streaming ? merge_streaming(*model, next) : merge(*model, next);
    }
  };

  for (std::size_t b = 0; b < cfg.batches; ++b) {
    std::vector<DecisionSpace> spaces;
    spaces.reserve(learners);
    for (std::size_t l = 0; l < learners; ++l) {
      const auto batch = generate_batch(cfg, b, l);
      spaces.push_back(rules_to_space(induce_rules(batch, cfg.domain, classes, cfg.grid), cfg.domain, classes));
    }

    switch (strategy) {
      case Strategy::kChain:
        for (const auto& s : spaces) fold(s, false);
        break;
      case Strategy::kStreamingUnbiased:
        for (const auto& s : spaces) fold(s, true);
        break;
      case Strategy::kBalanced:
      case Strategy::kFactored:
        fold(scheme ? execute(*scheme, spaces) : spaces.front(), false);
        break;
    }

    if (const auto violations = validate(*model); !violations.empty()) {
      throw Error("batch " + std::to_string(b) + ": model failed validation (" + violations.front().rule +
                  ": " + violations.front().message + ")");
    }
    result.accuracy.push_back(accuracy(*model, generate_test_set(cfg, b)));
  }

  double sum = 0.0;
  double post = 0.0;
  for (std::size_t b = 0; b < cfg.batches; ++b) {
    sum += result.accuracy[b];
    if (b >= cfg.drift_at) post += result.accuracy[b];
  }
  result.mean = sum / static_cast<double>(cfg.batches);
  result.post_drift_mean = post / static_cast<double>(cfg.batches - cfg.drift_at);
  result.final_accuracy = result.accuracy.back();
  return result;
}

StreamConfig reference_config() { return StreamConfig{}; }

SimulationSpec parse_simulation_spec(std::string_view json) {
  ojson j;
  try {
    j = ojson::parse(json);
  } catch (const nlohmann::json::parse_error& e) {
    throw SyntaxError(std::string("simulation config: ") + e.what(), 0, 0);
  }
  if (!j.is_object()) throw Error("simulation config must be a JSON object");

  SimulationSpec spec;
  auto& c = spec.stream;
  try {
    c.seed = j.value("seed", c.seed);
    c.num_learners = j.value("num_learners", c.num_learners);
    c.drift_at = j.value("drift_at", c.drift_at);
    c.batches = j.value("batches", c.batches);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.grid = j.value("grid", c.grid);
    c.test_size = j.value("test_size", c.test_size);
    c.noise = j.value("noise", c.noise);
    c.drift_enabled = j.value("drift_enabled", c.drift_enabled);
    c.factors = j.value("factors", c.factors);
    if (j.contains("schema")) {
      std::vector<Attribute> attrs;
      for (const auto& a : j.at("schema")) {
        attrs.push_back({a.at("name").get<std::string>(), a.at("min").get<double>(), a.at("max").get<double>()});
      }
      c.domain = AttributeSchema(std::move(attrs));
    }
    if (j.contains("strategies")) {
      spec.strategies.clear();
      for (const auto& s : j.at("strategies")) spec.strategies.push_back(parse_strategy(s.get<std::string>()));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("simulation config: ") + e.what());
  }
  c.check();
  return spec;
}

std::string results_csv(std::span<const ExperimentResult> results) {
  std::string out = "batch_index,strategy,accuracy\n";
  char buf[64];
  for (const auto& r : results) {
    for (std::size_t b = 0; b < r.accuracy.size(); ++b) {
      std::snprintf(buf, sizeof buf, "%.6f", r.accuracy[b]);
      out += std::to_string(b) + "," + std::string(to_string(r.strategy)) + "," + buf + "\n";
    }
  }
  return out;
}

std::string results_summary_json(const SimulationSpec& spec, std::span<const ExperimentResult> results) {
  const auto& c = spec.stream;
  ojson cfg;
  cfg["seed"] = c.seed;
  cfg["rng"] = "mt19937_64 seeded via splitmix64";
  cfg["num_learners"] = c.num_learners;
  cfg["drift_at"] = c.drift_at;
  cfg["batches"] = c.batches;
  cfg["batch_size"] = c.batch_size;
  cfg["grid"] = c.grid;
  cfg["test_size"] = c.test_size;
  cfg["noise"] = c.noise;
  cfg["drift_enabled"] = c.drift_enabled;
  if (!c.factors.empty()) cfg["factors"] = c.factors;
  auto schema = ojson::array();
  for (const auto& a : c.domain.attributes()) schema.push_back({{"name", a.name}, {"min", a.min}, {"max", a.max}});
  cfg["schema"] = std::move(schema);

  ojson j;
  j["config"] = std::move(cfg);
  auto arr = ojson::array();
  for (const auto& r : results) {
    ojson o;
    o["strategy"] = std::string(to_string(r.strategy));
    o["mean"] = r.mean;
    o["post_drift_mean"] = r.post_drift_mean;
    o["final_accuracy"] = r.final_accuracy;
    o["accuracy"] = r.accuracy;
    arr.push_back(std::move(o));
  }
  j["results"] = std::move(arr);
  return j.dump(2) + "\n";
}

}  // namespace dspace
