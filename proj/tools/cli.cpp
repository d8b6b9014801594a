#include "cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dspace/conversion.hpp"
#include "dspace/error.hpp"
#include "dspace/harness.hpp"
#include "dspace/json_io.hpp"
#include "dspace/laws.hpp"
#include "dspace/operators.hpp"
#include "dspace/schemes.hpp"

namespace dspace::cli {

namespace {

// Failure of a command that already reported what went wrong.
struct Invalid {};

class Io {
 public:
  Io(std::istream& in, std::ostream& out) : in_(in), out_(out) {}

  std::string read(const std::string& path) {
    if (path == "-") {
      if (stdin_used_) throw Error("standard input can only be read once");
      stdin_used_ = true;
      std::ostringstream ss;
      ss << in_.rdbuf();
      return ss.str();
    }
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
  }

  void write(const std::string& path, const std::string& text) {
    if (path == "-") {
      out_ << text;
      return;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open '" + path + "' for writing");
    f << text;
    if (!f) throw Error("failed writing '" + path + "'");
  }

  std::ostream& out() { return out_; }

 private:
  std::istream& in_;
  std::ostream& out_;
  bool stdin_used_ = false;
};

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string shortest(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

void report_violations(const std::vector<Violation>& violations, std::ostream& err) {
  for (const auto& v : violations) {
    err << "invalid: " << v.rule;
    if (!v.elements.empty()) {
      err << " [elements";
      for (auto i : v.elements) err << ' ' << i;
      err << ']';
    }
    err << ": " << v.message << "\n";
  }
}

// Every space this tool emits must validate; anything else is a bug or an
// invalid input that slipped through.
void emit_space(Io& io, const std::string& path, const DecisionSpace& space, std::ostream& err) {
  if (const auto v = validate(space); !v.empty()) {
    report_violations(v, err);
    throw Invalid{};
  }
  io.write(path, space_to_json(space));
}

DecisionSpace load_space(Io& io, const std::string& path) { return space_from_json(io.read(path)); }

MergeScheme load_scheme(Io& io, const std::string& spec, std::size_t count) {
  if (spec != "-" && !std::filesystem::is_regular_file(spec)) return parse_scheme_spec(spec, count);
  return MergeScheme::parse_json(io.read(spec));
}

std::vector<double> parse_point(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find(',', start);
    if (end == std::string::npos) end = text.size();
    std::string field = text.substr(start, end - start);
    const auto first = field.find_first_not_of(" \t\r");
    const auto last = field.find_last_not_of(" \t\r");
    field = first == std::string::npos ? "" : field.substr(first, last - first + 1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
      throw Error("bad number '" + field + "' in instance '" + text + "'");
    }
    out.push_back(v);
    start = end + 1;
  }
  return out;
}

// ------------------------------------------------------------------ commands

struct ConvertArgs {
  std::string rules, tree, schema, out = "-";
  std::vector<std::string> classes;
};

int cmd_convert(Io& io, const ConvertArgs& a, std::ostream& err) {
  DecisionSpace space = [&] {
    if (!a.tree.empty()) {
      const auto tree = DecisionTree::parse_json(io.read(a.tree));
      auto s = tree_to_space(tree, schema_from_json(io.read(a.schema)));
      return a.classes.empty() ? s : s.with_class_labels(a.classes);
    }
    const auto rules = parse_ruleset(io.read(a.rules));
    return rules_to_space(rules, schema_from_json(io.read(a.schema)), a.classes);
  }();
  if (const auto v = validate(space); !v.empty()) {
    report_violations(v, err);
    return kExitInvalid;
  }
  io.write(a.out, space_to_json(space));
  return kExitOk;
}

struct MergeArgs {
  std::vector<std::string> inputs;
  std::string scheme = "chain";
  bool streaming = false;
  std::string out = "-";
};

int cmd_merge(Io& io, const MergeArgs& a, std::ostream& err) {
  std::vector<DecisionSpace> spaces;
  for (const auto& p : a.inputs) spaces.push_back(load_space(io, p));

  DecisionSpace result = spaces.front();
  std::vector<double> share;
  if (a.streaming) {
    for (std::size_t i = 1; i < spaces.size(); ++i) result = merge_streaming(result, spaces[i]);
    share.assign(spaces.size(), 1.0 / static_cast<double>(spaces.size()));
  } else {
    const auto scheme = load_scheme(io, a.scheme, spaces.size());
    result = execute(scheme, spaces);
    share = impacts(scheme);
  }
  emit_space(io, a.out, result, err);

  // The impact table goes to standard output unless the space does.
  std::ostream& table = a.out == "-" ? err : io.out();
  table << "input\timpact\tfile\n";
  for (std::size_t i = 0; i < share.size(); ++i) {
    table << i << '\t' << fixed(share[i], 12) << '\t' << a.inputs[i] << "\n";
  }
  return kExitOk;
}

struct PairArgs {
  std::vector<std::string> inputs;
  std::string op;
  std::string out = "-";
};

int cmd_restrict(Io& io, const PairArgs& a, std::ostream& err) {
  const auto x = load_space(io, a.inputs[0]);
  const auto y = load_space(io, a.inputs[1]);
  emit_space(io, a.out, restrict(x, y), err);
  return kExitOk;
}

int cmd_compose(Io& io, const PairArgs& a, std::ostream& err) {
  const auto x = load_space(io, a.inputs[0]);
  const auto y = load_space(io, a.inputs[1]);
  emit_space(io, a.out, a.op == "plus" ? op_plus(x, y) : op_barodot(x, y), err);
  return kExitOk;
}

struct ClassifyArgs {
  std::string space;
  std::string instance;
  std::string instances;
};

int cmd_classify(Io& io, const ClassifyArgs& a) {
  const auto space = load_space(io, a.space);
  std::vector<std::string> rows;
  if (!a.instance.empty()) {
    rows.push_back(a.instance);
  } else {
    std::istringstream text(io.read(a.instances));
    std::string line;
    bool first = true;
    while (std::getline(text, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      // A leading row that does not parse as numbers is a header.
      if (first) {
        first = false;
        try {
          parse_point(line);
        } catch (const Error&) {
          continue;
        }
      }
      rows.push_back(line);
    }
  }

  auto& out = io.out();
  for (const auto& attr : space.schema().attributes()) out << attr.name << ',';
  out << "label";
  for (const auto& c : space.class_labels()) out << ',' << c;
  out << "\n";
  for (const auto& row : rows) {
    const auto point = parse_point(row);
    const auto p = classify(space, point);
    for (double v : point) out << shortest(v) << ',';
    if (!p) {
      out << "uncovered";
      for (std::size_t i = 0; i < space.class_labels().size(); ++i) out << ',';
    } else {
      out << p->label;
      for (double w : p->distribution.weights()) out << ',' << fixed(w * 100.0, 6);
    }
    out << "\n";
  }
  return kExitOk;
}

struct ImpactArgs {
  std::string scheme;
  std::size_t count = 0;
};

int cmd_impact(Io& io, const ImpactArgs& a) {
  const auto scheme = load_scheme(io, a.scheme, a.count);
  for (double v : impacts(scheme)) io.out() << fixed(v, 12) << "\n";
  return kExitOk;
}

int cmd_validate(Io& io, const std::string& path, std::ostream& err) {
  const auto space = load_space(io, path);
  const auto v = validate(space);
  if (!v.empty()) {
    report_violations(v, err);
    return kExitInvalid;
  }
  io.out() << "valid: " << space.size() << " elements\n";
  return kExitOk;
}

struct LawsArgs {
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  std::string report;
  bool json = false;
};

int cmd_laws(Io& io, const LawsArgs& a) {
  LawOptions opts;
  opts.trials = a.trials;
  opts.seed = a.seed;
  const auto report = run_laws(opts);
  if (!a.report.empty()) io.write(a.report, report.to_json());
  io.out() << (a.json ? report.to_json() : report.to_text());
  return report.laws_hold() ? kExitOk : kExitInvalid;
}

struct SimulateArgs {
  std::string config;
  std::string csv = "-";
  std::string summary;
};

int cmd_simulate(Io& io, const SimulateArgs& a) {
  SimulationSpec spec;
  if (!a.config.empty()) spec = parse_simulation_spec(io.read(a.config));
  std::vector<ExperimentResult> results;
  for (auto s : spec.strategies) results.push_back(run_experiment(spec.stream, s));
  io.write(a.csv, results_csv(results));
  if (!a.summary.empty()) io.write(a.summary, results_summary_json(spec, results));
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Decision-space conversion, merging and analysis"};
  app.name("dspace");
  app.require_subcommand(1);

  ConvertArgs convert;
  auto* c = app.add_subcommand("convert", "Convert a rule set or decision tree to a space");
  auto* rules_opt = c->add_option("--rules", convert.rules, "Rule DSL file");
  auto* tree_opt = c->add_option("--tree", convert.tree, "Decision tree JSON file");
  rules_opt->excludes(tree_opt);
  c->add_option("--schema", convert.schema, "Attribute schema JSON")->required();
  c->add_option("--classes", convert.classes, "Class label order")->delimiter(',');
  c->add_option("--out", convert.out, "Output space JSON");

  MergeArgs merge_args;
  auto* m = app.add_subcommand("merge", "Merge spaces by a scheme");
  m->add_option("--in", merge_args.inputs, "Input spaces")->required();
  auto* scheme_opt = m->add_option("--scheme", merge_args.scheme,
                                   "chain | balanced | factored:AxBx... | scheme JSON file");
  m->add_flag("--streaming-unbiased", merge_args.streaming, "Equal-weight streaming fold")->excludes(scheme_opt);
  m->add_option("--out", merge_args.out, "Output space JSON");

  PairArgs restrict_args;
  auto* r = app.add_subcommand("restrict", "Restrict the first space to the footprint of the second");
  r->add_option("--in", restrict_args.inputs, "Two input spaces")->required()->expected(2);
  r->add_option("--out", restrict_args.out, "Output space JSON");

  PairArgs compose_args;
  auto* co = app.add_subcommand("compose", "Composite operators");
  co->add_option("--op", compose_args.op, "plus | barodot")->required()->check(CLI::IsMember({"plus", "barodot"}));
  co->add_option("--in", compose_args.inputs, "Two input spaces")->required()->expected(2);
  co->add_option("--out", compose_args.out, "Output space JSON");

  ClassifyArgs classify_args;
  auto* cl = app.add_subcommand("classify", "Classify instances");
  cl->add_option("--space", classify_args.space, "Space JSON")->required();
  auto* one = cl->add_option("--instance", classify_args.instance, "Comma-separated coordinates");
  auto* many = cl->add_option("--instances", classify_args.instances, "CSV of instances");
  one->excludes(many);

  ImpactArgs impact_args;
  auto* im = app.add_subcommand("impact", "Print per-input impacts of a scheme");
  im->add_option("--scheme", impact_args.scheme, "Scheme spec or JSON file")->required();
  im->add_option("--count", impact_args.count, "Leaf count for chain/balanced");

  std::string validate_path;
  auto* va = app.add_subcommand("validate", "Check a space's invariants");
  va->add_option("--in,file", validate_path, "Space JSON")->required();

  LawsArgs laws_args;
  auto* la = app.add_subcommand("laws", "Randomized algebraic-law checks");
  la->add_option("--trials", laws_args.trials, "Trials per law")->check(CLI::PositiveNumber);
  la->add_option("--seed", laws_args.seed, "Seed");
  la->add_option("--report", laws_args.report, "Write the JSON report here");
  la->add_flag("--json", laws_args.json, "Print the JSON report instead of text");

  SimulateArgs sim_args;
  auto* si = app.add_subcommand("simulate", "Drifting-stream experiment");
  si->add_option("--config", sim_args.config, "Experiment config JSON");
  si->add_option("--csv", sim_args.csv, "Per-batch accuracy CSV");
  si->add_option("--summary", sim_args.summary, "JSON summary");

  std::vector<const char*> argv{"dspace"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }

  Io io(in, out);
  try {
    if (*c) {
      if (convert.rules.empty() == convert.tree.empty()) throw Error("convert needs exactly one of --rules, --tree");
      return cmd_convert(io, convert, err);
    }
    if (*m) return cmd_merge(io, merge_args, err);
    if (*r) return cmd_restrict(io, restrict_args, err);
    if (*co) return cmd_compose(io, compose_args, err);
    if (*cl) {
      if (classify_args.instance.empty() == classify_args.instances.empty()) {
        throw Error("classify needs exactly one of --instance, --instances");
      }
      return cmd_classify(io, classify_args);
    }
    if (*im) return cmd_impact(io, impact_args);
    if (*va) return cmd_validate(io, validate_path, err);
    if (*la) return cmd_laws(io, laws_args);
    if (*si) return cmd_simulate(io, sim_args);
  } catch (const Invalid&) {
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace dspace::cli
