#include "dspace/laws.hpp"

#include <functional>
#include <nlohmann/json.hpp>
#include <sstream>

#include "dspace/json_io.hpp"
#include "dspace/operators.hpp"

namespace dspace {

namespace {

using ojson = nlohmann::ordered_json;

using NamedSpaces = std::vector<std::pair<std::string, const DecisionSpace*>>;

std::string serialize_case(std::uint64_t seed, std::size_t trial, const NamedSpaces& inputs,
                           const DecisionSpace& lhs, const DecisionSpace& rhs) {
  ojson j;
  j["seed"] = seed;
  j["trial"] = trial;
  ojson in = ojson::object();
  for (const auto& [name, space] : inputs) in[name] = ojson::parse(space_to_json(*space));
  j["inputs"] = std::move(in);
  j["lhs"] = ojson::parse(space_to_json(lhs));
  j["rhs"] = ojson::parse(space_to_json(rhs));
  return j.dump();
}

DecisionSpace empty_like(const DecisionSpace& s) {
  return DecisionSpace(s.schema(), std::vector<std::string>(s.class_labels().begin(), s.class_labels().end()));
}

DecisionSpace full_domain(const DecisionSpace& like, ClassDistribution value) {
  DecisionSpace out = empty_like(like);
  out.add(Element(Region(like.schema().domain_box()), std::move(value)));
  return out;
}

// Candidate values for the full-domain restriction identity.
std::array<ClassDistribution, 3> identity_values(Rng& rng, std::size_t classes) {
  std::vector<double> uniform(classes, 1.0 / static_cast<double>(classes));
  return {ClassDistribution::one_hot(classes, 0), ClassDistribution(std::move(uniform)),
          random_distribution(rng, classes)};
}

class Recorder {
 public:
  Recorder(std::uint64_t seed, double tol) : seed_(seed), tol_(tol) {}

  LawResult& law(const std::string& name) {
    for (auto& l : laws_) {
      if (l.name == name) return l;
    }
    laws_.push_back({name, 0, 0, std::nullopt});
    return laws_.back();
  }

  // Records one trial of `lhs == rhs` under semantic equality.
  bool expect_equal(const std::string& name, std::size_t trial, const NamedSpaces& inputs,
                    const DecisionSpace& lhs, const DecisionSpace& rhs) {
    const bool ok = semantically_equal(lhs, rhs, tol_);
    record(law(name), ok, [&] { return serialize_case(seed_, trial, inputs, lhs, rhs); });
    return ok;
  }

  void record(LawResult& r, bool ok, const std::function<std::string()>& counterexample) {
    ++r.trials;
    if (ok) return;
    ++r.failures;
    if (!r.counterexample) r.counterexample = counterexample();
  }

  std::vector<LawResult> take() { return std::move(laws_); }

  std::uint64_t seed() const { return seed_; }
  double tol() const { return tol_; }

 private:
  std::uint64_t seed_;
  double tol_;
  std::vector<LawResult> laws_;
};

struct ClaimTally {
  std::size_t trials = 0;
  std::size_t violations = 0;
  std::optional<std::string> counterexample;

  void add(bool holds, const std::function<std::string()>& counterexample_fn) {
    ++trials;
    if (holds) return;
    ++violations;
    if (!counterexample) counterexample = counterexample_fn();
  }
};

using BinaryOp = DecisionSpace (*)(const DecisionSpace&, const DecisionSpace&);

struct CompositeTallies {
  ClaimTally commutativity;
  ClaimTally associativity;
  ClaimTally idempotence;
  ClaimTally empty_identity;
  ClaimTally full_identity;
};

void probe_composite(BinaryOp op, CompositeTallies& t, const Recorder& rec, std::size_t trial,
                     const DecisionSpace& x, const DecisionSpace& y, const DecisionSpace& z,
                     const DecisionSpace& full) {
  const double tol = rec.tol();
  const auto seed = rec.seed();
  {
    const auto lhs = op(x, y);
    const auto rhs = op(y, x);
    t.commutativity.add(semantically_equal(lhs, rhs, tol),
                        [&] { return serialize_case(seed, trial, {{"X", &x}, {"Y", &y}}, lhs, rhs); });
  }
  {
    const auto lhs = op(op(x, y), z);
    const auto rhs = op(x, op(y, z));
    t.associativity.add(semantically_equal(lhs, rhs, tol), [&] {
      return serialize_case(seed, trial, {{"X", &x}, {"Y", &y}, {"Z", &z}}, lhs, rhs);
    });
  }
  {
    const auto out = op(x, x);
    t.idempotence.add(semantically_equal(out, x, tol),
                      [&] { return serialize_case(seed, trial, {{"X", &x}}, out, x); });
  }
  {
    const auto e = empty_like(x);
    const auto right = op(x, e);
    const auto left = op(e, x);
    t.empty_identity.add(semantically_equal(right, x, tol) && semantically_equal(left, x, tol), [&] {
      return serialize_case(seed, trial, {{"X", &x}, {"E", &e}}, right, x);
    });
  }
  {
    const auto right = op(x, full);
    const auto left = op(full, x);
    t.full_identity.add(semantically_equal(right, x, tol) && semantically_equal(left, x, tol), [&] {
      return serialize_case(seed, trial, {{"X", &x}, {"F", &full}}, right, x);
    });
  }
}

ClaimResult make_claim(std::string name, std::string claimed, const ClaimTally& t, std::string note) {
  ClaimResult c;
  c.name = std::move(name);
  c.claimed = std::move(claimed);
  c.observed = t.violations == 0 ? "holds" : "fails";
  c.trials = t.trials;
  c.violations = t.violations;
  c.counterexample = t.counterexample;
  c.note = std::move(note);
  return c;
}

void append_claims(std::vector<ClaimResult>& out, const std::string& op, const CompositeTallies& t) {
  out.push_back(make_claim(op + ".idempotence", "holds", t.idempotence, ""));
  out.push_back(make_claim(op + ".commutativity", "fails", t.commutativity,
                           "claimed non-commutative; a violation is a pair whose two orders differ"));
  out.push_back(make_claim(op + ".associativity", "holds", t.associativity, ""));

  // The identity claim is probed with the two natural candidates. It holds
  // only if one of them acts as an identity on every trial.
  ClaimTally identity;
  identity.trials = t.empty_identity.trials;
  const bool some_candidate_works = t.empty_identity.violations == 0 || t.full_identity.violations == 0;
  identity.violations = some_candidate_works ? 0 : std::min(t.empty_identity.violations, t.full_identity.violations);
  if (!some_candidate_works) {
    ojson cx;
    cx["empty_space"] = ojson::parse(*t.empty_identity.counterexample);
    cx["full_domain_space"] = ojson::parse(*t.full_identity.counterexample);
    identity.counterexample = cx.dump();
  }
  out.push_back(make_claim(op + ".identity", "holds", identity,
                           "candidates: the empty space and a full-domain single-element space"));
}

}  // namespace

bool LawReport::laws_hold() const {
  for (const auto& l : laws) {
    if (!l.passed()) return false;
  }
  return true;
}

const LawResult* LawReport::law(std::string_view name) const {
  for (const auto& l : laws) {
    if (l.name == name) return &l;
  }
  return nullptr;
}

const ClaimResult* LawReport::claim(std::string_view name) const {
  for (const auto& c : claims) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::string LawReport::to_json() const {
  ojson j;
  j["seed"] = seed;
  j["trials"] = trials;
  j["laws_hold"] = laws_hold();
  auto arr = ojson::array();
  for (const auto& l : laws) {
    ojson o;
    o["name"] = l.name;
    o["verdict"] = l.passed() ? "pass" : "fail";
    o["trials"] = l.trials;
    o["failures"] = l.failures;
    if (l.counterexample) o["counterexample"] = ojson::parse(*l.counterexample);
    arr.push_back(std::move(o));
  }
  j["laws"] = std::move(arr);
  auto cl = ojson::array();
  for (const auto& c : claims) {
    ojson o;
    o["name"] = c.name;
    o["claimed"] = c.claimed;
    o["observed"] = c.observed;
    o["verdict"] = c.consistent() ? "consistent" : "contradicted";
    o["trials"] = c.trials;
    o["violations"] = c.violations;
    if (!c.note.empty()) o["note"] = c.note;
    if (c.counterexample) o["counterexample"] = ojson::parse(*c.counterexample);
    cl.push_back(std::move(o));
  }
  j["claims"] = std::move(cl);
  return j.dump(2) + "\n";
}

std::string LawReport::to_text() const {
  std::ostringstream out;
  out << "seed " << seed << ", " << trials << " trials\n";
  for (const auto& l : laws) {
    out << (l.passed() ? "PASS " : "FAIL ") << l.name << " (" << (l.trials - l.failures) << "/" << l.trials
        << ")\n";
  }
  for (const auto& c : claims) {
    out << "CLAIM " << c.name << ": claimed " << c.claimed << ", observed " << c.observed << " ("
        << c.violations << " violations in " << c.trials << ") -> "
        << (c.consistent() ? "consistent" : "contradicted") << "\n";
  }
  return out.str();
}

std::array<DecisionSpace, 3> associativity_witness() {
  const AttributeSchema schema({{"a0", 0.0, 6.0}, {"a1", 0.0, 6.0}});
  const std::vector<std::string> labels{"c0", "c1", "c2"};
  auto single = [&](Interval a0, Interval a1, std::size_t cls) {
    DecisionSpace s(schema, labels);
    s.add(Element(Region(Box({a0, a1})), ClassDistribution::one_hot(3, cls)));
    return s;
  };
  return {single(Interval(0, 4, true, false), Interval(0, 4, true, false), 0),
          single(Interval(2, 6, true, true), Interval(0, 4, true, false), 1),
          single(Interval(1, 5, true, false), Interval(2, 6, true, true), 2)};
}

LawReport run_laws(const LawOptions& options) {
  Recorder rec(options.seed, options.tolerance);
  CompositeTallies plus;
  CompositeTallies barodot;

  // Same footprint, and no exactly repeated values: the equal-value discard
  // rule looks at original inputs in the m-ary merge but at accumulated
  // elements in the fold, so with repeated values the two may legitimately
  // differ.
  RandomSpaceOptions covering = options.spaces;
  covering.drop_probability = 0.0;
  covering.one_hot_probability = 0.0;

  for (std::size_t trial = 0; trial < options.trials; ++trial) {
    Rng rng = Rng::derive(options.seed, trial);
    const auto x = random_space(rng, options.spaces);
    const auto y = random_space(rng, options.spaces);
    const auto z = random_space(rng, options.spaces);
    const auto e = empty_like(x);

    const auto xy = merge(x, y);
    rec.expect_equal("merge.commutativity", trial, {{"X", &x}, {"Y", &y}}, xy, merge(y, x));
    {
      const auto right = merge(x, e);
      const auto left = merge(e, x);
      const bool ok = semantically_equal(right, x, rec.tol()) && semantically_equal(left, x, rec.tol());
      rec.record(rec.law("merge.identity"), ok,
                 [&] { return serialize_case(rec.seed(), trial, {{"X", &x}}, right, left); });
    }
    rec.expect_equal("merge.idempotence", trial, {{"X", &x}}, merge(x, x), x);
    rec.record(rec.law("merge.valid_output"), validate(xy).empty(),
               [&] { return serialize_case(rec.seed(), trial, {{"X", &x}, {"Y", &y}}, xy, xy); });
    {
      bool unique = true;
      for (const auto& ye : y.elements()) {
        std::size_t holders = 0;
        for (const auto& xe : x.elements()) holders += subsumes(xe, ye) ? 1 : 0;
        unique = unique && holders <= 1;
      }
      rec.record(rec.law("merge.subsumption_unique"), unique,
                 [&] { return serialize_case(rec.seed(), trial, {{"X", &x}, {"Y", &y}}, x, y); });
    }
    {
      const std::array<DecisionSpace, 2> pair{x, y};
      rec.expect_equal("merge_nary.binary_case", trial, {{"X", &x}, {"Y", &y}}, merge_nary(pair), xy);
    }

    rec.expect_equal("restrict.idempotence", trial, {{"X", &x}}, restrict(x, x), x);
    rec.expect_equal("restrict.associativity", trial, {{"X", &x}, {"Y", &y}, {"Z", &z}},
                     restrict(restrict(x, y), z), restrict(x, restrict(y, z)));
    {
      bool ok = true;
      std::optional<std::string> cx;
      for (auto& v : identity_values(rng, options.spaces.classes)) {
        const auto f = full_domain(x, std::move(v));
        const auto out = restrict(x, f);
        if (!semantically_equal(out, x, rec.tol()) && ok) {
          ok = false;
          cx = serialize_case(rec.seed(), trial, {{"X", &x}, {"F", &f}}, out, x);
        }
      }
      rec.record(rec.law("restrict.full_domain_identity"), ok, [&] { return *cx; });
    }

    {
      const std::size_t count = 3 + rng.index(4);
      std::vector<DecisionSpace> seq;
      for (std::size_t i = 0; i < count; ++i) seq.push_back(random_space(rng, covering));
      DecisionSpace acc = seq.front();
      for (std::size_t i = 1; i < count; ++i) acc = merge_streaming(acc, seq[i]);
      const auto nary = merge_nary(seq);
      NamedSpaces named;
      std::vector<std::string> names;
      for (std::size_t i = 0; i < count; ++i) names.push_back("X" + std::to_string(i));
      for (std::size_t i = 0; i < count; ++i) named.emplace_back(names[i], &seq[i]);
      rec.expect_equal("merge_streaming.equals_nary", trial, named, acc, nary);
    }

    rec.expect_equal("plus.idempotence", trial, {{"X", &x}}, op_plus(x, x), x);
    rec.expect_equal("barodot.idempotence", trial, {{"X", &x}}, op_barodot(x, x), x);

    const auto full = full_domain(x, random_distribution(rng, options.spaces.classes));
    probe_composite(&op_plus, plus, rec, trial, x, y, z, full);
    probe_composite(&op_barodot, barodot, rec, trial, x, y, z, full);
  }

  {
    const auto w = associativity_witness();
    const auto left = merge(merge(w[0], w[1]), w[2]);
    const auto right = merge(w[0], merge(w[1], w[2]));
    const auto cmp = compare_spaces(left, right);
    rec.record(rec.law("merge.non_associativity_witness"), cmp.same_coverage && cmp.max_value_difference > 1e-6,
               [&] { return serialize_case(rec.seed(), 0, {{"X", &w[0]}, {"Y", &w[1]}, {"Z", &w[2]}}, left, right); });
  }

  LawReport report;
  report.seed = options.seed;
  report.trials = options.trials;
  report.laws = rec.take();
  append_claims(report.claims, "plus", plus);
  append_claims(report.claims, "barodot", barodot);
  return report;
}

}  // namespace dspace
