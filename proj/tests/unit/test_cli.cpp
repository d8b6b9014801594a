#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "dspace/json_io.hpp"
#include "dspace/operators.hpp"

using namespace dspace;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args, const std::string& stdin_text = "") {
  std::istringstream in(stdin_text);
  std::ostringstream out, err;
  Result r;
  r.code = cli::run(args, in, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string data(const std::string& name) { return std::string(DSPACE_TEST_DATA_DIR) + "/" + name; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("dspace_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
    return path(name);
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, ConvertRulesProducesAValidSpace) {
  const auto r = run({"convert", "--rules", data("five_rules.txt"), "--schema", data("five_rules_schema.json")});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const auto s = space_from_json(r.out);
  EXPECT_EQ(s.size(), 5u);
  EXPECT_TRUE(validate(s).empty());
}

TEST_F(Cli, ConvertTree) {
  const auto out = path("tree.json");
  const auto r = run({"convert", "--tree", data("conflict_left_tree.json"), "--schema", data("conflict_schema.json"),
                      "--out", out});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const auto tree = space_from_json(slurp(out));
  EXPECT_EQ(tree.size(), 3u);
  EXPECT_TRUE(validate(tree).empty());
  EXPECT_TRUE(region_set_equal(tree.footprint(), Region(tree.schema().domain_box())));
  // Where the hand-written space is defined, the two agree.
  const auto left = space_from_json(slurp(data("conflict_left.json")));
  for (const auto& p : {std::vector<double>{1, 1}, {7.5, 0.5}, {7.5, 5}, {8, 15}}) {
    EXPECT_EQ(classify(tree, p)->distribution, classify(left, p)->distribution);
  }
}

TEST_F(Cli, MalformedRuleReportsItsLine) {
  const auto rules = write("bad.txt", "IF age < 1 THEN A\nIF age < THEN B\n");
  const auto r = run({"convert", "--rules", rules, "--schema", data("five_rules_schema.json")});
  EXPECT_EQ(r.code, cli::kExitError);
  EXPECT_NE(r.err.find("2"), std::string::npos) << r.err;
}

TEST_F(Cli, OverlappingRulesAreSemanticallyInvalid) {
  const auto rules = write("overlap.txt", "IF age < 4 THEN A\nIF age >= 3 THEN B\n");
  const auto r = run({"convert", "--rules", rules, "--schema", data("five_rules_schema.json")});
  EXPECT_EQ(r.code, cli::kExitInvalid);
  EXPECT_NE(r.err.find("element-overlap"), std::string::npos) << r.err;
}

TEST_F(Cli, MissingFileAndUnknownCommand) {
  EXPECT_EQ(run({"validate", path("nope.json")}).code, cli::kExitError);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kExitError);
  EXPECT_EQ(run({}).code, cli::kExitError);
}

TEST_F(Cli, MergeMatchesTheLibraryAndReportsImpacts) {
  const auto r = run({"merge", "--in", data("conflict_left.json"), "--in", data("conflict_right.json")});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const auto want = merge(space_from_json(slurp(data("conflict_left.json"))), space_from_json(slurp(data("conflict_right.json"))));
  EXPECT_TRUE(semantically_equal(space_from_json(r.out), want, 1e-8));
  EXPECT_NE(r.err.find("0.500000000000"), std::string::npos) << r.err;
}

TEST_F(Cli, SingleInputMergeIsIdentity) {
  const auto r = run({"merge", "--in", data("conflict_right.json")});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_TRUE(semantically_equal(space_from_json(r.out), space_from_json(slurp(data("conflict_right.json"))), 1e-8));
}

TEST_F(Cli, StreamingUnbiasedEqualsFlatScheme) {
  std::vector<std::string> inputs;
  for (int i = 0; i < 5; ++i) {
    const auto r = run({"convert", "--rules",
                        write("r" + std::to_string(i) + ".txt",
                              "IF age < " + std::to_string(i + 1) + " THEN A\nIF age >= " + std::to_string(i + 1) +
                                  " THEN B\n"),
                        "--schema", data("five_rules_schema.json"), "--out", path("s" + std::to_string(i) + ".json")});
    ASSERT_EQ(r.code, cli::kExitOk) << r.err;
    inputs.push_back(path("s" + std::to_string(i) + ".json"));
  }
  std::vector<std::string> base{"merge"};
  for (const auto& in : inputs) {
    base.push_back("--in");
    base.push_back(in);
  }
  auto streaming = base;
  streaming.push_back("--streaming-unbiased");
  auto flat = base;
  flat.push_back("--scheme");
  flat.push_back(write("flat.json", "[0,1,2,3,4]"));
  const auto a = run(streaming);
  const auto b = run(flat);
  ASSERT_EQ(a.code, cli::kExitOk) << a.err;
  ASSERT_EQ(b.code, cli::kExitOk) << b.err;
  EXPECT_TRUE(semantically_equal(space_from_json(a.out), space_from_json(b.out), 1e-8));
}

TEST_F(Cli, SchemeLeafCountMustMatchInputs) {
  const auto r = run({"merge", "--in", data("conflict_left.json"), "--in", data("conflict_right.json"), "--scheme", "chain:3"});
  EXPECT_EQ(r.code, cli::kExitError);
}

TEST_F(Cli, RestrictBySelfIsByteStable) {
  const auto once = run({"restrict", "--in", data("conflict_right.json"), "--in", data("conflict_right.json")});
  ASSERT_EQ(once.code, cli::kExitOk) << once.err;
  const auto file = write("once.json", once.out);
  const auto twice = run({"restrict", "--in", file, "--in", file});
  EXPECT_EQ(twice.out, once.out);
  EXPECT_TRUE(semantically_equal(space_from_json(once.out), space_from_json(slurp(data("conflict_right.json"))), 1e-8));
}

TEST_F(Cli, ComposePlusOnDisjointInputsIsEmpty) {
  const auto a = write("a.json", R"({"schema": [{"name": "x", "min": 0, "max": 4}], "classes": ["Y", "N"],
    "elements": [{"boxes": [{"x": [0, 1, true, false]}], "value": [100, 0]}]})");
  const auto b = write("b.json", R"({"schema": [{"name": "x", "min": 0, "max": 4}], "classes": ["Y", "N"],
    "elements": [{"boxes": [{"x": [2, 3, true, false]}], "value": [0, 100]}]})");
  for (const char* op : {"plus", "barodot"}) {
    const auto r = run({"compose", "--op", op, "--in", a, "--in", b});
    ASSERT_EQ(r.code, cli::kExitOk) << r.err;
    EXPECT_TRUE(space_from_json(r.out).empty());
  }
  EXPECT_EQ(run({"compose", "--op", "times", "--in", a, "--in", b}).code, cli::kExitError);
}

TEST_F(Cli, ClassifyInstancesAsCsv) {
  const auto merged = path("m.json");
  ASSERT_EQ(run({"merge", "--in", data("conflict_left.json"), "--in", data("conflict_right.json"), "--out", merged}).code,
            cli::kExitOk);
  const auto r = run({"classify", "--space", merged, "--instance", "7.5,5"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_NE(r.out.find("No"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("21.428571"), std::string::npos) << r.out;
  const auto csv = write("in.csv", "age,degree\n7.5,5\n8.5,12\n");
  const auto batch = run({"classify", "--space", merged, "--instances", csv});
  ASSERT_EQ(batch.code, cli::kExitOk) << batch.err;
  EXPECT_NE(batch.out.find("uncovered"), std::string::npos) << batch.out;
}

TEST_F(Cli, ImpactListing) {
  const auto r = run({"impact", "--scheme", "chain", "--count", "6"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_EQ(r.out, "0.031250000000\n0.031250000000\n0.062500000000\n0.125000000000\n0.250000000000\n0.500000000000\n");
}

TEST_F(Cli, ValidateReportsViolations) {
  EXPECT_EQ(run({"validate", data("conflict_left.json")}).code, cli::kExitOk);
  const auto bad = write("bad.json", R"({"schema": [{"name": "x", "min": 0, "max": 4}], "classes": ["Y", "N"],
    "elements": [{"boxes": [{"x": [0, 2, true, false]}], "value": [100, 0]},
                 {"boxes": [{"x": [1, 3, true, false]}], "value": [0, 100]}]})");
  const auto r = run({"validate", "--in", bad});
  EXPECT_EQ(r.code, cli::kExitInvalid);
  // Standard input works too.
  EXPECT_EQ(run({"validate", "-"}, slurp(data("conflict_right.json"))).code, cli::kExitOk);
}

TEST_F(Cli, LawsReportIsDeterministic) {
  const auto a = run({"laws", "--trials", "20", "--seed", "3", "--json"});
  const auto b = run({"laws", "--trials", "20", "--seed", "3", "--json"});
  ASSERT_EQ(a.code, cli::kExitOk) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find("plus.idempotence"), std::string::npos);
}

TEST_F(Cli, SimulateWritesCsvAndSummary) {
  const auto cfg = write("cfg.json", R"({"seed": 1, "batches": 3, "drift_at": 1, "batch_size": 40, "test_size": 50})");
  const auto summary = path("summary.json");
  const auto r = run({"simulate", "--config", cfg, "--summary", summary});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "batch_index,strategy,accuracy");
  EXPECT_NE(slurp(summary).find("mt19937_64"), std::string::npos);
}
