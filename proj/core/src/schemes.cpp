#include "dspace/schemes.hpp"

#include <charconv>
#include <nlohmann/json.hpp>

#include "dspace/error.hpp"
#include "dspace/operators.hpp"

namespace dspace {

namespace {

MergeScheme from_json(const nlohmann::json& j) {
  if (j.is_number_unsigned()) return MergeScheme(j.get<std::size_t>());
  if (j.is_number_integer()) throw SchemeError("scheme leaf index must be non-negative");
  if (!j.is_array()) throw SchemeError("scheme node must be an integer or an array");
  if (j.size() == 1) return from_json(j.front());
  std::vector<MergeScheme> children;
  for (const auto& c : j) children.push_back(from_json(c));
  return MergeScheme(std::move(children));
}

nlohmann::json to_json_value(const MergeScheme& s) {
  if (s.is_leaf()) return s.leaf();
  auto arr = nlohmann::json::array();
  for (const auto& c : s.children()) arr.push_back(to_json_value(c));
  return arr;
}

void collect_leaves(const MergeScheme& s, std::vector<std::size_t>& out) {
  if (s.is_leaf()) {
    out.push_back(s.leaf());
    return;
  }
  for (const auto& c : s.children()) collect_leaves(c, out);
}

void collect_impacts(const MergeScheme& s, double share, std::vector<std::pair<std::size_t, double>>& out) {
  if (s.is_leaf()) {
    out.emplace_back(s.leaf(), share);
    return;
  }
  const double child_share = share / static_cast<double>(s.children().size());
  for (const auto& c : s.children()) collect_impacts(c, child_share, out);
}

DecisionSpace run(const MergeScheme& s, std::span<const DecisionSpace> spaces) {
  if (s.is_leaf()) return spaces[s.leaf()];
  std::vector<DecisionSpace> operands;
  operands.reserve(s.children().size());
  for (const auto& c : s.children()) operands.push_back(run(c, spaces));
  return merge_nary(operands);
}

MergeScheme factored_subtree(std::span<const std::size_t> factors, std::size_t& next_leaf) {
  if (factors.empty()) return MergeScheme(next_leaf++);
  std::vector<MergeScheme> children;
  children.reserve(factors.front());
  for (std::size_t k = 0; k < factors.front(); ++k) {
    children.push_back(factored_subtree(factors.subspan(1), next_leaf));
  }
  return MergeScheme(std::move(children));
}

std::size_t parse_count(std::string_view text, std::string_view spec) {
  std::size_t value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw SchemeError("bad number '" + std::string(text) + "' in scheme '" + std::string(spec) + "'");
  }
  return value;
}

}  // namespace

MergeScheme::MergeScheme(std::vector<MergeScheme> children) : node_(std::move(children)) {
  if (std::get<std::vector<MergeScheme>>(node_).size() < 2) {
    throw SchemeError("a merge node needs at least two operands");
  }
}

std::span<const MergeScheme> MergeScheme::children() const {
  if (is_leaf()) return {};
  return std::get<std::vector<MergeScheme>>(node_);
}

std::size_t MergeScheme::leaf_count() const {
  if (is_leaf()) return 1;
  std::size_t n = 0;
  for (const auto& c : children()) n += c.leaf_count();
  return n;
}

std::vector<std::size_t> MergeScheme::leaves() const {
  std::vector<std::size_t> out;
  collect_leaves(*this, out);
  return out;
}

MergeScheme MergeScheme::parse_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemeError(std::string("scheme JSON: ") + e.what());
  }
  return from_json(j);
}

std::string MergeScheme::to_json() const { return to_json_value(*this).dump(); }

void check_scheme(const MergeScheme& scheme, std::size_t space_count) {
  std::vector<bool> seen(space_count, false);
  for (auto leaf : scheme.leaves()) {
    if (leaf >= space_count) {
      throw SchemeError("scheme leaf " + std::to_string(leaf) + " out of range for " +
                        std::to_string(space_count) + " spaces");
    }
    if (seen[leaf]) throw SchemeError("scheme leaf " + std::to_string(leaf) + " appears twice");
    seen[leaf] = true;
  }
  for (std::size_t i = 0; i < space_count; ++i) {
    if (!seen[i]) throw SchemeError("space " + std::to_string(i) + " is not a scheme leaf");
  }
}

DecisionSpace execute(const MergeScheme& scheme, std::span<const DecisionSpace> spaces) {
  check_scheme(scheme, spaces.size());
  return run(scheme, spaces);
}

std::vector<double> impacts(const MergeScheme& scheme) {
  std::vector<std::pair<std::size_t, double>> shares;
  collect_impacts(scheme, 1.0, shares);
  std::size_t n = 0;
  for (const auto& [leaf, share] : shares) n = std::max(n, leaf + 1);
  std::vector<double> out(n, 0.0);
  for (const auto& [leaf, share] : shares) out[leaf] += share;
  return out;
}

MergeScheme build_balanced(std::size_t m) {
  if (m == 0 || (m & (m - 1)) != 0) {
    throw SchemeError("balanced scheme needs a power-of-two count, got " + std::to_string(m));
  }
  std::vector<MergeScheme> level;
  for (std::size_t i = 0; i < m; ++i) level.emplace_back(i);
  while (level.size() > 1) {
    std::vector<MergeScheme> up;
    for (std::size_t i = 0; i < level.size(); i += 2) {
      up.emplace_back(std::vector<MergeScheme>{std::move(level[i]), std::move(level[i + 1])});
    }
    level = std::move(up);
  }
  return std::move(level.front());
}

MergeScheme build_chain(std::size_t m) {
  if (m == 0) throw SchemeError("chain scheme needs at least one space");
  MergeScheme acc(std::size_t{0});
  for (std::size_t i = 1; i < m; ++i) {
    acc = MergeScheme(std::vector<MergeScheme>{std::move(acc), MergeScheme(i)});
  }
  return acc;
}

MergeScheme build_factored(std::span<const std::size_t> factors) {
  if (factors.empty()) throw SchemeError("factored scheme needs at least one factor");
  for (auto f : factors) {
    if (f < 2) throw SchemeError("factored scheme factors must all be at least 2");
  }
  std::size_t next_leaf = 0;
  return factored_subtree(factors, next_leaf);
}

MergeScheme parse_scheme_spec(std::string_view spec, std::size_t default_count) {
  const auto colon = spec.find(':');
  const auto kind = spec.substr(0, colon);
  const auto arg = colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);

  if (kind == "chain" || kind == "balanced") {
    const std::size_t m = arg.empty() ? default_count : parse_count(arg, spec);
    return kind == "chain" ? build_chain(m) : build_balanced(m);
  }
  if (kind == "factored") {
    std::vector<std::size_t> factors;
    std::string_view rest = arg;
    while (!rest.empty()) {
      const auto x = rest.find('x');
      factors.push_back(parse_count(rest.substr(0, x), spec));
      if (x == std::string_view::npos) break;
      rest = rest.substr(x + 1);
      if (rest.empty()) throw SchemeError("trailing 'x' in scheme '" + std::string(spec) + "'");
    }
    return build_factored(factors);
  }
  throw SchemeError("unknown scheme '" + std::string(spec) + "'");
}

}  // namespace dspace
