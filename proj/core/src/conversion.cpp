#include "dspace/conversion.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <nlohmann/json.hpp>
#include <optional>

#include "dspace/error.hpp"
#include "format.hpp"

namespace dspace {

std::string_view to_string(BoundOp op) {
  switch (op) {
    case BoundOp::kLess: return "<";
    case BoundOp::kLessEqual: return "<=";
    case BoundOp::kGreater: return ">";
    case BoundOp::kGreaterEqual: return ">=";
  }
  return "?";
}

bool Condition::holds(double x) const {
  switch (op) {
    case BoundOp::kLess: return x < threshold;
    case BoundOp::kLessEqual: return x <= threshold;
    case BoundOp::kGreater: return x > threshold;
    case BoundOp::kGreaterEqual: return x >= threshold;
  }
  return false;
}

// ------------------------------------------------------------------- lexer

namespace {

enum class Tok { kIdent, kString, kNumber, kOp, kLBrace, kRBrace, kColon, kComma, kPercent, kEnd };

struct Token {
  Tok kind = Tok::kEnd;
  std::string text;
  double number = 0.0;
  std::size_t line = 1;
  std::size_t column = 1;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

bool is_keyword(std::string_view s) {
  return iequals(s, "if") || iequals(s, "and") || iequals(s, "then");
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      Token t;
      t.line = line_;
      t.column = column_;
      if (pos_ >= text_.size()) {
        t.kind = Tok::kEnd;
        out.push_back(std::move(t));
        return out;
      }
      const char c = text_[pos_];
      if (ident_start(c)) {
        const auto start = pos_;
        while (pos_ < text_.size() && ident_char(text_[pos_])) advance();
        t.kind = Tok::kIdent;
        t.text = std::string(text_.substr(start, pos_ - start));
      } else if (c == '"') {
        t.kind = Tok::kString;
        t.text = lex_string(t);
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' ||
                 ((c == '-' || c == '+') && pos_ + 1 < text_.size() &&
                  (std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])) || text_[pos_ + 1] == '.'))) {
        t.kind = Tok::kNumber;
        lex_number(t);
      } else if (c == '<' || c == '>') {
        t.kind = Tok::kOp;
        t.text = std::string(1, c);
        advance();
        if (pos_ < text_.size() && text_[pos_] == '=') {
          t.text += '=';
          advance();
        }
      } else if (text_.substr(pos_, 3) == "\xE2\x89\xA4" || text_.substr(pos_, 3) == "\xE2\x89\xA5") {
        t.kind = Tok::kOp;
        t.text = text_[pos_ + 2] == '\xA4' ? "<=" : ">=";
        pos_ += 3;
        ++column_;
      } else {
        switch (c) {
          case '=': t.kind = Tok::kOp; t.text = "="; break;
          case '{': t.kind = Tok::kLBrace; break;
          case '}': t.kind = Tok::kRBrace; break;
          case ':': t.kind = Tok::kColon; break;
          case ',': t.kind = Tok::kComma; break;
          case '%': t.kind = Tok::kPercent; break;
          default:
            throw SyntaxError(std::string("unexpected character '") + c + "'", line_, column_);
        }
        if (t.text.empty()) t.text = std::string(1, c);
        advance();
      }
      out.push_back(std::move(t));
    }
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else if ((static_cast<unsigned char>(text_[pos_]) & 0xC0) != 0x80) {
      ++column_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  std::string lex_string(const Token& t) {
    advance();
    std::string out;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) advance();
      if (text_[pos_] == '\n') break;
      out += text_[pos_];
      advance();
    }
    if (pos_ >= text_.size() || text_[pos_] != '"') {
      throw SyntaxError("unterminated string", t.line, t.column);
    }
    advance();
    return out;
  }

  void lex_number(Token& t) {
    const auto start = pos_;
    if (text_[pos_] == '+' || text_[pos_] == '-') advance();
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
      advance();
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      advance();
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) advance();
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) advance();
    }
    t.text = std::string(text_.substr(start, pos_ - start));
    const char* first = t.text.data();
    if (*first == '+') ++first;
    const char* last = t.text.data() + t.text.size();
    const auto [ptr, ec] = std::from_chars(first, last, t.number);
    if (ec != std::errc() || ptr != last) {
      throw SyntaxError("malformed number '" + t.text + "'", t.line, t.column);
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

// ------------------------------------------------------------------ parser

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  RuleSet run() {
    RuleSet out;
    while (peek().kind != Tok::kEnd) out.rules.push_back(rule());
    if (out.rules.empty()) throw SyntaxError("rule set is empty", peek().line, peek().column);
    return out;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void fail(const std::string& what, const Token& at) const {
    const std::string found = at.kind == Tok::kEnd ? "end of input" : "'" + at.text + "'";
    throw SyntaxError(what + ", found " + found, at.line, at.column);
  }

  bool at_keyword(std::string_view kw) const {
    return peek().kind == Tok::kIdent && iequals(peek().text, kw);
  }

  Rule rule() {
    if (!at_keyword("if")) fail("expected IF", peek());
    take();
    Rule r;
    std::vector<const Token*> positions;
    while (true) {
      positions.push_back(&peek());
      r.conditions.push_back(condition());
      if (at_keyword("and")) {
        take();
        continue;
      }
      if (at_keyword("then")) {
        take();
        break;
      }
      fail("expected AND or THEN", peek());
    }
    check_bounds(r, positions);
    r.target = target();
    if (peek().kind != Tok::kEnd && !at_keyword("if")) fail("expected end of rule", peek());
    return r;
  }

  Condition condition() {
    const Token& name = peek();
    if (!(name.kind == Tok::kString || (name.kind == Tok::kIdent && !is_keyword(name.text)))) {
      fail("expected attribute name", name);
    }
    take();
    const Token& op = peek();
    Condition c;
    c.attribute = name.text;
    if (op.kind != Tok::kOp || op.text == "=") fail("expected one of < <= > >=", op);
    take();
    if (op.text == "<") c.op = BoundOp::kLess;
    else if (op.text == "<=") c.op = BoundOp::kLessEqual;
    else if (op.text == ">") c.op = BoundOp::kGreater;
    else c.op = BoundOp::kGreaterEqual;
    const Token& value = peek();
    if (value.kind != Tok::kNumber) fail("expected a number", value);
    if (!std::isfinite(value.number)) fail("threshold must be finite", value);
    take();
    c.threshold = value.number;
    return c;
  }

  std::string label() {
    const Token& t = peek();
    if (t.kind == Tok::kString || t.kind == Tok::kNumber ||
        (t.kind == Tok::kIdent && !is_keyword(t.text))) {
      take();
      return t.text;
    }
    fail("expected a class label", t);
  }

  RuleTarget target() {
    if (peek().kind == Tok::kLBrace) return distribution();
    if (at_keyword("class") && toks_[pos_ + 1].kind == Tok::kOp && toks_[pos_ + 1].text == "=") {
      take();
      take();
    }
    return label();
  }

  LabeledDistribution distribution() {
    const Token& open = take();
    LabeledDistribution d;
    while (true) {
      const Token& at = peek();
      auto name = label();
      if (std::find(d.classes.begin(), d.classes.end(), name) != d.classes.end()) {
        fail("class listed twice in distribution", at);
      }
      if (peek().kind != Tok::kColon) fail("expected ':'", peek());
      take();
      const Token& num = peek();
      if (num.kind != Tok::kNumber) fail("expected a percentage", num);
      if (!(num.number >= 0.0) || !std::isfinite(num.number)) fail("percentage must be non-negative", num);
      take();
      if (peek().kind == Tok::kPercent) take();
      d.classes.push_back(std::move(name));
      d.percents.push_back(num.number);
      if (peek().kind == Tok::kComma) {
        take();
        continue;
      }
      if (peek().kind == Tok::kRBrace) {
        take();
        break;
      }
      fail("expected ',' or '}'", peek());
    }
    double total = 0.0;
    for (double p : d.percents) total += p;
    if (std::abs(total - 100.0) > 1e-6) {
      throw SyntaxError("distribution must sum to 100%", open.line, open.column);
    }
    return d;
  }

  static void check_bounds(const Rule& r, const std::vector<const Token*>& at) {
    for (std::size_t i = 0; i < r.conditions.size(); ++i) {
      const auto& ci = r.conditions[i];
      for (std::size_t j = 0; j < i; ++j) {
        const auto& cj = r.conditions[j];
        if (cj.attribute != ci.attribute) continue;
        if (is_upper(cj.op) == is_upper(ci.op)) {
          throw SyntaxError(std::string("duplicate ") + (is_upper(ci.op) ? "upper" : "lower") +
                                " bound on '" + ci.attribute + "'",
                            at[i]->line, at[i]->column);
        }
        const double lower = is_upper(ci.op) ? cj.threshold : ci.threshold;
        const double upper = is_upper(ci.op) ? ci.threshold : cj.threshold;
        if (!(lower < upper)) {
          throw SyntaxError("inverted bounds on '" + ci.attribute + "'", at[i]->line, at[i]->column);
        }
      }
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

bool plain_identifier(std::string_view s) {
  if (s.empty() || !ident_start(s.front()) || is_keyword(s)) return false;
  return std::all_of(s.begin(), s.end(), ident_char);
}

std::string quote_name(std::string_view s) {
  if (plain_identifier(s)) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

RuleTarget target_from_json(const nlohmann::json& node, std::span<const std::string> classes) {
  if (node.contains("label")) return node.at("label").get<std::string>();
  const auto& v = node.at("value");
  if (!v.is_array()) throw ConversionError("tree leaf 'value' must be an array");
  if (v.size() != classes.size()) {
    throw ConversionError("tree leaf has " + std::to_string(v.size()) + " percentages for " +
                          std::to_string(classes.size()) + " classes");
  }
  LabeledDistribution d;
  d.classes.assign(classes.begin(), classes.end());
  for (const auto& p : v) d.percents.push_back(p.get<double>());
  return d;
}

std::size_t node_from_json(DecisionTree& tree, const nlohmann::json& node,
                           std::span<const std::string> classes, int depth) {
  if (depth > 10000) throw ConversionError("tree too deep");
  if (!node.is_object()) throw ConversionError("tree node must be an object");
  if (node.contains("value") || node.contains("label")) {
    return tree.add_leaf(target_from_json(node, classes));
  }
  const auto left = node_from_json(tree, node.at("left"), classes, depth + 1);
  const auto right = node_from_json(tree, node.at("right"), classes, depth + 1);
  bool inclusive = false;
  if (node.contains("left_op")) {
    const auto op = node.at("left_op").get<std::string>();
    if (op == "<=") inclusive = true;
    else if (op != "<") throw ConversionError("tree left_op must be \"<\" or \"<=\"");
  }
  return tree.add_split(node.at("attr").get<std::string>(), node.at("threshold").get<double>(), left,
                        right, inclusive);
}

nlohmann::ordered_json node_to_json(const DecisionTree& tree, std::size_t index) {
  nlohmann::ordered_json j;
  const auto& node = tree.nodes()[index];
  if (const auto* leaf = std::get_if<DecisionTree::Leaf>(&node)) {
    if (const auto* label = std::get_if<std::string>(&leaf->target)) {
      j["label"] = *label;
    } else {
      const auto& d = std::get<LabeledDistribution>(leaf->target);
      std::vector<double> percents;
      for (const auto& c : tree.classes()) {
        const auto it = std::find(d.classes.begin(), d.classes.end(), c);
        percents.push_back(it == d.classes.end() ? 0.0 : d.percents[it - d.classes.begin()]);
      }
      j["value"] = percents;
    }
    return j;
  }
  const auto& split = std::get<DecisionTree::Split>(node);
  j["attr"] = split.attribute;
  j["threshold"] = split.threshold;
  if (split.left_inclusive) j["left_op"] = "<=";
  j["left"] = node_to_json(tree, split.left);
  j["right"] = node_to_json(tree, split.right);
  return j;
}

struct Bound {
  double value;
  bool closed;
};

struct PathBounds {
  std::optional<Bound> lower;
  std::optional<Bound> upper;
};

}  // namespace

RuleSet parse_ruleset(std::string_view text) { return Parser(Lexer(text).run()).run(); }

std::string emit_ruleset(const RuleSet& rules) {
  std::string out;
  for (const auto& r : rules.rules) {
    out += "IF ";
    for (std::size_t i = 0; i < r.conditions.size(); ++i) {
      const auto& c = r.conditions[i];
      if (i > 0) out += " AND ";
      out += quote_name(c.attribute);
      out += ' ';
      out += to_string(c.op);
      out += ' ';
      out += detail::format_double(c.threshold);
    }
    out += " THEN ";
    if (const auto* label = std::get_if<std::string>(&r.target)) {
      out += quote_name(*label);
    } else {
      const auto& d = std::get<LabeledDistribution>(r.target);
      out += '{';
      for (std::size_t i = 0; i < d.classes.size(); ++i) {
        if (i > 0) out += ", ";
        out += quote_name(d.classes[i]) + ": " + detail::format_double(d.percents[i]) + "%";
      }
      out += '}';
    }
    out += '\n';
  }
  return out;
}

std::vector<std::string> collect_class_labels(const RuleSet& rules) {
  std::vector<std::string> out;
  auto note = [&out](const std::string& label) {
    if (std::find(out.begin(), out.end(), label) == out.end()) out.push_back(label);
  };
  for (const auto& r : rules.rules) {
    if (const auto* label = std::get_if<std::string>(&r.target)) {
      note(*label);
    } else {
      for (const auto& c : std::get<LabeledDistribution>(r.target).classes) note(c);
    }
  }
  return out;
}

DecisionSpace rules_to_space(const RuleSet& rules, const AttributeSchema& schema,
                             std::vector<std::string> class_labels) {
  if (class_labels.empty()) class_labels = collect_class_labels(rules);
  auto class_of = [&](const std::string& label, std::size_t rule) {
    const auto it = std::find(class_labels.begin(), class_labels.end(), label);
    if (it == class_labels.end()) {
      throw ConversionError("rule " + std::to_string(rule + 1) + ": unknown class '" + label + "'");
    }
    return static_cast<std::size_t>(it - class_labels.begin());
  };

  std::vector<Element> elements;
  elements.reserve(rules.rules.size());
  for (std::size_t ri = 0; ri < rules.rules.size(); ++ri) {
    const Rule& r = rules.rules[ri];
    const std::string where = "rule " + std::to_string(ri + 1);
    std::vector<const Condition*> lower(schema.size(), nullptr), upper(schema.size(), nullptr);
    for (const auto& c : r.conditions) {
      const auto a = schema.index_of(c.attribute);
      if (!a) throw ConversionError(where + ": unknown attribute '" + c.attribute + "'");
      const auto& attr = schema[*a];
      if (c.threshold < attr.min || c.threshold > attr.max) {
        throw ConversionError(where + ": threshold " + detail::format_double(c.threshold) +
                              " outside the domain of '" + attr.name + "'");
      }
      auto& slot = is_upper(c.op) ? upper[*a] : lower[*a];
      if (slot) throw ConversionError(where + ": repeated bound on '" + attr.name + "'");
      slot = &c;
    }

    std::vector<Interval> bounds;
    bounds.reserve(schema.size());
    for (std::size_t a = 0; a < schema.size(); ++a) {
      const double lo = lower[a] ? lower[a]->threshold : schema[a].min;
      const bool lo_closed = lower[a] ? lower[a]->op == BoundOp::kGreaterEqual : true;
      const double hi = upper[a] ? upper[a]->threshold : schema[a].max;
      const bool hi_closed = upper[a] ? upper[a]->op == BoundOp::kLessEqual : true;
      auto iv = Interval::make(lo, hi, lo_closed, hi_closed);
      if (!iv) throw ConversionError(where + ": empty range on '" + schema[a].name + "'");
      bounds.push_back(*iv);
    }

    ClassDistribution value;
    if (const auto* label = std::get_if<std::string>(&r.target)) {
      value = ClassDistribution::one_hot(class_labels.size(), class_of(*label, ri));
    } else {
      const auto& d = std::get<LabeledDistribution>(r.target);
      std::vector<double> w(class_labels.size(), 0.0);
      double total = 0.0;
      for (double p : d.percents) total += p;
      if (!(total > 0.0)) throw ConversionError(where + ": distribution has no mass");
      for (std::size_t k = 0; k < d.classes.size(); ++k) {
        w[class_of(d.classes[k], ri)] = d.percents[k] / total;
      }
      value = ClassDistribution(std::move(w));
    }
    elements.emplace_back(Region(Box(std::move(bounds))), std::move(value));
  }
  return DecisionSpace(schema, std::move(class_labels), std::move(elements));
}

// ------------------------------------------------------------ DecisionTree

DecisionTree DecisionTree::parse_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SyntaxError(std::string("tree JSON: ") + e.what(), 0, 0);
  }
  try {
    std::vector<std::string> classes;
    const nlohmann::json* root = &j;
    if (j.contains("root")) {
      if (j.contains("classes")) classes = j.at("classes").get<std::vector<std::string>>();
      root = &j.at("root");
    }
    DecisionTree tree(classes);
    tree.set_root(node_from_json(tree, *root, classes, 0));
    if (tree.classes_.empty()) {
      std::vector<std::string> found;
      for (const auto& n : tree.nodes_) {
        if (const auto* leaf = std::get_if<Leaf>(&n)) {
          const auto& label = std::get<std::string>(leaf->target);
          if (std::find(found.begin(), found.end(), label) == found.end()) found.push_back(label);
        }
      }
      tree.classes_ = std::move(found);
    }
    return tree;
  } catch (const nlohmann::json::exception& e) {
    throw ConversionError(std::string("tree JSON: ") + e.what());
  }
}

std::string DecisionTree::to_json() const {
  nlohmann::ordered_json j;
  j["classes"] = classes_;
  j["root"] = node_to_json(*this, root_);
  return j.dump(2);
}

std::size_t DecisionTree::add_leaf(RuleTarget target) {
  nodes_.emplace_back(Leaf{std::move(target)});
  return nodes_.size() - 1;
}

std::size_t DecisionTree::add_split(std::string attribute, double threshold, std::size_t left,
                                    std::size_t right, bool left_inclusive) {
  if (left >= nodes_.size() || right >= nodes_.size() || left == right) {
    throw ConversionError("tree split refers to a missing child");
  }
  nodes_.emplace_back(Split{std::move(attribute), threshold, left_inclusive, left, right});
  return nodes_.size() - 1;
}

std::size_t DecisionTree::leaf_count() const {
  if (nodes_.empty()) return 0;
  std::size_t n = 0;
  std::vector<std::size_t> stack{root_};
  while (!stack.empty()) {
    const auto i = stack.back();
    stack.pop_back();
    if (const auto* s = std::get_if<Split>(&nodes_[i])) {
      stack.push_back(s->right);
      stack.push_back(s->left);
    } else {
      ++n;
    }
  }
  return n;
}

RuleSet DecisionTree::to_rules(const AttributeSchema& schema) const {
  if (nodes_.empty()) throw ConversionError("tree has no nodes");
  RuleSet out;
  std::vector<PathBounds> path(schema.size());

  // Tightens `slot` to the candidate bound; returns the old value for undo.
  auto tighten = [](std::optional<Bound>& slot, Bound candidate, bool is_lower) {
    auto previous = slot;
    if (!slot) {
      slot = candidate;
    } else if (is_lower) {
      if (candidate.value > slot->value || (candidate.value == slot->value && !candidate.closed)) {
        slot = candidate;
      }
    } else if (candidate.value < slot->value || (candidate.value == slot->value && !candidate.closed)) {
      slot = candidate;
    }
    return previous;
  };

  auto walk = [&](auto&& self, std::size_t index, std::size_t depth) -> void {
    if (depth > nodes_.size()) throw ConversionError("tree contains a cycle");
    const auto& node = nodes_.at(index);
    if (const auto* leaf = std::get_if<Leaf>(&node)) {
      Rule r;
      for (std::size_t a = 0; a < schema.size(); ++a) {
        const auto& b = path[a];
        if (b.lower) {
          r.conditions.push_back({schema[a].name,
                                  b.lower->closed ? BoundOp::kGreaterEqual : BoundOp::kGreater,
                                  b.lower->value});
        }
        if (b.upper) {
          r.conditions.push_back({schema[a].name,
                                  b.upper->closed ? BoundOp::kLessEqual : BoundOp::kLess,
                                  b.upper->value});
        }
        if (b.lower && b.upper && !Interval::make(b.lower->value, b.upper->value, b.lower->closed, b.upper->closed)) {
          throw ConversionError("tree leaf " + std::to_string(index) + " is unreachable");
        }
      }
      r.target = leaf->target;
      out.rules.push_back(std::move(r));
      return;
    }
    const auto& s = std::get<Split>(node);
    const auto a = schema.index_of(s.attribute);
    if (!a) throw ConversionError("tree splits on unknown attribute '" + s.attribute + "'");
    if (s.threshold < schema[*a].min || s.threshold > schema[*a].max) {
      throw ConversionError("tree threshold " + detail::format_double(s.threshold) +
                            " outside the domain of '" + s.attribute + "'");
    }
    auto& bounds = path[*a];
    {
      auto saved = tighten(bounds.upper, {s.threshold, s.left_inclusive}, false);
      self(self, s.left, depth + 1);
      bounds.upper = saved;
    }
    {
      auto saved = tighten(bounds.lower, {s.threshold, !s.left_inclusive}, true);
      self(self, s.right, depth + 1);
      bounds.lower = saved;
    }
  };
  walk(walk, root_, 0);
  return out;
}

DecisionSpace tree_to_space(const DecisionTree& tree, const AttributeSchema& schema) {
  std::vector<std::string> classes(tree.classes().begin(), tree.classes().end());
  return rules_to_space(tree.to_rules(schema), schema, std::move(classes));
}

}  // namespace dspace
