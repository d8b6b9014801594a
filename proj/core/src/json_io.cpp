#include "dspace/json_io.hpp"

#include <cmath>
#include <span>
#include <vector>
#include <nlohmann/json.hpp>

#include "dspace/error.hpp"

namespace dspace {

namespace {

using ojson = nlohmann::ordered_json;

ojson parse(std::string_view text, const char* what) {
  try {
    return ojson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SyntaxError(std::string(what) + ": " + e.what(), 0, 0);
  }
}

AttributeSchema schema_from(const ojson& arr) {
  if (!arr.is_array()) throw SchemaError("schema must be an array");
  std::vector<Attribute> attrs;
  for (const auto& a : arr) {
    attrs.push_back({a.at("name").get<std::string>(), a.at("min").get<double>(), a.at("max").get<double>()});
  }
  return AttributeSchema(std::move(attrs));
}

Interval interval_from(const ojson& j, const std::string& attr) {
  if (!j.is_array() || j.size() != 4) {
    throw SchemaError("bound for '" + attr + "' must be [lo, hi, lo_closed, hi_closed]");
  }
  return Interval(j[0].get<double>(), j[1].get<double>(), j[2].get<bool>(), j[3].get<bool>());
}

// Percentages in millionths of a percent. When the distribution sums to one,
// the rounding error is pushed onto the entries closest to a rounding
// boundary so the written values total exactly 100; reading such a file
// back then needs no renormalization and rewrites the same digits.
std::vector<double> rounded_percents(std::span<const double> fractions) {
  constexpr double kUnits = 1e8;
  std::vector<long long> units;
  std::vector<double> slack;
  long long total = 0;
  double sum = 0.0;
  for (double f : fractions) {
    const double scaled = f * kUnits;
    units.push_back(std::llround(scaled));
    slack.push_back(scaled - static_cast<double>(units.back()));
    total += units.back();
    sum += f;
  }
  if (std::abs(sum - 1.0) <= 1e-6) {
    long long missing = static_cast<long long>(kUnits) - total;
    while (missing != 0) {
      const int step = missing > 0 ? 1 : -1;
      std::size_t pick = 0;
      for (std::size_t i = 1; i < slack.size(); ++i) {
        if (step * slack[i] > step * slack[pick]) pick = i;
      }
      units[pick] += step;
      slack[pick] -= step;
      missing -= step;
    }
  }
  std::vector<double> out;
  for (long long u : units) out.push_back(static_cast<double>(u) / 1e6);
  return out;
}

}  // namespace

AttributeSchema schema_from_json(std::string_view text) {
  const auto j = parse(text, "schema JSON");
  try {
    return schema_from(j.is_object() ? j.at("schema") : j);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("schema JSON: ") + e.what());
  }
}

DecisionSpace space_from_json(std::string_view text) {
  const auto j = parse(text, "space JSON");
  try {
    auto schema = schema_from(j.at("schema"));
    auto classes = j.at("classes").get<std::vector<std::string>>();
    std::vector<Element> elements;
    for (const auto& e : j.at("elements")) {
      std::vector<Box> boxes;
      for (const auto& b : e.at("boxes")) {
        if (!b.is_object()) throw SchemaError("box must be an object keyed by attribute");
        for (const auto& [key, unused] : b.items()) {
          if (!schema.index_of(key)) throw SchemaError("box names unknown attribute '" + key + "'");
        }
        std::vector<Interval> bounds;
        for (const auto& attr : schema.attributes()) {
          bounds.push_back(b.contains(attr.name) ? interval_from(b.at(attr.name), attr.name)
                                                 : Interval(attr.min, attr.max, true, true));
        }
        boxes.emplace_back(std::move(bounds));
      }
      std::vector<double> weights;
      double total = 0.0;
      for (const auto& p : e.at("value")) {
        weights.push_back(p.get<double>());
        total += weights.back();
      }
      const double scale = std::abs(total - 100.0) <= 1e-3 ? total : 100.0;
      for (auto& w : weights) w /= scale;

      Region region = Region::from_disjoint(schema.size(), std::move(boxes));
      if (e.contains("mass")) {
        elements.emplace_back(std::move(region), ClassDistribution(std::move(weights)),
                              e.at("mass").get<double>());
      } else {
        elements.emplace_back(std::move(region), ClassDistribution(std::move(weights)));
      }
    }
    return DecisionSpace(std::move(schema), std::move(classes), std::move(elements));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("space JSON: ") + e.what());
  }
}

std::string space_to_json(const DecisionSpace& space) {
  // Hand-laid-out so that each schema entry and each element sits on one
  // line; diffs of space files then read element by element.
  std::string out = "{\n  \"schema\": [";
  const auto attrs = space.schema().attributes();
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    ojson a;
    a["name"] = attrs[i].name;
    a["min"] = attrs[i].min;
    a["max"] = attrs[i].max;
    out += (i ? ",\n    " : "\n    ") + a.dump();
  }
  out += "\n  ],\n  \"classes\": ";
  out += ojson(std::vector<std::string>(space.class_labels().begin(), space.class_labels().end())).dump();
  out += ",\n  \"elements\": [";

  const auto elements = space.elements();
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const auto& e = elements[i];
    ojson elem;
    auto boxes = ojson::array();
    for (const auto& b : e.region().boxes()) {
      ojson box = ojson::object();
      for (std::size_t d = 0; d < b.dim(); ++d) {
        box[space.schema()[d].name] = {b[d].lo(), b[d].hi(), b[d].lo_closed(), b[d].hi_closed()};
      }
      boxes.push_back(std::move(box));
    }
    elem["boxes"] = std::move(boxes);
    elem["value"] = rounded_percents(e.value().weights());
    elem["mass"] = e.mass();
    out += (i ? ",\n    " : "\n    ") + elem.dump();
  }
  out += elements.empty() ? "]\n}\n" : "\n  ]\n}\n";
  return out;
}

}  // namespace dspace
