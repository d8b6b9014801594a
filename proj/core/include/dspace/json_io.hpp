#pragma once

// Decision-space JSON documents:
//
//   {
//     "schema":   [{"name": "age", "min": 0, "max": 8}, ...],
//     "classes":  ["Yes", "No"],
//     "elements": [
//       {"boxes": [{"age": [lo, hi, lo_closed, hi_closed], ...}, ...],
//        "value": [40.0, 60.0],          // percent, one per class
//        "mass": 7.5}
//     ]
//   }
//
// Percentages are written with six decimals; everything else at full
// precision. On input, a box that omits an attribute spans its whole domain,
// a missing "mass" defaults to the element's specialization, and percentages
// within 0.001 of 100 in total are renormalized.

#include <string>
#include <string_view>

#include "dspace/decision_space.hpp"

namespace dspace {

// Throws SyntaxError on malformed JSON and SchemaError/GeometryError on
// documents that cannot describe a space at all. Semantic problems (overlap,
// bad sums) are left for validate().
DecisionSpace space_from_json(std::string_view text);
std::string space_to_json(const DecisionSpace& space);

// Accepts a bare schema array or any object with a "schema" member.
AttributeSchema schema_from_json(std::string_view text);

}  // namespace dspace
