#pragma once

// Canonical JSON text: sorted object keys, two-space indentation, scalar
// arrays on one line, and numbers rounded to 9 significant digits printed
// in the shortest form that reproduces the rounded value (or, for input
// documents, the shortest exact form). Non-finite
// numbers are written as the strings "inf", "-inf" and "nan".

#include <string>

#include <json.hpp>

namespace pf {

using Json = nlohmann::json;

std::string format_number(double value);

enum class NumberFormat {
  significant9,  // reports
  exact,         // shortest text that reads back to the same double
};

std::string write_canonical(const Json& value, NumberFormat format = NumberFormat::significant9);

/// Reads a number written by `format_number`, accepting the non-finite
/// string forms.
double number_from_json(const Json& value);

/// The JSON value `format_number` would produce for `value`.
Json number_to_json(double value);

}  // namespace pf
