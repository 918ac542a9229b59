#include "pf/canonical_json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

#include "pf/errors.hpp"

namespace pf {

namespace {

std::string print_g(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, value);
  return buf;
}

bool is_scalar(const Json& v) { return !v.is_object() && !v.is_array(); }

void write_value(const Json& v, int depth, NumberFormat format, std::string& out) {
  const std::string indent(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string closing(static_cast<std::size_t>(2 * depth), ' ');
  switch (v.type()) {
    case Json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {  // std::map: sorted keys
        if (!first) out += ",\n";
        first = false;
        out += indent;
        out += Json(it.key()).dump();
        out += ": ";
        write_value(it.value(), depth + 1, format, out);
      }
      out += "\n" + closing + "}";
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      const bool flat = std::all_of(v.begin(), v.end(), is_scalar);
      if (flat) {
        out += "[";
        for (std::size_t i = 0; i < v.size(); ++i) {
          if (i) out += ", ";
          write_value(v[i], depth + 1, format, out);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",\n";
        out += indent;
        write_value(v[i], depth + 1, format, out);
      }
      out += "\n" + closing + "]";
      return;
    }
    case Json::value_t::number_float:
      if (format == NumberFormat::exact && std::isfinite(v.get<double>())) {
        out += v.get<double>() == 0.0 ? "0" : v.dump();
      } else {
        out += format_number(v.get<double>());
      }
      return;
    default:
      out += v.dump(-1, ' ', false, Json::error_handler_t::strict);
      return;
  }
}

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "\"nan\"";
  if (std::isinf(value)) return value > 0 ? "\"inf\"" : "\"-inf\"";
  if (value == 0.0) return "0";  // also folds -0
  // %g drops trailing zeros, so this is already the shortest form of the
  // 9-digit rounding, and it keeps integers like 1000 out of exponent form.
  return print_g(value, 9);
}

std::string write_canonical(const Json& value, NumberFormat format) {
  std::string out;
  write_value(value, 0, format, out);
  out += "\n";
  return out;
}

double number_from_json(const Json& value) {
  if (value.is_number()) return value.get<double>();
  if (value.is_string()) {
    const auto& s = value.get_ref<const std::string&>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw Error("expected a number");
}

Json number_to_json(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return value;
}

}  // namespace pf
