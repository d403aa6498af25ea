#pragma once

// JSON forms of instances, plans and allocation-price pairs. Rationals travel as "p/q" strings;
// decimal strings and JSON numbers are accepted on input and converted exactly.

#include "refinet/equilibrium.hpp"
#include "refinet/measure.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>

namespace refinet::io {

// Malformed input; the message carries a line:column or a JSON pointer with a best-effort line.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A parsed document that remembers its source text for error locations.
struct Document {
  std::string name;
  std::string text;
  nlohmann::json value;

  [[noreturn]] void fail(const std::string& pointer, const std::string& what) const;
};

Document load_text(std::string name, std::string text);
Document load_file(const std::string& path);

// 1-based line of the value at `pointer`, or 0 when it cannot be found.
int locate_line(const std::string& text, const std::string& pointer);

InstancePtr parse_instance(const Document& doc);
nlohmann::json instance_to_json(const Instance& instance);

Plan parse_plan(const Document& doc, const InstancePtr& instance);
nlohmann::json plan_to_json(const Plan& plan);

Equilibrium parse_equilibrium(const Document& doc, const InstancePtr& instance);
nlohmann::json equilibrium_to_json(const Equilibrium& eq);

std::string rational_json(const Rational& q);

}  // namespace refinet::io
