#pragma once

// JSON reader for property-specification files:
//   {"inputs":[{"name":"t1","cell":0}, ...],
//    "constraints":["t1 >= 0", ...],
//    "steps":100, "goal":"flag(Halt) && ...", "penalty":false,
//    "data":[0,0,0,0,0,100], "observable":"reg(r0)"}
// Unknown keys are rejected so a typo cannot silently weaken a property.

#include <cstdint>
#include <string>

#include "json.hpp"

#include "redfin/verify.hpp"

namespace redfin {

inline PropertySpec property_spec_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw VerifyError(std::string("spec: ") + e.what());
  }
  if (!j.is_object()) throw VerifyError("spec: top level must be an object");

  static const char* known[] = {"inputs", "constraints", "steps", "goal",
                                "penalty", "data", "observable"};
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw VerifyError("spec: unknown key '" + key + "'");
    (void)value;
  }

  PropertySpec spec;
  if (j.contains("inputs")) {
    if (!j["inputs"].is_array()) throw VerifyError("spec: 'inputs' must be an array");
    for (const auto& in : j["inputs"]) {
      if (!in.is_object() || !in.contains("name") || !in.contains("cell"))
        throw VerifyError("spec: each input needs 'name' and 'cell'");
      if (!in["name"].is_string() || !in["cell"].is_number_unsigned())
        throw VerifyError("spec: input 'name' must be a string and 'cell' a non-negative integer");
      const uint64_t cell = in["cell"].get<uint64_t>();
      if (cell >= memory_size)
        throw VerifyError("spec: input cell " + std::to_string(cell) + " out of range");
      spec.inputs.push_back({in["name"].get<std::string>(), static_cast<MemoryAddress>(cell)});
    }
  }
  if (j.contains("constraints")) {
    if (!j["constraints"].is_array()) throw VerifyError("spec: 'constraints' must be an array");
    for (const auto& c : j["constraints"]) {
      if (!c.is_string()) throw VerifyError("spec: each constraint must be a string");
      spec.constraints.push_back(c.get<std::string>());
    }
  }
  if (j.contains("steps")) {
    if (!j["steps"].is_number_unsigned() || j["steps"].get<uint64_t>() == 0)
      throw VerifyError("spec: 'steps' must be a positive integer");
    spec.steps = j["steps"].get<unsigned>();
  }
  if (j.contains("goal")) {
    if (!j["goal"].is_string()) throw VerifyError("spec: 'goal' must be a string");
    spec.goal = j["goal"].get<std::string>();
  }
  if (j.contains("penalty")) {
    if (!j["penalty"].is_boolean()) throw VerifyError("spec: 'penalty' must be a boolean");
    spec.penalty = j["penalty"].get<bool>();
  }
  if (j.contains("data")) {
    if (!j["data"].is_array()) throw VerifyError("spec: 'data' must be an array");
    for (const auto& v : j["data"]) {
      if (!v.is_number_integer())
        throw VerifyError("spec: each data value must be an integer");
      spec.data.push_back(v.get<int64_t>());
    }
    if (spec.data.size() > memory_size) throw VerifyError("spec: 'data' exceeds memory size");
  }
  if (j.contains("observable")) {
    if (!j["observable"].is_string()) throw VerifyError("spec: 'observable' must be a string");
    spec.observable = j["observable"].get<std::string>();
  }

  // Surface malformed expressions at load time rather than mid-query.
  for (const std::string& c : spec.constraints) parse_goal(c);
  if (!spec.goal.empty()) parse_goal(spec.goal);
  if (!spec.observable.empty()) parse_goal(spec.observable);
  return spec;
}

}  // namespace redfin
