#pragma once

// Experiment configuration: a JSON object with a schema version, a command and
// that command's parameters. Unknown fields are errors. Missing parameters take
// their defaults, and the normalized form is what gets hashed.

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "svito/errors.hpp"

namespace svito {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

namespace detail {

inline Json command_defaults(const std::string& command) {
  if (command == "algebra-check") return {{"seed", 1}, {"trials", 10000}, {"box_trials", 1000}, {"tol", 1e-12}, {"max_box_dim", 4}};
  if (command == "isometry")
    return {{"set", "[0,1]"}, {"paths", 100000}, {"steps", 128}, {"selections", 16}, {"recipe", "extreme"},
            {"seed", 1},      {"horizon", 1.0},  {"z", 5.0},     {"floor", 0.02}};
  if (command == "ito-verify")
    return {{"phi", "square"}, {"x0", 0.0},      {"f", "[0.5,1]"}, {"g", "[0,0]"}, {"steps", 256}, {"paths", 200},
            {"selections", 8}, {"recipe", "mix"}, {"seed", 1},       {"horizon", 1.0}, {"a", 1.5},   {"b", 10.0}};
  if (command == "bsde-solve")
    return {{"terminal", {{"generator", "identity"}, {"alpha", 0.0}, {"beta", 1.0}, {"strike", 0.0}}},
            {"driver", {{"form", "zero"}, {"a", 0.0}, {"b", 0.0}, {"c1", 0.0}, {"c2", 0.0}, {"lipschitz", nullptr}}},
            {"T", 1.0},
            {"N", 64},
            {"M", 10000},
            {"K", 2},
            {"degree", 3},
            {"ridge", 1e-8},
            {"seed", 1},
            {"max_iter", 30},
            {"tol", 1e-6},
            {"init", "zero"},
            {"uniqueness_inits", Json::array()},
            {"residual_tol", 0.25},
            {"martingale_tol", 0.05},
            {"solution_paths", 16}};
  if (command == "accept-all") return {{"seed", 7}};
  if (command == "brownian") return {{"seed", 1}, {"steps", 16}, {"paths", 4}, {"horizon", 1.0}, {"dims", 1}};
  if (command == "selections")
    return {{"set", "[0,1]"}, {"steps", 16}, {"paths", 4}, {"selections", 4}, {"recipe", "mix"}, {"seed", 1}, {"horizon", 1.0}};
  throw UsageError("unknown command '" + command + "'");
}

inline bool same_kind(const Json& def, const Json& v) {
  if (def.is_null()) return v.is_null() || v.is_number();
  if (def.is_number_integer()) return v.is_number_integer();
  if (def.is_number()) return v.is_number();
  if (def.is_string()) return v.is_string();
  if (def.is_array()) return v.is_array();
  if (def.is_object()) return v.is_object();
  return def.type() == v.type();
}

/// Defaults overlaid by the user's fields; nested objects are merged one level deep.
inline Json merge_checked(const Json& defaults, const Json& given, const std::string& where) {
  if (!given.is_object()) throw UsageError(where + ": expected an object");
  Json out = defaults;
  for (auto it = given.begin(); it != given.end(); ++it) {
    const std::string field = where.empty() ? it.key() : where + "." + it.key();
    if (!defaults.contains(it.key())) throw UsageError("unknown field '" + field + "'");
    const Json& def = defaults[it.key()];
    if (!same_kind(def, it.value())) throw UsageError("field '" + field + "' has the wrong type (expected " + std::string(def.type_name()) + ")");
    out[it.key()] = def.is_object() ? merge_checked(def, it.value(), field) : it.value();
  }
  return out;
}

inline void require_positive(const Json& p, const char* key) {
  if (p.contains(key) && !(p[key].get<double>() > 0)) throw UsageError(std::string("field '") + key + "' must be > 0");
}

inline void require_count(const Json& p, const char* key) {
  if (p.contains(key) && p[key].get<std::int64_t>() < 1) throw UsageError(std::string("field '") + key + "' must be >= 1");
}

inline std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') ++line, col = 1;
    else ++col;
  }
  return {line, col};
}

}  // namespace detail

struct ExperimentConfig {
  std::string command;
  Json params;  // normalized: every parameter present

  /// Canonical serialization; keys are sorted, so equal configs give equal text.
  std::string canonical() const {
    return Json{{"schema_version", kSchemaVersion}, {"command", command}, {"params", params}}.dump();
  }

  std::string hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char c : canonical()) h = (h ^ c) * 0x100000001b3ULL;
    std::ostringstream s;
    s << std::hex;
    s.width(16);
    s.fill('0');
    s << h;
    return s.str();
  }

  template <class T>
  T get(const std::string& key) const {
    return params.at(key).get<T>();
  }

  static ExperimentConfig make(const std::string& command, const Json& given) {
    ExperimentConfig c{command, detail::merge_checked(detail::command_defaults(command), given, "")};
    c.validate();
    return c;
  }

  static ExperimentConfig from_json(const Json& doc) {
    if (!doc.is_object()) throw UsageError("config: top level must be an object");
    for (auto it = doc.begin(); it != doc.end(); ++it)
      if (it.key() != "schema_version" && it.key() != "command" && it.key() != "params")
        throw UsageError("unknown field '" + it.key() + "'");
    if (!doc.contains("schema_version") || !doc["schema_version"].is_number_integer())
      throw UsageError("config: missing integer field 'schema_version'");
    if (doc["schema_version"].get<int>() != kSchemaVersion)
      throw UsageError("config: unsupported schema_version " + doc["schema_version"].dump());
    if (!doc.contains("command") || !doc["command"].is_string()) throw UsageError("config: missing string field 'command'");
    return make(doc["command"].get<std::string>(), doc.value("params", Json::object()));
  }

  static ExperimentConfig parse(const std::string& text) {
    Json doc;
    try {
      doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
      const auto [line, col] = detail::line_column(text, e.byte > 0 ? e.byte - 1 : 0);
      throw UsageError("config: malformed JSON at line " + std::to_string(line) + ", column " + std::to_string(col));
    }
    return from_json(doc);
  }

  static ExperimentConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("config: cannot read '" + path + "'");
    std::stringstream s;
    s << in.rdbuf();
    return parse(s.str());
  }

  void validate() const {
    const auto& p = params;
    for (const char* key : {"tol", "horizon", "T", "residual_tol", "martingale_tol", "z", "floor", "a"})
      detail::require_positive(p, key);
    for (const char* key : {"trials", "paths", "steps", "selections", "N", "M", "K", "max_iter", "dims", "max_box_dim"})
      detail::require_count(p, key);
    if (p.contains("box_trials") && p["box_trials"].get<std::int64_t>() < 0) throw UsageError("field 'box_trials' must be >= 0");
    if (p.contains("ridge") && !(p["ridge"].get<double>() >= 0)) throw UsageError("field 'ridge' must be >= 0");
    if (p.contains("b") && p["b"].is_number() && command == "ito-verify" && !(p["b"].get<double>() > 0))
      throw UsageError("field 'b' must be > 0");
    if (p.contains("seed") && p["seed"].get<std::int64_t>() < 0) throw UsageError("field 'seed' must be >= 0");
  }
};

}  // namespace svito
