// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "favard/config.hpp"
#include "favard/errors.hpp"
#include "favard/geom_core.hpp"
#include "favard/grid_example.hpp"

namespace favard {

inline constexpr const char* kSchemaVersion = "1";

struct GridGenerator {
  int n = 2;
  int poly_sides = 32;
};

struct Scene {
  std::string schema_version = kSchemaVersion;
  SegmentSet E;
  std::optional<GridGenerator> generator;
  nlohmann::json config_overrides = nlohmann::json::object();
};

namespace detail {

// "line L, column C" of the first occurrence of "key" in the text.
inline std::string locate_key(const std::string& text, const std::string& key) {
  const auto pos = text.find('"' + key + '"');
  if (pos == std::string::npos) return "unknown position";
  int line = 1, col = 1;
  for (std::size_t i = 0; i < pos; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

inline void reject_unknown(const nlohmann::json& obj, const std::set<std::string>& allowed, const std::string& where,
                           const std::string& text) {
  if (!obj.is_object()) throw ParseError("scene", where + " must be an object");
  for (const auto& [k, v] : obj.items())
    if (!allowed.count(k)) throw ParseError("scene", locate_key(text, k) + ": unknown field '" + k + "' in " + where);
}

inline Vec2 parse_point(const nlohmann::json& p, const std::string& where) {
  if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
    throw ParseError("scene", where + ": a point is an array of two numbers");
  return {p[0].get<double>(), p[1].get<double>()};
}

template <class T>
T number(const nlohmann::json& j, const std::string& key) {
  const bool ok = std::is_same_v<T, bool> ? j.is_boolean() : std::is_integral_v<T> ? j.is_number_integer() : j.is_number();
  if (!ok) throw ParseError("config", "field '" + key + "' has the wrong type");
  return j.get<T>();
}

}  // namespace detail

// Applies the fields present in `j` on top of `base`. "profile" selects the
// starting point: "desk" (the default) or "default" (struct defaults).
inline AnalysisConfig apply_config(AnalysisConfig base, const nlohmann::json& j, const std::string& text = {}) {
  static const std::set<std::string> keys{
      "profile", "alpha",           "kappa",   "C_lip",      "C_sep",       "C_alp",          "C_thm",
      "alpha0",  "C_pipeline",      "C0",      "witness_C",  "mass_multiplier", "H_scale",     "eps_target",
      "sample_step", "alpha_from_eps", "seed", "quad"};
  detail::reject_unknown(j, keys, "config", text);
  if (j.contains("profile")) {
    const auto p = j["profile"].is_string() ? j["profile"].get<std::string>() : "";
    if (p == "desk")
      base = AnalysisConfig::desk_profile();
    else if (p == "default")
      base = AnalysisConfig{};
    else
      throw ParseError("config", "profile must be \"desk\" or \"default\"");
  }
  auto set = [&](const char* k, auto& field) {
    if (j.contains(k)) field = detail::number<std::decay_t<decltype(field)>>(j[k], k);
  };
  set("alpha", base.alpha);
  set("kappa", base.kappa);
  set("C_lip", base.C_lip);
  set("C_sep", base.C_sep);
  set("C_alp", base.C_alp);
  set("C_thm", base.C_thm);
  set("alpha0", base.alpha0);
  set("C_pipeline", base.C_pipeline);
  set("C0", base.C0);
  set("witness_C", base.witness_C);
  set("mass_multiplier", base.mass_multiplier);
  set("H_scale", base.H_scale);
  set("eps_target", base.eps_target);
  set("sample_step", base.sample_step);
  set("alpha_from_eps", base.alpha_from_eps);
  set("seed", base.seed);
  if (j.contains("quad")) {
    const auto& q = j["quad"];
    detail::reject_unknown(q, {"order", "initial_panels", "tol", "max_panels"}, "config.quad", text);
    if (q.contains("order")) base.quad.order = detail::number<int>(q["order"], "quad.order");
    if (q.contains("initial_panels")) base.quad.initial_panels = detail::number<int>(q["initial_panels"], "quad.initial_panels");
    if (q.contains("tol")) base.quad.tol = detail::number<double>(q["tol"], "quad.tol");
    if (q.contains("max_panels")) base.quad.max_panels = detail::number<int>(q["max_panels"], "quad.max_panels");
  }
  base.validate();
  return base;
}

inline nlohmann::json config_to_json(const AnalysisConfig& c) {
  return {{"alpha", c.alpha},
          {"kappa", c.kappa},
          {"C_lip", c.C_lip},
          {"C_sep", c.C_sep},
          {"C_alp", c.C_alp},
          {"C_thm", c.C_thm},
          {"alpha0", c.alpha0},
          {"C_pipeline", c.C_pipeline},
          {"C0", c.C0},
          {"witness_C", c.witness_C},
          {"mass_multiplier", c.mass_multiplier},
          {"H_scale", c.H_scale},
          {"eps_target", c.eps_target},
          {"sample_step", c.sample_step},
          {"alpha_from_eps", c.alpha_from_eps},
          {"seed", c.seed},
          {"quad", {{"order", c.quad.order}, {"initial_panels", c.quad.initial_panels}, {"tol", c.quad.tol},
                    {"max_panels", c.quad.max_panels}}}};
}

inline Scene parse_scene(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("scene", e.what());
  }
  detail::reject_unknown(j, {"schema_version", "segments", "polylines", "bounding_radius", "generator", "config"}, "scene",
                         text);
  Scene s;
  if (!j.contains("schema_version") || !j["schema_version"].is_string())
    throw ParseError("scene", "schema_version (string) is required");
  s.schema_version = j["schema_version"].get<std::string>();
  if (s.schema_version != kSchemaVersion)
    throw ParseError("scene", "unsupported schema_version '" + s.schema_version + "'");

  std::vector<Polyline> polys;
  if (j.contains("segments")) {
    if (!j["segments"].is_array()) throw ParseError("scene", "segments must be an array");
    for (std::size_t i = 0; i < j["segments"].size(); ++i) {
      const auto& e = j["segments"][i];
      const std::string where = "segments[" + std::to_string(i) + "]";
      if (!e.is_array() || e.size() != 2) throw ParseError("scene", where + ": a segment is a pair of points");
      polys.emplace_back(std::vector<Vec2>{detail::parse_point(e[0], where), detail::parse_point(e[1], where)});
    }
  }
  if (j.contains("polylines")) {
    if (!j["polylines"].is_array()) throw ParseError("scene", "polylines must be an array");
    for (std::size_t i = 0; i < j["polylines"].size(); ++i) {
      const auto& p = j["polylines"][i];
      const std::string where = "polylines[" + std::to_string(i) + "]";
      if (!p.is_array()) throw ParseError("scene", where + " must be an array of points");
      std::vector<Vec2> v;
      for (const auto& q : p) v.push_back(detail::parse_point(q, where));
      polys.emplace_back(std::move(v));
    }
  }
  double radius = 0.0;
  if (j.contains("bounding_radius")) {
    if (!j["bounding_radius"].is_number() || !(j["bounding_radius"].get<double>() > 0))
      throw ParseError("scene", "bounding_radius must be a positive number");
    radius = j["bounding_radius"].get<double>();
  }
  if (j.contains("generator")) {
    const auto& g = j["generator"];
    detail::reject_unknown(g, {"type", "n", "poly_sides"}, "generator", text);
    if (!g.contains("type") || g["type"] != "grid") throw ParseError("scene", "generator.type must be \"grid\"");
    GridGenerator gen;
    if (g.contains("n")) gen.n = detail::number<int>(g["n"], "generator.n");
    if (g.contains("poly_sides")) gen.poly_sides = detail::number<int>(g["poly_sides"], "generator.poly_sides");
    if (!polys.empty()) throw ParseError("scene", "a generator scene cannot also list segments or polylines");
    s.generator = gen;
    s.E = generate_grid_set(gen.n, gen.poly_sides).E;
  } else {
    s.E = SegmentSet(std::move(polys), radius);
  }
  if (j.contains("config")) {
    apply_config(AnalysisConfig::desk_profile(), j["config"], text);  // validate early
    s.config_overrides = j["config"];
  }
  return s;
}

inline nlohmann::json scene_to_json(const SegmentSet& E) {
  nlohmann::json polys = nlohmann::json::array();
  for (const auto& p : E.polylines()) {
    nlohmann::json v = nlohmann::json::array();
    for (const auto& q : p.vertices()) v.push_back({q.x, q.y});
    polys.push_back(v);
  }
  return {{"schema_version", kSchemaVersion}, {"polylines", polys}, {"bounding_radius", E.bounding_radius()}};
}

}  // namespace favard
