// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <nlohmann/json.hpp>

#include "favard/favard_crofton.hpp"
#include "favard/graph_extract.hpp"
#include "favard/scene.hpp"
#include "favard/structure_analyzer.hpp"

namespace favard {

// Report layout (schema "1"): a JSON object with sorted keys
//   schema_version, command, config (fully resolved), scene {polylines,
//   segments, h1_length, bounding_radius}, result {...}, artifacts [csv names].
// The thread count is deliberately absent so reports compare byte for byte.

inline nlohmann::json to_json(Vec2 p) { return nlohmann::json::array({p.x, p.y}); }

inline nlohmann::json to_json(const AffineLine& l) { return {{"theta", l.theta.value()}, {"t", l.t}}; }

inline nlohmann::json to_json(const FavardReport& r) {
  return {{"favard", r.favard},
          {"crofton", r.crofton},
          {"h1_length", r.h1_length},
          {"defect", r.defect},
          {"quadrature_error_estimate", r.quadrature_error_estimate}};
}

inline nlohmann::json to_json(const GraphCover& g) {
  return {{"graph_mass", g.graph_points.total_mass()},
          {"graph_points", g.graph_points.size()},
          {"removed_mass", g.removed_mass()},
          {"removed_high_density_mass", g.removed_high_density_mass},
          {"total_mass", g.total_mass()},
          {"lipschitz_constant", g.lipschitz_constant},
          {"base_line_angle", g.base_line_angle.value()},
          {"beta", g.beta},
          {"eps", g.eps},
          {"cone_condition_ok", cone_condition_check(g.graph_points, 2 * g.beta, g.axis()).ok}};
}

inline nlohmann::json to_json(const HeavyBall& b) {
  return {{"center", to_json(b.center)}, {"mass", b.mass}, {"dominant_bucket", b.dominant}, {"line", to_json(b.line)}};
}

inline nlohmann::json to_json(const Witness& w) {
  nlohmann::json bk = nlohmann::json::array(), bl = nlohmann::json::array();
  for (const auto& b : w.balls_k) bk.push_back(to_json(b));
  for (const auto& b : w.balls_l) bl.push_back(to_json(b));
  return {{"k", w.k},
          {"l", w.l},
          {"balls_k", bk},
          {"balls_l", bl},
          {"i0", w.i0},
          {"j0", w.j0},
          {"tube_k_meets_ball_l", w.tube_k_meets_ball_l},
          {"tube_l_meets_ball_k", w.tube_l_meets_ball_k},
          {"line_k", to_json(w.line_k)},
          {"line_l", to_json(w.line_l)},
          {"inner_halfwidth", w.inner_halfwidth},
          {"outer_halfwidth", w.outer_halfwidth},
          {"G_k_mass", w.G_k.total_mass()},
          {"G_l_mass", w.G_l.total_mass()},
          {"G_k_pieces", w.G_k_pieces.size()},
          {"G_l_pieces", w.G_l_pieces.size()},
          {"alpha", w.alpha},
          {"mass_threshold", w.mass_threshold},
          {"separation", w.separation},
          {"eta_lower", w.eta_lower}};
}

inline nlohmann::json to_json(const AnalysisReport& r) {
  nlohmann::json j{{"outcome", r.outcome == AnalysisReport::Outcome::Cover ? "cover" : "witness"},
                   {"case", r.split.kind == CaseSplit::Kind::Case1 ? "Case1" : "Case2"},
                   {"eps", r.eps},
                   {"alpha", r.alpha},
                   {"implied_eps", r.config.C_alp * std::pow(r.alpha, 0.1)},
                   {"M2", r.M2},
                   {"M3", r.M3},
                   {"minigraph_count", r.minigraph_count},
                   {"favard", to_json(r.favard)}};
  if (r.split.kind == CaseSplit::Kind::Case1) {
    j["window"] = r.split.window;
    j["complement_mass"] = r.split.complement_mass;
    j["cover_alpha"] = r.cover_alpha;
    j["window_mass"] = r.window_mass;
    j["uncovered_mass"] = r.uncovered_mass;
    j["discretization_slack"] = r.discretization_slack;
    j["cover"] = r.cover ? to_json(*r.cover) : nlohmann::json(nullptr);
  } else {
    j["k"] = r.split.k;
    j["l"] = r.split.l;
    j["certificate"] = r.certificate;
    j["defect_measured"] = r.defect_measured;
    j["witness"] = r.witness ? to_json(*r.witness) : nlohmann::json(nullptr);
  }
  return j;
}

inline nlohmann::json scene_summary(const SegmentSet& E) {
  return {{"polylines", E.polylines().size()},
          {"segments", E.segments().size()},
          {"h1_length", E.total_length()},
          {"bounding_radius", E.bounding_radius()}};
}

inline nlohmann::json make_report(const std::string& command, const AnalysisConfig& cfg, const SegmentSet& E,
                                  nlohmann::json result, nlohmann::json artifacts = nlohmann::json::array()) {
  return {{"schema_version", kSchemaVersion},
          {"command", command},
          {"config", config_to_json(cfg)},
          {"scene", scene_summary(E)},
          {"result", std::move(result)},
          {"artifacts", std::move(artifacts)}};
}

}  // namespace favard
