// SPDX-License-Identifier: Apache-2.0
// favard_lab: command-line front end. Exit codes: 0 success, 1 usage or input
// error, 2 error raised by an analysis stage.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "favard/conical_density.hpp"
#include "favard/favard_crofton.hpp"
#include "favard/graph_extract.hpp"
#include "favard/grid_example.hpp"
#include "favard/line_pair_measure.hpp"
#include "favard/parallel.hpp"
#include "favard/report.hpp"
#include "favard/scene.hpp"
#include "favard/structure_analyzer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace favard;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitStage = 2;
constexpr int kProfilePanels = 256;
constexpr std::int64_t kPairMonteCarloSamples = 1000000;

struct Options {
  std::string command;
  std::string scene_path, config_path, out_dir;
  std::optional<double> eps, alpha;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  bool csv = false;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Inputs {
  std::optional<Scene> scene;
  AnalysisConfig cfg;
  double eps = 0.0;
};

Inputs load(const Options& o) {
  Inputs in;
  in.cfg = AnalysisConfig::desk_profile();
  if (!o.scene_path.empty()) {
    in.scene = parse_scene(read_file(o.scene_path));
    in.cfg = apply_config(in.cfg, in.scene->config_overrides);
  } else if (o.command != "grid-sweep") {
    throw UsageError("--scene is required for '" + o.command + "'");
  }
  if (!o.config_path.empty()) {
    const std::string text = read_file(o.config_path);
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ParseError("config", e.what());
    }
    in.cfg = apply_config(in.cfg, j, text);
  }
  if (o.alpha) in.cfg.alpha = *o.alpha;
  if (o.seed) in.cfg.seed = *o.seed;
  in.cfg.validate();
  in.eps = o.eps.value_or(in.cfg.eps_target);
  if (!(in.eps > 0)) throw UsageError("--eps must be positive");
  return in;
}

// Collects CSV artifacts; they are written only with --csv.
class Artifacts {
 public:
  explicit Artifacts(const Options& o) : dir_(o.out_dir.empty() ? fs::path(".") : fs::path(o.out_dir)), on_(o.csv) {}

  void add(const std::string& name, const std::function<void(std::ostream&)>& write) {
    if (!on_) return;
    std::ofstream f(dir_ / name, std::ios::binary);
    if (!f) throw UsageError("cannot write '" + (dir_ / name).string() + "'");
    write(f);
    names_.push_back(name);
  }
  json names() const { return names_; }

 private:
  fs::path dir_;
  bool on_;
  json names_ = json::array();
};

json cmd_favard(const SegmentSet& E, const AnalysisConfig& cfg, Artifacts& art) {
  art.add("favard_profile.csv", [&](std::ostream& os) { write_profile_csv(os, favard_profile(E, kProfilePanels)); });
  return to_json(favard_report(E, cfg.quad));
}

json cmd_defect(const SegmentSet& E, const AnalysisConfig& cfg, Artifacts& art) {
  const auto d = favard_defect(E, cfg.quad);
  const auto f = favard_length(E, cfg.quad);
  art.add("defect_profile.csv", [&](std::ostream& os) { write_profile_csv(os, favard_profile(E, kProfilePanels)); });
  return {{"defect", d.value},
          {"defect_error_estimate", d.error_estimate},
          {"two_h1_minus_favard", 2 * E.total_length() - f.value},
          {"favard", f.value},
          {"h1_length", E.total_length()}};
}

json cmd_crofton(const SegmentSet& E, const AnalysisConfig& cfg, Artifacts& art) {
  const auto q = crofton_integral_quadrature(E, cfg.quad);
  art.add("crofton_profile.csv", [&](std::ostream& os) { write_profile_csv(os, favard_profile(E, kProfilePanels)); });
  return {{"crofton_closed_form", crofton_integral(E)},
          {"crofton_quadrature", q.value},
          {"quadrature_error_estimate", q.error_estimate},
          {"h1_length", E.total_length()},
          {"abs_difference", std::abs(q.value - crofton_integral(E))}};
}

json cmd_density(const SegmentSet& E, const AnalysisConfig& cfg, double eps, Artifacts& art) {
  const double beta = std::min(1.0, cfg.C_lip * cfg.alpha / 2);
  const double step = cfg.step_for(E);
  const auto rows = density_profile(E, beta, step);
  const WeightedCloud cloud = sample_cloud(E, step);
  double peak = 0.0, high = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    peak = std::max(peak, rows[i].theta_star);
    if (rows[i].theta_star >= eps) {
      high += cloud.points[i].weight;
      ++count;
    }
  }
  art.add("density.csv", [&](std::ostream& os) { write_density_csv(os, rows); });
  return {{"beta", beta},
          {"eps", eps},
          {"step", step},
          {"samples", rows.size()},
          {"max_density", peak},
          {"high_density_points", count},
          {"high_density_mass", high}};
}

json cmd_extract(const SegmentSet& E, const AnalysisConfig& cfg, double eps, Artifacts& art) {
  if (E.empty()) throw EmptyResult("extract-graph", "scene is empty");
  std::vector<double> dirs;
  for (const auto& s : E.segments()) dirs.push_back(s.direction_angle());
  const auto [base, half] = minimal_direction_arc(dirs);
  const double alpha = std::max(cfg.alpha, std::tan(half));
  const GraphCover g = cover_by_single_graph(E, alpha, eps, Angle(base), cfg);
  art.add("extract_graph.csv", [&](std::ostream& os) {
    os << "s,x,y,weight,in_graph\n";
    os.precision(17);
    for (const auto* part : {&g.graph_points, &g.removed})
      for (const auto& q : part->points)
        os << q.arclength << ',' << q.p.x << ',' << q.p.y << ',' << q.weight << ',' << (part == &g.graph_points) << '\n';
  });
  json j = to_json(g);
  j["alpha"] = alpha;
  return j;
}

json cmd_analyze(const SegmentSet& E, const AnalysisConfig& cfg, double eps, Artifacts& art) {
  const AnalysisReport r = analyze(E, eps, cfg);
  art.add("analyze_points.csv", [&](std::ostream& os) {
    os << "set,x,y,weight\n";
    os.precision(17);
    auto dump = [&](const char* tag, const WeightedCloud& c) {
      for (const auto& q : c.points) os << tag << ',' << q.p.x << ',' << q.p.y << ',' << q.weight << '\n';
    };
    if (r.cover) {
      dump("graph", r.cover->graph_points);
      dump("removed", r.cover->removed);
    }
    if (r.witness) {
      dump("G_k", r.witness->G_k);
      dump("G_l", r.witness->G_l);
    }
  });
  return to_json(r);
}

json cmd_pair(const SegmentSet& E, const AnalysisConfig& cfg, Artifacts& art) {
  const auto& P = E.polylines();
  if (P.size() != 2) throw ValidationError("pair-measure", "scene must contain exactly two curves");
  const CurveWithTangents G1(P[0]), G2(P[1]);
  const auto f = pair_line_measure_formula(G1, G2);
  const auto mc = monte_carlo_pair_measure(G1, G2, kPairMonteCarloSamples, cfg.seed);
  json j{{"formula", f.value},
         {"formula_error_estimate", f.error_estimate},
         {"monte_carlo", mc.estimate},
         {"monte_carlo_stderr", mc.stderr_},
         {"monte_carlo_samples", kPairMonteCarloSamples},
         {"oracle", nullptr}};
  if (P[0].edges().size() == 1 && P[1].edges().size() == 1) {
    const Segment S1 = P[0].edges()[0], S2 = P[1].edges()[0];
    const auto o = pair_line_measure_oracle(S1, S2, cfg.quad);
    j["oracle"] = o.value;
    j["oracle_error_estimate"] = o.error_estimate;
    art.add("pair_overlap.csv", [&](std::ostream& os) { write_overlap_csv(os, overlap_profile(S1, S2, kProfilePanels)); });
  }
  return j;
}

json cmd_grid(const std::optional<Scene>& scene, const AnalysisConfig& cfg, Artifacts& art) {
  GridSweepConfig g;
  g.seed = cfg.seed;
  if (scene && scene->generator) {
    g.ns = {scene->generator->n};
    g.poly_sides = scene->generator->poly_sides;
  } else if (scene) {
    throw ValidationError("grid-sweep", "scene must use the grid generator");
  }
  const auto rows = grid_sweep(g);
  art.add("grid_sweep.csv", [&](std::ostream& os) { write_grid_csv(os, rows); });
  json out = json::array();
  for (const auto& r : rows)
    out.push_back({{"n", r.n},
                   {"fav", r.fav},
                   {"I1", r.I1},
                   {"I1_stderr", r.I1_stderr},
                   {"inv_energy", r.inv_energy},
                   {"max_lip_mass", r.max_lip_mass},
                   {"max_random_lip_mass", r.max_random_lip_mass}});
  return {{"rows", out}, {"poly_sides", g.poly_sides}, {"mc_samples", g.mc_samples}, {"trials", g.trials}, {"M", g.M}};
}

int run(const Options& o) {
  Inputs in;
  try {
    if (o.threads) {
      set_thread_count(*o.threads);
    } else if (const char* env = std::getenv("FAVARD_LAB_THREADS")) {
      try {
        set_thread_count(std::stoi(env));
      } catch (const std::exception&) {
        throw UsageError("FAVARD_LAB_THREADS must be an integer");
      }
    }
    in = load(o);
    if (!o.out_dir.empty()) fs::create_directories(o.out_dir);
  } catch (const UsageError& e) {
    std::cerr << "favard_lab: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "favard_lab: input error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "favard_lab: " << e.what() << '\n';
    return kExitUsage;
  }

  const SegmentSet E = in.scene ? in.scene->E : SegmentSet{};
  Artifacts art(o);
  json result;
  try {
    if (o.command == "favard") result = cmd_favard(E, in.cfg, art);
    else if (o.command == "defect") result = cmd_defect(E, in.cfg, art);
    else if (o.command == "crofton-check") result = cmd_crofton(E, in.cfg, art);
    else if (o.command == "density") result = cmd_density(E, in.cfg, in.eps, art);
    else if (o.command == "extract-graph") result = cmd_extract(E, in.cfg, in.eps, art);
    else if (o.command == "analyze") result = cmd_analyze(E, in.cfg, in.eps, art);
    else if (o.command == "pair-measure") result = cmd_pair(E, in.cfg, art);
    else result = cmd_grid(in.scene, in.cfg, art);
  } catch (const UsageError& e) {
    std::cerr << "favard_lab: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "favard_lab: stage error: " << e.what() << '\n';
    return kExitStage;
  }

  const std::string text = make_report(o.command, in.cfg, E, std::move(result), art.names()).dump(2) + "\n";
  if (o.out_dir.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(fs::path(o.out_dir) / "report.json", std::ios::binary);
    f << text;
    if (!f) {
      std::cerr << "favard_lab: cannot write report\n";
      return kExitUsage;
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Favard length, Crofton and structure analysis of planar segment sets"};
  Options o;
  app.add_option("command", o.command, "Command to run")
      ->required()
      ->check(CLI::IsMember({"favard", "defect", "crofton-check", "density", "extract-graph", "analyze", "pair-measure",
                             "grid-sweep"}));
  app.add_option("--scene", o.scene_path, "Scene JSON file");
  app.add_option("--config", o.config_path, "Config JSON file applied over the scene's overrides");
  app.add_option("--eps", o.eps, "Target epsilon (default: config eps_target)");
  app.add_option("--alpha", o.alpha, "Minigraph angle tolerance");
  app.add_option("--seed", o.seed, "Random seed");
  app.add_option("--threads", o.threads, "Worker threads (fallback: FAVARD_LAB_THREADS)")->check(CLI::PositiveNumber);
  app.add_option("--out", o.out_dir, "Output directory for report.json and CSV files (default: report to stdout)");
  app.add_flag("--csv", o.csv, "Write CSV plot data");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUsage;
  }
  return run(o);
}
