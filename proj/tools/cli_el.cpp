// `elk el compute` / `elk el sweep`: extremal length of a multicurve file on
// a surface file, one-shot or as a resolution sweep (CSV for plots).

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "cli_registry.hpp"
#include "elk/curve_io.hpp"
#include "elk/el.hpp"
#include "elk/surface_io.hpp"
#include "json.hpp"

namespace elk_cli {

namespace {

struct ElArgs {
  std::string surface, multicurve, out;
  int resolution = 3;
  double tol = 1e-6;
  bool force_discrete = false;
  int depth_cap = 8;
  std::vector<int> resolutions;  // sweep only
};

// Resolve the file's curve names against the engine registry ("h" is
// accepted for the unique band) and fold into a multicurve over it.
elk::WeightedMulticurve bind_to_engine(const std::vector<elk::MulticurveEntry>& entries,
                                       const elk::ELEngine& eng) {
  elk::WeightedMulticurve F;
  F.system = &eng.system();
  for (const auto& e : entries) {
    int id = eng.class_of(e.curve);
    if (id < 0) elk::fail("io_bad_multicurve", "unknown curve '" + e.curve + "'");
    F.components.push_back({id, elk::frac_to_double(e.weight), e.weight});
  }
  return F;
}

void write_out(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::fputs(text.c_str(), stdout);
    return;
  }
  std::ofstream out(path);
  if (!out) elk::fail("io_write_failed", "cannot open '" + path + "' for writing");
  out << text;
}

std::string result_json(const elk::ELEngine& eng, const elk::ELResult& r) {
  nlohmann::ordered_json j;
  j["value"] = elk::fmt_real(r.value);
  j["gap"] = elk::fmt_real(r.gap);
  j["resolution"] = r.resolution;
  nlohmann::ordered_json act = nlohmann::ordered_json::array();
  for (const elk::ActiveCycle& a : r.active_cycles) {
    nlohmann::ordered_json e;
    e["curve"] = eng.system().curves.at(a.curve);
    e["mass"] = elk::fmt_real(a.mass);
    e["length"] = elk::fmt_real(a.length);
    e["crossings"] = a.cycle.steps.size();
    act.push_back(std::move(e));
  }
  j["active_cycles"] = std::move(act);
  nlohmann::ordered_json metric = nlohmann::ordered_json::array();
  for (double v : r.metric) metric.push_back(elk::fmt_real(v));
  j["metric"] = std::move(metric);
  return j.dump(2) + "\n";
}

}  // namespace

void register_el(CLI::App& app) {
  auto* el = app.add_subcommand("el", "extremal length of a weighted multicurve");
  el->require_subcommand(1);
  auto args = std::make_shared<ElArgs>();

  auto add_common = [args](CLI::App* cmd) {
    cmd->add_option("--surface", args->surface, "flat surface JSON")->required();
    cmd->add_option("--multicurve", args->multicurve, "multicurve JSON")->required();
    cmd->add_option("--tol", args->tol, "relative duality-gap target");
    cmd->add_flag("--force-discrete", args->force_discrete,
                  "run the QP even where a closed form exists");
    cmd->add_option("--depth-cap", args->depth_cap, "annular cover growth cap");
    cmd->add_option("-o,--out", args->out, "output path (default: stdout)");
  };

  auto* compute = el->add_subcommand("compute", "one resolution, full result as JSON");
  add_common(compute);
  compute->add_option("--resolution", args->resolution, "mesh refinement level");
  compute->callback([args] {
    elk::FlatSurface X = elk::read_flat_surface_file(args->surface);
    auto entries = elk::read_multicurve_entries_file(args->multicurve);
    elk::OracleOptions oo;
    oo.depth_cap = args->depth_cap;
    elk::ELEngine eng(X, args->resolution, oo);
    elk::ELOptions opt;
    opt.tolerance = args->tol;
    opt.force_discrete = args->force_discrete;
    elk::ELResult r = eng.compute(bind_to_engine(entries, eng), opt);
    write_out(args->out, result_json(eng, r));
  });

  auto* sweep = el->add_subcommand("sweep", "value and gap per resolution, as CSV");
  add_common(sweep);
  sweep->add_option("--resolutions", args->resolutions, "levels to sweep (default 0..3)")
      ->delimiter(',');
  sweep->callback([args] {
    elk::FlatSurface X = elk::read_flat_surface_file(args->surface);
    auto entries = elk::read_multicurve_entries_file(args->multicurve);
    std::vector<int> levels = args->resolutions;
    if (levels.empty()) levels = {0, 1, 2, 3};
    std::string csv = "resolution,value,gap\n";
    for (int r : levels) {
      elk::OracleOptions oo;
      oo.depth_cap = args->depth_cap;
      elk::ELEngine eng(X, r, oo);
      elk::ELOptions opt;
      opt.tolerance = args->tol;
      opt.force_discrete = args->force_discrete;
      elk::ELResult res = eng.compute(bind_to_engine(entries, eng), opt);
      csv += std::to_string(r) + "," + elk::fmt_real(res.value) + "," +
             elk::fmt_real(res.gap) + "\n";
    }
    write_out(args->out, csv);
  });
}

}  // namespace elk_cli
