// Surface-level subcommands: `elk validate` (invariant check + Gauss-Bonnet
// ledger) and `elk template` (emit one of the built-in families as JSON).

#include <CLI11.hpp>

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "cli_registry.hpp"
#include "elk/flat_surface.hpp"
#include "elk/surface_io.hpp"
#include "elk/templates.hpp"

namespace elk_cli {

namespace {

void print_ledger(const elk::FlatSurface& X) {
  std::printf("surface: genus %d, %d punctures, %zu cylinders, area %s\n",
              X.kind.genus, X.kind.punctures, X.cylinders.size(),
              elk::fmt_real(X.area()).c_str());
  for (std::size_t j = 0; j < X.cylinders.size(); ++j) {
    int ji = static_cast<int>(j);
    std::printf("  cylinder %-8s circumference %-12s width %-12s modulus %-12s twist %s",
                X.cylinders[j].core.c_str(), elk::fmt_real(X.circumference(ji)).c_str(),
                elk::fmt_real(X.width(ji)).c_str(), elk::fmt_real(X.modulus(ji)).c_str(),
                elk::fmt_real(X.twist_len(ji)).c_str());
    if (X.cylinders[j].winding != 0)
      std::printf(" (+%lld full twists)", X.cylinders[j].winding);
    std::printf("\n");
  }
  elk::GaussBonnetLedger led = elk::gauss_bonnet_ledger(X);
  std::printf("cone points:\n");
  for (const auto& row : led.rows)
    std::printf("  %4s*pi  %2d ends  %-10s %s\n", elk::fmt_real(row.angle_pi).c_str(),
                row.ends, row.marked ? "puncture" : (row.angle_pi > 2 ? "zero" : "regular"),
                row.at.c_str());
  std::printf("angle excess total: %s*pi (expect 4g-4 = %d)\n",
              elk::fmt_real(led.total_excess).c_str(), 4 * led.genus - 4);
}

}  // namespace

void register_surface(CLI::App& app) {
  auto* val = app.add_subcommand("validate", "check a flat surface file and print its ledger");
  auto val_file = std::make_shared<std::string>();
  val->add_option("file", *val_file, "flat surface JSON")->required();
  val->callback([val_file] {
    elk::FlatSurface X = elk::read_flat_surface_file(*val_file);
    print_ledger(X);
    std::printf("ok\n");
  });

  auto* tpl = app.add_subcommand("template", "emit a built-in flat surface as JSON");
  struct TplArgs {
    std::string id;
    std::vector<double> moduli;
    std::string out;
  };
  auto targs = std::make_shared<TplArgs>();
  tpl->add_option("id", targs->id,
                  "torus | genus2_two_cylinder | s05_symmetric | theta_s12 | chain_<q>")
      ->required();
  tpl->add_option("--moduli", targs->moduli, "cylinder moduli, comma separated")
      ->delimiter(',');
  tpl->add_option("-o,--out", targs->out, "output path (default: stdout)");
  tpl->callback([targs] {
    std::vector<double> m = targs->moduli;
    if (m.empty()) {
      // every family has a canonical instance
      if (targs->id == "torus") m = {1.0};
      else if (targs->id.rfind("chain_", 0) == 0)
        m.assign(std::max(std::stoi(targs->id.substr(6)) - 3, 1), 1.0);
      else m = {1.0, 1.0};
    }
    elk::SurfaceBundle b = elk::make_template(targs->id, m);
    if (targs->out.empty())
      std::fputs(elk::write_flat_surface(b.surface).c_str(), stdout);
    else
      elk::write_flat_surface_file(b.surface, targs->out);
  });
}

}  // namespace elk_cli
