// elk — command line front end for the flat-surface extremal length library.
//
// Exit codes: 0 = success / property holds, 1 = violation or hard error,
// 2 = inconclusive (a probe that neither confirmed nor refuted).

#include <CLI11.hpp>

#include <cstdio>
#include <exception>

#include "cli_registry.hpp"
#include "elk/types.hpp"

int main(int argc, char** argv) {
  CLI::App app{"extremal length on flat surfaces"};
  app.set_version_flag("--version", "elk 0.1.0");
  app.require_subcommand(0, 1);

  elk_cli::register_surface(app);
  elk_cli::register_el(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const elk::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 1;
  }
  if (app.get_subcommands().empty()) std::puts(app.help().c_str());
  return 0;
}
