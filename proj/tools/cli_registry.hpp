#pragma once

// Each module's subcommands are registered from its own cli_*.cpp so
// elk_main stays a thin shell.  Registration must not do work; callbacks
// may throw elk::Error, which main maps to exit code 1.

namespace CLI {
class App;
}

namespace elk_cli {

void register_surface(CLI::App& app);  // validate, template
void register_el(CLI::App& app);       // el compute|sweep

}  // namespace elk_cli
