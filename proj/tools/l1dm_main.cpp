// Command-line driver: l1dm solve|sweep|exact|diagnose --config <path> [--out <dir>]

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "l1dm/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Sparse density matrices by l1-regularized trace minimization"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;

  using Command = int (*)(const l1dm::RunConfig&, std::ostream&);
  struct Entry {
    const char* name;
    const char* help;
    Command fn;
  };
  const Entry entries[] = {
      {"solve", "Run the split Bregman solver for a single mu", l1dm::cmd_solve},
      {"sweep", "Solve for every mu in solver.mu and summarize", l1dm::cmd_sweep},
      {"exact", "Exact density matrix from the lowest eigenvectors", l1dm::cmd_exact},
      {"diagnose", "Occupations, band occupations, projections, Ritz values",
       l1dm::cmd_diagnose},
  };

  Command selected = nullptr;
  for (const Entry& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    sub->add_option("--config", config_path, "Configuration file (key = value)")
        ->required();
    sub->add_option("--out", out_dir, "Output directory (overrides output.dir)");
    sub->callback([&selected, fn = e.fn] { selected = fn; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : l1dm::kExitInputError;
  }

  l1dm::RunConfig cfg;
  try {
    cfg = l1dm::load_config(config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return l1dm::kExitInputError;
  }
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  return selected(cfg, std::cerr);
}
