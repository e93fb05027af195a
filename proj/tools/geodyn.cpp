#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "geodyn/scenario.hpp"

namespace {

void print_diagnostics(const std::vector<geodyn::Diagnostic>& diags) {
  for (const auto& d : diags) std::cerr << "  " << (d.path.empty() ? "<root>" : d.path) << ": " << d.message << "\n";
}

int run(const std::string& source, const std::string& out, std::optional<int> grid,
        std::optional<std::uint64_t> seed) {
  try {
    const auto config = geodyn::load_config(source);
    const geodyn::RunReport report = geodyn::run_scenario(config, {grid, seed});
    std::cout << report.text();
    if (!out.empty()) {
      for (const auto& p : geodyn::write_artifacts(report, out)) std::cout << "wrote " << p << "\n";
    }
    return report.passed() ? 0 : 1;
  } catch (const geodyn::ConfigError& e) {
    std::cerr << "invalid configuration " << source << ":\n";
    print_diagnostics(e.diagnostics());
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

int validate(const std::string& source) {
  try {
    const auto diags = geodyn::validate_config(geodyn::load_config(source));
    if (diags.empty()) {
      std::cout << source << ": valid\n";
      return 0;
    }
    std::cerr << source << ": " << diags.size() << (diags.size() == 1 ? " problem" : " problems") << "\n";
    print_diagnostics(diags);
  } catch (const geodyn::ConfigError& e) {
    std::cerr << source << ": cannot parse\n";
    print_diagnostics(e.diagnostics());
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"geodyn: generalized-derivative geometry, spectral action and field-equation checks"};
  app.require_subcommand(1);

  std::string source, out;
  std::optional<int> grid;
  std::optional<std::uint64_t> seed;
  auto* run_cmd = app.add_subcommand("run", "run every task of a configuration file or builtin scenario");
  run_cmd->add_option("config", source, "configuration file, builtin name or builtin:NAME")->required();
  run_cmd->add_option("--out", out, "directory for report.txt and the CSV tables");
  run_cmd->add_option("--grid", grid, "coarse nodes per axis for grid integrals")->check(CLI::Range(2, 1025));
  run_cmd->add_option("--seed", seed, "seed for randomized oracles");

  std::string vsource;
  auto* validate_cmd = app.add_subcommand("validate", "check a configuration and list every problem");
  validate_cmd->add_option("config", vsource, "configuration file, builtin name or builtin:NAME")->required();

  auto* list_cmd = app.add_subcommand("list-builtins", "list the builtin scenarios");
  bool show_json = false;
  list_cmd->add_flag("--json", show_json, "print the configuration of each builtin");

  CLI11_PARSE(app, argc, argv);

  if (*run_cmd) return run(source, out, grid, seed);
  if (*validate_cmd) return validate(vsource);
  for (const auto& b : geodyn::builtin_scenarios()) {
    std::printf("%-20s %s\n", b.name.c_str(), b.description.c_str());
    if (show_json) std::printf("%s\n\n", b.json.c_str());
  }
  return 0;
}
