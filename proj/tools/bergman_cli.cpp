// Command-line front end for the harness: sweep, verify, diag, count.

#include <omp.h>

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "bergman/errors.hpp"
#include "bergman/harness.hpp"

namespace {

using namespace bergman;

struct GlobalFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::size_t> cap;
  bool no_cache = false;
  int threads = 0;
  std::vector<std::string> settings;
};

SweepConfig resolve_config(const GlobalFlags& g) {
  SweepConfig config = g.config_path.empty() ? SweepConfig{} : load_config(g.config_path);
  for (const auto& s : g.settings) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
    apply_setting(config, s.substr(0, eq), s.substr(eq + 1));
  }
  if (g.seed) config.seed = *g.seed;
  if (!g.out.empty()) config.output = g.out;
  if (g.cap) config.element_cap = *g.cap;
  if (g.no_cache) config.use_cache = false;
  return config;
}

void emit(const ResultSet& result, const std::string& path) {
  if (path.empty() || path == "-") {
    write_csv(std::cout, result);
    return;
  }
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  write_csv(out, result);
}

int finish_run(const ResultSet& result, const std::string& path) {
  emit(result, path);
  if (result.resource_capped) {
    std::cerr << "bergman: some rows hit the element cap; see the error column\n";
    return exit_resource;
  }
  return exit_pass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bergman kernel sweeps over Fuchsian group models"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags g;
  app.add_option("--config", g.config_path, "config file (key = value lines)");
  app.add_option("--seed", g.seed, "random seed for pair sampling");
  app.add_option("--out", g.out, "output CSV path (default: stdout)");
  app.add_option("--cap", g.cap, "element cap per enumerated ball");
  app.add_flag("--no-cache", g.no_cache, "do not read or write the ball cache");
  app.add_option("--threads", g.threads, "OpenMP thread count (default: runtime choice)");
  app.add_option("--set", g.settings, "override a config key, key=value (repeatable)");

  auto* sweep = app.add_subcommand("sweep", "evaluate kernel norms against the theorem bounds");
  auto* diag = app.add_subcommand("diag", "diagonal growth study");
  auto* count = app.add_subcommand("count", "counting-inequality study");
  auto* verify_cmd = app.add_subcommand("verify", "check a sweep CSV (or run the configured sweep inline)");
  std::string in_path;
  verify_cmd->add_option("--in", in_path, "CSV produced by sweep, diag or count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_pass : exit_usage;
  }

  try {
    if (g.threads > 0) omp_set_num_threads(g.threads);
    if (*verify_cmd) {
      ResultSet result;
      if (!in_path.empty()) {
        std::ifstream in(in_path);
        if (!in) throw ConfigError("cannot open '" + in_path + "'");
        result = read_csv(in);
      } else if (!g.config_path.empty()) {
        result = run_sweep(resolve_config(g));
      } else {
        throw ConfigError("verify needs --in CSV or --config for an inline sweep");
      }
      const VerificationReport report = verify(result);
      for (const auto& line : report.lines) std::cout << line << '\n';
      return report.exit_status();
    }
    const SweepConfig config = resolve_config(g);
    if (*sweep) return finish_run(run_sweep(config), config.output);
    if (*diag) return finish_run(run_diag(config), config.output);
    if (*count) return finish_run(run_count(config), config.output);
  } catch (const ResourceError& e) {
    std::cerr << "bergman: " << e.what() << '\n';
    return exit_resource;
  } catch (const ConfigError& e) {
    std::cerr << "bergman: " << e.what() << '\n';
    return exit_usage;
  } catch (const PreconditionError& e) {
    std::cerr << "bergman: " << e.what() << '\n';
    return exit_usage;
  }
  return exit_usage;
}
