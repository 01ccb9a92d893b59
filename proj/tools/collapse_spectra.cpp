#include "collapse/errors.hpp"
#include "collapse/scenarios.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace collapse;

namespace {

constexpr int kPass = 0, kCheckFailed = 1, kConfigError = 2;

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string eps_grid;
};

void add_common(CLI::App* sub, Options& o, bool eps) {
  sub->add_option("--config", o.config, "JSON config file")->check(CLI::ExistingFile);
  sub->add_option("--out", o.out, "output directory");
  sub->add_option("--seed", o.seed, "random seed");
  if (eps) sub->add_option("--eps-grid", o.eps_grid, "comma-separated eps values in (0,1]");
}

// --out, then COLLAPSE_SPECTRA_OUT, then the config file, then ./collapse-out.
fs::path output_root(const Options& o, const std::string& from_config) {
  if (!o.out.empty()) return o.out;
  if (const char* env = std::getenv("COLLAPSE_SPECTRA_OUT"); env && *env) return env;
  if (!from_config.empty()) return from_config;
  return "collapse-out";
}

int run_one(const std::string& name, const Options& o) {
  cli::ScenarioConfig cfg =
      cli::make_config(name, o.config.empty() ? cli::Json::object() : cli::read_config_file(o.config));
  if (o.seed) cfg.seed = *o.seed;
  if (!o.eps_grid.empty()) cli::override_eps_grid(cfg, cli::parse_eps_list(o.eps_grid));
  const fs::path dir = output_root(o, cfg.out_dir) / name;
  const cli::RunManifest m = cli::run_scenario(cfg, dir);
  for (const auto& c : m.checks) std::printf("[%s] %-32s margin=%.4g\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.margin);
  std::printf("%s: %s  (%zu artifacts in %s, config %s)\n", name.c_str(), m.pass() ? "pass" : "FAIL",
              m.artifacts.size(), dir.string().c_str(), m.config_hash.c_str());
  return m.pass() ? kPass : kCheckFailed;
}

int run_verify_all(const Options& o) {
  std::uint64_t seed = verify::kDefaultSeed;
  std::string out_from_config;
  if (!o.config.empty()) {
    const cli::Json j = cli::read_config_file(o.config);
    if (!j.is_object()) throw ConfigInvalid("config: top level must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it.key() == "seed") {
        if (!it->is_number_unsigned()) throw ConfigInvalid("seed: expected a nonnegative integer");
        seed = it->get<std::uint64_t>();
      } else if (it.key() == "out") {
        if (!it->is_string()) throw ConfigInvalid("out: expected a string");
        out_from_config = it->get<std::string>();
      } else {
        throw ConfigInvalid(it.key() + ": verify-all only takes 'seed' and 'out'");
      }
    }
  }
  if (o.seed) seed = *o.seed;
  const cli::VerifySummary s = cli::verify_all(seed);
  for (const auto& c : s.criteria) std::puts(cli::criterion_line(c).c_str());
  const fs::path dir = output_root(o, out_from_config) / "verify-all";
  cli::write_result(s.result, dir);
  std::printf("verify-all: %s in %.1f s (summary in %s)\n", s.pass() ? "pass" : "FAIL", s.seconds, dir.string().c_str());
  return s.pass() ? kPass : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Invariant Laplacian spectra on collapsing torus bundles"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  Options opts;
  std::string chosen;
  app.add_subcommand("list", "list scenarios with their defaults")->callback([&] { chosen = "list"; });
  auto* va = app.add_subcommand("verify-all", "run every acceptance criterion");
  add_common(va, opts, false);
  va->callback([&] { chosen = "verify-all"; });
  for (const auto& info : cli::list_scenarios()) {
    auto* sub = app.add_subcommand(info.name, "scenario (" + info.theorem + ")");
    add_common(sub, opts, info.defaults.contains("eps_grid"));
    sub->callback([&chosen, name = info.name] { chosen = name; });
  }

  if (argc > 1 && argv[1][0] != '-') {
    const std::string first = argv[1];
    if (first != "list" && first != "verify-all") {
      try {
        cli::find_scenario(first);
      } catch (const ScenarioUnknown& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kConfigError;
      }
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (chosen == "list") {
      for (const auto& info : cli::list_scenarios())
        std::printf("%-16s %-28s %s\n", info.name.c_str(), info.theorem.c_str(), info.defaults.dump().c_str());
      return kPass;
    }
    if (chosen == "verify-all") return run_verify_all(opts);
    return run_one(chosen, opts);
  } catch (const ConfigInvalid& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const ScenarioUnknown& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kConfigError;
  } catch (const Error& e) {
    // Library preconditions tripped by user-supplied parameters.
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return kConfigError;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "output error: %s\n", e.what());
    return kConfigError;
  }
}
