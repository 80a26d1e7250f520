#include "cogmc/experiments.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

namespace {

using cogmc::ConfigError;
using nlohmann::ordered_json;

int fail(const std::string& code, const std::string& msg, int status) {
  std::cerr << ordered_json{{"error", msg}, {"code", code}}.dump() << '\n';
  return status;
}

unsigned threads_from_env() {
  const char* raw = std::getenv("COGMC_THREADS");
  if (!raw || !*raw) return 0;
  char* end = nullptr;
  const long v = std::strtol(raw, &end, 10);
  if (*end != '\0' || v < 0) throw ConfigError("env", "COGMC_THREADS must be a non-negative integer");
  return static_cast<unsigned>(v);
}

int cmd_run(const std::string& config_path, const std::string& recipe,
            const std::optional<std::uint64_t>& seed, const std::string& out) {
  cogmc::ExperimentConfig cfg;
  if (!config_path.empty()) {
    cfg = cogmc::load_config(config_path);
    if (!recipe.empty()) {
      cogmc::find_recipe(recipe);
      cfg.recipe = recipe;
    }
  } else if (!recipe.empty()) {
    cfg = cogmc::find_recipe(recipe).defaults;
  } else {
    throw ConfigError("usage", "run needs --config, --recipe, or both");
  }
  if (cfg.recipe.empty()) throw ConfigError("missing_key", "/recipe: no recipe in config and no --recipe given");
  const cogmc::Recipe& r = cogmc::find_recipe(cfg.recipe);
  if (r.stochastic && !seed)
    throw ConfigError("missing_seed", "recipe " + r.name + " is stochastic and needs --seed");
  if (cfg.sim) cfg.sim->threads = threads_from_env();
  const std::string prefix = out.empty() ? cfg.output : out;
  if (prefix.empty()) throw ConfigError("usage", "no output prefix: pass --out or set /output");
  const cogmc::ExperimentOutput result = cogmc::run_experiment(cfg, seed);
  cogmc::write_outputs(result, prefix);
  std::cout << prefix << ".csv (" << result.table.rows.size() << " rows), " << prefix << ".json\n";
  return 0;
}

int cmd_list(bool as_json) {
  if (as_json) {
    ordered_json all = ordered_json::array();
    for (const auto& r : cogmc::list_recipes())
      all.push_back({{"name", r.name},
                     {"summary", r.summary},
                     {"stochastic", r.stochastic},
                     {"config", cogmc::to_json(r.defaults)}});
    std::cout << all.dump(2) << '\n';
    return 0;
  }
  for (const auto& r : cogmc::list_recipes())
    std::cout << std::left << std::setw(7) << r.name << (r.stochastic ? "[seed]  " : "        ")
              << r.summary << '\n';
  return 0;
}

int cmd_validate(const std::string& path) {
  const cogmc::ConfigValidation v = cogmc::validate_config(path);
  ordered_json report;
  report["valid"] = true;
  report["far_field_ok"] = v.report.all_ok();
  report["warnings"] = v.report.messages;
  report["config"] = cogmc::to_json(v.config);
  std::cout << report.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Underlay cognitive molecular communication experiments"};
  app.set_version_flag("--version", std::string(cogmc::kVersion));
  app.require_subcommand(1);

  std::string config_path, recipe, out;
  std::uint64_t seed_value = 0;
  auto* run = app.add_subcommand("run", "run a figure recipe and write <out>.csv and <out>.json");
  run->add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
  run->add_option("--recipe", recipe, "recipe name (see list-recipes)");
  auto* seed_opt = run->add_option("--seed", seed_value, "master RNG seed (required for stochastic recipes)");
  run->add_option("--out", out, "output path prefix");

  bool as_json = false;
  auto* list = app.add_subcommand("list-recipes", "print the recipe catalog");
  list->add_flag("--json", as_json, "print the catalog with default configurations as JSON");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "check a configuration file");
  validate->add_option("--config", validate_path, "JSON configuration file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    for (char& c : msg)
      if (c == '\n') c = ' ';
    return fail("usage", msg, 2);
  }

  try {
    if (*run) {
      std::optional<std::uint64_t> seed;
      if (*seed_opt) seed = seed_value;
      return cmd_run(config_path, recipe, seed, out);
    }
    if (*list) return cmd_list(as_json);
    if (*validate) return cmd_validate(validate_path);
  } catch (const ConfigError& e) {
    return fail(e.code(), e.what(), 2);
  } catch (const std::exception& e) {
    return fail("runtime", e.what(), 1);
  }
  return 0;
}
