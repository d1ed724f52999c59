// persist: run experiments from config files and inspect the results store.
//
//   persist run <config> [--output-dir DIR]
//   persist export <store> <out.csv> [--filter key=value]...
//   persist list <store>
//
// Exit codes: 0 success, 1 config error, 2 runtime error, 3 verdict failure.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "persist/runner.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 1, kRuntime = 2, kVerdict = 3 };

int do_run(const std::string& path, const std::string& output_dir) {
  persist::ExperimentConfig config = persist::ExperimentConfig::load(path);
  if (!output_dir.empty()) config.output_dir = output_dir;
  const persist::RunResult r = persist::run_experiment(config);
  std::cout << "run " << r.directory.string() << "\n";
  for (const auto& v : r.manifest.at("verdicts"))
    std::cout << (v.at("holds").get<bool>() ? "  PASS " : "  FAIL ") << v.at("name").get<std::string>() << "\n";
  for (const auto& [label, f] : r.manifest.at("fits").items())
    std::printf("  fit %s: theta = %.4f +- %.4f (allowance %.3f)\n", label.c_str(), f.at("theta_hat").get<double>(),
                f.at("stderr_theta").get<double>(), f.at("log_correction_allowance").get<double>());
  return r.all_pass ? kOk : kVerdict;
}

int do_export(const std::string& store, const std::string& out, const std::vector<std::string>& filters) {
  persist::Filter filter;
  for (const auto& f : filters) {
    const auto eq = f.find('=');
    if (eq == std::string::npos || eq == 0) throw persist::ConfigError("filter must be key=value: " + f);
    filter.emplace_back(f.substr(0, eq), f.substr(eq + 1));
  }
  const std::size_t rows = persist::export_csv(store, out, filter);
  std::cout << rows << " rows written to " << out << "\n";
  return kOk;
}

int do_list(const std::string& store) {
  for (const auto& s : persist::list_runs(store))
    std::printf("%s  %-22s %6zu records  %s\n", s.directory.c_str(), s.experiment.c_str(), s.records,
                s.all_pass ? "pass" : "FAIL");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Persistence-probability experiments"};
  app.set_version_flag("--version", persist::kToolVersion);
  app.require_subcommand(1);

  std::string config_path, output_dir, store, out;
  std::vector<std::string> filters;

  auto* run = app.add_subcommand("run", "Run an experiment config");
  run->add_option("config", config_path, "Config file (JSON)")->required();
  run->add_option("--output-dir", output_dir, "Results store (overrides the config)");

  auto* exp = app.add_subcommand("export", "Flatten a results store into CSV");
  exp->add_option("store", store, "Results store")->required();
  exp->add_option("out", out, "Output CSV")->required();
  exp->add_option("--filter", filters, "key=value, repeatable");

  auto* list = app.add_subcommand("list", "List runs in a store");
  list->add_option("store", store, "Results store")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*run) return do_run(config_path, output_dir);
    if (*exp) return do_export(store, out, filters);
    return do_list(store);
  } catch (const persist::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
}
