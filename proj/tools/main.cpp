// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trigopt contributors
//
// Command line front end. Exit codes: 0 the solver reports a solution,
// 2 it certifies local infeasibility, 3 it gives up (budget or stall),
// 4 configuration, input, or usage errors.

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <iostream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "trigopt/bench.hpp"

namespace {

namespace fs = std::filesystem;

std::map<std::string, double> parse_overrides(const std::vector<std::string>& kvs) {
  std::map<std::string, double> out;
  for (const auto& kv : kvs) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
      throw std::invalid_argument("override '" + kv + "' is not of the form key=value");
    const std::string key = kv.substr(0, eq);
    const std::string val = kv.substr(eq + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(val, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("override '" + kv + "' has a non-numeric value");
    }
    if (used != val.size())
      throw std::invalid_argument("override '" + kv + "' has a non-numeric value");
    out[key] = v;
  }
  return out;
}

// A record file, or a directory scanned for *.json records (the index and
// any plot exports use other extensions, so a results directory is safe).
std::vector<trigopt::ResultsRecord> collect_records(const std::vector<std::string>& inputs) {
  std::vector<trigopt::ResultsRecord> records;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      std::vector<fs::path> files;
      for (const auto& entry : fs::directory_iterator(in))
        if (entry.is_regular_file() && entry.path().extension() == ".json")
          files.push_back(entry.path());
      std::sort(files.begin(), files.end());
      for (const auto& f : files) records.push_back(trigopt::load_record(f.string()));
    } else {
      records.push_back(trigopt::load_record(in));
    }
  }
  return records;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"trigopt: trajectory optimization with triggered constraints"};
  app.require_subcommand(1);

  trigopt::RunConfig cfg;
  std::vector<std::string> override_kvs;
  auto* solve = app.add_subcommand("solve", "build and solve one scenario configuration");
  solve->add_option("--scenario", cfg.scenario, "ugv | pdg | docking")->required();
  solve->add_option("--formulation", cfg.formulation, "minlp | mpvc")->required();
  solve->add_option("--solver", cfg.solver, "bnb | enumerate | homotopy")->required();
  solve->add_option("--params", cfg.params_path, "parameter JSON (built-in defaults if omitted)");
  solve->add_option("--regions", cfg.regions_path, "region JSON (built-in defaults if omitted)");
  solve->add_option("--out", cfg.out_dir, "output directory")->capture_default_str();
  solve->add_option("--seed", cfg.seed, "recorded in the results record")->capture_default_str();
  solve->add_option("--override", override_kvs,
                    "key=value parameter or solver knob (repeatable)");
  solve->add_flag("--trace", cfg.trace, "persist the solver trace next to the record");

  std::vector<std::string> compare_inputs;
  auto* compare = app.add_subcommand("compare", "tabulate records of one scenario side by side");
  compare->add_option("--inputs", compare_inputs, "record files or directories")->required();

  std::string plot_input, plot_out;
  auto* plot = app.add_subcommand("plot-data", "export per-node series for a solved record");
  plot->add_option("--input", plot_input, "results record")->required();
  plot->add_option("--out", plot_out, "output directory (default: next to the record)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 4;
  }

  try {
    if (solve->parsed()) {
      cfg.overrides = parse_overrides(override_kvs);
      trigopt::ResultsRecord rec = trigopt::run(cfg);
      std::cout << "record:    " << rec.record_path << "\n"
                << "status:    " << rec.status << "\n"
                << "objective: " << rec.objective << "\n"
                << "runtime:   " << rec.runtime_sec << " s\n";
      return trigopt::exit_code(rec);
    }
    if (compare->parsed()) {
      std::cout << trigopt::render_comparison(collect_records(compare_inputs));
      return 0;
    }
    trigopt::ResultsRecord rec = trigopt::load_record(plot_input);
    if (rec.solution.empty())
      throw std::invalid_argument(plot_input + " holds no solution to plot");
    trigopt::ScenarioProblem sp = trigopt::rebuild_scenario(rec);
    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(
        rec.solution.data(), static_cast<Eigen::Index>(rec.solution.size()));
    const fs::path in(plot_input);
    const std::string dir = plot_out.empty() ? in.parent_path().string() : plot_out;
    const std::string stem = in.stem().string();
    trigopt::emit_plot_data(sp, x, dir.empty() ? "." : dir, stem);
    std::cout << (fs::path(dir.empty() ? "." : dir) / (stem + "_states.csv")).string() << "\n"
              << (fs::path(dir.empty() ? "." : dir) / (stem + "_controls.csv")).string() << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
