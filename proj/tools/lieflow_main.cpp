// Command-line front end: verify / solve / residual / goursat subcommands plus
// a report validator.  All results stream to stdout as a single JSON report;
// --out additionally writes report.json (and field CSVs for solve) to a
// directory.  Exit codes: 0 all checks pass, 1 check failure, 2 configuration
// error, 3 numerical breakdown.
#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "lieflow/runner.hpp"

namespace {

using lieflow::ConfigError;
using lieflow::RunConfig;

struct CommonArgs {
  std::string config_path;
  int rank = 0;
  std::string grading;
  std::string mode;
  long samples = -1;
  unsigned long seed = 0;
  bool seed_set = false;
  double tol = -1;
  double h = -1;
  int refine = 0;
  std::string out_dir;
};

void add_common(CLI::App* sub, CommonArgs& a) {
  sub->set_help_flag("--help", "print help");  // frees -h for the step option
  sub->add_option("--config", a.config_path, "configuration file (JSON)");
  sub->add_option("--n", a.rank, "algebra rank (with --grading)");
  sub->add_option("--grading", a.grading, "grading entries, e.g. 0,1,0 or 010");
  sub->add_option("--mode", a.mode, "arithmetic mode: exact or float");
  sub->add_option("--samples", a.samples, "random samples for identity checks");
  sub->add_option("--seed", a.seed, "sampling seed")->each([&](const std::string&) {
    a.seed_set = true;
  });
  sub->add_option("--tol", a.tol, "residual tolerance");
  sub->add_option("--h", a.h, "coarsest grid step");
  sub->add_option("--refine", a.refine, "number of step halvings to study");
  sub->add_option("--out", a.out_dir, "directory for report.json and data dumps");
}

RunConfig make_config(const CommonArgs& a) {
  RunConfig cfg;
  if (!a.config_path.empty()) {
    cfg = lieflow::load_config_file(a.config_path);
  } else if (a.rank == 0 || a.grading.empty()) {
    throw ConfigError("give --config, or both --n and --grading");
  }
  if (a.rank != 0 || !a.grading.empty()) {
    if (a.rank == 0 || a.grading.empty())
      throw ConfigError("--n and --grading must be given together");
    if (a.rank < 1 || a.rank > 12) throw ConfigError("--n must be between 1 and 12");
    cfg.rank = a.rank;
    try {
      cfg.grading = lieflow::parse_grading(a.grading, a.rank);
    } catch (const lieflow::ConstructionError& e) {
      throw ConfigError(e.what());  // bad flag value, not a library misuse
    }
  }
  if (!a.mode.empty()) {
    cfg.mode = a.mode == "rational" ? "exact" : a.mode;
    if (cfg.mode != "exact" && cfg.mode != "float")
      throw ConfigError("--mode must be exact or float");
  }
  if (a.samples >= 0) {
    if (a.samples == 0) throw ConfigError("--samples must be positive");
    cfg.samples = static_cast<int>(a.samples);
  }
  if (a.seed_set) cfg.seed = a.seed;
  if (a.tol > 0) cfg.tol = a.tol;
  if (a.refine != 0 && a.h <= 0) throw ConfigError("--refine needs --h");
  if (a.h > 0) {
    cfg.grid.steps.clear();
    double step = a.h;
    for (int r = 0; r < std::max(1, a.refine); ++r, step /= 2) cfg.grid.steps.push_back(step);
  }
  return cfg;
}

int emit(const lieflow::RunOutcome& outcome, const std::string& out_dir) {
  std::string text = lieflow::render_report(outcome.report);
  std::cout << text;
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream f(std::filesystem::path(out_dir) / "report.json");
    if (!f) throw ConfigError("cannot write report.json under " + out_dir);
    f << text;
  }
  return outcome.ok ? 0 : 1;
}

int validate_report(const std::string& in_path, const std::string& schema_path) {
  auto parse_file = [](const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open " + path);
    try {
      return nlohmann::json::parse(f);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(path + " is not valid JSON: " + e.what());
    }
  };
  nlohmann::json doc = parse_file(in_path);
  nlohmann::json schema = parse_file(schema_path);
  auto issues = lieflow::schema_validate(schema, doc);
  nlohmann::ordered_json out;
  out["valid"] = issues.empty();
  out["issues"] = nlohmann::ordered_json::array();
  for (const auto& issue : issues) {
    out["issues"].push_back({{"path", issue.path.empty() ? "/" : issue.path},
                             {"message", issue.message}});
    std::cerr << (issue.path.empty() ? "/" : issue.path) << ": " << issue.message << "\n";
  }
  std::cout << out.dump(2) << "\n";
  return issues.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graded lattice field construction and verification"};
  app.set_help_flag("--help", "print help");
  app.require_subcommand(1);

  CommonArgs verify_args, solve_args, residual_args, goursat_args;
  CLI::App* verify = app.add_subcommand("verify", "run the sample-based identity suite");
  add_common(verify, verify_args);
  CLI::App* solve = app.add_subcommand("solve", "build block fields on a grid");
  add_common(solve, solve_args);
  CLI::App* residual =
      app.add_subcommand("residual", "finite-difference residuals with convergence orders");
  add_common(residual, residual_args);
  CLI::App* goursat =
      app.add_subcommand("goursat", "re-integrate fields from boundary data and compare");
  add_common(goursat, goursat_args);

  std::string report_in, schema_path = "report.schema.json";
  CLI::App* report = app.add_subcommand("report", "validate a report against the schema");
  report->add_option("--in", report_in, "report file to validate")->required();
  report->add_option("--schema", schema_path, "schema file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (verify->parsed()) return emit(lieflow::run_verify(make_config(verify_args)), verify_args.out_dir);
    if (solve->parsed()) {
      RunConfig cfg = make_config(solve_args);
      return emit(lieflow::run_solve(cfg, solve_args.out_dir), solve_args.out_dir);
    }
    if (residual->parsed())
      return emit(lieflow::run_residual(make_config(residual_args)), residual_args.out_dir);
    if (goursat->parsed())
      return emit(lieflow::run_goursat(make_config(goursat_args)), goursat_args.out_dir);
    if (report->parsed()) return validate_report(report_in, schema_path);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const lieflow::NumericalBreakdown& e) {
    std::cerr << "numerical breakdown: " << e.what() << "\n";
    return 3;
  } catch (const lieflow::ConstructionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
