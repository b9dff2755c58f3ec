// trackctl: command-line front end over the C interface.
//
//   trackctl <subcommand> <problem.json> [--out DIR] [--T T] [--N N]
//            [--alpha A] [--beta B] [--cg-tol TOL] [--plot] [--threads K]
//
// Exit codes: 0 success, 2 invalid input, 3 solver did not converge,
// 4 target rejected (regularity or compatibility), 1 anything else.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "trackctl/trackctl.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitNoConvergence = 3;
constexpr int kExitRejected = 4;

int exit_code(tc_status status) {
  switch (status) {
    case TC_OK: return kExitOk;
    case TC_ERR_NO_CONVERGENCE: return kExitNoConvergence;
    case TC_ERR_REGULARITY:
    case TC_ERR_COMPATIBILITY: return kExitRejected;
    case TC_ERR_INVALID:
    case TC_ERR_NOT_CONTROLLABLE:
    case TC_ERR_ALL_ZERO_OUTPUT:
    case TC_ERR_ZERO_COEFFICIENT:
    case TC_ERR_TOO_LARGE:
    case TC_ERR_SINGULAR: return kExitInvalid;
    default: return kExitOther;
  }
}

int fail(tc_status status) {
  std::cerr << "trackctl: " << tc_status_name(status) << ": " << tc_last_error() << "\n";
  return exit_code(status);
}

// Pulls the "warning" string out of the details JSON without a second parser:
// the library already validated it, so a plain scan is enough.
void print_warnings(const std::string& details) {
  const auto key = details.find("\"warning\"");
  if (key == std::string::npos) return;
  const auto open = details.find('"', details.find(':', key) + 1);
  if (open == std::string::npos) return;
  std::string text;
  for (auto i = open + 1; i < details.size() && details[i] != '"'; ++i) {
    if (details[i] == '\\' && i + 1 < details.size()) ++i;
    text.push_back(details[i]);
  }
  std::cerr << "trackctl: warning: " << text << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Output tracking control for linear systems"};
  cli.set_version_flag("--version", tc_version());

  const std::vector<std::string> names{"brunovsky", "track",   "hum",    "pde-heat",
                                       "pde-wave",  "gramian", "moment", "sweep"};
  std::string subcommand;
  std::string input;
  std::string out_dir = ".";
  std::optional<double> horizon, alpha, beta, cg_tol;
  std::optional<int> steps;
  bool plot = false;
  unsigned threads = 0;

  cli.add_option("subcommand", subcommand, "What to run")->required()->check(CLI::IsMember(names));
  cli.add_option("problem", input, "Problem description (JSON)")->required();
  cli.add_option("-o,--out", out_dir, "Output directory");
  cli.add_option("--T", horizon, "Override the horizon");
  cli.add_option("--N", steps, "Override the number of time steps");
  cli.add_option("--alpha", alpha, "Override the tracking penalty");
  cli.add_option("--beta", beta, "Override the control-energy weight");
  cli.add_option("--cg-tol", cg_tol, "Override the CG relative tolerance");
  cli.add_flag("--plot", plot, "Also write a gnuplot script");
  cli.add_option("--threads", threads, "Worker threads for sweep (0: automatic)");

  try {
    cli.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return cli.exit(e);
  } catch (const CLI::ParseError& e) {
    cli.exit(e);
    return kExitInvalid;
  }

  std::ifstream in(input, std::ios::binary);
  if (!in) {
    std::cerr << "trackctl: cannot read " << input << "\n";
    return kExitInvalid;
  }
  std::stringstream text;
  text << in.rdbuf();

  tc_overrides overrides{};
  if (horizon) overrides.has_T = 1, overrides.T = *horizon;
  if (steps) overrides.has_N = 1, overrides.N = *steps;
  if (alpha) overrides.has_alpha = 1, overrides.alpha = *alpha;
  if (beta) overrides.has_beta = 1, overrides.beta = *beta;
  if (cg_tol) overrides.has_cg_tol = 1, overrides.cg_tol = *cg_tol;

  tc_problem* problem = nullptr;
  if (auto st = tc_problem_parse(text.str().c_str(), &overrides, &problem); st != TC_OK) return fail(st);

  tc_result* result = nullptr;
  const tc_status run_status = tc_run(problem, subcommand.c_str(), threads, &result);
  tc_problem_free(problem);
  if (result == nullptr) return fail(run_status);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  const fs::path dir(out_dir);
  const std::string csv_name = tc_result_csv_name(result);
  int code = kExitOk;
  if (auto st = tc_result_write_csv(result, (dir / csv_name).string().c_str()); st != TC_OK) {
    code = fail(st);
  }
  const std::string details = tc_result_details_json(result);
  if (code == kExitOk) {
    std::ofstream json(dir / (subcommand + ".json"), std::ios::binary);
    json << details << "\n";
    if (!json) {
      std::cerr << "trackctl: cannot write " << (dir / (subcommand + ".json")).string() << "\n";
      code = kExitOther;
    }
  }
  if (code == kExitOk && plot) {
    const auto script = dir / (fs::path(csv_name).stem().string() + ".gp");
    if (auto st = tc_result_write_plot_script(result, csv_name.c_str(), script.string().c_str()); st != TC_OK) {
      code = fail(st);
    }
  }

  std::cout << tc_result_metrics_line(result) << "\n";
  print_warnings(details);
  tc_result_free(result);

  if (code != kExitOk) return code;
  if (run_status != TC_OK) return fail(run_status);
  return kExitOk;
}
