#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "trackctl/model.hpp"
#include "trackctl/pde.hpp"

namespace trackctl {

struct MomentSpec {
  std::vector<double> lambdas;
  std::vector<double> c;
  std::vector<TargetSignal> components;
};

// Parsed problem file. Which members are populated depends on the fields
// present; subcommands check for what they need via the require_* helpers,
// which raise ValidationError naming the missing field.
struct ProblemConfig {
  nlohmann::json source;

  std::optional<Matrix> A, B, E;
  std::optional<Vector> x0;
  std::optional<double> horizon;
  std::optional<int> steps;
  std::optional<TargetSignal> target;
  double alpha = 1e4;
  double beta = 1.0;
  double cg_tol = 1e-10;
  int cg_max_iters = 5000;
  int refine = 4;
  std::vector<double> alphas;
  std::vector<int> grids{50, 100, 200, 400};
  std::optional<ChainSpec> chain;
  std::string mode = "hum";
  std::optional<MomentSpec> moment;

  LtiSystem require_system() const;
  Grid require_grid() const;
  const TargetSignal& require_target() const;
  const ChainSpec& require_chain() const;
  const MomentSpec& require_moment() const;
};

/// Parses and validates a problem document. Throws ValidationError with the
/// JSON path of the first offending field.
ProblemConfig parse_problem(const nlohmann::json& doc);
ProblemConfig parse_problem_text(const std::string& text);

/// Target from its JSON description; `path` prefixes error messages.
TargetSignal parse_target(const nlohmann::json& node, const std::string& path, double horizon);

/// Serializes JSON with every floating-point value printed to 17 significant
/// digits, so doubles survive a text round trip bit for bit.
std::string dump_exact(const nlohmann::json& doc, int indent = 2);

/// "%.17g" formatting.
std::string format_real(double v);

}  // namespace trackctl
