#include "trackctl/app.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "trackctl/brunovsky.hpp"
#include "trackctl/error.hpp"
#include "trackctl/hum.hpp"
#include "trackctl/operators.hpp"
#include "trackctl/pde.hpp"
#include "trackctl/tracker.hpp"

namespace trackctl::app {
namespace {

using nlohmann::json;

std::vector<std::string> component_names(const std::string& stem, int count) {
  if (count == 1) return {stem};
  std::vector<std::string> names;
  for (int i = 1; i <= count; ++i) names.push_back(stem + std::to_string(i));
  return names;
}

// t, u..., Ex..., f... table from node samples.
void fill_time_table(RunResult& r, const Grid& grid, const Matrix& u, const Matrix& y,
                     const std::vector<TargetSignal>& f) {
  r.columns = {"t"};
  for (auto& s : component_names("u", static_cast<int>(u.rows()))) r.columns.push_back(s);
  for (auto& s : component_names("Ex", static_cast<int>(y.rows()))) r.columns.push_back(s);
  for (auto& s : component_names("f", static_cast<int>(f.size()))) r.columns.push_back(s);
  const int count = grid.node_count();
  r.table.resize(count, static_cast<Eigen::Index>(r.columns.size()));
  for (int k = 0; k < count; ++k) {
    Eigen::Index c = 0;
    const double t = grid.node(k);
    r.table(k, c++) = t;
    for (Eigen::Index i = 0; i < u.rows(); ++i) r.table(k, c++) = u(i, k);
    for (Eigen::Index i = 0; i < y.rows(); ++i) r.table(k, c++) = y(i, k);
    for (const auto& fi : f) r.table(k, c++) = fi.eval(0, t);
  }
}

json to_json(const Matrix& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

unsigned thread_cap(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("TRACKCTL_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return 0;
}

HumProblem hum_problem(const ProblemConfig& cfg, LtiSystem sys, TargetSignal f, const Grid& grid) {
  HumProblem p(std::move(sys), std::move(f), grid, cfg.alpha, cfg.beta);
  p.cg_tol = cfg.cg_tol;
  p.cg_max_iters = cfg.cg_max_iters;
  return p;
}

void add_hum_metrics(RunResult& r, const HumSolution& sol) {
  r.metrics = {{"MSE", sol.mse},
               {"MAXERR", sol.max_abs},
               {"ITERS", sol.cg_iters},
               {"OBJECTIVE", sol.objective},
               {"RESIDUAL", sol.residual}};
  r.converged = sol.converged;
  r.details["converged"] = sol.converged;
  r.details["control_norm"] = sol.control_norm;
}

RunResult run_brunovsky(const ProblemConfig& cfg) {
  const LtiSystem sys = cfg.require_system();
  if (sys.m() != 1) throw ValidationError("B", "brunovsky needs a single input column");
  const BrunovskyForm form = brunovsky_transform(sys.A, sys.B.col(0));
  const auto kalman = linalg::kalman_rank(sys.A, sys.B);

  RunResult r;
  r.subcommand = "brunovsky";
  r.csv_name = "brunovsky.csv";
  const int n = sys.n();
  r.columns = {"k", "alpha"};
  for (int i = 1; i <= n; ++i) r.columns.push_back("p" + std::to_string(i));
  r.table.resize(n, 2 + n);
  for (int k = 0; k < n; ++k) {
    r.table(k, 0) = k + 1;
    r.table(k, 1) = form.alpha[static_cast<std::size_t>(k)];
    for (int i = 0; i < n; ++i) r.table(k, 2 + i) = form.P(k, i);  // row k of P
  }
  r.metrics = {{"RESIDUAL", form.similarity_residual},
               {"COND", form.condition},
               {"RANK", kalman.rank_estimate}};
  r.details["alpha"] = form.alpha;
  r.details["P"] = to_json(form.P);
  r.details["P_inv"] = to_json(form.P_inv);
  r.details["A_tilde"] = to_json(form.A_tilde);
  r.details["similarity_residual"] = form.similarity_residual;
  r.details["input_residual"] = form.input_residual;
  r.details["kalman_rank"] = kalman.rank_estimate;
  if (cfg.E && cfg.E->rows() == 1) {
    const CascadeState c = make_cascade(cfg.E->row(0), form);
    r.details["eta"] = c.eta;
    r.details["k_star"] = c.k_star;
    r.metrics.emplace_back("KSTAR", c.k_star);
  }
  return r;
}

RunResult run_track(const ProblemConfig& cfg) {
  const LtiSystem sys = cfg.require_system();
  const Grid grid = cfg.require_grid();
  const TargetSignal& f = cfg.require_target();
  const TrackingSynthesis synth = synthesize_tracking_control(sys, f, grid);
  const Trajectory traj = simulate(sys, synth.control, cfg.refine);
  const TrackingError err = tracking_error(traj, f);

  RunResult r;
  r.subcommand = "track";
  r.csv_name = "trajectory.csv";
  r.layout = PlotLayout::kTwoPane;
  r.title = "exact tracking control";
  fill_time_table(r, grid, synth.control.values, traj.outputs, {f});
  r.metrics = {{"MSE", err.mse},
               {"MAXERR", err.max_abs},
               {"ITERS", 0},
               {"KSTAR", synth.cascade.k_star},
               {"MISMATCH", synth.initial_mismatch}};
  r.details["eta"] = synth.cascade.eta;
  r.details["k_star"] = synth.cascade.k_star;
  r.details["required_target_order"] = synth.cascade.required_target_order();
  r.details["alpha"] = synth.form.alpha;
  r.details["initial_mismatch"] = synth.initial_mismatch;
  if (synth.initial_mismatch > 1e-8) {
    r.details["warning"] =
        "target derivatives at t=0 disagree with the initial state; the control reproduces the "
        "target only up to a free transient";
  }
  return r;
}

RunResult run_hum(const ProblemConfig& cfg) {
  const Grid grid = cfg.require_grid();
  const HumProblem p = hum_problem(cfg, cfg.require_system(), cfg.require_target(), grid);
  const HumSolution sol = hum_solve(p);

  RunResult r;
  r.subcommand = "hum";
  r.csv_name = "trajectory.csv";
  r.layout = PlotLayout::kTwoPane;
  r.title = "penalized HUM";
  fill_time_table(r, grid, sol.u.values, sol.traj.outputs, p.targets);
  add_hum_metrics(r, sol);
  return r;
}

RunResult run_sweep(const ProblemConfig& cfg, unsigned threads) {
  if (cfg.alphas.empty()) throw ValidationError("alphas", "missing required field");
  const Grid grid = cfg.require_grid();
  const HumProblem p = hum_problem(cfg, cfg.require_system(), cfg.require_target(), grid);
  const auto rows = alpha_sweep(p, cfg.alphas, thread_cap(threads));

  RunResult r;
  r.subcommand = "sweep";
  r.csv_name = "sweep.csv";
  r.layout = PlotLayout::kLogLog;
  r.title = "alpha sweep";
  r.columns = {"alpha", "mse", "control_norm", "cg_iters"};
  r.table.resize(static_cast<Eigen::Index>(rows.size()), 4);
  int total = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    r.table(k, 0) = rows[i].alpha;
    r.table(k, 1) = rows[i].mse;
    r.table(k, 2) = rows[i].control_norm;
    r.table(k, 3) = rows[i].cg_iters;
    total += rows[i].cg_iters;
    r.converged = r.converged && rows[i].converged;
  }
  r.metrics = {{"MSE", rows.back().mse}, {"ITERS", total}, {"POINTS", static_cast<double>(rows.size())}};
  return r;
}

RunResult run_gramian(const ProblemConfig& cfg) {
  const LtiSystem sys = cfg.require_system();
  if (!cfg.horizon) throw ValidationError("T", "missing required field");
  const auto table = observability_spectrum(sys, *cfg.horizon, cfg.grids);
  const Grid uc_grid(*cfg.horizon, cfg.steps.value_or(cfg.grids.front()));
  const auto uc = unique_continuation_test(sys, uc_grid);

  RunResult r;
  r.subcommand = "gramian";
  r.csv_name = "spectrum.csv";
  r.layout = PlotLayout::kLogLog;
  r.title = "smallest singular value under refinement";
  r.columns = {"N", "sigma_max", "sigma_min", "decay_exponent", "rank"};
  r.table.resize(static_cast<Eigen::Index>(table.size()), 5);
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    r.table(k, 0) = table[i].steps;
    r.table(k, 1) = table[i].sigma_max;
    r.table(k, 2) = table[i].sigma_min;
    r.table(k, 3) = table[i].decay_exponent;
    r.table(k, 4) = table[i].report.rank_estimate;
  }
  r.metrics = {{"SIGMA_MIN", table.back().sigma_min},
               {"SIGMA_MIN_REL", uc.sigma_min_rel},
               {"UC", uc.holds ? 1.0 : 0.0}};
  r.details["unique_continuation"] = uc.verdict;
  return r;
}

RunResult run_moment(const ProblemConfig& cfg) {
  const Grid grid = cfg.require_grid();
  const MomentSpec& m = cfg.require_moment();
  const MomentResult res = moment_control(m.lambdas, m.c, m.components, grid);

  RunResult r;
  r.subcommand = "moment";
  r.csv_name = "moment.csv";
  r.layout = PlotLayout::kTwoPane;
  r.title = "moment-formula control";
  r.columns = {"t", "u"};
  for (std::size_t i = 1; i <= m.components.size(); ++i) r.columns.push_back("f" + std::to_string(i));
  r.table.resize(grid.node_count(), static_cast<Eigen::Index>(r.columns.size()));
  for (int k = 0; k < grid.node_count(); ++k) {
    r.table(k, 0) = grid.node(k);
    r.table(k, 1) = res.control.values(0, k);
    for (std::size_t i = 0; i < m.components.size(); ++i) {
      r.table(k, static_cast<Eigen::Index>(2 + i)) = m.components[i].eval(0, grid.node(k));
    }
  }
  r.metrics = {{"DEVIATION", res.compatibility_deviation}};
  return r;
}

RunResult run_chain_cascade(const ProblemConfig& cfg, bool wave) {
  const Grid grid = cfg.require_grid();
  const ChainSpec& chain = cfg.require_chain();
  const TargetSignal& f = cfg.require_target();
  const CascadeControl cc = wave ? wave_cascade_control(chain, f, grid) : heat_cascade_control(chain, f, grid);
  const LtiSystem sys = wave ? wave_boundary_system(chain) : heat_boundary_system(chain);
  const Trajectory traj = simulate(sys, cc.u, cfg.refine);
  const TrackingError err = tracking_error(traj, f);

  RunResult r;
  r.subcommand = wave ? "pde-wave" : "pde-heat";
  r.csv_name = "trajectory.csv";
  r.layout = PlotLayout::kTwoPane;
  r.title = wave ? "semi-discrete wave: boundary cascade control" : "semi-discrete heat: boundary cascade control";
  fill_time_table(r, grid, cc.u.values, traj.outputs, {f});
  r.metrics = {{"MSE", err.mse},
               {"MAXERR", err.max_abs},
               {"ITERS", 0},
               {"DERIVS", cc.max_derivative_used},
               {"UMAX", cc.u.values.cwiseAbs().maxCoeff()}};
  return r;
}

RunResult run_pde_heat(const ProblemConfig& cfg) {
  if (cfg.mode == "cascade") return run_chain_cascade(cfg, false);
  const Grid grid = cfg.require_grid();
  const ChainSpec& chain = cfg.require_chain();
  HumProblem p = hum_problem(cfg, heat_distributed_system(chain), cfg.require_target(), grid);
  p.control_weight = chain.h();
  const HumSolution sol = hum_solve(p);

  RunResult r;
  r.subcommand = "pde-heat";
  r.csv_name = "trajectory.csv";
  r.layout = PlotLayout::kSinglePane;
  r.title = "heat equation: flux at x=L under distributed control";
  fill_time_table(r, grid, sol.u.values, sol.traj.outputs, p.targets);
  add_hum_metrics(r, sol);
  return r;
}

}  // namespace

std::string RunResult::metrics_line() const {
  std::string line;
  for (const auto& [name, value] : metrics) {
    if (!line.empty()) line += ' ';
    char buf[64];
    if (name == "ITERS" || name == "KSTAR" || name == "RANK" || name == "DERIVS" || name == "UC" ||
        name == "POINTS") {
      std::snprintf(buf, sizeof buf, "%s=%lld", name.c_str(), static_cast<long long>(value));
    } else {
      std::snprintf(buf, sizeof buf, "%s=%.10g", name.c_str(), value);
    }
    line += buf;
  }
  return line;
}

double RunResult::metric(const std::string& name) const {
  for (const auto& [key, value] : metrics) {
    if (key == name) return value;
  }
  throw Error(ErrorCode::kInvalidArgument, "no metric named " + name);
}

RunResult run(const std::string& subcommand, const ProblemConfig& cfg, unsigned threads) {
  if (subcommand == "brunovsky") return run_brunovsky(cfg);
  if (subcommand == "track") return run_track(cfg);
  if (subcommand == "hum") return run_hum(cfg);
  if (subcommand == "sweep") return run_sweep(cfg, threads);
  if (subcommand == "gramian") return run_gramian(cfg);
  if (subcommand == "moment") return run_moment(cfg);
  if (subcommand == "pde-heat") return run_pde_heat(cfg);
  if (subcommand == "pde-wave") return run_chain_cascade(cfg, true);
  throw ValidationError("subcommand", "unknown subcommand '" + subcommand + "'");
}

void write_csv(const RunResult& result, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open " + path + " for writing");
  for (std::size_t i = 0; i < result.columns.size(); ++i) {
    if (i > 0) out << ',';
    out << result.columns[i];
  }
  out << '\n';
  for (Eigen::Index k = 0; k < result.table.rows(); ++k) {
    for (Eigen::Index c = 0; c < result.table.cols(); ++c) {
      if (c > 0) out << ',';
      out << format_real(result.table(k, c));
    }
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::kIoError, "write to " + path + " failed");
}

std::pair<std::vector<std::string>, Matrix> read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  std::string line;
  std::vector<std::string> header;
  if (!std::getline(in, line)) throw Error(ErrorCode::kIoError, path + " is empty");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
    if (row.size() != header.size()) throw Error(ErrorCode::kIoError, "ragged row in " + path);
    rows.push_back(std::move(row));
  }
  Matrix M(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(header.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < header.size(); ++j) {
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return {std::move(header), std::move(M)};
}

std::string plot_script(const RunResult& r, const std::string& csv) {
  std::ostringstream s;
  const std::string png = csv.substr(0, csv.rfind('.')) + ".png";
  s << "# gnuplot script; run from the directory holding " << csv << "\n"
    << "set datafile separator \",\"\n"
    << "set key autotitle columnhead\n"
    << "set terminal pngcairo size 900,700\n"
    << "set output \"" << png << "\"\n"
    << "set grid\n";
  switch (r.layout) {
    case PlotLayout::kTwoPane: {
      // Upper pane: outputs solid, targets dashed. Lower pane: controls.
      std::vector<std::string> upper, lower;
      for (const auto& c : r.columns) {
        if (c.rfind("Ex", 0) == 0) {
          upper.push_back("\"" + csv + "\" using \"t\":\"" + c + "\" with lines lw 2 lc rgb \"blue\" title \"" + c + "\"");
        } else if (c.rfind("f", 0) == 0) {
          upper.push_back("\"" + csv + "\" using \"t\":\"" + c + "\" with lines dt 2 lw 2 lc rgb \"red\" title \"" + c + "\"");
        } else if (c.rfind("u", 0) == 0) {
          lower.push_back("\"" + csv + "\" using \"t\":\"" + c + "\" with lines lw 1.5 title \"" + c + "\"");
        }
      }
      const auto join = [](const std::vector<std::string>& parts) {
        std::string out;
        for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? ", \\\n     " : "") + parts[i];
        return out;
      };
      s << "set multiplot layout 2,1 title \"" << r.title << "\"\n"
        << "set xlabel \"t\"\n"
        << "plot " << join(upper) << "\n"
        << "plot " << join(lower) << "\n"
        << "unset multiplot\n";
      break;
    }
    case PlotLayout::kSinglePane:
      s << "set title \"" << r.title << "\"\n"
        << "set xlabel \"t\"\n"
        << "plot \"" << csv << "\" using \"t\":\"Ex\" with lines lw 2 lc rgb \"blue\" title \"output\", \\\n"
        << "     \"" << csv << "\" using \"t\":\"f\" with lines dt 2 lw 2 lc rgb \"red\" title \"target\"\n";
      break;
    case PlotLayout::kLogLog:
      s << "set title \"" << r.title << "\"\n"
        << "set logscale xy\n"
        << "plot \"" << csv << "\" using 1:" << (r.subcommand == "gramian" ? 3 : 2)
        << " with linespoints lw 2 title columnhead(" << (r.subcommand == "gramian" ? 3 : 2) << ")\n";
      break;
    case PlotLayout::kNone:
      s << "plot for [i=2:*] \"" << csv << "\" using 1:i with linespoints title columnhead(i)\n";
      break;
  }
  return s.str();
}

void emit_plot_script(const RunResult& result, const std::string& csv_relpath, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open " + path + " for writing");
  out << plot_script(result, csv_relpath);
  if (!out) throw Error(ErrorCode::kIoError, "write to " + path + " failed");
}

}  // namespace trackctl::app
