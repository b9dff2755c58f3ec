#include "trackctl/operators.hpp"

#include <cmath>

#include "trackctl/error.hpp"

namespace trackctl {
namespace {

void require_dense_size(double rows, double cols) {
  if (rows * cols > kMaxDenseEntries) {
    throw Error(ErrorCode::kTooLarge, "dense assembly of " + std::to_string(rows) + " x " +
                                          std::to_string(cols) + " exceeds 4e6 entries");
  }
}

void require_samples(const Matrix& v, Eigen::Index dim, const Grid& grid, const char* what) {
  if (v.rows() != dim || v.cols() != grid.node_count()) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(what) + ": expected " + std::to_string(dim) + " x " +
                    std::to_string(grid.node_count()) + " samples");
  }
}

// Per-entry weights of a node-major stacked vector (dim entries per node).
Vector stacked_weights(const Vector& w, int dim) {
  Vector out(w.size() * dim);
  for (Eigen::Index k = 0; k < w.size(); ++k) out.segment(k * dim, dim).setConstant(w(k));
  return out;
}

}  // namespace

DiscreteOperator::DiscreteOperator(const LtiSystem& sys, const Grid& grid)
    : grid_(grid), E_(sys.E), B_(sys.B), weights_(grid.trapezoid_weights()) {
  const double half = 0.5 * grid.dt();
  const Matrix I = Matrix::Identity(sys.n(), sys.n());
  const Eigen::PartialPivLU<Matrix> lu(I - half * sys.A);
  Phi_ = lu.solve(I + half * sys.A);
  Psi_ = lu.solve(half * sys.B);
}

Matrix DiscreteOperator::apply(const Matrix& u) const {
  require_samples(u, B_.cols(), grid_, "lambda_apply control");
  const int steps = grid_.steps();
  Matrix y = Matrix::Zero(E_.rows(), steps + 1);
  Vector x = Vector::Zero(Phi_.rows());
  for (int k = 0; k < steps; ++k) {
    x = Phi_ * x + Psi_ * (u.col(k) + u.col(k + 1));
    y.col(k + 1) = E_ * x;
  }
  return y;
}

Matrix DiscreteOperator::transpose(const Matrix& z) const {
  require_samples(z, E_.rows(), grid_, "lambda transpose argument");
  const int steps = grid_.steps();
  Matrix out = Matrix::Zero(B_.cols(), steps + 1);
  const Matrix PhiT = Phi_.transpose();
  const Matrix PsiT = Psi_.transpose();
  const Matrix ET = E_.transpose();
  // r_{k} = Phi^T r_{k+1} + E^T z_k, s_{k-1} = Psi^T r_k feeds nodes k-1 and k.
  Vector r = ET * z.col(steps);
  for (int k = steps; k >= 1; --k) {
    if (k < steps) r = PhiT * r + ET * z.col(k);
    const Vector s = PsiT * r;
    out.col(k - 1) += s;
    out.col(k) += s;
  }
  return out;
}

Matrix DiscreteOperator::adjoint(const Matrix& psi) const {
  Matrix out = transpose(psi * weights_.asDiagonal());
  return out * weights_.cwiseInverse().asDiagonal();
}

Matrix DiscreteOperator::gramian(const Matrix& psi) const { return apply(adjoint(psi)); }

double DiscreteOperator::inner(const Matrix& a, const Matrix& b) const {
  return (a.cwiseProduct(b).colwise().sum().transpose().array() * weights_.array()).sum();
}

SampledSignal lambda_apply(const LtiSystem& sys, const SampledSignal& u) {
  return SampledSignal(u.grid, DiscreteOperator(sys, u.grid).apply(u.values));
}

SampledSignal lambda_adjoint_apply(const LtiSystem& sys, const SampledSignal& psi) {
  return SampledSignal(psi.grid, DiscreteOperator(sys, psi.grid).adjoint(psi.values));
}

SampledSignal gramian_apply(const LtiSystem& sys, const SampledSignal& psi) {
  return SampledSignal(psi.grid, DiscreteOperator(sys, psi.grid).gramian(psi.values));
}

AdjointRun adjoint_run(const LtiSystem& sys, const SampledSignal& g) {
  const Grid& grid = g.grid;
  require_samples(g.values, sys.p(), grid, "adjoint source");
  const double half = 0.5 * grid.dt();
  const int n = sys.n();
  const Matrix I = Matrix::Identity(n, n);
  const Matrix AT = sys.A.transpose();
  const Eigen::PartialPivLU<Matrix> lu(I - half * AT);
  const Matrix step = lu.solve(I + half * AT);
  const Matrix forcing = lu.solve(half * sys.E.transpose());

  const int steps = grid.steps();
  Matrix phi = Matrix::Zero(n, steps + 1);
  for (int k = steps - 1; k >= 0; --k) {
    phi.col(k) = step * phi.col(k + 1) + forcing * (g.values.col(k) + g.values.col(k + 1));
  }
  Matrix obs = sys.B.transpose() * phi;
  return AdjointRun{g, std::move(phi), SampledSignal(grid, std::move(obs))};
}

Matrix assemble_lambda_matrix(const LtiSystem& sys, const Grid& grid) {
  const int count = grid.node_count();
  require_dense_size(static_cast<double>(sys.p()) * count, static_cast<double>(sys.m()) * count);
  const DiscreteOperator op(sys, grid);
  const Matrix& Phi = op.step_matrix();
  const Matrix& Psi = op.input_matrix();
  const int m = sys.m();
  const int p = sys.p();
  Matrix L = Matrix::Zero(static_cast<Eigen::Index>(p) * count, static_cast<Eigen::Index>(m) * count);
  // States for all unit impulses at once: X(:, j*m+i) is the response to u_j = e_i.
  Matrix X = Matrix::Zero(sys.n(), static_cast<Eigen::Index>(m) * count);
  for (int k = 0; k < grid.steps(); ++k) {
    X = Phi * X;
    X.middleCols(static_cast<Eigen::Index>(k) * m, m) += Psi;
    X.middleCols(static_cast<Eigen::Index>(k + 1) * m, m) += Psi;
    L.middleRows(static_cast<Eigen::Index>(k + 1) * p, p) = sys.E * X;
  }
  return L;
}

Matrix gramian_matrix(const LtiSystem& sys, const Grid& grid) {
  const Matrix L = assemble_lambda_matrix(sys, grid);
  const Vector w = grid.trapezoid_weights();
  const Vector wy = stacked_weights(w, sys.p()).cwiseSqrt();
  const Vector wu = stacked_weights(w, sys.m()).cwiseSqrt().cwiseInverse();
  const Matrix scaled = wy.asDiagonal() * L * wu.asDiagonal();
  Matrix G = scaled * scaled.transpose();
  return 0.5 * (G + G.transpose());
}

Matrix energy_lambda_matrix(const LtiSystem& sys, const Grid& grid) {
  const int steps = grid.steps();
  const int m = sys.m();
  const int p = sys.p();
  require_dense_size(static_cast<double>(p) * steps, static_cast<double>(m) * steps);
  const DiscreteOperator op(sys, grid);
  const Matrix& Phi = op.step_matrix();
  const Matrix drive = 2.0 * op.input_matrix();  // Psi (u_k + u_{k+1}) = 2 Psi ubar_k
  const double inv_dt = 1.0 / grid.dt();

  Matrix M = Matrix::Zero(static_cast<Eigen::Index>(p) * steps, static_cast<Eigen::Index>(m) * steps);
  Matrix X = Matrix::Zero(sys.n(), static_cast<Eigen::Index>(m) * steps);
  Matrix y_prev = Matrix::Zero(p, static_cast<Eigen::Index>(m) * steps);
  for (int k = 0; k < steps; ++k) {
    X = Phi * X;
    X.middleCols(static_cast<Eigen::Index>(k) * m, m) += drive;
    Matrix y = sys.E * X;
    M.middleRows(static_cast<Eigen::Index>(k) * p, p) = (y - y_prev) * inv_dt;
    y_prev = std::move(y);
  }
  return M;
}

namespace {

// Smallest singular value as a map from output space (rows) to control
// space: zero when outputs outnumber controls.
double injectivity_sigma(const Matrix& M, const linalg::SpectrumReport& r) {
  if (r.singular_values.empty() || M.rows() > M.cols()) return 0.0;
  return r.singular_values.back();
}

}  // namespace

std::vector<SpectrumSample> observability_spectrum(const LtiSystem& sys, double horizon,
                                                   const std::vector<int>& grid_steps) {
  std::vector<SpectrumSample> table;
  for (int steps : grid_steps) {
    const Grid grid(horizon, steps);
    const Matrix M = energy_lambda_matrix(sys, grid);
    SpectrumSample s;
    s.steps = steps;
    s.report = linalg::spectrum(M);
    s.sigma_max = s.report.singular_values.empty() ? 0.0 : s.report.singular_values.front();
    s.sigma_min = injectivity_sigma(M, s.report);
    if (!table.empty()) {
      const auto& prev = table.back();
      if (prev.sigma_min > 0.0 && s.sigma_min > 0.0) {
        s.decay_exponent = std::log(prev.sigma_min / s.sigma_min) /
                           std::log(static_cast<double>(steps) / prev.steps);
      }
    }
    table.push_back(std::move(s));
  }
  return table;
}

UniqueContinuationReport unique_continuation_test(const LtiSystem& sys, const Grid& grid) {
  const Matrix M = energy_lambda_matrix(sys, grid);
  const auto report = linalg::spectrum(M);
  UniqueContinuationReport uc;
  const double top = report.singular_values.empty() ? 0.0 : report.singular_values.front();
  const double bottom = injectivity_sigma(M, report);
  uc.sigma_min_rel = top > 0.0 ? bottom / top : 0.0;
  uc.holds = uc.sigma_min_rel > 1e-10;
  uc.verdict = uc.holds ? "UC holds numerically" : "UC fails numerically";
  return uc;
}

MomentResult moment_control(const std::vector<double>& lambdas, const std::vector<double>& c,
                            const std::vector<TargetSignal>& components, const Grid& grid) {
  if (lambdas.empty() || lambdas.size() != c.size() || c.size() != components.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "moment_control needs equally many eigenvalues, input weights and components");
  }
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (c[k] == 0.0) {
      throw Error(ErrorCode::kZeroCoefficient,
                  "mode " + std::to_string(k + 1) + " has c_k = 0 and cannot be tracked by the formula");
    }
  }
  auto formula = [&](std::size_t k, double t) {
    const auto d = components[k].derivatives(t, 1);
    return (d[1] - lambdas[k] * d[0]) / c[k];
  };
  Matrix u(1, grid.node_count());
  double deviation = 0.0;
  for (int i = 0; i < grid.node_count(); ++i) {
    const double t = grid.node(i);
    u(0, i) = formula(0, t);
    for (std::size_t k = 1; k < components.size(); ++k) {
      deviation = std::max(deviation, std::abs(formula(k, t) - u(0, i)));
    }
  }
  return MomentResult{SampledSignal(grid, std::move(u)), deviation};
}

}  // namespace trackctl
