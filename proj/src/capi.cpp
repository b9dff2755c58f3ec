#include "trackctl/trackctl.h"

#include <new>
#include <string>

#include "trackctl/app.hpp"
#include "trackctl/brunovsky.hpp"
#include "trackctl/error.hpp"
#include "trackctl/problem.hpp"

struct tc_problem {
  trackctl::ProblemConfig config;
  std::string canonical;
};

struct tc_result {
  trackctl::app::RunResult result;
  std::string metrics_line;
  std::string details;
};

namespace {

thread_local std::string g_last_error;

tc_status to_status(trackctl::ErrorCode code) {
  using trackctl::ErrorCode;
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kNonSquare:
    case ErrorCode::kDimensionMismatch: return TC_ERR_INVALID;
    case ErrorCode::kSingular: return TC_ERR_SINGULAR;
    case ErrorCode::kInsufficientRegularity: return TC_ERR_REGULARITY;
    case ErrorCode::kCompatibilityViolation: return TC_ERR_COMPATIBILITY;
    case ErrorCode::kNotControllable: return TC_ERR_NOT_CONTROLLABLE;
    case ErrorCode::kAllZeroOutput: return TC_ERR_ALL_ZERO_OUTPUT;
    case ErrorCode::kTooLarge: return TC_ERR_TOO_LARGE;
    case ErrorCode::kZeroCoefficient: return TC_ERR_ZERO_COEFFICIENT;
    case ErrorCode::kNoConvergence: return TC_ERR_NO_CONVERGENCE;
    case ErrorCode::kIoError: return TC_ERR_IO;
  }
  return TC_ERR_INTERNAL;
}

template <typename F>
tc_status guarded(F&& body) {
  try {
    return body();
  } catch (const trackctl::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return TC_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return TC_ERR_INTERNAL;
  }
}

tc_status null_argument(const char* name) {
  g_last_error = std::string(name) + ": null argument";
  return TC_ERR_INVALID;
}

}  // namespace

extern "C" {

const char* tc_version(void) { return "0.1.0"; }

const char* tc_last_error(void) { return g_last_error.c_str(); }

const char* tc_status_name(tc_status status) {
  switch (status) {
    case TC_OK: return "ok";
    case TC_ERR_INVALID: return "invalid input";
    case TC_ERR_NO_CONVERGENCE: return "no convergence";
    case TC_ERR_REGULARITY: return "insufficient regularity";
    case TC_ERR_COMPATIBILITY: return "compatibility violation";
    case TC_ERR_NOT_CONTROLLABLE: return "not controllable";
    case TC_ERR_ALL_ZERO_OUTPUT: return "all-zero output";
    case TC_ERR_ZERO_COEFFICIENT: return "zero coefficient";
    case TC_ERR_TOO_LARGE: return "too large";
    case TC_ERR_SINGULAR: return "singular";
    case TC_ERR_IO: return "i/o error";
    case TC_ERR_INTERNAL: return "internal error";
  }
  return "unknown";
}

tc_status tc_problem_parse(const char* json_text, const tc_overrides* overrides, tc_problem** out) {
  if (json_text == nullptr) return null_argument("json_text");
  if (out == nullptr) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
      throw trackctl::ValidationError("$", std::string("malformed JSON: ") + e.what());
    }
    if (overrides != nullptr && doc.is_object()) {
      if (overrides->has_T) doc["T"] = overrides->T;
      if (overrides->has_N) doc["N"] = overrides->N;
      if (overrides->has_alpha) doc["alpha"] = overrides->alpha;
      if (overrides->has_beta) doc["beta"] = overrides->beta;
      if (overrides->has_cg_tol) doc["cg_tol"] = overrides->cg_tol;
    }
    auto problem = std::make_unique<tc_problem>();
    problem->config = trackctl::parse_problem(doc);
    problem->canonical = trackctl::dump_exact(doc);
    *out = problem.release();
    return TC_OK;
  });
}

void tc_problem_free(tc_problem* problem) { delete problem; }

const char* tc_problem_json(const tc_problem* problem) {
  return problem ? problem->canonical.c_str() : "";
}

tc_status tc_run(const tc_problem* problem, const char* subcommand, unsigned threads, tc_result** out) {
  if (problem == nullptr) return null_argument("problem");
  if (subcommand == nullptr) return null_argument("subcommand");
  if (out == nullptr) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    auto result = std::make_unique<tc_result>();
    result->result = trackctl::app::run(subcommand, problem->config, threads);
    result->metrics_line = result->result.metrics_line();
    result->details = trackctl::dump_exact(result->result.details, -1);
    const bool converged = result->result.converged;
    *out = result.release();
    if (!converged) {
      g_last_error = "conjugate gradients stopped at the iteration cap before reaching cg_tol";
      return TC_ERR_NO_CONVERGENCE;
    }
    return TC_OK;
  });
}

void tc_result_free(tc_result* result) { delete result; }

size_t tc_result_rows(const tc_result* r) { return r ? static_cast<size_t>(r->result.table.rows()) : 0; }

size_t tc_result_cols(const tc_result* r) { return r ? r->result.columns.size() : 0; }

const char* tc_result_column_name(const tc_result* r, size_t col) {
  if (r == nullptr || col >= r->result.columns.size()) return nullptr;
  return r->result.columns[col].c_str();
}

double tc_result_value(const tc_result* r, size_t row, size_t col) {
  if (r == nullptr || row >= tc_result_rows(r) || col >= tc_result_cols(r)) return 0.0;
  return r->result.table(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
}

tc_status tc_result_metric(const tc_result* r, const char* name, double* value) {
  if (r == nullptr) return null_argument("result");
  if (name == nullptr) return null_argument("name");
  if (value == nullptr) return null_argument("value");
  return guarded([&] {
    *value = r->result.metric(name);
    return TC_OK;
  });
}

const char* tc_result_metrics_line(const tc_result* r) { return r ? r->metrics_line.c_str() : ""; }

const char* tc_result_csv_name(const tc_result* r) { return r ? r->result.csv_name.c_str() : ""; }

const char* tc_result_details_json(const tc_result* r) { return r ? r->details.c_str() : "{}"; }

int tc_result_converged(const tc_result* r) { return r && r->result.converged ? 1 : 0; }

tc_status tc_result_write_csv(const tc_result* r, const char* path) {
  if (r == nullptr) return null_argument("result");
  if (path == nullptr) return null_argument("path");
  return guarded([&] {
    trackctl::app::write_csv(r->result, path);
    return TC_OK;
  });
}

tc_status tc_result_write_plot_script(const tc_result* r, const char* csv_relpath, const char* path) {
  if (r == nullptr) return null_argument("result");
  if (csv_relpath == nullptr) return null_argument("csv_relpath");
  if (path == nullptr) return null_argument("path");
  return guarded([&] {
    trackctl::app::emit_plot_script(r->result, csv_relpath, path);
    return TC_OK;
  });
}

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace

tc_status tc_mat_exp(const double* a, size_t n, double t, double* out) {
  if (a == nullptr) return null_argument("a");
  if (out == nullptr) return null_argument("out");
  return guarded([&] {
    const auto dim = static_cast<Eigen::Index>(n);
    const trackctl::Matrix A = Eigen::Map<const RowMajor>(a, dim, dim);
    Eigen::Map<RowMajor>(out, dim, dim) = trackctl::linalg::mat_exp(A, t);
    return TC_OK;
  });
}

tc_status tc_char_poly(const double* a, size_t n, double* alpha_out) {
  if (a == nullptr) return null_argument("a");
  if (alpha_out == nullptr) return null_argument("alpha_out");
  return guarded([&] {
    const auto dim = static_cast<Eigen::Index>(n);
    const auto alpha = trackctl::linalg::char_poly_coeffs(Eigen::Map<const RowMajor>(a, dim, dim));
    std::copy(alpha.begin(), alpha.end(), alpha_out);
    return TC_OK;
  });
}

tc_status tc_brunovsky(const double* a, const double* b, size_t n, double* p_out, double* alpha_out) {
  if (a == nullptr) return null_argument("a");
  if (b == nullptr) return null_argument("b");
  if (p_out == nullptr) return null_argument("p_out");
  if (alpha_out == nullptr) return null_argument("alpha_out");
  return guarded([&] {
    const auto dim = static_cast<Eigen::Index>(n);
    const trackctl::Matrix A = Eigen::Map<const RowMajor>(a, dim, dim);
    const trackctl::Vector bv = Eigen::Map<const trackctl::Vector>(b, dim);
    const auto form = trackctl::brunovsky_transform(A, bv);
    Eigen::Map<RowMajor>(p_out, dim, dim) = form.P;
    std::copy(form.alpha.begin(), form.alpha.end(), alpha_out);
    return TC_OK;
  });
}

}  // extern "C"
