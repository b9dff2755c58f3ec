#include "trackctl/problem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "trackctl/error.hpp"

namespace trackctl {
namespace {

using nlohmann::json;

std::string child(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string index(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

double real(const json& v, const std::string& path) {
  if (!v.is_number()) throw ValidationError(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ValidationError(path, "must be finite");
  return x;
}

double positive(const json& v, const std::string& path) {
  const double x = real(v, path);
  if (!(x > 0.0)) throw ValidationError(path, "must be > 0");
  return x;
}

double nonnegative(const json& v, const std::string& path) {
  const double x = real(v, path);
  if (!(x >= 0.0)) throw ValidationError(path, "must be >= 0");
  return x;
}

int integer(const json& v, const std::string& path, int lo) {
  if (v.is_number_integer()) {
    const auto x = v.get<long long>();
    if (x < lo || x > 100000000) {
      throw ValidationError(path, "must be an integer in [" + std::to_string(lo) + ", 1e8]");
    }
    return static_cast<int>(x);
  }
  if (v.is_number_float()) {
    const double x = v.get<double>();
    if (std::isfinite(x) && x == std::floor(x) && x >= lo && x <= 1e8) return static_cast<int>(x);
  }
  throw ValidationError(path, "expected an integer >= " + std::to_string(lo));
}

std::vector<double> reals(const json& v, const std::string& path, bool allow_empty = false) {
  if (!v.is_array()) throw ValidationError(path, "expected an array of numbers");
  if (v.empty() && !allow_empty) throw ValidationError(path, "must not be empty");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(real(v[i], index(path, i)));
  return out;
}

// Nested arrays -> matrix. A flat array is read as one row (or one column
// when `flat_is_column`).
Matrix matrix(const json& v, const std::string& path, bool flat_is_column) {
  if (!v.is_array() || v.empty()) throw ValidationError(path, "expected a non-empty array");
  if (!v[0].is_array()) {
    const auto flat = reals(v, path);
    const auto len = static_cast<Eigen::Index>(flat.size());
    Matrix M = flat_is_column ? Matrix(len, 1) : Matrix(1, len);
    for (Eigen::Index i = 0; i < len; ++i) M(i) = flat[static_cast<std::size_t>(i)];
    return M;
  }
  const std::size_t rows = v.size();
  const std::size_t cols = v[0].size();
  if (cols == 0) throw ValidationError(index(path, 0), "row must not be empty");
  Matrix M(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string row_path = index(path, r);
    if (!v[r].is_array()) throw ValidationError(row_path, "expected an array row");
    if (v[r].size() != cols) {
      throw ValidationError(row_path, "row has " + std::to_string(v[r].size()) +
                                          " entries, expected " + std::to_string(cols));
    }
    for (std::size_t c = 0; c < cols; ++c) {
      M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = real(v[r][c], index(row_path, c));
    }
  }
  return M;
}

const json& field(const json& obj, const char* key, const std::string& path) {
  if (!obj.contains(key)) throw ValidationError(child(path, key), "missing required field");
  return obj.at(key);
}

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& path) {
  for (const auto& [key, value] : obj.items()) {
    if (!known.count(key)) throw ValidationError(child(path, key), "unknown field");
  }
}

}  // namespace

TargetSignal parse_target(const json& node, const std::string& path, double horizon) {
  if (!node.is_object()) throw ValidationError(path, "target must be an object");
  const json& kind_node = field(node, "kind", path);
  if (!kind_node.is_string()) throw ValidationError(child(path, "kind"), "expected a string");
  const std::string kind = kind_node.get<std::string>();

  TargetSignal f = TargetSignal::zero();
  if (kind == "polynomial") {
    reject_unknown(node, {"kind", "coeffs", "max_order"}, path);
    f = TargetSignal::polynomial(reals(field(node, "coeffs", path), child(path, "coeffs")));
  } else if (kind == "sinusoid") {
    reject_unknown(node, {"kind", "amp", "omega", "phase", "max_order"}, path);
    const double amp = node.contains("amp") ? real(node["amp"], child(path, "amp")) : 1.0;
    const double omega = real(field(node, "omega", path), child(path, "omega"));
    const double phase = node.contains("phase") ? real(node["phase"], child(path, "phase")) : 0.0;
    f = TargetSignal::sinusoid(amp, omega, phase);
  } else if (kind == "exponential") {
    reject_unknown(node, {"kind", "amp", "rate", "max_order"}, path);
    const double amp = node.contains("amp") ? real(node["amp"], child(path, "amp")) : 1.0;
    f = TargetSignal::exponential(amp, real(field(node, "rate", path), child(path, "rate")));
  } else if (kind == "floor") {
    reject_unknown(node, {"kind", "offset", "max_order"}, path);
    const double offset = node.contains("offset") ? real(node["offset"], child(path, "offset")) : 0.0;
    f = TargetSignal::floor_shift(offset);
  } else if (kind == "tabulated") {
    reject_unknown(node, {"kind", "values", "max_order"}, path);
    auto values = reals(field(node, "values", path), child(path, "values"));
    if (values.size() < 4) throw ValidationError(child(path, "values"), "needs at least 4 samples");
    if (!(horizon > 0.0)) throw ValidationError("T", "tabulated targets need the horizon T");
    f = TargetSignal::tabulated(horizon, std::move(values));
  } else if (kind == "sum") {
    reject_unknown(node, {"kind", "terms", "max_order"}, path);
    const json& terms = field(node, "terms", path);
    const std::string terms_path = child(path, "terms");
    if (!terms.is_array() || terms.empty()) throw ValidationError(terms_path, "expected a non-empty array");
    std::vector<std::pair<double, TargetSignal>> parsed;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const std::string term_path = index(terms_path, i);
      if (!terms[i].is_object()) throw ValidationError(term_path, "expected an object");
      reject_unknown(terms[i], {"weight", "signal"}, term_path);
      const double w = terms[i].contains("weight") ? real(terms[i]["weight"], child(term_path, "weight")) : 1.0;
      parsed.emplace_back(w, parse_target(field(terms[i], "signal", term_path), child(term_path, "signal"), horizon));
    }
    f = TargetSignal::weighted_sum(std::move(parsed));
  } else if (kind == "product") {
    reject_unknown(node, {"kind", "factors", "max_order"}, path);
    const json& factors = field(node, "factors", path);
    const std::string factors_path = child(path, "factors");
    if (!factors.is_array() || factors.empty()) throw ValidationError(factors_path, "expected a non-empty array");
    std::vector<TargetSignal> parsed;
    for (std::size_t i = 0; i < factors.size(); ++i) {
      parsed.push_back(parse_target(factors[i], index(factors_path, i), horizon));
    }
    f = TargetSignal::product(std::move(parsed));
  } else {
    throw ValidationError(child(path, "kind"), "unknown target kind '" + kind + "'");
  }
  if (node.contains("max_order")) f = f.with_max_order(integer(node["max_order"], child(path, "max_order"), 0));
  return f;
}

ProblemConfig parse_problem(const json& doc) {
  if (!doc.is_object()) throw ValidationError("$", "problem must be a JSON object");
  reject_unknown(doc,
                 {"A", "B", "E", "x0", "T", "N", "target", "alpha", "beta", "cg_tol", "cg_max_iters",
                  "refine", "alphas", "grids", "L", "M", "mode", "lambdas", "c", "targets"},
                 "");
  ProblemConfig cfg;
  cfg.source = doc;

  if (doc.contains("A")) {
    cfg.A = matrix(doc["A"], "A", false);
    if (cfg.A->rows() != cfg.A->cols()) throw ValidationError("A", "must be square");
  }
  const Eigen::Index n = cfg.A ? cfg.A->rows() : -1;
  if (doc.contains("B")) {
    cfg.B = matrix(doc["B"], "B", true);
    if (n >= 0 && cfg.B->rows() != n) throw ValidationError("B", "must have " + std::to_string(n) + " rows");
    if (n >= 0 && cfg.B->cols() > n) throw ValidationError("B", "must have at most n columns");
  }
  if (doc.contains("E")) {
    cfg.E = matrix(doc["E"], "E", false);
    if (n >= 0 && cfg.E->cols() != n) throw ValidationError("E", "must have " + std::to_string(n) + " columns");
    if (n >= 0 && cfg.E->rows() > n) throw ValidationError("E", "must have at most n rows");
  }
  if (doc.contains("x0")) {
    const auto v = reals(doc["x0"], "x0");
    cfg.x0 = Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
    if (n >= 0 && cfg.x0->size() != n) throw ValidationError("x0", "must have length " + std::to_string(n));
  }
  if (doc.contains("T")) cfg.horizon = positive(doc["T"], "T");
  if (doc.contains("N")) cfg.steps = integer(doc["N"], "N", 2);
  if (doc.contains("target")) cfg.target = parse_target(doc["target"], "target", cfg.horizon.value_or(0.0));
  if (doc.contains("alpha")) cfg.alpha = nonnegative(doc["alpha"], "alpha");
  if (doc.contains("beta")) cfg.beta = positive(doc["beta"], "beta");
  if (doc.contains("cg_tol")) {
    cfg.cg_tol = positive(doc["cg_tol"], "cg_tol");
    if (cfg.cg_tol >= 1.0) throw ValidationError("cg_tol", "must be < 1");
  }
  if (doc.contains("cg_max_iters")) cfg.cg_max_iters = integer(doc["cg_max_iters"], "cg_max_iters", 1);
  if (doc.contains("refine")) cfg.refine = integer(doc["refine"], "refine", 1);
  if (doc.contains("alphas")) {
    cfg.alphas = reals(doc["alphas"], "alphas");
    for (std::size_t i = 0; i < cfg.alphas.size(); ++i) {
      if (cfg.alphas[i] < 0.0) throw ValidationError(index("alphas", i), "must be >= 0");
    }
  }
  if (doc.contains("grids")) {
    const json& g = doc["grids"];
    if (!g.is_array() || g.empty()) throw ValidationError("grids", "expected a non-empty array");
    cfg.grids.clear();
    for (std::size_t i = 0; i < g.size(); ++i) cfg.grids.push_back(integer(g[i], index("grids", i), 2));
  }
  if (doc.contains("L") || doc.contains("M")) {
    const double L = doc.contains("L") ? positive(doc["L"], "L") : 1.0;
    const int M = integer(field(doc, "M", ""), "M", 1);
    cfg.chain = ChainSpec(L, M);
  }
  if (doc.contains("mode")) {
    if (!doc["mode"].is_string()) throw ValidationError("mode", "expected a string");
    cfg.mode = doc["mode"].get<std::string>();
    if (cfg.mode != "hum" && cfg.mode != "cascade") {
      throw ValidationError("mode", "must be \"hum\" or \"cascade\"");
    }
  }
  if (doc.contains("lambdas") || doc.contains("c") || doc.contains("targets")) {
    MomentSpec m;
    m.lambdas = reals(field(doc, "lambdas", ""), "lambdas");
    m.c = reals(field(doc, "c", ""), "c");
    if (m.c.size() != m.lambdas.size()) throw ValidationError("c", "must match the length of lambdas");
    const json& t = field(doc, "targets", "");
    if (!t.is_array()) throw ValidationError("targets", "expected an array of targets");
    if (t.size() != m.lambdas.size()) throw ValidationError("targets", "must match the length of lambdas");
    for (std::size_t i = 0; i < t.size(); ++i) {
      m.components.push_back(parse_target(t[i], index("targets", i), cfg.horizon.value_or(0.0)));
    }
    cfg.moment = std::move(m);
  }
  return cfg;
}

ProblemConfig parse_problem_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError("$", std::string("malformed JSON: ") + e.what());
  }
  return parse_problem(doc);
}

LtiSystem ProblemConfig::require_system() const {
  if (!A) throw ValidationError("A", "missing required field");
  if (!B) throw ValidationError("B", "missing required field");
  const Eigen::Index n = A->rows();
  const Matrix e = E ? *E : Matrix(Matrix::Identity(1, n));
  const Vector x = x0 ? *x0 : Vector(Vector::Zero(n));
  try {
    return LtiSystem(*A, *B, e, x);
  } catch (const Error& err) {
    throw ValidationError("A", err.what());
  }
}

Grid ProblemConfig::require_grid() const {
  if (!horizon) throw ValidationError("T", "missing required field");
  if (!steps) throw ValidationError("N", "missing required field");
  return Grid(*horizon, *steps);
}

const TargetSignal& ProblemConfig::require_target() const {
  if (!target) throw ValidationError("target", "missing required field");
  return *target;
}

const ChainSpec& ProblemConfig::require_chain() const {
  if (!chain) throw ValidationError("M", "missing required field");
  return *chain;
}

const MomentSpec& ProblemConfig::require_moment() const {
  if (!moment) throw ValidationError("lambdas", "missing required field");
  return *moment;
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void dump_into(std::ostringstream& os, const json& v, int indent, int depth) {
  const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string close_pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  const char* nl = indent > 0 ? "\n" : "";
  if (v.is_object()) {
    if (v.empty()) {
      os << "{}";
      return;
    }
    os << '{' << nl;
    bool first = true;
    for (const auto& [key, value] : v.items()) {
      if (!first) os << ',' << nl;
      first = false;
      os << pad << json(key).dump() << (indent > 0 ? ": " : ":");
      dump_into(os, value, indent, depth + 1);
    }
    os << nl << close_pad << '}';
  } else if (v.is_array()) {
    // Numeric rows stay on one line.
    const bool flat = std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_primitive(); });
    if (v.empty()) {
      os << "[]";
      return;
    }
    os << '[';
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i > 0) os << (flat ? ", " : ",");
      if (!flat) os << nl << pad;
      dump_into(os, v[i], indent, depth + 1);
    }
    if (!flat) os << nl << close_pad;
    os << ']';
  } else if (v.is_number_float()) {
    os << format_real(v.get<double>());
  } else {
    os << v.dump();
  }
}

}  // namespace

std::string dump_exact(const json& doc, int indent) {
  std::ostringstream os;
  dump_into(os, doc, indent, 0);
  return os.str();
}

}  // namespace trackctl
