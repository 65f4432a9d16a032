#include "wtls/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>

#include "wtls/errors.hpp"

namespace wtls::io {
namespace {

void reject_unknown_keys(const Json& j, const std::string& where, std::set<std::string> allowed) {
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key))
      throw ParseError((where.empty() ? "" : where + ": ") + "unknown key '" + key + "'");
  }
}

const Json& require_key(const Json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) throw ParseError(path + ": missing required field");
  return j.at(key);
}

const Json& require_object(const Json& j, const std::string& path) {
  if (!j.is_object()) throw ParseError(path + ": expected an object");
  return j;
}

double number(const Json& j, const std::string& path) {
  if (!j.is_number()) throw ParseError(path + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ParseError(path + ": non-finite value");
  return v;
}

int count(const Json& j, const std::string& path, int min_value) {
  const double v = number(j, path);
  if (v != std::floor(v) || v < min_value || v > 1e9)
    throw ParseError(path + ": expected an integer >= " + std::to_string(min_value));
  return static_cast<int>(v);
}

std::string text(const Json& j, const std::string& path) {
  if (!j.is_string()) throw ParseError(path + ": expected a string");
  return j.get<std::string>();
}

std::vector<double> numbers(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ParseError(path + ": expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

Vector vector_field(const Json& j, const std::string& path) {
  const auto v = numbers(j, path);
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Matrix matrix_field(const Json& j, const std::string& path, std::set<std::string> allowed) {
  require_object(j, path);
  allowed.insert({"rows", "cols", "data"});
  reject_unknown_keys(j, path, allowed);
  const int rows = count(require_key(j, "rows", path + ".rows"), path + ".rows", 1);
  const int cols = count(require_key(j, "cols", path + ".cols"), path + ".cols", 1);
  const auto data = numbers(require_key(j, "data", path + ".data"), path + ".data");
  if (data.size() != static_cast<std::size_t>(rows) * cols)
    throw ParseError(path + ".data: expected " + std::to_string(rows * cols) + " entries (rows * cols), got " +
                     std::to_string(data.size()));
  Matrix M(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) M(r, c) = data[static_cast<std::size_t>(r) * cols + c];
  return M;
}

ModelKind parse_model_kind(const std::string& s, const std::string& path) {
  if (s == "diagonal") return ModelKind::diagonal;
  if (s == "integral") return ModelKind::integral;
  if (s == "dense") return ModelKind::dense;
  throw ParseError(path + ": unknown model kind '" + s + "'");
}

lab::SequenceRule sequence_field(const Json& j, const std::string& path) {
  if (j.is_string()) {
    try {
      return lab::SequenceRule::parse(j.get<std::string>());
    } catch (const ParseError& e) {
      throw ParseError(path + ": " + e.what());
    }
  }
  if (j.is_number()) return lab::SequenceRule::power(number(j, path), 0.0);
  if (j.is_array()) return lab::SequenceRule::list(numbers(j, path));
  throw ParseError(path + ": expected a rule string or a list of numbers");
}

Json json_number(double v) {
  // NaN and infinities have no JSON representation; dump writes them as null.
  return Json(v);
}

void dump_into(std::ostringstream& os, const Json& j, int indent, int depth) {
  const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent) * (depth + 1), ' ') : "";
  const std::string close_pad = indent > 0 ? std::string(static_cast<std::size_t>(indent) * depth, ' ') : "";
  const char* nl = indent > 0 ? "\n" : "";
  const char* colon = indent > 0 ? ": " : ":";
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{" << nl;
      bool first = true;
      for (const auto& [key, val] : j.items()) {
        if (!first) os << "," << nl;
        first = false;
        os << pad << Json(key).dump() << colon;
        dump_into(os, val, indent, depth + 1);
      }
      os << nl << close_pad << "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      const bool flat = std::none_of(j.begin(), j.end(),
                                     [](const Json& e) { return e.is_structured(); });
      os << "[" << (flat ? "" : nl);
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << (flat ? (indent > 0 ? ", " : ",") : std::string(",") + nl);
        if (!flat) os << pad;
        dump_into(os, j[i], indent, depth + 1);
      }
      if (!flat) os << nl << close_pad;
      os << "]";
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      os << (std::isfinite(v) ? format_double(v) : "null");
      return;
    }
    default:
      os << j.dump();
  }
}

std::string csv_cell(double v) { return format_double(v); }

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string dump(const Json& j, int indent) {
  std::ostringstream os;
  dump_into(os, j, indent, 0);
  return os.str();
}

// ---------------------------------------------------------------------------
// Problems

ProblemSpec parse_problem(const Json& j) {
  require_object(j, "problem");
  reject_unknown_keys(j, "", {"A", "b", "W", "T", "origin"});

  Matrix A = matrix_field(require_key(j, "A", "A"), "A", {});
  Vector b = vector_field(require_key(j, "b", "b"), "b");

  WeightOperator W = WeightOperator::identity(b.size());
  if (j.contains("W")) {
    const Json& w = require_object(j.at("W"), "W");
    const std::string kind = text(require_key(w, "kind", "W.kind"), "W.kind");
    try {
      if (kind == "diagonal") {
        reject_unknown_keys(w, "W", {"kind", "data"});
        W = WeightOperator::diagonal(vector_field(require_key(w, "data", "W.data"), "W.data"));
      } else if (kind == "dense") {
        W = WeightOperator::dense(matrix_field(w, "W", {"kind"}));
      } else if (kind == "identity") {
        reject_unknown_keys(w, "W", {"kind"});
      } else {
        throw ParseError("W.kind: expected \"diagonal\", \"dense\" or \"identity\"");
      }
    } catch (const PreconditionError& e) {
      throw ParseError(std::string("W: ") + e.what());
    }
  }

  const Json& t = require_object(require_key(j, "T", "T"), "T");
  const std::string tkind = text(require_key(t, "kind", "T.kind"), "T.kind");
  std::optional<RegularizerSpec> T;
  try {
    if (tkind == "identity_scaled") {
      reject_unknown_keys(t, "T", {"kind", "rho"});
      T = RegularizerSpec::identity_scaled(number(require_key(t, "rho", "T.rho"), "T.rho"));
    } else if (tkind == "dense") {
      T = RegularizerSpec::dense(matrix_field(t, "T", {"kind"}));
    } else {
      throw ParseError("T.kind: expected \"identity_scaled\" or \"dense\"");
    }
  } catch (const PreconditionError& e) {
    throw ParseError(std::string("T: ") + e.what());
  }

  std::optional<Origin> origin;
  if (j.contains("origin") && !j.at("origin").is_null()) {
    const Json& o = require_object(j.at("origin"), "origin");
    reject_unknown_keys(o, "origin", {"model_kind", "truncation_order"});
    Origin org;
    org.model_kind = parse_model_kind(text(require_key(o, "model_kind", "origin.model_kind"),
                                           "origin.model_kind"),
                                      "origin.model_kind");
    org.truncation_order =
        count(require_key(o, "truncation_order", "origin.truncation_order"), "origin.truncation_order", 1);
    origin = org;
  }

  try {
    return ProblemSpec(std::move(A), std::move(b), std::move(W), std::move(*T), origin);
  } catch (const DimensionError& e) {
    throw ParseError(e.what());
  }
}

ProblemSpec parse_problem_text(const std::string& content) {
  Json j;
  try {
    j = Json::parse(content);
  } catch (const Json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  return parse_problem(j);
}

ProblemSpec load_problem(const std::string& path) { return parse_problem_text(read_file(path)); }

Json problem_to_json(const ProblemSpec& p) {
  auto flat = [](const Matrix& M) {
    Json data = Json::array();
    for (Eigen::Index r = 0; r < M.rows(); ++r)
      for (Eigen::Index c = 0; c < M.cols(); ++c) data.push_back(json_number(M(r, c)));
    return Json{{"rows", M.rows()}, {"cols", M.cols()}, {"data", data}};
  };
  Json j;
  j["A"] = flat(p.A());
  j["b"] = to_json(p.b());
  if (p.W().kind() == WeightOperator::Kind::diagonal) {
    j["W"] = {{"kind", "diagonal"}, {"data", to_json(Vector(p.W().diagonal_entries()))}};
  } else {
    Json w = flat(p.W().matrix());
    w["kind"] = "dense";
    j["W"] = w;
  }
  if (p.T().is_identity_scaled()) {
    j["T"] = {{"kind", "identity_scaled"}, {"rho", json_number(p.T().rho())}};
  } else {
    Json t = flat(p.T().dense_matrix());
    t["kind"] = "dense";
    j["T"] = t;
  }
  if (p.origin())
    j["origin"] = {{"model_kind", to_string(p.origin()->model_kind)},
                   {"truncation_order", p.origin()->truncation_order}};
  return j;
}

// ---------------------------------------------------------------------------
// Models

lab::SweepModel parse_model(const Json& j) {
  require_object(j, "model");
  if (j.contains("kernel")) {
    reject_unknown_keys(j, "", {"kernel", "grid", "rho"});
    lab::IntegralModel m;
    m.kernel = lab::IntegralModel::parse_kernel(text(j.at("kernel"), "kernel"));
    if (j.contains("grid")) m.grid = count(j.at("grid"), "grid", 3);
    if (j.contains("rho")) m.rho = number(j.at("rho"), "rho");
    if (!(m.rho > 0.0)) throw ParseError("rho: must be positive");
    return m;
  }
  reject_unknown_keys(j, "", {"a", "w", "b", "T", "rho", "n", "data_ratio"});
  lab::DiagonalModel m;
  if (j.contains("a")) m.a = sequence_field(j.at("a"), "a");
  if (j.contains("w")) m.w = sequence_field(j.at("w"), "w");
  if (j.contains("b")) m.b = sequence_field(j.at("b"), "b");
  if (j.contains("T") && !j.at("T").is_null()) m.T = sequence_field(j.at("T"), "T");
  if (j.contains("rho")) m.rho = number(j.at("rho"), "rho");
  if (j.contains("n")) m.n = count(j.at("n"), "n", 1);
  if (j.contains("data_ratio")) m.data_ratio = count(j.at("data_ratio"), "data_ratio", 1);
  if (!(m.rho > 0.0)) throw ParseError("rho: must be positive");
  return m;
}

lab::SweepModel load_model(const std::string& path) {
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const Json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  return parse_model(j);
}

// ---------------------------------------------------------------------------
// Serialization

Json to_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(json_number(v(i)));
  return a;
}

Json to_json(const Matrix& M) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) rows.push_back(to_json(Vector(M.row(r).transpose())));
  return rows;
}

Json to_json(const PairReport& r) {
  Json j;
  j["x"] = to_json(r.x);
  j["correction_vector"] = to_json(r.lift.correction);
  j["objective"] = r.objective;
  j["data_term"] = r.data_term;
  j["reg_term"] = r.reg_term;
  j["residual_normal_eq"] = r.residual_normal_eq;
  j["residual_rank_one"] = r.residual_rank_one;
  j["adjoint_norm"] = r.adjoint_norm;
  j["adjoint_gap"] = r.adjoint_gap;
  j["status"] = to_string(r.status);
  return j;
}

Json to_json(const DinkelbachTrace& t) {
  Json its = Json::array();
  for (const auto& it : t.iterates)
    its.push_back({{"t", it.t}, {"r", it.r}, {"phi", it.phi}, {"bisection", it.bisection}});
  Json j;
  j["t_star"] = t.t_star;
  j["x_star"] = to_json(t.x_star);
  j["phi_star"] = t.phi_star;
  j["tol_phi"] = t.tol_phi;
  j["rho"] = t.rho;
  j["verdict"] = to_string(t.verdict);
  j["iterates"] = its;
  return j;
}

Json to_json(const Certificate& c) {
  Json j;
  j["t"] = c.t;
  j["alpha"] = c.alpha;
  j["beta"] = c.beta;
  j["lambda_min"] = c.lambda_min;
  j["tol_psd"] = c.tol_psd;
  j["feasible"] = c.feasible;
  if (c.C) j["C"] = to_json(*c.C);
  return j;
}

Json to_json(const lab::SequenceResult& s) {
  Json pts = Json::array();
  for (const auto& p : s.points) {
    pts.push_back({{"eps", p.eps},
                   {"objective", p.objective},
                   {"bound", p.bound},
                   {"bound_rigorous", p.bound_rigorous},
                   {"interpolation_residual", p.interpolation_residual},
                   {"x_scaled_norm", p.x_scaled.norm()},
                   {"t_norm", p.t_norm},
                   {"wa_norm", p.wa_norm},
                   {"m_norm", p.m_norm}});
  }
  Json skipped = Json::array();
  for (double e : s.skipped) skipped.push_back(e);
  return {{"min_value", s.min_value}, {"points", pts}, {"skipped", skipped}};
}

Json to_json(const std::vector<lab::SweepRow>& rows) {
  Json out = Json::array();
  for (const auto& r : rows) {
    Json j{{"N", r.N},
           {"t_star", r.t_star},
           {"x_norm", r.x_norm},
           {"objective", r.objective},
           {"status", to_string(r.status)},
           {"existence", r.existence}};
    j["construction_objective"] = r.construction_objective ? Json(*r.construction_objective) : Json();
    out.push_back(j);
  }
  return out;
}

Json to_json(const lab::WeakContinuityTable& t) {
  Json rows = Json::array();
  for (const auto& r : t.rows) rows.push_back({{"n", r.n}, {"integral", r.integral}, {"error", r.error}});
  return {{"target", 7.0 * std::numbers::pi},
          {"rows", rows},
          {"limit_value", t.limit_value},
          {"limit_target", 8.0 * std::numbers::pi},
          {"limit_error", t.limit_error},
          {"passed", t.passed}};
}

Json to_json(const lab::DiagonalAudit& a) {
  Json j{{"d_indices", a.d_indices},
         {"c_indices", a.c_indices},
         {"s_norm", a.s_norm},
         {"tail_mass_ratio", a.tail_mass_ratio},
         {"max_ratio_gap", a.max_ratio_gap},
         {"critical_ok", a.critical_ok},
         {"h_star", a.h_star}};
  j["h_rebalanced"] = a.h_rebalanced ? Json(*a.h_rebalanced) : Json();
  return j;
}

Json to_json(const ClassicTlsSolution& s) {
  return {{"x", to_json(s.x)},
          {"X", to_json(s.X)},
          {"sigma_min", s.sigma_min},
          {"residual", s.residual}};
}

std::string to_csv(const lab::SequenceResult& s) {
  std::ostringstream os;
  os << "eps,objective,bound,bound_rigorous,interpolation_residual,t_norm,wa_norm,m_norm\n";
  for (const auto& p : s.points) {
    os << csv_cell(p.eps) << ',' << csv_cell(p.objective) << ',' << csv_cell(p.bound) << ','
       << csv_cell(p.bound_rigorous) << ',' << csv_cell(p.interpolation_residual) << ','
       << csv_cell(p.t_norm) << ',' << csv_cell(p.wa_norm) << ',' << csv_cell(p.m_norm) << '\n';
  }
  return os.str();
}

std::string to_csv(const std::vector<lab::SweepRow>& rows) {
  std::ostringstream os;
  os << "N,t_star,x_norm,objective,status,existence,construction_objective\n";
  for (const auto& r : rows) {
    os << r.N << ',' << csv_cell(r.t_star) << ',' << csv_cell(r.x_norm) << ','
       << csv_cell(r.objective) << ',' << to_string(r.status) << ',' << r.existence << ','
       << (r.construction_objective ? csv_cell(*r.construction_objective) : "") << '\n';
  }
  return os.str();
}

std::string to_csv(const lab::WeakContinuityTable& t) {
  std::ostringstream os;
  os << "n,integral,error\n";
  for (const auto& r : t.rows) os << r.n << ',' << csv_cell(r.integral) << ',' << csv_cell(r.error) << '\n';
  os << "limit," << csv_cell(t.limit_value) << ',' << csv_cell(t.limit_error) << '\n';
  return os.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
}

}  // namespace wtls::io
