#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "wtls/certificate.hpp"
#include "wtls/classic_tls.hpp"
#include "wtls/fractional.hpp"
#include "wtls/lab.hpp"

namespace wtls::io {

using Json = nlohmann::ordered_json;

/// Locale-independent, 17 significant digits, shortest exponent form.
/// Non-finite values become "nan", "inf" or "-inf".
std::string format_double(double v);

/// Serializes with numbers printed through format_double; non-finite numbers
/// become null. Keys keep insertion order, so output is byte-stable.
std::string dump(const Json& j, int indent = 2);

/// Problem file:
///   {"A": {"rows", "cols", "data"}, "b": [...],
///    "W": {"kind": "diagonal", "data"} | {"kind": "dense", "rows", "cols", "data"},
///    "T": {"kind": "identity_scaled", "rho"} | {"kind": "dense", "rows", "cols", "data"},
///    "origin": {"model_kind", "truncation_order"}}
/// W defaults to the identity when absent. ParseError messages name the field.
ProblemSpec parse_problem(const Json& j);
ProblemSpec parse_problem_text(const std::string& text);
ProblemSpec load_problem(const std::string& path);
Json problem_to_json(const ProblemSpec& p);

/// Diagonal model: {"a", "w", "b", "T", "rho", "n", "data_ratio"}, each
/// sequence either a rule string ("1/k", "1/k^2") or an explicit list.
/// Integral model: {"kernel": "named:gaussian" | "named:cosine_demo", "grid", "rho"}.
lab::SweepModel parse_model(const Json& j);
lab::SweepModel load_model(const std::string& path);

Json to_json(const PairReport& r);
Json to_json(const DinkelbachTrace& t);
Json to_json(const Certificate& c);
Json to_json(const lab::SequenceResult& s);
Json to_json(const std::vector<lab::SweepRow>& rows);
Json to_json(const lab::WeakContinuityTable& t);
Json to_json(const lab::DiagonalAudit& a);
Json to_json(const ClassicTlsSolution& s);
Json to_json(const Vector& v);
Json to_json(const Matrix& M);

std::string to_csv(const lab::SequenceResult& s);
std::string to_csv(const std::vector<lab::SweepRow>& rows);
std::string to_csv(const lab::WeakContinuityTable& t);

std::string read_file(const std::string& path);
/// Writes to path, or to stdout when path is empty or "-".
void write_output(const std::string& path, const std::string& content);

}  // namespace wtls::io
