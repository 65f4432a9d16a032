#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "wtls/errors.hpp"
#include "wtls/io.hpp"

using namespace wtls;

namespace {

std::string parse_error(const std::string& text) {
  try {
    io::parse_problem_text(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

const char* kValid = R"({
  "A": {"rows": 2, "cols": 2, "data": [1, 2, 3, 4]},
  "b": [1, 0],
  "W": {"kind": "diagonal", "data": [1, 2]},
  "T": {"kind": "identity_scaled", "rho": 0.5}
})";

}  // namespace

TEST_CASE("number formatting") {
  CHECK(io::format_double(9.0) == "9");
  CHECK(io::format_double(0.1) == "0.10000000000000001");
  CHECK(io::format_double(-0.5e-12) == "-4.9999999999999999e-13");
  CHECK(io::format_double(1e300) == "1.0000000000000001e+300");
  CHECK(io::format_double(std::numeric_limits<double>::infinity()) == "inf");
  const double third = 1.0 / 3.0;
  CHECK(std::stod(io::format_double(third)) == third);
}

TEST_CASE("dump is stable and valid JSON") {
  io::Json j;
  j["z"] = 1.0 / 3.0;
  j["a"] = {1.5, 2.0};
  j["nested"] = {{"k", "v"}, {"flag", true}};
  j["bad"] = std::numeric_limits<double>::quiet_NaN();
  const std::string s = io::dump(j);
  CHECK(s == io::dump(j));
  CHECK(s.find("\"z\"") < s.find("\"a\""));
  const auto back = io::Json::parse(s);
  CHECK(back["z"].get<double>() == 1.0 / 3.0);
  CHECK(back["bad"].is_null());
  CHECK(io::dump(j, 0).find('\n') == std::string::npos);
}

TEST_CASE("problem parsing") {
  const auto p = io::parse_problem_text(kValid);
  CHECK(p.A()(1, 0) == 3.0);
  CHECK(p.W().matrix()(1, 1) == 2.0);
  CHECK(p.T().rho() == 0.5);
  const auto round = io::parse_problem(io::problem_to_json(p));
  CHECK((round.A() - p.A()).norm() == 0.0);
  CHECK((round.b() - p.b()).norm() == 0.0);

  const auto dense = io::parse_problem_text(R"({
    "A": {"rows": 1, "cols": 2, "data": [1, 2]}, "b": [3],
    "W": {"kind": "dense", "rows": 1, "cols": 1, "data": [4]},
    "T": {"kind": "dense", "rows": 1, "cols": 2, "data": [0, 1]},
    "origin": {"model_kind": "integral", "truncation_order": 7}})");
  CHECK_FALSE(dense.T().is_identity_scaled());
  REQUIRE(dense.origin().has_value());
  CHECK(dense.origin()->truncation_order == 7);
}

TEST_CASE("problem parse errors name the field") {
  CHECK(parse_error(R"({"A": {"rows": 1, "cols": 1, "data": ["x"]}, "b": [1], "T": {"kind": "identity_scaled", "rho": 1}})")
            .find("A.data[0]") != std::string::npos);
  CHECK(parse_error(R"({"A": {"rows": 1, "cols": 2, "data": [1, 2]}, "b": [1, NaN], "T": {"kind": "identity_scaled", "rho": 1}})") != "");
  CHECK(parse_error(R"({"A": {"rows": 1, "cols": 1, "data": [1]}, "b": [1e999], "T": {"kind": "identity_scaled", "rho": 1}})")
            .find("1e999") != std::string::npos);
  CHECK(parse_error(R"({"A": {"rows": 1, "cols": 1, "data": [1]}, "b": [1], "T": {"kind": "identity_scaled", "rho": 1}, "extra": 1})")
            .find("extra") != std::string::npos);
  CHECK(parse_error(R"({"A": {"rows": 2, "cols": 1, "data": [1]}, "b": [1, 2], "T": {"kind": "identity_scaled", "rho": 1}})")
            .find("A.data") != std::string::npos);
  CHECK(parse_error(R"({"A": {"rows": 1, "cols": 1, "data": [1]}, "b": [1]})").find("T") != std::string::npos);
  CHECK(parse_error(R"({"A": {"rows": 1, "cols": 1, "data": [1]}, "b": [1], "T": {"kind": "identity_scaled", "rho": -1}})")
            .find("T") != std::string::npos);
  CHECK(parse_error(R"({"A": {"rows": 1, "cols": 1, "data": [1]}, "b": [1, 2], "T": {"kind": "identity_scaled", "rho": 1}})")
            .find("dimension") != std::string::npos);
  CHECK(parse_error("{not json") .find("invalid JSON") != std::string::npos);
  CHECK(parse_error(R"({"A": {"rows": 1, "cols": 1, "data": [1]}, "b": [1], "W": {"kind": "diagonal", "data": [-1]}, "T": {"kind": "identity_scaled", "rho": 1}})")
            .find("W") != std::string::npos);
}

TEST_CASE("model parsing") {
  const auto diag = io::parse_model(io::Json::parse(R"({"a": "1/k", "w": "1/k^2", "b": [1, 0.5], "rho": 2, "n": 12})"));
  const auto* d = std::get_if<lab::DiagonalModel>(&diag);
  REQUIRE(d != nullptr);
  CHECK(d->n == 12);
  CHECK(d->rho == 2.0);
  CHECK(d->b.support() == 2);
  CHECK(d->w.at(2) == doctest::Approx(0.25));

  const auto integ = io::parse_model(io::Json::parse(R"({"kernel": "named:cosine_demo", "grid": 65})"));
  const auto* g = std::get_if<lab::IntegralModel>(&integ);
  REQUIRE(g != nullptr);
  CHECK(g->grid == 65);
  CHECK(g->kernel == lab::IntegralModel::Kernel::cosine_demo);

  CHECK_THROWS_AS(io::parse_model(io::Json::parse(R"({"a": "sin k"})")), ParseError);
  CHECK_THROWS_AS(io::parse_model(io::Json::parse(R"({"kernel": "named:other"})")), ParseError);
  CHECK_THROWS_AS(io::parse_model(io::Json::parse(R"({"a": "1/k", "bogus": 1})")), ParseError);
  CHECK_THROWS_AS(io::parse_model(io::Json::parse(R"({"n": 2.5})")), ParseError);
}

TEST_CASE("report serialization fields") {
  PairReport r;
  r.x = Vector::Ones(2);
  r.lift.correction = Vector::Zero(3);
  r.objective = 9.0;
  r.status = PairStatus::solved;
  const auto j = io::to_json(r);
  for (const char* key : {"x", "correction_vector", "objective", "data_term", "reg_term", "residual_normal_eq",
                          "residual_rank_one", "status"})
    CHECK(j.contains(key));
  CHECK(j["status"] == "solved");

  Certificate c;
  c.t = 1.0;
  const auto jc = io::to_json(c);
  for (const char* key : {"t", "alpha", "beta", "lambda_min"}) CHECK(jc.contains(key));
  CHECK_FALSE(jc.contains("C"));
}

TEST_CASE("CSV tables") {
  lab::SequenceResult s;
  lab::SequencePoint pt;
  pt.eps = 0.1;
  pt.objective = 0.01;
  s.points.push_back(pt);
  const std::string csv = io::to_csv(s);
  CHECK(csv.rfind("eps,objective", 0) == 0);
  CHECK(csv.find("\n0.10000000000000001,0.01,") != std::string::npos);

  std::vector<lab::SweepRow> rows(1);
  rows[0].N = 4;
  CHECK(io::to_csv(rows).rfind("N,", 0) == 0);
}
