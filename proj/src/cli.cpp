#include "wtls/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <random>
#include <utility>

#include "wtls/certificate.hpp"
#include "wtls/classic_tls.hpp"
#include "wtls/errors.hpp"
#include "wtls/fractional.hpp"
#include "wtls/io.hpp"
#include "wtls/lab.hpp"

namespace wtls::cli {
namespace {

using io::Json;

constexpr double kAgreementTol = 1e-4;

struct RunConfig {
  std::string problem_path;
  std::string model_path;
  std::string output_path;
  std::string format = "json";
  std::uint64_t seed = 0;
  double tol_phi = 0.0;
  double tol_t = 0.0;
  int grid = 512;
  int max_iter = 100;
  int starts = 8;
  int batch = 0;
  double box = 1.0;
  bool keep_C = false;
  int n = 0;
  std::vector<int> n_list{1, 2, 8, 32};
  std::vector<double> eps{1e-1, 1e-2, 1e-3, 1e-4};
  std::vector<int> N_list{4, 8, 16, 32};
  int quad_points = 8193;
};

SolverOptions solver_options(const RunConfig& c) {
  SolverOptions o;
  o.tol_phi = c.tol_phi;
  o.grid = c.grid;
  o.max_iter = c.max_iter;
  o.starts = c.starts;
  o.seed = c.seed;
  return o;
}

Json meta(const std::string& command, const RunConfig& c) {
  Json m;
  m["command"] = command;
  m["seed"] = c.seed;
  m["tolerances"] = {{"tol_phi", c.tol_phi}, {"tol_t", c.tol_t}};
  m["grid"] = c.grid;
  m["max_iter"] = c.max_iter;
  m["starts"] = c.starts;
  return m;
}

void emit(const RunConfig& c, std::ostream& out, const std::string& content) {
  if (c.output_path.empty() || c.output_path == "-") {
    out << content;
    return;
  }
  std::ofstream f(c.output_path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + c.output_path + "'");
  f << content;
}

void emit_json(const RunConfig& c, std::ostream& out, const Json& j) {
  if (c.format != "json") throw PreconditionError("this command only writes JSON");
  emit(c, out, io::dump(j) + "\n");
}

int status_exit(PairStatus s) {
  return s == PairStatus::solved || s == PairStatus::trivial ? kExitOk : kExitHeuristic;
}

int cmd_solve(const RunConfig& c, std::ostream& out) {
  const ProblemSpec p = io::load_problem(c.problem_path);
  const SolveOutcome sol = solve_rtls(p, solver_options(c));
  Json j;
  j["meta"] = meta("solve", c);
  j["report"] = io::to_json(sol.report);
  j["existence"] = sol.existence ? Json(to_string(*sol.existence)) : Json();
  j["trace"] = sol.trace ? io::to_json(*sol.trace) : Json();
  emit_json(c, out, j);
  return status_exit(sol.report.status);
}

struct Agreement {
  Json row;
  bool agree;
};

Agreement certify_one(const ProblemSpec& p, const RunConfig& c) {
  CertifyOptions co;
  co.tol_t = c.tol_t;
  co.box_scale = c.box;
  co.keep_C = c.keep_C;
  const Certificate cert = certify_tstar(p, co);
  const DinkelbachTrace tr = solve_tstar(p, solver_options(c));
  const double gap = std::abs(cert.t - tr.t_star);
  const double tol = std::max(c.tol_t, kAgreementTol * (1.0 + tr.t_star));
  const bool agree = tr.found_root() && gap <= tol;
  Json row;
  row["certificate"] = io::to_json(cert);
  row["t_dinkelbach"] = tr.t_star;
  row["gap"] = gap;
  row["tolerance"] = tol;
  row["agree"] = agree;
  return {row, agree};
}

ProblemSpec random_instance(std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> weight(0.5, 2.0);
  std::uniform_real_distribution<double> reg(0.1, 2.0);
  Matrix A(3, 3);
  for (Eigen::Index i = 0; i < A.size(); ++i) A.data()[i] = normal(rng);
  Vector b(3), w(3);
  for (int i = 0; i < 3; ++i) b(i) = normal(rng);
  for (int i = 0; i < 3; ++i) w(i) = weight(rng);
  return ProblemSpec(A, b, WeightOperator::diagonal(w), RegularizerSpec::identity_scaled(reg(rng)));
}

int cmd_certify(const RunConfig& c, std::ostream& out) {
  Json j;
  j["meta"] = meta("certify", c);
  bool all = true;
  if (c.batch > 0) {
    std::mt19937_64 rng(c.seed);
    Json rows = Json::array();
    for (int k = 0; k < c.batch; ++k) {
      auto [row, agree] = certify_one(random_instance(rng), c);
      row["index"] = k;
      rows.push_back(row);
      all = all && agree;
    }
    j["batch"] = rows;
  } else {
    if (c.problem_path.empty()) throw PreconditionError("certify needs --problem or --batch");
    auto [row, agree] = certify_one(io::load_problem(c.problem_path), c);
    j["result"] = row;
    all = agree;
  }
  j["all_agree"] = all;
  emit_json(c, out, j);
  return all ? kExitOk : kExitError;
}

ProblemSpec build_model(const lab::SweepModel& m, int n) {
  return std::visit(
      [n](const auto& model) {
        if constexpr (std::is_same_v<std::decay_t<decltype(model)>, lab::DiagonalModel>)
          return model.build(n > 0 ? n : model.n);
        else
          return model.build(n > 0 ? n : 16);
      },
      m);
}

template <typename Table>
void emit_table(const RunConfig& c, std::ostream& out, const std::string& command, const Table& t) {
  if (c.format == "csv") {
    emit(c, out, io::to_csv(t));
    return;
  }
  Json j;
  j["meta"] = meta(command, c);
  j["result"] = io::to_json(t);
  emit_json(c, out, j);
}

int cmd_demo(const std::string& which, const RunConfig& c, std::ostream& out) {
  if (which == "weakcont") {
    const auto table = lab::weak_continuity_demo(c.n_list, c.quad_points);
    emit_table(c, out, "demo weakcont", table);
    return table.passed ? kExitOk : kExitError;
  }
  const lab::SweepModel model = io::load_model(c.model_path);
  if (which == "nonexist-tls" || which == "nonexist-rtls") {
    const ProblemSpec p = build_model(model, c.n);
    const auto seq = which == "nonexist-tls" ? lab::nonexistence_tls_sequence(p, c.eps)
                                             : lab::nonexistence_rtls_sequence(p, c.eps);
    emit_table(c, out, "demo " + which, seq);
    return kExitOk;
  }
  if (which == "sweep") {
    const double rho = std::visit([](const auto& m) { return m.rho; }, model);
    const auto rows = lab::truncation_sweep(model, c.N_list, rho, solver_options(c));
    emit_table(c, out, "demo sweep", rows);
    const bool all = std::all_of(rows.begin(), rows.end(), [](const lab::SweepRow& r) {
      return status_exit(r.status) == kExitOk;
    });
    return all ? kExitOk : kExitHeuristic;
  }
  if (which == "diagonal") {
    const auto* dm = std::get_if<lab::DiagonalModel>(&model);
    if (!dm) throw PreconditionError("demo diagonal needs a diagonal model");
    if (dm->T) throw PreconditionError("demo diagonal uses T = sqrt(rho) I; drop the T field");
    const int n = c.n > 0 ? c.n : dm->n;
    const int support = dm->b.support();
    if (support < 0 || support > n)
      throw PreconditionError("demo diagonal needs b given as a finite list within n");
    const int N = std::max(support, 1);
    const auto res = lab::diagonal_solve(dm->a.head(n), dm->w.head(n), dm->b.head(N), dm->rho, n,
                                         solver_options(c));
    Json j;
    j["meta"] = meta("demo diagonal", c);
    j["report"] = io::to_json(res.outcome.report);
    j["existence"] = res.outcome.existence ? Json(to_string(*res.outcome.existence)) : Json();
    j["audit"] = io::to_json(res.audit);
    emit_json(c, out, j);
    return status_exit(res.outcome.report.status);
  }
  throw PreconditionError("unknown demo '" + which + "'");
}

int cmd_classic(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const ProblemSpec p = io::load_problem(c.problem_path);
  Json j;
  j["meta"] = meta("classic-tls", c);
  try {
    j["result"] = io::to_json(solve_classic_tls(p.A(), p.b()));
  } catch (const ClassicTlsError& e) {
    err << "error: " << e.what() << '\n';
    Json cands = Json::array();
    for (const auto& v : e.candidates()) cands.push_back(io::to_json(v));
    j["error"] = {{"kind", e.kind() == ClassicTlsError::Kind::nongeneric ? "nongeneric"
                                                                          : "repeated_sigma_min"},
                  {"message", e.what()},
                  {"candidates", cands}};
    emit_json(c, out, j);
    return kExitError;
  }
  emit_json(c, out, j);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Weighted and regularized total least squares"};
  app.name("rtls");
  app.require_subcommand(1);
  RunConfig c;

  auto add_out = [&](CLI::App* sub) {
    sub->add_option("--out", c.output_path, "Output file (default stdout)");
    sub->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  };
  auto add_solver = [&](CLI::App* sub) {
    sub->add_option("--tol-phi", c.tol_phi, "|phi| stopping threshold (0 = automatic)");
    sub->add_option("--grid", c.grid, "Radial grid size")->check(CLI::Range(8, 10000000));
    sub->add_option("--max-iter", c.max_iter, "Dinkelbach iteration cap")->check(CLI::PositiveNumber);
    sub->add_option("--starts", c.starts, "Multi-start count for general T")->check(CLI::PositiveNumber);
    sub->add_option("--seed", c.seed, "Random seed");
  };

  auto* solve = app.add_subcommand("solve", "Solve an RTLS problem file");
  solve->add_option("--problem", c.problem_path, "Problem JSON")->required()->check(CLI::ExistingFile);
  add_solver(solve);
  add_out(solve);

  auto* certify = app.add_subcommand("certify", "Semidefinite certificate of t*");
  certify->add_option("--problem", c.problem_path, "Problem JSON")->check(CLI::ExistingFile);
  certify->add_option("--batch", c.batch, "Random 3x3 instances instead of --problem")
      ->check(CLI::NonNegativeNumber);
  certify->add_option("--tol-t", c.tol_t, "Bisection width on t (0 = automatic)");
  certify->add_option("--box", c.box, "Search box multiplier")->check(CLI::PositiveNumber);
  certify->add_flag("--keep-C", c.keep_C, "Include the matrix C in the output");
  add_solver(certify);
  add_out(certify);

  auto* demo = app.add_subcommand("demo", "Laboratory demonstrations");
  demo->require_subcommand(1);
  std::string which;
  const std::pair<const char*, const char*> demos[] = {
      {"nonexist-tls", "TLS objectives driven to zero by the epsilon construction"},
      {"nonexist-rtls", "Same construction for the regularized problem"},
      {"diagonal", "Diagonal example with critical-point audit"},
      {"sweep", "t* across truncation orders"},
      {"weakcont", "Quadrature of the weak-continuity counterexample"}};
  for (const auto& [name, help] : demos) {
    auto* d = demo->add_subcommand(name, help);
    d->callback([&which, name] { which = name; });
    add_out(d);
    if (std::string(name) == "weakcont") {
      d->add_option("--n", c.n_list, "Frequencies")->delimiter(',');
      d->add_option("--quad-points", c.quad_points, "Simpson points (odd)");
      continue;
    }
    d->add_option("--model", c.model_path, "Model JSON")->required()->check(CLI::ExistingFile);
    add_solver(d);
    if (std::string(name) == "sweep") {
      d->add_option("--N", c.N_list, "Truncation orders")->delimiter(',');
    } else {
      d->add_option("--n", c.n, "Truncation order (default from the model)");
    }
    if (std::string(name).rfind("nonexist", 0) == 0)
      d->add_option("--eps", c.eps, "Epsilon values")->delimiter(',');
  }

  auto* classic = app.add_subcommand("classic-tls", "Unweighted TLS by SVD of (A | b)");
  classic->add_option("--problem", c.problem_path, "Problem JSON")->required()->check(CLI::ExistingFile);
  add_out(classic);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }

  try {
    if (solve->parsed()) return cmd_solve(c, out);
    if (certify->parsed()) return cmd_certify(c, out);
    if (demo->parsed()) return cmd_demo(which, c, out);
    if (classic->parsed()) return cmd_classic(c, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  err << "error: no command\n";
  return kExitError;
}

}  // namespace wtls::cli
