#include "anisop/cli_run.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include "anisop/experiments.hpp"
#include "anisop/io.hpp"

namespace anisop {

namespace {

const std::set<std::string> kTasks = {"check-norm", "eigen",      "solve",
                                      "continuation", "barrier",  "compare",
                                      "sweep-gamma",  "sweep-m"};

Grid grid_from(const nlohmann::json& j) {
  return build_grid(Domain::from_json(j.at("domain")),
                    j.at("resolution").get<int>());
}

std::vector<double> schedule_from(const nlohmann::json& j) {
  if (j.contains("schedule"))
    return j.at("schedule").get<std::vector<double>>();
  // default: geometric, ratio 1e-1, 1e-2 down to 1e-10
  std::vector<double> s;
  for (int k = 2; k <= 10; ++k) s.push_back(std::pow(10.0, -k));
  return s;
}

void write_field(OutputSet& out, const DiscreteField& u, const std::string& name) {
  u.write_csv((std::filesystem::path(out.dir()) / name).string());
  out.record(name);
}

void run_check_norm(const RunConfig& cfg, OutputSet& out) {
  const auto& j = cfg.config;
  const FinslerSpec norm = FinslerSpec::from_json(j.at("norm"));
  const int n_samples = j.value("n_samples", 10000);
  const auto rep = check_assumptions(norm, n_samples, cfg.seed);
  nlohmann::json result = {{"task", "check-norm"},
                           {"norm", norm.to_json()},
                           {"assumptions", rep.to_json()}};
  if (j.contains("p")) {
    const int n_pairs = j.value("n_pairs", 100000);
    const auto ineq = verify_vector_inequalities(norm, j.at("p").get<double>(),
                                                 n_pairs, cfg.seed);
    result["inequalities"] = ineq.to_json();
  }
  out.write_json("report.json", result);
}

void run_eigen(const RunConfig& cfg, OutputSet& out) {
  const auto& j = cfg.config;
  const Grid grid = grid_from(j);
  const FinslerSpec norm = FinslerSpec::from_json(j.at("norm"));
  const double tol = cfg.tol > 0.0 ? cfg.tol : j.value("tol", 1e-8);
  const auto rep = first_eigenpair(grid, norm, j.at("p").get<double>(), tol,
                                   j.value("max_iter", 200));
  nlohmann::json result = {{"task", "eigen"},
                           {"grid", grid.structure_json()},
                           {"eigen", rep.to_json()}};
  out.write_json("report.json", result);
  write_field(out, rep.phi1, "phi1.csv");
}

void run_solve(const RunConfig& cfg, OutputSet& out) {
  const auto& j = cfg.config;
  const ProblemSpec problem = ProblemSpec::from_json(j.at("problem"));
  const Grid grid = build_grid(problem.domain, problem.resolution);
  SolveOptions opts;
  if (cfg.tol > 0.0) opts.tol = cfg.tol;
  const auto rep =
      solve_regularized(problem, grid, j.at("epsilon").get<double>(), nullptr, opts);
  nlohmann::json result = {{"task", "solve"},
                           {"problem", problem.to_json()},
                           {"grid", grid.structure_json()},
                           {"report", rep.to_json()}};
  out.write_json("report.json", result);
  write_field(out, rep.u, "u.csv");
  if (!rep.converged) throw std::runtime_error("solve did not converge");
}

void run_continuation(const RunConfig& cfg, OutputSet& out) {
  const auto& j = cfg.config;
  const ProblemSpec problem = ProblemSpec::from_json(j.at("problem"));
  const Grid grid = build_grid(problem.domain, problem.resolution);
  SolveOptions opts;
  if (cfg.tol > 0.0) opts.tol = cfg.tol;
  const auto rep = solve_continuation(problem, grid, schedule_from(j), opts);
  nlohmann::json result = {{"task", "continuation"},
                           {"problem", problem.to_json()},
                           {"report", rep.to_json()}};
  out.write_json("report.json", result);
  if (!rep.steps.empty()) write_field(out, rep.steps.back().u, "u_final.csv");
  if (rep.aborted) throw std::runtime_error("continuation aborted");
}

void run_barrier(const RunConfig& cfg, OutputSet& out) {
  const auto& j = cfg.config;
  const ProblemSpec problem = ProblemSpec::from_json(j.at("problem"));
  const Grid grid = build_grid(problem.domain, problem.resolution);
  const auto eig = first_eigenpair(grid, problem.norm, problem.p);
  const auto cont = solve_continuation(problem, grid, schedule_from(j));
  if (cont.aborted || cont.steps.empty())
    throw std::runtime_error("barrier: continuation failed");
  const DiscreteField& u = cont.steps.back().u;

  const double strip_eps = j.value("strip_eps", 0.1);
  const double exclusion = j.value("exclusion_radius", 2.0 * grid.h);
  const double slack = j.value("slack_factor", 5.0) * grid.h * u.max_abs();
  const auto constants =
      compute_barrier_constants(eig, problem, grid, strip_eps, &u);
  const auto check = barrier_check(u, eig, constants.s1, constants.s2,
                                   constants.eta, slack, exclusion);
  nlohmann::json result = {{"task", "barrier"},
                           {"problem", problem.to_json()},
                           {"eigen", eig.to_json()},
                           {"constants", constants.to_json()},
                           {"barrier", check.to_json()}};
  out.write_json("report.json", result);
  write_field(out, u, "u.csv");
  write_field(out, eig.phi1, "phi1.csv");
}

void run_compare(const RunConfig& cfg, OutputSet& out) {
  const auto& j = cfg.config;
  const ProblemSpec p1 = ProblemSpec::from_json(j.at("problem1"));
  const ProblemSpec p2 = ProblemSpec::from_json(j.at("problem2"));
  const Grid grid = build_grid(p1.domain, p1.resolution);
  const double tol = cfg.tol > 0.0 ? cfg.tol : j.value("tolerance", 1e-8);
  const auto res =
      comparison_check(p1, p2, grid, j.at("epsilon").get<double>(), tol);
  nlohmann::json result = {{"task", "compare"}, {"comparison", res.to_json()}};
  out.write_json("report.json", result);
}

void run_sweep_gamma(const RunConfig& cfg, OutputSet& out) {
  const auto& j = cfg.config;
  const ProblemSpec tmpl = ProblemSpec::from_json(j.at("problem"));
  const Grid grid = build_grid(tmpl.domain, tmpl.resolution);
  const auto gammas = j.at("gamma_values").get<std::vector<double>>();
  const auto rep =
      gamma_sweep(tmpl, grid, gammas, schedule_from(j), cfg.threads);
  out.write_json("report.json",
                 {{"task", "sweep-gamma"}, {"sweep", rep.to_json()}});
  out.write_text("sweep.csv", rep.to_csv());
}

void run_sweep_m(const RunConfig& cfg, OutputSet& out) {
  const auto& j = cfg.config;
  const Grid grid = grid_from(j);
  const FinslerSpec norm = FinslerSpec::from_json(j.at("norm"));
  const auto rep = summability_sweep(
      j.at("p").get<double>(), j.at("gamma").get<double>(),
      j.at("m_values").get<std::vector<double>>(), j.value("delta_m", 0.1),
      grid, norm, j.value("theta", 0.0), schedule_from(j), cfg.threads);
  out.write_json("report.json", {{"task", "sweep-m"}, {"sweep", rep.to_json()}});
  out.write_text("sweep.csv", rep.to_csv());
}

}  // namespace

RunConfig RunConfig::load(const std::string& config_path,
                          const std::string& out_dir, std::uint64_t seed,
                          int threads, double tol) {
  std::ifstream in(config_path);
  if (!in)
    throw std::invalid_argument("cannot open config file: " + config_path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("task"))
    throw std::invalid_argument("config must be an object with a \"task\" key");
  const std::string task = j.at("task").get<std::string>();
  if (!kTasks.count(task))
    throw std::invalid_argument("unknown task '" + task + "'");
  if (threads < 1) throw std::invalid_argument("--threads must be >= 1");
  if (tol < 0.0) throw std::invalid_argument("--tol must be > 0");

  // validate payloads up front so a bad config writes nothing (exit 2)
  try {
    if (task == "check-norm" || task == "eigen" || task == "sweep-m")
      FinslerSpec::from_json(j.at("norm"));
    if (task == "eigen" || task == "sweep-m")
      Domain::from_json(j.at("domain"));
    if (task == "solve" || task == "continuation" || task == "barrier" ||
        task == "sweep-gamma")
      ProblemSpec::from_json(j.at("problem"));
    if (task == "compare") {
      ProblemSpec::from_json(j.at("problem1"));
      ProblemSpec::from_json(j.at("problem2"));
    }
    if (task == "solve" || task == "compare") j.at("epsilon").get<double>();
    if (task == "sweep-gamma") j.at("gamma_values").get<std::vector<double>>();
    if (task == "sweep-m") {
      j.at("p").get<double>();
      j.at("gamma").get<double>();
      j.at("m_values").get<std::vector<double>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config schema: ") + e.what());
  }

  RunConfig cfg;
  cfg.config = j;
  cfg.out_dir = out_dir;
  cfg.seed = seed;
  cfg.threads = threads;
  cfg.tol = tol;
  return cfg;
}

int run(const RunConfig& cfg) {
  const std::string task = cfg.config.at("task").get<std::string>();
  try {
    OutputSet out(cfg.out_dir);
    try {
      if (task == "check-norm") run_check_norm(cfg, out);
      else if (task == "eigen") run_eigen(cfg, out);
      else if (task == "solve") run_solve(cfg, out);
      else if (task == "continuation") run_continuation(cfg, out);
      else if (task == "barrier") run_barrier(cfg, out);
      else if (task == "compare") run_compare(cfg, out);
      else if (task == "sweep-gamma") run_sweep_gamma(cfg, out);
      else if (task == "sweep-m") run_sweep_m(cfg, out);
      out.write_manifest();
      return kOk;
    } catch (const std::exception& e) {
      // solver-level failure: keep partial outputs, add a failure record
      nlohmann::json fail = {{"task", task}, {"status", "solver_failure"},
                             {"error", e.what()}};
      out.write_json("failure.json", fail);
      out.write_manifest();
      std::cerr << "solver failure: " << e.what() << "\n";
      return kSolverError;
    }
  } catch (const std::exception& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kIoError;
  }
}

}  // namespace anisop
