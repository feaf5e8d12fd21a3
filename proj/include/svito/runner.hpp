#pragma once

// Command execution. Every run writes into out/<command>-<config hash>/ via a
// staging directory that is renamed into place, so a finished directory is
// never modified. Rerunning a config compares bytes against the existing tree.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "svito/acceptance.hpp"
#include "svito/config.hpp"

namespace svito {

enum ExitCode : int { kExitPass = 0, kExitCheckFailure = 2, kExitInconclusive = 3, kExitUsage = 64 };

struct RunResult {
  int exit_code = kExitPass;
  std::vector<Artifact> files;
  std::vector<std::string> lines;  // summary lines; also written to summary.txt
};

namespace runner_detail {

inline std::string verdict_word(bool ok) { return ok ? "pass" : "fail"; }

inline void fail_if(RunResult& r, bool bad) {
  if (bad && r.exit_code == kExitPass) r.exit_code = kExitCheckFailure;
}

inline RunResult algebra_check(const ExperimentConfig& c) {
  const std::size_t trials = c.get<std::size_t>("trials"), boxes = c.get<std::size_t>("box_trials");
  const auto rep = run_algebra_suite(trials, boxes, c.get<std::uint64_t>("seed"), c.get<double>("tol"), c.get<std::size_t>("max_box_dim"));
  RunResult r;
  std::ostringstream csv;
  csv << "property,trials,failures,worst\n";
  for (const auto& p : rep.properties) {
    csv << p.name << ',' << p.trials << ',' << p.failures << ',' << format_double(p.worst) << '\n';
    r.lines.push_back(p.name + ": " + std::to_string(p.failures) + " failures in " + std::to_string(p.trials) + " trials, worst " +
                      format_double(p.worst));
  }
  r.files.push_back({"algebra.csv", csv.str()});
  r.lines.push_back("verdict: " + verdict_word(rep.passed()));
  fail_if(r, !rep.passed());
  return r;
}

inline RunResult isometry(const ExperimentConfig& c) {
  IsometryOptions opt;
  opt.paths = c.get<std::size_t>("paths");
  opt.selections = c.get<std::size_t>("selections");
  opt.recipe = parse_recipe(c.get<std::string>("recipe"));
  opt.seed = c.get<std::uint64_t>("seed");
  opt.z = c.get<double>("z");
  opt.floor = c.get<double>("floor");
  opt.chunk = std::min<std::size_t>(opt.chunk, opt.paths);
  const TimeGrid grid(c.get<double>("horizon"), c.get<std::size_t>("steps"));
  const auto rep = setvalued_isometry_check(SetValuedProcess::constant(parse_set(c.get<std::string>("set"))), grid, opt);
  RunResult r;
  std::ostringstream csv, metrics;
  write_report_csv(csv, rep.rows);
  write_metrics_csv(metrics, {rep});
  r.files.push_back({"report.csv", csv.str()});
  r.files.push_back({"metrics.csv", metrics.str()});
  r.lines.push_back("hausdorff " + format_double(rep.metric("hausdorff")) + " vs threshold " + format_double(rep.metric("threshold")));
  r.lines.push_back("lhs [" + format_double(rep.metric("lhs_lo")) + ", " + format_double(rep.metric("lhs_hi")) + "], rhs [" +
                    format_double(rep.metric("rhs_lo")) + ", " + format_double(rep.metric("rhs_hi")) + "]");
  r.lines.push_back("verdict: " + rep.verdict);
  fail_if(r, !rep.passed);
  return r;
}

inline RunResult ito_verify(const ExperimentConfig& c) {
  const auto phi = parse_transform(c.get<std::string>("phi"));
  const TimeGrid grid(c.get<double>("horizon"), c.get<std::size_t>("steps"));
  const auto b = generate_brownian(grid, c.get<std::size_t>("paths"), 1, c.get<std::uint64_t>("seed"));
  const SetItoProcess proc{c.get<double>("x0"), SetValuedProcess::constant(parse_set(c.get<std::string>("f"))),
                           SetValuedProcess::constant(parse_set(c.get<std::string>("g")))};
  ItoOptions opt;
  opt.selections = c.get<std::size_t>("selections");
  opt.recipe = parse_recipe(c.get<std::string>("recipe"));
  opt.seed = c.get<std::uint64_t>("seed");
  opt.a = c.get<double>("a");
  opt.b = c.get<double>("b");
  const auto v = verify_ito_formula(phi, proc, b, opt);
  RunResult r;
  std::ostringstream csv, metrics;
  write_ito_csv(csv, v);
  write_metrics_csv(metrics, {v.report});
  r.files.push_back({"ito_report.csv", csv.str()});
  r.files.push_back({"metrics.csv", metrics.str()});
  r.lines.push_back("statistic (max over nodes of RMS Hausdorff) " + format_double(v.statistic) + " vs threshold " + format_double(v.threshold));
  r.lines.push_back("verdict: " + v.report.verdict);
  if (v.report.verdict == "uncalibrated") r.exit_code = kExitInconclusive;
  fail_if(r, v.report.verdict == "fail");
  return r;
}

inline SVBSDEProblem bsde_problem(const ExperimentConfig& c) {
  const auto& t = c.params.at("terminal");
  const auto& d = c.params.at("driver");
  SVBSDEProblem prob;
  prob.xi = {t.at("generator").get<std::string>(), t.at("alpha").get<double>(), t.at("beta").get<double>(), t.at("strike").get<double>()};
  prob.driver = {d.at("form").get<std::string>(), d.at("a").get<double>(), d.at("b").get<double>(), d.at("c1").get<double>(),
                 d.at("c2").get<double>(), d.at("lipschitz").is_null() ? NAN : d.at("lipschitz").get<double>()};
  prob.T = c.get<double>("T");
  prob.xi.validate();
  prob.driver.validate();
  return prob;
}

inline RunResult bsde_solve(const ExperimentConfig& c) {
  const auto prob = bsde_problem(c);
  SolverOptions opt;
  opt.max_iter = c.get<std::size_t>("max_iter");
  opt.tol = c.get<double>("tol");
  opt.selections = c.get<std::size_t>("K");
  opt.selection_seed = c.get<std::uint64_t>("seed");
  opt.init = Initialization::parse(c.get<std::string>("init"));
  opt.residual_tol = c.get<double>("residual_tol");
  opt.martingale_tol = c.get<double>("martingale_tol");
  std::vector<Initialization> inits;
  for (const auto& s : c.params.at("uniqueness_inits")) {
    if (!s.is_string()) throw UsageError("field 'uniqueness_inits' must list strings");
    inits.push_back(Initialization::parse(s.get<std::string>()));
  }
  if (inits.size() == 1) throw UsageError("field 'uniqueness_inits' needs at least two entries (or none)");
  const TimeGrid grid(prob.T, c.get<std::size_t>("N"));
  const auto b = generate_brownian(grid, c.get<std::size_t>("M"), 1, c.get<std::uint64_t>("seed"));
  const DiscreteFiltration filt(b, {c.get<int>("degree"), c.get<double>("ridge")});
  const auto rep = solve_svbsde(prob, filt, opt);

  RunResult r;
  std::ostringstream picard, solution;
  write_picard_csv(picard, rep);
  write_solution_csv(solution, rep, c.get<std::size_t>("solution_paths"));
  r.files.push_back({"picard_report.csv", picard.str()});
  r.files.push_back({"solution.csv", solution.str()});
  const bool residual_ok = rep.residual <= opt.residual_tol, martingale_ok = rep.martingale_gap <= opt.martingale_tol;
  r.lines.push_back("picard: " + rep.verdict + " after " + std::to_string(rep.iterations.size()) + " iterations (driver arity " +
                    to_string(rep.arity) + ", c = " + format_double(rep.c) + ")");
  if (!rep.failure.empty()) r.lines.push_back("failure: " + rep.failure);
  r.lines.push_back("fixed-point residual " + format_double(rep.residual) + " (tol " + format_double(opt.residual_tol) + "): " +
                    verdict_word(residual_ok));
  r.lines.push_back("martingale gap " + format_double(rep.martingale_gap) + " (tol " + format_double(opt.martingale_tol) + "): " +
                    verdict_word(martingale_ok));
  r.lines.push_back(std::string("telescoping: ") + verdict_word(rep.telescoping_ok));
  if (rep.ridge_fallback) r.lines.push_back("note: ridge fallback used in the regression");
  fail_if(r, !rep.converged || !residual_ok || !martingale_ok || !rep.telescoping_ok);

  if (!inits.empty()) {
    const auto u = uniqueness_probe(prob, filt, inits, opt);
    std::ostringstream csv;
    csv << "init,converged,iterations\n";
    for (std::size_t i = 0; i < u.runs.size(); ++i)
      csv << u.inits[i] << ',' << (u.runs[i].converged ? "true" : "false") << ',' << u.runs[i].iterations.size() << '\n';
    r.files.push_back({"uniqueness.csv", csv.str()});
    r.lines.push_back("uniqueness: " + u.verdict + " (sup-node distance Y " + format_double(u.max_y) + ", Z " + format_double(u.max_z) + ")");
    if (u.verdict == "inconclusive" && r.exit_code == kExitPass) r.exit_code = kExitInconclusive;
    fail_if(r, u.verdict == "fail");
  }
  return r;
}

inline RunResult brownian(const ExperimentConfig& c) {
  const TimeGrid grid(c.get<double>("horizon"), c.get<std::size_t>("steps"));
  const auto b = generate_brownian(grid, c.get<std::size_t>("paths"), c.get<std::size_t>("dims"), c.get<std::uint64_t>("seed"));
  std::ostringstream csv;
  csv << "path,step,dim,dW\n";
  for (std::size_t p = 0; p < b.paths(); ++p)
    for (std::size_t k = 0; k < grid.steps(); ++k)
      for (std::size_t d = 0; d < b.dims(); ++d) csv << p << ',' << k << ',' << d << ',' << format_double(b.dW(p, k, d)) << '\n';
  RunResult r;
  r.files.push_back({"increments.csv", csv.str()});
  r.lines.push_back(std::to_string(b.paths()) + " paths x " + std::to_string(grid.steps()) + " steps x " + std::to_string(b.dims()) + " dims");
  return r;
}

inline RunResult selections(const ExperimentConfig& c) {
  const TimeGrid grid(c.get<double>("horizon"), c.get<std::size_t>("steps"));
  const auto set = parse_set(c.get<std::string>("set"));
  const auto b = generate_brownian(grid, c.get<std::size_t>("paths"), std::max<std::size_t>(1, set.dim()), c.get<std::uint64_t>("seed"));
  const auto f = SetValuedProcess::constant(set);
  const auto family = build_selections(f, b, c.get<std::size_t>("selections"), parse_recipe(c.get<std::string>("recipe")),
                                       c.get<std::uint64_t>("seed"));
  std::ostringstream csv;
  const auto bad = audit_membership(f, family, b, 1e-12, &csv);
  RunResult r;
  r.files.push_back({"selections.csv", csv.str()});
  r.lines.push_back("membership violations: " + std::to_string(bad));
  fail_if(r, bad != 0);
  return r;
}

inline RunResult accept_all(const ExperimentConfig& c, std::ostream& log) {
  const auto seed = c.get<std::uint64_t>("seed");
  auto collect = [](const std::vector<CriterionResult>& results) {
    std::vector<Artifact> files;
    for (const auto& res : results)
      for (const auto& f : res.files) files.push_back(f);
    files.push_back({"acceptance.csv", acceptance_csv(results)});
    return files;
  };
  auto results = run_acceptance(seed, [&](const CriterionResult& res) { log << format_criterion(res) << std::endl; });
  const auto files = collect(results);

  // 11: a second full pass must reproduce every artifact byte for byte.
  CriterionResult det{11, "Determinism", true, "", 0, 0, {}};
  const auto start = std::chrono::steady_clock::now();
  const auto again = collect(run_acceptance(seed));
  std::map<std::string, std::string> a, b;
  for (const auto& f : files) a[f.name] = f.content;
  for (const auto& f : again) b[f.name] = f.content;
  const auto diff = tree_differences(a, b);
  det.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  det.passed = diff.empty();
  det.detail = std::to_string(a.size()) + " CSV files compared across two runs, " + std::to_string(diff.size()) + " differ";
  for (const auto& name : diff) det.detail += "; " + name;
  log << format_criterion(det) << std::endl;
  results.push_back(det);

  RunResult r;
  r.files = collect(results);
  for (const auto& res : results) {
    std::string d = res.detail;
    if (const auto cut = d.find("; runtime "); cut != std::string::npos) d.erase(cut);
    r.lines.push_back("criterion " + std::to_string(res.id) + " [" + (res.passed ? "PASS" : "FAIL") + "] " + res.title + ": " + d);
    fail_if(r, !res.passed);
  }
  return r;
}

}  // namespace runner_detail

/// Executes a validated config; artifacts are returned, not written.
inline RunResult execute(const ExperimentConfig& c, std::ostream& log) {
  using namespace runner_detail;
  if (c.command == "algebra-check") return algebra_check(c);
  if (c.command == "isometry") return isometry(c);
  if (c.command == "ito-verify") return ito_verify(c);
  if (c.command == "bsde-solve") return bsde_solve(c);
  if (c.command == "brownian") return brownian(c);
  if (c.command == "selections") return selections(c);
  if (c.command == "accept-all") return accept_all(c, log);
  throw UsageError("unknown command '" + c.command + "'");
}

struct CommitResult {
  std::filesystem::path dir;
  bool reused = false;                // the directory already existed
  std::vector<std::string> mismatched;  // files whose bytes differ from the existing run
};

/// Stages `files` plus config.json and summary.txt, then renames into place.
inline CommitResult commit_outputs(const std::filesystem::path& root, const ExperimentConfig& c, const RunResult& r) {
  namespace fs = std::filesystem;
  fs::create_directories(root);
  CommitResult out;
  out.dir = root / (c.command + "-" + c.hash());
  const fs::path stage = root / (".stage-" + c.command + "-" + c.hash() + "-" + std::to_string(::getpid()));
  fs::remove_all(stage);
  fs::create_directories(stage);
  auto write = [&](const std::string& name, const std::string& content) {
    std::ofstream f(stage / name, std::ios::binary);
    f << content;
    if (!f) throw std::runtime_error("cannot write " + (stage / name).string());
  };
  for (const auto& f : r.files) write(f.name, f.content);
  write("config.json", Json::parse(c.canonical()).dump(2) + "\n");
  std::string summary;
  for (const auto& line : r.lines) summary += line + "\n";
  write("summary.txt", summary);

  if (fs::exists(out.dir)) {
    out.reused = true;
    out.mismatched = tree_differences(read_tree(out.dir), read_tree(stage));
    fs::remove_all(stage);
    return out;
  }
  std::error_code ec;
  fs::rename(stage, out.dir, ec);
  if (ec) {
    // Lost a race with a concurrent identical run; compare against the winner.
    if (fs::exists(out.dir)) {
      out.reused = true;
      out.mismatched = tree_differences(read_tree(out.dir), read_tree(stage));
      fs::remove_all(stage);
      return out;
    }
    throw std::runtime_error("cannot move outputs into " + out.dir.string() + ": " + ec.message());
  }
  return out;
}

/// Runs and commits; prints the summary and returns the exit code.
inline int run(const ExperimentConfig& c, const std::filesystem::path& root, std::ostream& out, std::ostream& err) {
  RunResult r;
  try {
    r = execute(c, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UnsupportedOperation& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const StructuralError& e) {
    err << "structural error: " << e.what() << '\n';
    return kExitCheckFailure;
  } catch (const DiagnosticFailure& e) {
    err << "check failed: " << e.what() << '\n';
    return kExitCheckFailure;
  }
  const auto commit = commit_outputs(root, c, r);
  if (c.command != "accept-all")
    for (const auto& line : r.lines) out << line << '\n';
  out << "output: " << commit.dir.string() << (commit.reused ? " (existing run, compared)" : "") << '\n';
  if (!commit.mismatched.empty()) {
    err << "existing outputs differ from this run in:";
    for (const auto& name : commit.mismatched) err << ' ' << name;
    err << '\n';
    return kExitCheckFailure;
  }
  return r.exit_code;
}

}  // namespace svito
