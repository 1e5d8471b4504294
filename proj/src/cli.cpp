#include "qpbound/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "qpbound/model_io.hpp"
#include "qpbound/oracle.hpp"

namespace qpbound::cli {

namespace {

std::string fmt12(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

RandomWalkSpec resolve_perturbed(const RandomWalkSpec& original,
                                 const std::string& spec) {
  if (spec == "split" || spec == "swap" || spec == "product_form")
    return io::apply_perturbation_rule(original, spec);
  return io::load_walk(spec);
}

}  // namespace

ProblemKind parse_kind(const std::string& s) {
  if (s == "upper_error") return ProblemKind::UpperError;
  if (s == "lower_error") return ProblemKind::LowerError;
  if (s == "comparison_upper") return ProblemKind::ComparisonUpper;
  if (s == "comparison_lower") return ProblemKind::ComparisonLower;
  if (s == "arbitrary_upper") return ProblemKind::ArbitraryUpper;
  if (s == "arbitrary_lower") return ProblemKind::ArbitraryLower;
  throw Error("unknown problem kind \"" + s + "\"");
}

FunctionShape parse_shape(const std::string& s) {
  if (s == "clinear") return FunctionShape::CLinear;
  if (s == "global_linear") return FunctionShape::GlobalLinear;
  if (s == "constant") return FunctionShape::Constant;
  throw Error("unknown function shape \"" + s + "\"");
}

int cmd_bound(const BoundOptions& opt) {
  try {
    RandomWalkSpec original = io::load_walk(opt.model);
    RandomWalkSpec perturbed = resolve_perturbed(original, opt.perturbed);
    PerturbationPair pair(original, perturbed);
    GeometricProductForm r = solve_rate_pair(perturbed);
    CLinearFn F = io::load_measure(opt.measure);
    AssembledProblem problem = assemble(parse_kind(opt.kind), pair, r, F,
                                        parse_shape(opt.shape));
    lp::Solution sol = lp::solve(problem.lp);
    std::cout << "status: " << lp::to_string(sol.status) << "\n";
    std::cout << "lp: " << problem.lp.variables.size() << " variables, "
              << problem.lp.constraints.size() << " constraints\n";
    std::cout << "product form: r1=" << fmt12(r.r1) << " r2=" << fmt12(r.r2)
              << "\n";
    if (sol.status == lp::SolveStatus::Infeasible) return 2;
    if (sol.status != lp::SolveStatus::Optimal) {
      std::cerr << "solver diagnostics: " << sol.diagnostics << "\n";
      return 1;
    }
    BoundCertificate cert = extract_certificate(problem, sol);
    std::cout << "bound: " << fmt12(cert.bound) << "\n";
    if (!opt.certificate_out.empty()) {
      std::ofstream out(opt.certificate_out);
      if (!out) throw Error("cannot write " + opt.certificate_out);
      out << io::certificate_to_json(cert).dump(2) << "\n";
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

namespace {

struct SweepPoint {
  bool valid = false;
  RandomWalkSpec original;
  RandomWalkSpec perturbed;
  double lambda = 0, mu = 0, mu_star = 0;  // family rates for manual bounds
};

struct SweepSpec {
  std::string family;
  std::string param;
  std::vector<double> grid;
  std::map<std::string, double> fixed;
  std::string perturbation;
  std::string measure = "indicator_origin";
  std::vector<std::string> kinds;
  std::string default_shape = "clinear";
  double oracle_tol = 1e-6;
  std::string out;
};

SweepSpec parse_sweep_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open sweep spec " + path);
  io::ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("sweep spec: ") + e.what());
  }
  SweepSpec s;
  s.family = j.at("family").get<std::string>();
  s.param = j.at("sweep").at("param").get<std::string>();
  s.grid = j.at("sweep").at("grid").get<std::vector<double>>();
  for (size_t i = 1; i < s.grid.size(); ++i)
    if (!(s.grid[i] > s.grid[i - 1]))
      throw Error("sweep spec: grid must be strictly increasing");
  if (j.contains("fixed"))
    for (const auto& [key, value] : j.at("fixed").items())
      s.fixed[key] = value.get<double>();
  s.perturbation = j.at("perturbation").get<std::string>();
  if (j.contains("measure")) s.measure = j.at("measure").get<std::string>();
  s.kinds = j.at("kinds").get<std::vector<std::string>>();
  if (j.contains("shape")) s.default_shape = j.at("shape").get<std::string>();
  if (j.contains("oracle_tol")) s.oracle_tol = j.at("oracle_tol").get<double>();
  s.out = j.at("out").get<std::string>();
  return s;
}

// Symmetric instances of the two families, parameterized by the system load
// rho = lambda/mu and the service ratio mu*/mu.
SweepPoint instantiate(const SweepSpec& spec, double value) {
  SweepPoint pt;
  auto param = [&](const std::string& name, double fallback) {
    if (spec.param == name) return value;
    auto it = spec.fixed.find(name);
    return it == spec.fixed.end() ? fallback : it->second;
  };
  try {
    if (spec.family == "joint_departures") {
      double rho, lambda, mu;
      if (spec.param == "rho" || spec.fixed.count("rho")) {
        rho = param("rho", 0.0);
        lambda = rho / (1 + 2 * rho);
        mu = 1 / (1 + 2 * rho);
      } else {
        lambda = param("lambda", 0.0);
        mu = 1 - 2 * lambda;
      }
      double ratio = param("mu_star_ratio", 0.5);
      double mu_star = ratio * mu;
      pt.original = joint_departures(lambda, lambda, mu, mu_star, mu_star);
      pt.lambda = lambda;
      pt.mu = mu;
      pt.mu_star = mu_star;
    } else if (spec.family == "coupled_processors") {
      double rho = param("rho", 0.0);
      double mu = 1 / (2 * (1 + rho));
      double lambda = rho * mu;
      double ratio = param("mu_star_ratio", 0.5);
      double mu_star = ratio * mu;
      pt.original = coupled_processors(lambda, lambda, mu, mu, mu_star, mu_star);
      pt.lambda = lambda;
      pt.mu = mu;
      pt.mu_star = mu_star;
    } else {
      throw Error("sweep spec: unknown family \"" + spec.family + "\"");
    }
    pt.perturbed = io::apply_perturbation_rule(pt.original, spec.perturbation);
    pt.valid = validate_walk(pt.original).ok() && validate_walk(pt.perturbed).ok();
  } catch (const Error&) {
    pt.valid = false;
  }
  return pt;
}

std::string sweep_cell(const SweepSpec& spec, const SweepPoint& pt,
                       const std::string& kind_entry, const CLinearFn& F) {
  if (!pt.valid) return "nan";
  try {
    if (kind_entry == "manual_upper" || kind_entry == "manual_lower") {
      auto [lo, hi] = manual_prop4_bounds(pt.lambda, pt.mu, pt.mu_star);
      return fmt12(kind_entry == "manual_upper" ? hi : lo);
    }
    std::string kind_name = kind_entry;
    std::string shape_name = spec.default_shape;
    if (auto pos = kind_entry.find(':'); pos != std::string::npos) {
      kind_name = kind_entry.substr(0, pos);
      shape_name = kind_entry.substr(pos + 1);
    }
    PerturbationPair pair(pt.original, pt.perturbed);
    GeometricProductForm r = solve_rate_pair(pt.perturbed);
    BoundResult res = solve_bound(parse_kind(kind_name), pair, r, F,
                                  parse_shape(shape_name));
    if (res.status == lp::SolveStatus::Infeasible) return "inf";
    if (res.status != lp::SolveStatus::Optimal) return "nan";
    return fmt12(res.certificate.bound);
  } catch (const Error&) {
    return "nan";
  }
}

}  // namespace

int cmd_sweep(const std::string& spec_path) {
  try {
    SweepSpec spec = parse_sweep_spec(spec_path);
    CLinearFn F = io::load_measure(spec.measure);

    std::vector<std::string> rows(spec.grid.size());
    // Grid points are independent; rows are written back in grid order.
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < long(spec.grid.size()); ++i) {
      SweepPoint pt = instantiate(spec, spec.grid[i]);
      std::ostringstream row;
      row << fmt12(spec.grid[i]);
      for (const auto& kind : spec.kinds)
        row << "," << sweep_cell(spec, pt, kind, F);
      std::string oracle = "nan";
      if (pt.valid) {
        try {
          oracle = fmt12(steady_state_value(pt.original, F, spec.oracle_tol).value);
        } catch (const Error&) {
        }
      }
      row << "," << oracle;
      rows[i] = row.str();
    }

    std::ofstream out(spec.out);
    if (!out) throw Error("cannot write " + spec.out);
    out << spec.param;
    for (const auto& kind : spec.kinds) {
      std::string header = kind;
      if (kind != "manual_upper" && kind != "manual_lower" &&
          kind.find(':') == std::string::npos)
        header += ":" + spec.default_shape;
      out << "," << header;
    }
    out << ",oracle\n";
    for (const auto& row : rows) out << row << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

namespace {

struct SuiteResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

SuiteResult suite_assumption1(int count, bool inject_defect) {
  SuiteResult res{"assumption1"};
  std::mt19937_64 rng(20240601);
  double worst = 0;
  for (int trial = 0; trial < count; ++trial) {
    RandomWalkSpec w = random_valid_walk(rng);
    CoefficientTable c = from_table1(w);
    if (inject_defect && trial == count / 2)
      c.set_c(1, 2, 1, kE2, c.c(1, 2, 1, kE2) + 0.01);
    AssumptionReport rep = verify_assumption(c, w, 1e-12);
    worst = std::max(worst, rep.max_residual);
    if (!rep.ok) {
      const auto& v = rep.violations.front();
      std::ostringstream os;
      os << "residual " << v.residual << " at i=" << v.i << " k=" << v.k
         << " w=(" << v.w.u1 << "," << v.w.u2 << ") on trial " << trial;
      res.detail = os.str();
      return res;
    }
  }
  res.pass = true;
  res.detail = "max residual " + fmt12(worst) + " over " +
               std::to_string(count) + " random walks";
  return res;
}

SuiteResult suite_recursion() {
  SuiteResult res{"recursion"};
  const std::array<RandomWalkSpec, 2> walks = {
      joint_departures(0.1, 0.1, 0.8, 0.32, 0.32),
      coupled_processors(0.2, 0.2, 0.3, 0.3, 0.25, 0.35)};
  const std::array<CLinearFn, 2> measures = {measure_indicator_origin(),
                                             measure_n1()};
  double worst = 0;
  for (const auto& w : walks)
    for (const auto& F : measures) {
      RecursionCheck chk = recursion_check(from_table1(w), w, F, 30, 100);
      worst = std::max(worst, chk.max_deviation);
      if (!chk.ok) {
        res.detail = "deviation " + fmt12(chk.max_deviation);
        return res;
      }
    }
  res.pass = true;
  res.detail = "max deviation " + fmt12(worst);
  return res;
}

SuiteResult suite_lemma4(int count) {
  SuiteResult res{"lemma4"};
  std::mt19937_64 rng(20240602);
  for (int trial = 0; trial < count; ++trial) {
    TLinearSymbolic h = random_concrete_tlinear(rng);
    auto ineqs = nonneg_inequalities(h);
    bool all_hold = true;
    for (const auto& iq : ineqs) {
      if (iq.expr.constant() < 0) {
        all_hold = false;
        Point witness = nonneg_violation_witness(h, iq);
        if (!(h.evaluate_concrete(witness) < 0)) {
          res.detail = "violated inequality without negative witness, trial " +
                       std::to_string(trial);
          return res;
        }
      }
    }
    if (all_hold) {
      for (long n2 = 0; n2 <= 200; ++n2)
        for (long n1 = 0; n1 <= 200; ++n1)
          if (h.evaluate_concrete({n1, n2}) < 0) {
            res.detail = "inequalities hold but function negative at (" +
                         std::to_string(n1) + "," + std::to_string(n2) + ")";
            return res;
          }
    }
  }
  res.pass = true;
  res.detail = std::to_string(count) + " random T-linear functions";
  return res;
}

SuiteResult suite_lemma5(int count) {
  SuiteResult res{"lemma5"};
  std::mt19937_64 rng(20240603);
  std::uniform_real_distribution<double> unif(0.05, 0.9);
  double worst = 0;
  for (int trial = 0; trial < count; ++trial) {
    CLinearFn f = random_clinear(rng);
    GeometricProductForm r(unif(rng), unif(rng));
    double closed = expectation(f, r);
    double summed = 0;
    for (long n2 = 300; n2 >= 0; --n2)
      for (long n1 = 300; n1 >= 0; --n1)
        summed += f.evaluate({n1, n2}) * r.pi({n1, n2});
    worst = std::max(worst, std::abs(closed - summed));
    if (std::abs(closed - summed) > 1e-8) {
      res.detail = "difference " + fmt12(closed - summed) + " on trial " +
                   std::to_string(trial);
      return res;
    }
  }
  res.pass = true;
  res.detail = "max difference " + fmt12(worst) + " over " +
               std::to_string(count) + " functions";
  return res;
}

SuiteResult suite_stationarity() {
  SuiteResult res{"stationarity"};
  struct Case {
    const char* name;
    RandomWalkSpec walk;
  };
  const std::array<Case, 2> cases = {{
      {"joint_departures/split",
       io::apply_perturbation_rule(joint_departures(0.1, 0.1, 0.8, 0.32, 0.32),
                                   "split")},
      {"coupled_processors/product_form",
       coupled_processors(0.2, 0.2, 0.3, 0.3, 0.25, 0.35)},
  }};
  for (const auto& cs : cases) {
    GeometricProductForm r = solve_rate_pair(cs.walk);
    if (!verify_geometric_stationarity(cs.walk, r, 1e-10).ok) {
      res.detail = std::string(cs.name) + ": residual above 1e-10";
      return res;
    }
    TruncatedDistribution dist = stationary_truncated(cs.walk, 200);
    double worst = 0;
    for (long n2 = 0; n2 <= 20; ++n2)
      for (long n1 = 0; n1 <= 20; ++n1)
        worst = std::max(worst,
                         std::abs(dist.at({n1, n2}) - r.pi({n1, n2})));
    if (worst > 1e-6) {
      res.detail = std::string(cs.name) + ": oracle mismatch " + fmt12(worst);
      return res;
    }
  }
  res.pass = true;
  res.detail = "product forms match the truncated-chain oracle";
  return res;
}

SuiteResult suite_certificate() {
  SuiteResult res{"certificate"};
  RandomWalkSpec original = joint_departures(0.1, 0.1, 0.8, 0.32, 0.32);
  RandomWalkSpec perturbed = io::apply_perturbation_rule(original, "split");
  PerturbationPair pair(original, perturbed);
  GeometricProductForm r = solve_rate_pair(perturbed);
  CLinearFn F = measure_indicator_origin();
  for (ProblemKind kind : {ProblemKind::UpperError, ProblemKind::LowerError}) {
    BoundResult b = solve_bound(kind, pair, r, F);
    if (b.status != lp::SolveStatus::Optimal) {
      res.detail = to_string(kind) + ": solver " + lp::to_string(b.status);
      return res;
    }
    CertificateCheck chk = check_certificate(b.certificate, pair, F, 100, 150);
    if (!chk.ok) {
      res.detail = to_string(kind) + ": margin " +
                   fmt12(std::min(chk.worst_sandwich_margin,
                                  chk.worst_theorem_margin));
      return res;
    }
  }
  res.pass = true;
  res.detail = "certificates verified at t_max=100";
  return res;
}

}  // namespace

int cmd_verify(const VerifyOptions& opt) {
  try {
    if (opt.dump_coefficients) {
      RandomWalkSpec w = opt.model.empty()
                             ? joint_departures(0.1, 0.1, 0.8, 0.32, 0.32)
                             : io::load_walk(opt.model);
      std::cout << io::coefficient_table_to_json(from_table1(w)).dump(2)
                << "\n";
      return 0;
    }
    auto wants = [&](const char* name) {
      if (opt.suites.empty()) return true;
      for (const auto& s : opt.suites)
        if (s == name) return true;
      return false;
    };
    std::vector<SuiteResult> results;
    if (wants("assumption1"))
      results.push_back(
          suite_assumption1(opt.random_count, opt.inject_defect == "coefficient"));
    if (wants("recursion")) results.push_back(suite_recursion());
    if (wants("lemma4"))
      results.push_back(suite_lemma4(std::min(opt.random_count, 2000)));
    if (wants("lemma5")) results.push_back(suite_lemma5(opt.random_count));
    if (wants("stationarity")) results.push_back(suite_stationarity());
    if (wants("certificate")) results.push_back(suite_certificate());
    if (results.empty()) throw Error("no such suite");

    bool all_pass = true;
    for (const auto& r : results) {
      std::cout << "suite " << r.name << ": " << (r.pass ? "PASS" : "FAIL")
                << " (" << r.detail << ")\n";
      all_pass = all_pass && r.pass;
    }
    return all_pass ? 0 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_oracle(const OracleOptions& opt) {
  try {
    RandomWalkSpec w = io::load_walk(opt.model);
    auto rep = validate_walk(w);
    if (!rep.ok()) throw Error("invalid model: " + rep.describe());
    CLinearFn F = io::load_measure(opt.measure);
    SteadyStateValue v = steady_state_value(w, F, opt.tol);
    std::cout << "value: " << fmt12(v.value) << "\n";
    std::cout << "error_bar: " << fmt12(v.error_bar) << "\n";
    std::cout << "truncation: " << v.M_used << "\n";
    if (!opt.grid_out.empty()) {
      TruncatedDistribution dist = stationary_truncated(w, opt.grid_m);
      std::ofstream out(opt.grid_out);
      if (!out) throw Error("cannot write " + opt.grid_out);
      out << "n1,n2,value\n";
      for (long n2 = 0; n2 <= dist.M; ++n2)
        for (long n1 = 0; n1 <= dist.M; ++n1)
          out << n1 << "," << n2 << "," << fmt12(dist.at({n1, n2})) << "\n";
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_export_lp(const ExportOptions& opt) {
  try {
    RandomWalkSpec original = io::load_walk(opt.model);
    RandomWalkSpec perturbed = resolve_perturbed(original, opt.perturbed);
    PerturbationPair pair(original, perturbed);
    GeometricProductForm r = solve_rate_pair(perturbed);
    CLinearFn F = io::load_measure(opt.measure);
    AssembledProblem problem = assemble(parse_kind(opt.kind), pair, r, F,
                                        parse_shape(opt.shape));
    std::ofstream out(opt.out);
    if (!out) throw Error("cannot write " + opt.out);
    out << lp::export_lp_text(problem.lp);
    std::cout << "wrote " << opt.out << " (" << problem.lp.variables.size()
              << " variables, " << problem.lp.constraints.size()
              << " constraints)\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace qpbound::cli
