#pragma once

#include <string>
#include <vector>

#include "qpbound/lp_builder.hpp"

namespace qpbound::cli {

ProblemKind parse_kind(const std::string& s);
FunctionShape parse_shape(const std::string& s);

struct BoundOptions {
  std::string model;
  std::string perturbed;  // path or rule name
  std::string measure = "indicator_origin";
  std::string kind = "upper_error";
  std::string shape = "clinear";
  std::string certificate_out;
};
// exit code 0 Optimal, 2 Infeasible, 1 input error.
int cmd_bound(const BoundOptions& opt);

// Spec file: family, sweep{param,grid}, fixed{...}, perturbation, measure,
// kinds[...], shape, oracle_tol, out.
int cmd_sweep(const std::string& spec_path);

struct VerifyOptions {
  std::vector<std::string> suites;  // empty = all
  int random_count = 1000;
  std::string model;               // for --coefficients
  bool dump_coefficients = false;
  std::string inject_defect;       // test hook; "coefficient" breaks a table entry
};
// exit code 3 on any suite failure.
int cmd_verify(const VerifyOptions& opt);

struct OracleOptions {
  std::string model;
  std::string measure = "indicator_origin";
  double tol = 1e-8;
  std::string grid_out;  // optional stationary grid CSV (n1,n2,value)
  int grid_m = 200;
};
int cmd_oracle(const OracleOptions& opt);

struct ExportOptions {
  std::string model;
  std::string perturbed;
  std::string measure = "indicator_origin";
  std::string kind = "upper_error";
  std::string shape = "clinear";
  std::string out;
};
int cmd_export_lp(const ExportOptions& opt);

}  // namespace qpbound::cli
