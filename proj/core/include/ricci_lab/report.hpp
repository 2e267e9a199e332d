#pragma once

#include <cmath>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace rlab {

inline constexpr double kNotApplicable = std::numeric_limits<double>::quiet_NaN();

/// One evaluated inequality lhs <= rhs.
///
/// Hard reports re-derive a proof step and must always pass; soft reports
/// compare against empirical constants and only inform.
struct InequalityReport {
  std::string check_id;
  double t = kNotApplicable;
  double q = kNotApplicable;
  double p = kNotApplicable;
  double mu = kNotApplicable;
  double sigma = kNotApplicable;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  std::string witness;
  bool pass = false;
  bool hard = true;
  std::string note;
};

struct Tolerance {
  double abs = 1e-10;
  double rel = 1e-8;
};

/// Fills margin = rhs - lhs and pass = margin >= -abs - rel |rhs|.
InequalityReport make_report(std::string check_id, double lhs, double rhs, std::string witness,
                             bool hard = true, Tolerance tol = {});

/// Keeps the report with the smallest margin.
void keep_worst(InequalityReport& worst, const InequalityReport& candidate);

/// check_id,t,q,p,mu,sigma,lhs,rhs,margin,witness,pass
void write_report_csv(std::ostream& out, const std::vector<InequalityReport>& reports);

/// 17 significant digits, "nan" for not-applicable values.
std::string format_double(double value);

}  // namespace rlab
