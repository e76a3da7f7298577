#pragma once

// Ordinary least squares with product and categorical terms, nested-model
// F-tests and prediction intervals.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "readtrace/core.hpp"

namespace readtrace {

/// A model term: the product of zero or more numeric variables, optionally
/// crossed with a categorical factor. Labels use the `a:b` and `C(f)` forms,
/// e.g. "Engagement:DECI" or "C(cluster):DECI".
struct Term {
  std::vector<std::string> numeric;
  std::optional<std::string> factor;

  static Term parse(std::string_view label);
  static std::vector<Term> parse_all(std::span<const std::string> labels);
  static Term product(const Term& a, const Term& b);

  std::string label() const;
  std::size_t order() const { return numeric.size() + (factor ? 1 : 0); }

  /// Same factor and the same numeric variables in any order.
  friend bool operator==(const Term& a, const Term& b);
};

/// Named numeric and integer-coded categorical columns of equal length.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::size_t rows) : rows_(rows), sized_(true) {}

  std::size_t rows() const { return rows_; }
  void add_numeric(const std::string& name, Eigen::VectorXd values);
  void add_factor(const std::string& name, std::vector<int> levels);

  bool has_numeric(const std::string& name) const { return numeric_.count(name) > 0; }
  bool has_factor(const std::string& name) const { return factors_.count(name) > 0; }
  const Eigen::VectorXd& numeric(const std::string& name) const;
  const std::vector<int>& factor(const std::string& name) const;

 private:
  void check_rows(std::size_t n, const std::string& name);
  std::size_t rows_ = 0;
  bool sized_ = false;
  std::map<std::string, Eigen::VectorXd> numeric_;
  std::map<std::string, std::vector<int>> factors_;
};

/// Treatment coding of one factor: one indicator column per non-reference level.
struct FactorCoding {
  std::string factor;
  int reference = 0;
  std::vector<int> levels;  // non-reference levels, ascending
};

struct Design {
  std::vector<Term> terms;
  std::vector<FactorCoding> factors;
  std::vector<std::string> columns;       // "Intercept" first
  std::vector<std::size_t> column_term;   // term index per column; npos for the intercept

  const FactorCoding* coding(const std::string& factor) const;
};

/// Lays out the columns for `terms`. A factor's reference level defaults to
/// its most frequent level (lowest level on ties) unless given explicitly.
Design make_design(std::span<const Term> terms, const Dataset& data,
                   const std::map<std::string, int>& reference_levels = {});

/// Rows of the design applied to `data`; products are raw (uncentered).
Eigen::MatrixXd design_matrix(const Design& design, const Dataset& data);

struct RegressionReport {
  std::string response;
  Design design;
  std::size_t n = 0;
  Eigen::VectorXd beta;
  Eigen::VectorXd se;
  Eigen::VectorXd t;
  Eigen::VectorXd p;
  Eigen::VectorXd ci_low;
  Eigen::VectorXd ci_high;
  Eigen::MatrixXd beta_covariance;
  Eigen::VectorXd residuals;
  double r2 = 0;
  double f_model = 0;
  double p_model = 1;
  int df_model = 0;
  int df_resid = 0;
  double residual_variance = 0;
  double sse = 0;
  double sst = 0;
  double t_crit = 0;  // two-sided 95% critical value at df_resid

  std::optional<Eigen::Index> column(std::string_view name) const;
};

struct FitOptions {
  /// Relative pivot threshold below which a column counts as dependent.
  double rank_tolerance = 1e-10;
};

/// Fits `response ~ 1 + terms` by column-pivoted Householder QR. Throws Error
/// naming the dependent columns when the design is rank deficient.
RegressionReport ols_fit(const Dataset& data, const std::string& response,
                         std::span<const Term> terms, const FitOptions& options = {});

/// Low-level fit of an explicit design whose first column is the intercept.
RegressionReport ols_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, Design design,
                         const FitOptions& options = {});

RegressionReport ols_fit(const Dataset& data, const std::string& response,
                         std::span<const std::string> term_labels, const FitOptions& options = {});

struct FTestResult {
  double delta_r2 = 0;
  double f = 0;
  int df1 = 1;
  int df2 = 1;
  double p = 1;
  std::optional<double> partial_eta_sq;
};

/// Compares nested fits of the same response and rows.
FTestResult partial_f(const RegressionReport& reduced, const RegressionReport& full);

/// The same test from summary values: F = (dR2/df1) / ((1 - R2_full)/df2).
FTestResult partial_f(double r2_reduced, double r2_full, int df1, int df2);

/// Fits `terms` and `terms` minus `block` and tests the block jointly; the
/// result carries partial eta squared.
FTestResult omnibus_block_test(const Dataset& data, const std::string& response,
                               std::span<const Term> terms, std::span<const Term> block,
                               const FitOptions& options = {});

struct Prediction {
  double fit = 0;
  double ci_low = 0;
  double ci_high = 0;
  double pi_low = 0;
  double pi_high = 0;
};

/// `grid` rows are full design rows (intercept column included).
std::vector<Prediction> predict_with_intervals(const RegressionReport& report, const Eigen::MatrixXd& grid);

/// Builds design rows for `grid` using the factor coding stored in the report.
std::vector<Prediction> predict_with_intervals(const RegressionReport& report, const Dataset& grid);

}  // namespace readtrace
