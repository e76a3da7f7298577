#include "readtrace/regression.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <set>

#include <Eigen/QR>

#include "readtrace/distributions.hpp"

namespace readtrace {

namespace {

constexpr std::size_t kNoTerm = static_cast<std::size_t>(-1);

std::string trim_copy(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

std::vector<std::string> sorted(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  return v;
}

bool same_term(const Term& a, const Term& b) {
  return a.factor == b.factor && sorted(a.numeric) == sorted(b.numeric);
}

bool contains_term(std::span<const Term> terms, const Term& t) {
  return std::any_of(terms.begin(), terms.end(), [&](const Term& u) { return same_term(u, t); });
}

}  // namespace

bool operator==(const Term& a, const Term& b) { return same_term(a, b); }

Term Term::parse(std::string_view label) {
  Term t;
  std::size_t start = 0;
  while (start <= label.size()) {
    std::size_t end = label.find(':', start);
    if (end == std::string_view::npos) end = label.size();
    std::string part = trim_copy(label.substr(start, end - start));
    if (part.empty()) throw Error("malformed term '" + std::string(label) + "'");
    if (part.size() > 3 && part.rfind("C(", 0) == 0 && part.back() == ')') {
      if (t.factor) throw Error("term '" + std::string(label) + "' crosses two factors");
      t.factor = trim_copy(std::string_view(part).substr(2, part.size() - 3));
    } else {
      t.numeric.push_back(std::move(part));
    }
    start = end + 1;
  }
  if (t.order() == 0) throw Error("empty term");
  return t;
}

std::vector<Term> Term::parse_all(std::span<const std::string> labels) {
  std::vector<Term> out;
  out.reserve(labels.size());
  for (const auto& l : labels) out.push_back(parse(l));
  return out;
}

Term Term::product(const Term& a, const Term& b) {
  if (a.factor && b.factor) throw Error("cannot cross two factors");
  Term t = a;
  t.numeric.insert(t.numeric.end(), b.numeric.begin(), b.numeric.end());
  if (b.factor) t.factor = b.factor;
  return t;
}

std::string Term::label() const {
  std::string out;
  if (factor) out = "C(" + *factor + ")";
  for (const auto& v : numeric) {
    if (!out.empty()) out += ':';
    out += v;
  }
  return out;
}

void Dataset::check_rows(std::size_t n, const std::string& name) {
  if (!sized_) {
    rows_ = n;
    sized_ = true;
  }
  if (n != rows_) throw Error("column '" + name + "' has " + std::to_string(n) + " rows, expected " +
                              std::to_string(rows_));
}

void Dataset::add_numeric(const std::string& name, Eigen::VectorXd values) {
  check_rows(static_cast<std::size_t>(values.size()), name);
  numeric_[name] = std::move(values);
}

void Dataset::add_factor(const std::string& name, std::vector<int> levels) {
  check_rows(levels.size(), name);
  factors_[name] = std::move(levels);
}

const Eigen::VectorXd& Dataset::numeric(const std::string& name) const {
  auto it = numeric_.find(name);
  if (it == numeric_.end()) throw Error("unknown numeric variable '" + name + "'");
  return it->second;
}

const std::vector<int>& Dataset::factor(const std::string& name) const {
  auto it = factors_.find(name);
  if (it == factors_.end()) throw Error("unknown factor '" + name + "'");
  return it->second;
}

const FactorCoding* Design::coding(const std::string& factor) const {
  for (const auto& f : factors)
    if (f.factor == factor) return &f;
  return nullptr;
}

Design make_design(std::span<const Term> terms, const Dataset& data,
                   const std::map<std::string, int>& reference_levels) {
  Design d;
  d.terms.assign(terms.begin(), terms.end());
  d.columns.push_back("Intercept");
  d.column_term.push_back(kNoTerm);

  for (std::size_t ti = 0; ti < d.terms.size(); ++ti) {
    const Term& term = d.terms[ti];
    for (std::size_t tj = 0; tj < ti; ++tj)
      if (same_term(d.terms[tj], term)) throw Error("duplicate term '" + term.label() + "'");
    for (const auto& v : term.numeric) (void)data.numeric(v);

    if (!term.factor) {
      d.columns.push_back(term.label());
      d.column_term.push_back(ti);
      continue;
    }
    const std::string& f = *term.factor;
    if (!d.coding(f)) {
      const auto& values = data.factor(f);
      std::map<int, std::size_t> counts;
      for (int v : values) ++counts[v];
      if (counts.empty()) throw Error("factor '" + f + "' has no observations");
      FactorCoding coding{f, 0, {}};
      if (auto it = reference_levels.find(f); it != reference_levels.end()) {
        if (!counts.count(it->second)) throw Error("reference level not observed for factor '" + f + "'");
        coding.reference = it->second;
      } else {
        std::size_t best = 0;
        for (const auto& [level, count] : counts)
          if (count > best) {
            best = count;
            coding.reference = level;
          }
      }
      for (const auto& [level, count] : counts)
        if (level != coding.reference) coding.levels.push_back(level);
      d.factors.push_back(std::move(coding));
    }
    const FactorCoding& coding = *d.coding(f);
    std::string suffix;
    for (const auto& v : term.numeric) suffix += ":" + v;
    for (int level : coding.levels) {
      d.columns.push_back("C(" + f + ")[T." + std::to_string(level) + "]" + suffix);
      d.column_term.push_back(ti);
    }
  }
  return d;
}

Eigen::MatrixXd design_matrix(const Design& design, const Dataset& data) {
  const auto n = static_cast<Eigen::Index>(data.rows());
  Eigen::MatrixXd x(n, static_cast<Eigen::Index>(design.columns.size()));
  x.col(0).setOnes();
  Eigen::Index col = 1;
  for (const Term& term : design.terms) {
    Eigen::VectorXd prod = Eigen::VectorXd::Ones(n);
    for (const auto& v : term.numeric) prod.array() *= data.numeric(v).array();
    if (!term.factor) {
      x.col(col++) = prod;
      continue;
    }
    const FactorCoding* coding = design.coding(*term.factor);
    if (!coding) throw Error("design lacks a coding for factor '" + *term.factor + "'");
    const auto& values = data.factor(*term.factor);
    for (int level : coding->levels) {
      for (Eigen::Index i = 0; i < n; ++i)
        x(i, col) = values[static_cast<std::size_t>(i)] == level ? prod(i) : 0.0;
      ++col;
    }
  }
  return x;
}

std::optional<Eigen::Index> RegressionReport::column(std::string_view name) const {
  for (std::size_t i = 0; i < design.columns.size(); ++i)
    if (design.columns[i] == name) return static_cast<Eigen::Index>(i);
  return std::nullopt;
}

RegressionReport ols_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, Design design,
                         const FitOptions& options) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  if (y.size() != n) throw Error("response length differs from the design");
  if (static_cast<std::size_t>(p) != design.columns.size()) throw Error("design columns do not match names");
  if (n <= p)
    throw Error("need more observations (" + std::to_string(n) + ") than columns (" + std::to_string(p) + ")");
  if (!x.allFinite() || !y.allFinite()) throw Error("non-finite values in regression data");

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(n, p);
  qr.setThreshold(options.rank_tolerance);
  qr.compute(x);
  if (qr.rank() < p) {
    std::string names;
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index i = qr.rank(); i < p; ++i) {
      if (!names.empty()) names += ", ";
      names += design.columns[static_cast<std::size_t>(perm(i))];
    }
    throw Error("rank-deficient design; dependent columns: " + names);
  }

  RegressionReport r;
  r.design = std::move(design);
  r.n = static_cast<std::size_t>(n);
  r.beta = qr.solve(y);
  r.residuals = y - x * r.beta;
  r.sse = r.residuals.squaredNorm();
  r.sst = (y.array() - y.mean()).square().sum();
  if (!(r.sst > 0)) throw Error("response is constant");
  r.df_model = static_cast<int>(p - 1);
  r.df_resid = static_cast<int>(n - p);
  r.r2 = std::clamp(1.0 - r.sse / r.sst, 0.0, 1.0);
  r.residual_variance = r.sse / r.df_resid;

  const Eigen::MatrixXd rmat = qr.matrixR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd rinv =
      rmat.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
  const Eigen::MatrixXd unscaled = qr.colsPermutation() * (rinv * rinv.transpose()) *
                                   qr.colsPermutation().transpose();
  r.beta_covariance = r.residual_variance * unscaled;
  r.se = r.beta_covariance.diagonal().cwiseMax(0.0).cwiseSqrt();

  r.t_crit = student_t_quantile(0.975, r.df_resid);
  r.t.resize(p);
  r.p.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    if (r.se(j) > 0) {
      r.t(j) = r.beta(j) / r.se(j);
    } else {
      r.t(j) = r.beta(j) == 0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), r.beta(j));
    }
    r.p(j) = student_t_two_tailed_p(r.t(j), r.df_resid);
  }
  r.ci_low = r.beta - r.t_crit * r.se;
  r.ci_high = r.beta + r.t_crit * r.se;

  if (r.df_model == 0) {
    r.f_model = 0;
    r.p_model = 1;
  } else if (r.sse <= 0) {
    r.f_model = std::numeric_limits<double>::infinity();
    r.p_model = 0;
  } else {
    r.f_model = ((r.sst - r.sse) / r.df_model) / (r.sse / r.df_resid);
    r.p_model = f_sf(r.f_model, r.df_model, r.df_resid);
  }
  return r;
}

RegressionReport ols_fit(const Dataset& data, const std::string& response, std::span<const Term> terms,
                         const FitOptions& options) {
  Design design = make_design(terms, data);
  const Eigen::MatrixXd x = design_matrix(design, data);
  RegressionReport r = ols_fit(x, data.numeric(response), std::move(design), options);
  r.response = response;
  return r;
}

RegressionReport ols_fit(const Dataset& data, const std::string& response,
                         std::span<const std::string> term_labels, const FitOptions& options) {
  const auto terms = Term::parse_all(term_labels);
  return ols_fit(data, response, terms, options);
}

FTestResult partial_f(const RegressionReport& reduced, const RegressionReport& full) {
  if (reduced.n != full.n || reduced.response != full.response ||
      std::fabs(reduced.sst - full.sst) > 1e-9 * std::max(1.0, full.sst))
    throw Error("partial F: models were not fitted to the same data");
  const std::set<std::string> full_cols(full.design.columns.begin(), full.design.columns.end());
  for (const auto& c : reduced.design.columns)
    if (!full_cols.count(c)) throw Error("partial F: models are not nested ('" + c + "' missing from the full model)");
  FTestResult out;
  out.df1 = full.df_model - reduced.df_model;
  out.df2 = full.df_resid;
  if (out.df1 < 1) throw Error("partial F: the full model adds no terms");
  out.delta_r2 = full.r2 - reduced.r2;

  const double delta_ssr = std::max(0.0, reduced.sse - full.sse);
  out.partial_eta_sq = delta_ssr + full.sse > 0 ? delta_ssr / (delta_ssr + full.sse) : 0.0;
  // A reduced model that already fits exactly leaves nothing to explain.
  if (reduced.sse <= 1e-12 * reduced.sst) {
    out.f = 0;
    out.p = 1;
    out.partial_eta_sq = 0.0;
    return out;
  }
  if (full.sse <= 0) {
    out.f = std::numeric_limits<double>::infinity();
    out.p = 0;
    return out;
  }
  out.f = (delta_ssr / out.df1) / (full.sse / out.df2);
  out.p = f_sf(out.f, out.df1, out.df2);
  return out;
}

FTestResult partial_f(double r2_reduced, double r2_full, int df1, int df2) {
  if (df1 < 1 || df2 < 1) throw Error("partial F: degrees of freedom must be >= 1");
  if (!(r2_reduced >= 0 && r2_reduced <= 1 && r2_full >= 0 && r2_full <= 1))
    throw Error("partial F: R^2 values must lie in [0, 1]");
  if (r2_full < r2_reduced - 1e-12) throw Error("partial F: full model has a lower R^2");
  FTestResult out;
  out.df1 = df1;
  out.df2 = df2;
  out.delta_r2 = r2_full - r2_reduced;
  const double delta = std::max(0.0, out.delta_r2);
  const double unexplained = 1.0 - r2_full;
  out.partial_eta_sq = delta + unexplained > 0 ? delta / (delta + unexplained) : 0.0;
  if (delta == 0) {
    out.f = 0;
    out.p = 1;
  } else if (unexplained <= 0) {
    out.f = std::numeric_limits<double>::infinity();
    out.p = 0;
  } else {
    out.f = (delta / df1) / (unexplained / df2);
    out.p = f_sf(out.f, df1, df2);
  }
  return out;
}

FTestResult omnibus_block_test(const Dataset& data, const std::string& response, std::span<const Term> terms,
                               std::span<const Term> block, const FitOptions& options) {
  if (block.empty()) throw Error("omnibus test needs a non-empty block");
  for (const Term& b : block)
    if (!contains_term(terms, b)) throw Error("block term '" + b.label() + "' is not in the model");
  std::vector<Term> reduced_terms;
  for (const Term& t : terms)
    if (!contains_term(block, t)) reduced_terms.push_back(t);

  const RegressionReport full = ols_fit(data, response, terms, options);
  const RegressionReport reduced = ols_fit(data, response, reduced_terms, options);
  return partial_f(reduced, full);
}

std::vector<Prediction> predict_with_intervals(const RegressionReport& report, const Eigen::MatrixXd& grid) {
  if (grid.cols() != report.beta.size())
    throw Error("prediction grid has " + std::to_string(grid.cols()) + " columns, model has " +
                std::to_string(report.beta.size()));
  std::vector<Prediction> out(static_cast<std::size_t>(grid.rows()));
  for (Eigen::Index i = 0; i < grid.rows(); ++i) {
    const Eigen::RowVectorXd x = grid.row(i);
    const double var_mean = std::max(0.0, (x * report.beta_covariance * x.transpose())(0, 0));
    Prediction& p = out[static_cast<std::size_t>(i)];
    p.fit = x.dot(report.beta);
    const double ci = report.t_crit * std::sqrt(var_mean);
    const double pi = report.t_crit * std::sqrt(var_mean + report.residual_variance);
    p.ci_low = p.fit - ci;
    p.ci_high = p.fit + ci;
    p.pi_low = p.fit - pi;
    p.pi_high = p.fit + pi;
  }
  return out;
}

std::vector<Prediction> predict_with_intervals(const RegressionReport& report, const Dataset& grid) {
  return predict_with_intervals(report, design_matrix(report.design, grid));
}

}  // namespace readtrace
