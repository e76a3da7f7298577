// One acceptance criterion per invocation: `acceptance N` prints a single
// PASS/FAIL line and exits nonzero on FAIL.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "oracles/oracles.hpp"
#include "readtrace/clustering.hpp"
#include "readtrace/distributions.hpp"
#include "readtrace/encoder.hpp"
#include "readtrace/engagement.hpp"
#include "readtrace/metrics.hpp"
#include "readtrace/pipeline.hpp"
#include "readtrace/questionnaire.hpp"
#include "readtrace/regression.hpp"
#include "readtrace/report.hpp"
#include "readtrace/sessionizer.hpp"
#include "readtrace/stats.hpp"
#include "readtrace/stepwise.hpp"
#include "readtrace/synth.hpp"

using namespace readtrace;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects failures; the first few are kept for the report line.
class Checker {
 public:
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    ++failures_;
    if (failures_ <= 3) messages_ += (messages_.empty() ? "" : "; ") + what;
  }
  Outcome done(std::string summary) const {
    if (failures_ == 0) return {true, std::move(summary)};
    return {false, fmt::format("{} failure(s): {} | {}", failures_, messages_, summary)};
  }

 private:
  int failures_ = 0;
  std::string messages_;
};

bool close_to(double got, double want, double tol) {
  return std::fabs(got - want) <= tol * std::max(1.0, std::fabs(want));
}

RawEvent event(EventKind kind, Millis t, std::string material = "M1") { return {"S1", std::move(material), 1, std::move(kind), t}; }

std::vector<RawEvent> random_stream(std::mt19937_64& rng, int n) {
  std::uniform_int_distribution<int> kind(0, 5);
  std::uniform_int_distribution<Millis> gap(0, 600'000);
  std::uniform_int_distribution<int> page(1, 30), mat(0, 1);
  std::vector<RawEvent> out;
  Millis t = 0;
  for (int i = 0; i < n; ++i) {
    t += gap(rng) / (1 + kind(rng) * 3);
    const EventKind kinds[] = {EventKind::open(), EventKind::next(), EventKind::prev(),
                               EventKind::jump(), EventKind::close(), EventKind::other("ADD_MARKER")};
    out.push_back({"S1", mat(rng) ? "M1" : "M2", page(rng), kinds[kind(rng)], t});
  }
  return out;
}

Eigen::VectorXd column(const oracle::Matrix& m, std::size_t j) {
  Eigen::VectorXd v(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) v(i) = m[i][j];
  return v;
}

// --- 1 ---------------------------------------------------------------------

Outcome golden_examples() {
  Checker c;
  c.expect(n_jumps("OsNsXmJmNsXsC") == 3, "N_Jumps");
  c.expect(n_responsive("OsXsEsNlNmEmC") == 2, "N_Responsive");
  const auto seq = sequential("OsNsXmNmEmNmXmYmXmNsN");
  c.expect(seq && std::fabs(*seq - 0.89) <= 0.005, "Sequential");
  const auto p = predominance({6, 4, 1});
  c.expect(p && std::fabs(p->stickiness - 0.02) <= 0.005 && std::fabs(p->quickness - 0.68) <= 0.005 &&
               std::fabs(p->stableness - 0.30) <= 0.005,
           "predominance");

  // OsNsXmJsC | OsPsNl | NmNC built from raw events.
  const std::vector<RawEvent> e = {
      event(EventKind::open(), 0),         event(EventKind::next(), 5'000),   event(EventKind::next(), 10'000),
      event(EventKind::next(), 10'500),    event(EventKind::jump(), 30'000),  event(EventKind::close(), 35'000),
      event(EventKind::open(), 40'000),    event(EventKind::prev(), 45'000),  event(EventKind::next(), 50'000),
      event(EventKind::next(), 900'000),   event(EventKind::next(), 920'000), event(EventKind::close(), 921'000)};
  const auto sessions = sessionize(e);
  std::vector<std::string> tokens;
  for (const auto& s : sessions) tokens.push_back(collapse_jumps(encode(s)).tokens);
  c.expect(tokens == std::vector<std::string>{"OsNsXmJsC", "OsPsNl", "NmNC"}, "three-session encoding");
  c.expect(n_stops(sessions) == 1, "N_Stops");
  return c.done(fmt::format("N_Jumps=3, N_Stops=1, N_Responsive=2, Sequential={:.2f}, predominance=({:.2f},{:.2f},{:.2f})",
                            seq.value_or(-1), p ? p->stickiness : -1, p ? p->quickness : -1,
                            p ? p->stableness : -1));
}

// --- 2 ---------------------------------------------------------------------

Outcome jump_recode() {
  Checker c;
  const auto x = collapse_jumps({"NNNPNNP", Terminal::end_of_stream()});
  c.expect(x.tokens == "X", "NNNPNNP -> " + x.tokens);
  std::mt19937_64 rng(2024);
  const std::string alphabet = "OCNPJEXYsml";
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::uniform_int_distribution<int> len(0, 60);
  for (int i = 0; i < 10'000; ++i) {
    std::string t;
    for (int j = len(rng); j > 0; --j) t.push_back(alphabet[pick(rng)]);
    const auto once = collapse_jumps({t, Terminal::end_of_stream()});
    c.expect(collapse_jumps(once) == once, "not idempotent on " + t);
  }
  return c.done("NNNPNNP -> X; idempotent on 10000 fuzzed sequences");
}

// --- 3 ---------------------------------------------------------------------

Outcome f_arithmetic() {
  struct Row {
    const char* label;
    double r2_red, r2_full;
    int df1, df2;
    double f, p;
  };
  const Row rows[] = {
      {"engagement models 1-2", 0.255, 0.333, 2, 96, 5.61, 0.005},
      {"engagement models 2-3", 0.333, 0.377, 2, 92, 3.25, 0.043},
      {"metric models 1-2", 0.081, 0.152, 1, 97, 8.12, 0.005},
      {"metric models 2-3", 0.152, 0.201, 1, 96, 5.88, 0.017},
      {"metrics over engagement", 0.255, 0.255 + 0.082, 3, 95, 3.92, 0.01},
  };
  Checker c;
  std::string summary;
  for (const auto& r : rows) {
    const auto t = partial_f(r.r2_red, r.r2_full, r.df1, r.df2);
    const bool ok_f = std::fabs(t.f - r.f) <= 0.01;
    const bool ok_p = std::fabs(t.p - r.p) <= 0.001;
    c.expect(ok_f && ok_p, fmt::format("{}: F={:.4f} (want {}), p={:.6f} (want {})", r.label, t.f, r.f, t.p, r.p));
    summary += fmt::format("{}{}: F={:.3f} p={:.4f}", summary.empty() ? "" : "; ", r.label, t.f, t.p);
  }
  return c.done(summary);
}

// --- 4 ---------------------------------------------------------------------

Outcome statistical_oracles() {
  std::mt19937_64 rng(404);
  std::uniform_int_distribution<int> size(6, 40), width(1, 5), items(2, 8);
  std::normal_distribution<double> z;
  Checker c;
  double worst_dot = 0;
  for (int rep = 0; rep < 1'000; ++rep) {
    const int n = size(rng);
    // Pearson and descriptives.
    std::vector<double> x(n), y(n);
    for (int i = 0; i < n; ++i) {
      x[i] = z(rng) * 3 + 1;
      y[i] = 0.3 * x[i] + z(rng);
    }
    const Eigen::VectorXd ex = Eigen::Map<Eigen::VectorXd>(x.data(), n), ey = Eigen::Map<Eigen::VectorXd>(y.data(), n);
    const auto r = pearson(ex, ey);
    c.expect(r && close_to(r->r, oracle::pearson_r(x, y), 1e-9), "pearson");
    const auto d = descriptives(ex);
    const auto m = oracle::moments(x);
    c.expect(close_to(d.mean, m.mean, 1e-9) && close_to(*d.sd, m.sd, 1e-9) && close_to(*d.skewness, m.skew, 1e-9) &&
                 close_to(*d.excess_kurtosis, m.kurt, 1e-9),
             "descriptives");

    // Cronbach's alpha on Likert-like items.
    const int k = items(rng);
    oracle::Matrix lik(n, std::vector<double>(k));
    Eigen::MatrixXd el(n, k);
    for (int i = 0; i < n; ++i) {
      const double latent = z(rng);
      for (int j = 0; j < k; ++j) el(i, j) = lik[i][j] = std::clamp(std::round(4 + latent + z(rng)), 1.0, 7.0);
    }
    const auto a = cronbach_alpha(el);
    c.expect(a && close_to(*a, oracle::cronbach_alpha(lik), 1e-9), "cronbach alpha");

    // OLS.
    const int p = std::min(width(rng), n - 2);
    oracle::Matrix design(n, std::vector<double>(p + 1, 1.0));
    Dataset data(n);
    std::vector<std::string> labels;
    for (int j = 0; j < p; ++j) {
      for (int i = 0; i < n; ++i) design[i][j + 1] = z(rng);
      labels.push_back("x" + std::to_string(j));
      data.add_numeric(labels.back(), column(design, j + 1));
    }
    Eigen::VectorXd ey2(n);
    for (int i = 0; i < n; ++i) {
      ey2(i) = 0.5 + z(rng);
      for (int j = 0; j < p; ++j) ey2(i) += (j + 1) * 0.4 * design[i][j + 1];
    }
    data.add_numeric("y", ey2);
    const auto fit = ols_fit(data, "y", labels);
    const auto beta = oracle::ols_normal_equations(design, std::vector<double>(ey2.data(), ey2.data() + n));
    for (int j = 0; j <= p; ++j) c.expect(close_to(fit.beta(j), beta[j], 1e-9), "OLS beta");
    const Eigen::MatrixXd xm = design_matrix(fit.design, data);
    const double dot = (xm.transpose() * fit.residuals).cwiseAbs().maxCoeff();
    worst_dot = std::max(worst_dot, dot);
    c.expect(dot < 1e-8, "residual orthogonality");
  }
  return c.done(fmt::format("1000 instances; max |X'e| = {:.2e}", worst_dot));
}

// --- 5 ---------------------------------------------------------------------

Outcome distribution_accuracy() {
  Checker c;
  const double ab[] = {0.5, 0.9, 1.5, 2.5, 4, 7, 12, 20, 35, 60};
  const double xs[] = {0.003, 0.02, 0.1, 0.25, 0.4, 0.55, 0.7, 0.85, 0.95, 0.995};
  double worst = 0;
  for (double a : ab)
    for (double b : ab)
      for (double x : xs) {
        const double got = reg_inc_beta(a, b, x);
        const double want = static_cast<double>(oracle::inc_beta(a, b, x));
        const double err = std::fabs(got - want);
        worst = std::max(worst, err);
        c.expect(err <= 1e-10, fmt::format("I_{}({}, {}) = {} vs {}", x, a, b, got, want));
      }
  return c.done(fmt::format("1000 grid points; max abs error {:.2e}", worst));
}

// --- 6 ---------------------------------------------------------------------

Outcome null_calibration() {
  const int seeds = 1'000;
  const std::size_t n = 200;
  std::vector<double> partial_p, omnibus_p;
  std::size_t covered = 0, intervals = 0;
  const double slopes[] = {0.5, -0.3, 0.0};
  for (int seed = 0; seed < seeds; ++seed) {
    std::mt19937_64 rng(1'000'003ULL * seed + 17);
    std::normal_distribution<double> z;
    std::uniform_int_distribution<int> level(0, 2);
    Eigen::VectorXd x1(n), x2(n), x3(n), y(n);
    std::vector<int> g(n);
    for (std::size_t i = 0; i < n; ++i) {
      x1(i) = z(rng);
      x2(i) = z(rng);
      x3(i) = z(rng);
      g[i] = level(rng);
      y(i) = 1 + slopes[0] * x1(i) + slopes[1] * x2(i) + slopes[2] * x3(i) + z(rng);
    }
    Dataset d(n);
    d.add_numeric("x1", x1);
    d.add_numeric("x2", x2);
    d.add_numeric("x3", x3);
    d.add_numeric("y", y);
    d.add_factor("g", g);

    const std::vector<std::string> small{"x1", "x2"}, big{"x1", "x2", "x3"};
    const auto reduced = ols_fit(d, "y", small);
    const auto full = ols_fit(d, "y", big);
    partial_p.push_back(partial_f(reduced, full).p);
    for (int j = 0; j < 3; ++j) {
      ++intervals;
      if (full.ci_low(j + 1) <= slopes[j] && slopes[j] <= full.ci_high(j + 1)) ++covered;
    }

    const std::vector<Term> terms = Term::parse_all(std::vector<std::string>{"C(g)", "x1", "C(g):x1"});
    const std::vector<Term> block{Term::parse("C(g):x1")};
    omnibus_p.push_back(omnibus_block_test(d, "y", terms, block).p);
  }
  const double ks_partial = oracle::ks_uniform(partial_p);
  const double ks_omnibus = oracle::ks_uniform(omnibus_p);
  const double coverage = static_cast<double>(covered) / static_cast<double>(intervals);
  Checker c;
  c.expect(ks_partial < 0.05, fmt::format("partial-F KS {:.4f}", ks_partial));
  c.expect(ks_omnibus < 0.05, fmt::format("omnibus KS {:.4f}", ks_omnibus));
  c.expect(std::fabs(coverage - 0.95) <= 0.015, fmt::format("coverage {:.4f}", coverage));
  return c.done(fmt::format("KS partial={:.4f}, KS omnibus={:.4f}, slope CI coverage={:.2f}% over {} intervals",
                            ks_partial, ks_omnibus, 100 * coverage, intervals));
}

// --- 7 ---------------------------------------------------------------------

Outcome ward_oracle() {
  Checker c;
  std::mt19937_64 rng(707);
  std::uniform_int_distribution<int> size(2, 8), dims(1, 4);
  for (int rep = 0; rep < 500; ++rep) {
    const auto pts = oracle::random_matrix(rng, size(rng), dims(rng), -3, 3);
    Eigen::MatrixXd m(pts.size(), pts[0].size());
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = 0; j < pts[0].size(); ++j) m(i, j) = pts[i][j];
    const auto got = ward_cluster(m, 1).merges;
    const auto want = oracle::brute_force_ward(pts);
    bool same = got.size() == want.size();
    for (std::size_t s = 0; same && s < want.size(); ++s)
      same = got[s].left == want[s].left && got[s].right == want[s].right && got[s].size == want[s].size &&
             close_to(got[s].height, want[s].height, 1e-9);
    c.expect(same, fmt::format("instance {} differs", rep));
  }

  // Coincident pair merges first at height zero.
  Eigen::MatrixXd coincident(5, 2);
  coincident << 0, 0, 4, 1, 9, 9, -3, 5, 4, 1;
  const auto a = ward_cluster(coincident, 1);
  c.expect(a.merges[0].left == 1 && a.merges[0].right == 4 && a.merges[0].height == 0.0, "coincident pair");

  // Two far apart pairs split into the pairs at k = 2.
  Eigen::MatrixXd pairs(4, 2);
  pairs << 0, 0, 100, 100, 0.5, 0, 100, 100.5;
  const auto b = ward_cluster(pairs, 2);
  c.expect(b.labels[0] == b.labels[2] && b.labels[1] == b.labels[3] && b.labels[0] != b.labels[1], "two far pairs");
  return c.done("500 random instances match brute force; forced geometries hold");
}

// --- 8 ---------------------------------------------------------------------

Outcome planted_recovery() {
  Checker c;
  SynthOptions o;
  o.n = 5'000;
  o.seed = 7;
  const auto cohort = gen_cohort(o);
  const auto features = compute_features(cohort.events, cohort.manifest);
  const auto scales = score_scales(cohort.questionnaire);
  const auto joined = join_profiles(features.metrics, features.engagement_map(), scales.by_student, cohort.grades,
                                    ProfileRequirements::rq1());
  const auto rq1 = run_rq1(joined.profiles);
  const auto& m3 = rq1.grade_models.at(2).report;
  const auto& pm = o.planted;
  const std::pair<const char*, double> planted[] = {
      {"Intercept", pm.intercept},       {"Engagement", pm.engagement},
      {"DECI", pm.deci},                 {"DECE", pm.dece},
      {"Engagement:DECI", pm.engagement_deci}, {"Engagement:DECE", pm.engagement_dece}};
  std::string coef;
  for (const auto& [name, value] : planted) {
    const auto col = m3.column(name);
    if (!col) {
      c.expect(false, std::string("missing column ") + name);
      continue;
    }
    const double lo = m3.ci_low(*col), hi = m3.ci_high(*col);
    c.expect(lo <= value && value <= hi, fmt::format("{}={} outside [{:.3f}, {:.3f}]", name, value, lo, hi));
    coef += fmt::format("{}{} {:.2f} [{:.2f},{:.2f}]", coef.empty() ? "" : ", ", name, m3.beta(*col), lo, hi);
  }

  // Stepwise recovery of planted predictors at high signal to noise.
  int recovered = 0, exact = 0;
  const std::vector<Term> planted_terms{Term::parse("a"), Term::parse("b"), Term::parse("a:b")};
  std::vector<Term> pool;
  const char* mains[] = {"a", "b", "c", "d"};
  for (auto m : mains) pool.push_back(Term::parse(m));
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) pool.push_back(Term::product(Term::parse(mains[i]), Term::parse(mains[j])));
  for (int seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(9'000 + seed);
    std::normal_distribution<double> z;
    const std::size_t n = 500;
    Dataset d(n);
    Eigen::VectorXd cols[4], y(n);
    for (auto& col : cols) {
      col.resize(n);
      for (std::size_t i = 0; i < n; ++i) col(i) = z(rng);
    }
    for (std::size_t i = 0; i < n; ++i) y(i) = 1 + 0.8 * cols[0](i) + 0.6 * cols[1](i) + 0.5 * cols[0](i) * cols[1](i) + z(rng);
    for (int j = 0; j < 4; ++j) d.add_numeric(mains[j], cols[j]);
    d.add_numeric("y", y);
    const auto r = stepwise_select(d, "y", {}, pool, StepwiseOptions{0.05, {}});
    bool all = true;
    for (const auto& t : planted_terms) all = all && std::find(r.terms.begin(), r.terms.end(), t) != r.terms.end();
    if (all) ++recovered;
    if (all && r.terms.size() == planted_terms.size()) ++exact;
  }
  c.expect(recovered >= 99, fmt::format("stepwise recovered planted terms in {}/100 seeds", recovered));
  return c.done(fmt::format("n={} Model 3: {}; stepwise recovered planted terms in {}/100 seeds ({} exact)",
                            joined.profiles.size(), coef, recovered, exact));
}

// --- 9 ---------------------------------------------------------------------

Outcome invariance() {
  Checker c;
  std::mt19937_64 rng(909);
  std::uniform_real_distribution<double> scale(0.01, 1'000);
  std::uniform_int_distribution<int> cohort_size(2, 40), value(0, 20);
  std::uniform_int_distribution<std::size_t> which(0, kNumSubMetrics - 1);

  for (int rep = 0; rep < 1'000; ++rep) {
    std::vector<EngagementSubMetrics> cohort(cohort_size(rng));
    for (auto& s : cohort)
      for (auto& v : s.values) v = value(rng);
    auto scaled = cohort;
    const std::size_t k = which(rng);
    const double f = scale(rng);
    for (auto& s : scaled) s.values[k] *= f;
    const auto a = engagement_score(cohort), b = engagement_score(scaled);
    bool same = true;
    for (std::size_t i = 0; i < cohort.size(); ++i) same = same && a.scores[i].score == b.scores[i].score;
    c.expect(same, "engagement changed under rescaling");
  }

  std::uniform_int_distribution<Millis> shift(-1'000'000'000, 1'000'000'000'000);
  for (int rep = 0; rep < 1'000; ++rep) {
    auto e = random_stream(rng, 80);
    for (auto& x : e) x.timestamp += 2'000'000'000;
    auto moved = e;
    const Millis s = shift(rng);
    for (auto& x : moved) x.timestamp += s;
    const auto a = metrics_for_student(e), b = metrics_for_student(moved);
    bool same = a.has_value() == b.has_value();
    if (a && b)
      for (auto name : metric_names()) same = same && a->get(name) == b->get(name);
    c.expect(same, "metrics changed under translation");
  }

  std::normal_distribution<double> z;
  std::uniform_int_distribution<int> size(10, 80), width(1, 4);
  for (int rep = 0; rep < 1'000; ++rep) {
    const int n = size(rng), p = width(rng);
    Dataset d(n), ds(n);
    std::vector<std::string> labels;
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y(i) = z(rng);
    const int target = rep % p;
    const double f = scale(rng);
    for (int j = 0; j < p; ++j) {
      Eigen::VectorXd x(n);
      for (int i = 0; i < n; ++i) x(i) = z(rng) + 0.3 * y(i);
      labels.push_back("x" + std::to_string(j));
      d.add_numeric(labels.back(), x);
      ds.add_numeric(labels.back(), j == target ? Eigen::VectorXd(x * f) : x);
    }
    d.add_numeric("y", y);
    ds.add_numeric("y", y);
    const auto a = ols_fit(d, "y", labels), b = ols_fit(ds, "y", labels);
    bool same = close_to(a.r2, b.r2, 1e-9) && close_to(a.f_model, b.f_model, 1e-8);
    for (int j = 0; j <= p; ++j)
      same = same && close_to(a.t(j), b.t(j), 1e-8) && std::fabs(a.p(j) - b.p(j)) <= 1e-10;
    same = same && close_to(a.beta(target + 1), b.beta(target + 1) * f, 1e-8);
    c.expect(same, "OLS statistics changed under predictor rescaling");
  }
  return c.done("engagement, sequence metrics and OLS invariances hold over 1000 cases each");
}

// --- 10 --------------------------------------------------------------------

Outcome throughput() {
  SynthOptions o;
  o.n = 400;
  o.seed = 10;
  o.activity = 3.6;
  const auto cohort = gen_cohort(o);
  std::size_t n_events = 0;
  for (const auto& [id, e] : cohort.events) n_events += e.size();
  const auto dir = std::filesystem::temp_directory_path() / "readtrace_throughput";
  std::filesystem::remove_all(dir);
  write_cohort(cohort, dir);

  const auto start = std::chrono::steady_clock::now();
  std::ifstream ev(dir / "events.csv"), mat(dir / "materials.csv"), q(dir / "questionnaire.csv"), g(dir / "grades.csv");
  const auto events = parse_events(ev, EventFormat::Csv);
  const auto manifest = parse_manifest(mat);
  const auto questionnaire = parse_questionnaire(q);
  const auto grades = parse_grades(g);
  const auto features = compute_features(events, manifest);
  const auto scales = score_scales(questionnaire.responses);
  const ProfileRequirements all{true, true, true, true, true};
  const auto joined = join_profiles(features.metrics, features.engagement_map(), scales.by_student, grades.grades, all);
  const auto rq1 = to_bundle(run_rq1(joined.profiles));
  const auto rq2 = to_bundle(run_rq2(joined.profiles, 4));
  emit_report(rq1, ReportFormat::Json, dir / "rq1");
  emit_report(rq2, ReportFormat::Json, dir / "rq2");
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::filesystem::remove_all(dir);

  Checker c;
  c.expect(n_events >= 400'000, fmt::format("only {} events generated", n_events));
  c.expect(seconds < 10, fmt::format("{:.2f} s", seconds));
  return c.done(fmt::format("{} events, {} students: {:.2f} s", n_events, joined.profiles.size(), seconds));
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"worked sequence examples", golden_examples},
      {"jump recoding", jump_recode},
      {"published F arithmetic", f_arithmetic},
      {"statistical oracles", statistical_oracles},
      {"incomplete beta accuracy", distribution_accuracy},
      {"null calibration", null_calibration},
      {"Ward oracle", ward_oracle},
      {"planted recovery", planted_recovery},
      {"invariance properties", invariance},
      {"throughput", throughput},
  };
  std::vector<int> which;
  if (argc > 1) {
    for (int i = 1; i < argc; ++i) which.push_back(std::stoi(argv[i]));
  } else {
    for (int i = 1; i <= static_cast<int>(criteria.size()); ++i) which.push_back(i);
  }
  int failed = 0;
  for (int id : which) {
    if (id < 1 || id > static_cast<int>(criteria.size())) {
      fmt::print("FAIL criterion {}: no such criterion\n", id);
      ++failed;
      continue;
    }
    const auto& [name, run] = criteria[id - 1];
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    fmt::print("{} criterion {} ({}): {} [{:.2f} s]\n", out.pass ? "PASS" : "FAIL", id, name, out.detail, seconds);
    if (!out.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
