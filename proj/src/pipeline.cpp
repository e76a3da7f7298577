#include "readtrace/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <set>

#include <fmt/format.h>

#include "readtrace/encoder.hpp"
#include "readtrace/parallel.hpp"
#include "readtrace/sessionizer.hpp"

namespace readtrace {

namespace {

const std::vector<std::string> kTraitNames = {"DECI", "DECE", "Engagement", "Grade", "MW-S", "MW-D"};

bool metrics_complete(const StudentMetrics& m) {
  for (auto name : metric_names())
    if (!m.get(name)) return false;
  return true;
}

bool satisfies(const StudentProfile& p, const ProfileRequirements& req) {
  if (req.metrics && !(p.metrics && metrics_complete(*p.metrics))) return false;
  if (req.engagement && !p.engagement) return false;
  if (req.dec && !(p.deci && p.dece)) return false;
  if (req.mw && !(p.mw_s && p.mw_d)) return false;
  if (req.grade && !p.grade) return false;
  return true;
}

std::vector<Term> terms(std::initializer_list<const char*> labels) {
  std::vector<Term> out;
  for (const char* l : labels) out.push_back(Term::parse(l));
  return out;
}

NamedModel fit(const Dataset& data, std::string name, const std::string& response, std::span<const Term> t,
               const FitOptions& options = {}) {
  return NamedModel{std::move(name), ols_fit(data, response, t, options)};
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt::format("{}", *v) : std::string(); }

std::optional<double> parse_opt(const std::string& s, const std::string& column) {
  if (s.empty()) return std::nullopt;
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw Error("profiles: column '" + column + "' has non-numeric value '" + s + "'");
  return v;
}

}  // namespace

std::map<std::string, double> CohortFeatures::engagement_map() const {
  std::map<std::string, double> out;
  for (const auto& e : engagement) out[e.student_id] = e.score;
  return out;
}

CohortFeatures compute_features(const EventsByStudent& events, const Manifest& manifest, const Config& config) {
  struct PerStudent {
    std::optional<StudentMetrics> metrics;
    SubMetricResult sub;
  };
  std::vector<const std::vector<RawEvent>*> streams;
  for (const auto& [id, list] : events) streams.push_back(&list);
  std::vector<PerStudent> results(streams.size());

  parallel_for(streams.size(), [&](std::size_t i) {
    const auto& list = *streams[i];
    if (list.empty()) return;
    const auto sessions = sessionize(list, config.sequence.gap_threshold_ms);
    std::vector<SessionMetrics> per_session;
    per_session.reserve(sessions.size());
    for (const Session& s : sessions)
      per_session.push_back(session_metrics(
          collapse_jumps(encode(s, config.sequence.append_terminal_gap, config.sequence.intervals))));
    results[i].metrics = student_means(list.front().student_id, per_session, n_stops(sessions));
    results[i].sub = compute_submetrics(sessions, manifest, config.engagement);
  });

  CohortFeatures out;
  std::set<std::string> warned;
  for (auto& r : results) {
    if (!r.metrics) continue;
    out.metrics.push_back(std::move(*r.metrics));
    out.submetrics.push_back(std::move(r.sub.metrics));
    for (auto& w : r.sub.warnings)
      if (warned.insert(w).second) out.warnings.push_back(std::move(w));
  }
  if (!out.submetrics.empty()) {
    auto scored = engagement_score(out.submetrics);
    out.engagement = std::move(scored.scores);
    for (auto& w : scored.warnings) out.warnings.push_back(std::move(w));
  }
  return out;
}

JoinResult join_profiles(std::span<const StudentMetrics> metrics, const std::map<std::string, double>& engagement,
                         const std::map<std::string, ScaleScores>& scales,
                         const std::map<std::string, double>& grades, const ProfileRequirements& req) {
  std::map<std::string, const StudentMetrics*> metric_index;
  for (const auto& m : metrics) metric_index[m.student_id] = &m;

  std::vector<std::pair<std::string, std::set<std::string>>> sources;
  auto keys = [](const auto& map) {
    std::set<std::string> s;
    for (const auto& [k, v] : map) s.insert(k);
    return s;
  };
  if (req.metrics) sources.emplace_back("logs", keys(metric_index));
  if (req.engagement) sources.emplace_back("engagement", keys(engagement));
  if (req.dec || req.mw) sources.emplace_back("questionnaire", keys(scales));
  if (req.grade) sources.emplace_back("grades", keys(grades));
  if (sources.empty()) throw Error("join_profiles: no source required");

  std::set<std::string> ids = sources.front().second;
  for (const auto& [name, s] : sources) {
    std::set<std::string> next;
    std::set_intersection(ids.begin(), ids.end(), s.begin(), s.end(), std::inserter(next, next.end()));
    ids = std::move(next);
  }

  JoinResult out;
  for (const auto& id : ids) {
    StudentProfile p;
    p.student_id = id;
    if (auto it = metric_index.find(id); it != metric_index.end()) p.metrics = *it->second;
    if (auto it = engagement.find(id); it != engagement.end()) p.engagement = it->second;
    if (auto it = scales.find(id); it != scales.end()) {
      p.deci = it->second.deci;
      p.dece = it->second.dece;
      p.mw_s = it->second.mw_s;
      p.mw_d = it->second.mw_d;
    }
    if (auto it = grades.find(id); it != grades.end()) p.grade = it->second;
    if (satisfies(p, req))
      out.profiles.push_back(std::move(p));
    else
      ++out.missing_fields;
  }
  for (const auto& [name, s] : sources) out.attrition.push_back({name, s.size(), s.size() - out.profiles.size()});
  if (out.profiles.empty()) throw Error("join_profiles: no student is present in every required source");
  return out;
}

JoinResult filter_profiles(std::span<const StudentProfile> profiles, const ProfileRequirements& req) {
  JoinResult out;
  for (const auto& p : profiles) {
    if (satisfies(p, req))
      out.profiles.push_back(p);
    else
      ++out.missing_fields;
  }
  out.attrition.push_back({"profiles", profiles.size(), profiles.size() - out.profiles.size()});
  if (out.profiles.empty()) throw Error("no profile has every value this analysis needs");
  return out;
}

void write_metrics_csv(std::ostream& out, std::span<const StudentMetrics> metrics) {
  out << "student_id,n_jumps,n_responsive,sequential,stickiness,quickness,stableness,n_stops,n_sessions\n";
  for (const auto& m : metrics)
    out << csv::quote(m.student_id) << ',' << fmt::format("{}", m.n_jumps) << ',' << fmt::format("{}", m.n_responsive)
        << ',' << fmt_opt(m.sequential) << ',' << fmt_opt(m.stickiness) << ',' << fmt_opt(m.quickness) << ','
        << fmt_opt(m.stableness) << ',' << m.n_stops << ',' << m.n_sessions << '\n';
}

std::vector<StudentMetrics> read_metrics_csv(std::istream& in) {
  static const std::vector<std::string> kColumns = {"student_id", "n_jumps",    "n_responsive",
                                                    "sequential", "stickiness", "quickness",
                                                    "stableness", "n_stops",    "n_sessions"};
  std::vector<StudentMetrics> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    auto f = csv::split(line);
    if (line_no == 1) {
      if (f != kColumns) throw ParseError(1, "unexpected metrics header");
      continue;
    }
    if (f.size() != kColumns.size()) throw ParseError(line_no, "wrong number of metric fields");
    try {
      StudentMetrics m;
      m.student_id = f[0];
      auto required = [&](std::size_t i) {
        auto v = parse_opt(f[i], kColumns[i]);
        if (!v) throw Error("column '" + kColumns[i] + "' is empty");
        return *v;
      };
      m.n_jumps = required(1);
      m.n_responsive = required(2);
      m.sequential = parse_opt(f[3], kColumns[3]);
      m.stickiness = parse_opt(f[4], kColumns[4]);
      m.quickness = parse_opt(f[5], kColumns[5]);
      m.stableness = parse_opt(f[6], kColumns[6]);
      m.n_stops = static_cast<long>(required(7));
      m.n_sessions = static_cast<long>(required(8));
      out.push_back(std::move(m));
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return out;
}

void write_profiles_csv(std::ostream& out, std::span<const StudentProfile> profiles) {
  out << "student_id,n_jumps,n_responsive,sequential,stickiness,quickness,stableness,n_stops,n_sessions,"
         "engagement,DECI,DECE,MW_S,MW_D,grade\n";
  for (const auto& p : profiles) {
    out << csv::quote(p.student_id);
    if (p.metrics) {
      const auto& m = *p.metrics;
      out << ',' << fmt::format("{}", m.n_jumps) << ',' << fmt::format("{}", m.n_responsive) << ','
          << fmt_opt(m.sequential) << ',' << fmt_opt(m.stickiness) << ',' << fmt_opt(m.quickness) << ','
          << fmt_opt(m.stableness) << ',' << m.n_stops << ',' << m.n_sessions;
    } else {
      out << ",,,,,,,,";
    }
    out << ',' << fmt_opt(p.engagement) << ',' << fmt_opt(p.deci) << ',' << fmt_opt(p.dece) << ','
        << fmt_opt(p.mw_s) << ',' << fmt_opt(p.mw_d) << ',' << fmt_opt(p.grade) << '\n';
  }
}

std::vector<StudentProfile> read_profiles_csv(std::istream& in) {
  static const std::vector<std::string> kColumns = {
      "student_id", "n_jumps",    "n_responsive", "sequential", "stickiness", "quickness", "stableness", "n_stops",
      "n_sessions", "engagement", "DECI",         "DECE",       "MW_S",       "MW_D",      "grade"};
  std::vector<StudentProfile> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    auto f = csv::split(line);
    if (line_no == 1) {
      if (f != kColumns) throw ParseError(1, "unexpected profiles header");
      continue;
    }
    if (f.size() != kColumns.size()) throw ParseError(line_no, "wrong number of profile fields");
    try {
      StudentProfile p;
      p.student_id = f[0];
      if (!f[8].empty()) {
        StudentMetrics m;
        m.student_id = f[0];
        m.n_jumps = *parse_opt(f[1], kColumns[1]);
        m.n_responsive = *parse_opt(f[2], kColumns[2]);
        m.sequential = parse_opt(f[3], kColumns[3]);
        m.stickiness = parse_opt(f[4], kColumns[4]);
        m.quickness = parse_opt(f[5], kColumns[5]);
        m.stableness = parse_opt(f[6], kColumns[6]);
        m.n_stops = static_cast<long>(*parse_opt(f[7], kColumns[7]));
        m.n_sessions = static_cast<long>(*parse_opt(f[8], kColumns[8]));
        p.metrics = m;
      }
      p.engagement = parse_opt(f[9], kColumns[9]);
      p.deci = parse_opt(f[10], kColumns[10]);
      p.dece = parse_opt(f[11], kColumns[11]);
      p.mw_s = parse_opt(f[12], kColumns[12]);
      p.mw_d = parse_opt(f[13], kColumns[13]);
      p.grade = parse_opt(f[14], kColumns[14]);
      out.push_back(std::move(p));
    } catch (const std::bad_optional_access&) {
      throw ParseError(line_no, "metric columns are partially empty");
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return out;
}

Dataset profiles_dataset(std::span<const StudentProfile> profiles, bool center_dec) {
  const auto n = static_cast<Eigen::Index>(profiles.size());
  Dataset data(profiles.size());
  auto add = [&](const std::string& name, auto getter) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      std::optional<double> x = getter(profiles[static_cast<std::size_t>(i)]);
      if (!x) return;
      v(i) = *x;
    }
    data.add_numeric(name, std::move(v));
  };
  add("Engagement", [](const StudentProfile& p) { return p.engagement; });
  add("Grade", [](const StudentProfile& p) { return p.grade; });
  add("DECI", [](const StudentProfile& p) { return p.deci; });
  add("DECE", [](const StudentProfile& p) { return p.dece; });
  add("MW-S", [](const StudentProfile& p) { return p.mw_s; });
  add("MW-D", [](const StudentProfile& p) { return p.mw_d; });
  for (auto metric : metric_names())
    add(std::string(metric), [&](const StudentProfile& p) -> std::optional<double> {
      return p.metrics ? p.metrics->get(metric) : std::nullopt;
    });

  if (center_dec) {
    for (const char* name : {"DECI", "DECE"}) {
      if (!data.has_numeric(name)) continue;
      Eigen::VectorXd v = data.numeric(name);
      v.array() -= v.mean();
      data.add_numeric(name, std::move(v));
    }
  }
  return data;
}

const std::optional<Correlation>& CorrelationMatrix::at(const std::string& a, const std::string& b) const {
  auto index = [&](const std::string& x) {
    auto it = std::find(names.begin(), names.end(), x);
    if (it == names.end()) throw Error("correlation matrix has no variable '" + x + "'");
    return static_cast<std::size_t>(it - names.begin());
  };
  return cells[index(a)][index(b)];
}

CorrelationMatrix correlation_matrix(const Dataset& data, std::span<const std::string> names) {
  CorrelationMatrix m;
  m.names.assign(names.begin(), names.end());
  m.cells.assign(names.size(), std::vector<std::optional<Correlation>>(names.size()));
  for (std::size_t i = 0; i < names.size(); ++i)
    for (std::size_t j = i; j < names.size(); ++j) {
      m.cells[i][j] = pearson(data.numeric(names[i]), data.numeric(names[j]));
      m.cells[j][i] = m.cells[i][j];
    }
  return m;
}

Rq1Report run_rq1(std::span<const StudentProfile> profiles, const Config& config) {
  const JoinResult joined = filter_profiles(profiles, ProfileRequirements::rq1());
  const Dataset data = profiles_dataset(joined.profiles, config.center_dec);

  Rq1Report r;
  r.n = joined.profiles.size();
  r.correlations = correlation_matrix(data, kTraitNames);

  r.engagement_models.push_back(fit(data, "DECI + DECE", "Engagement", terms({"DECI", "DECE"})));
  r.engagement_models.push_back(
      fit(data, "DECI + DECE + MW-S + MW-D", "Engagement", terms({"DECI", "DECE", "MW-S", "MW-D"})));

  r.grade_models.push_back(fit(data, "Model 1", "Grade", terms({"Engagement"})));
  r.grade_models.push_back(fit(data, "Model 2", "Grade", terms({"Engagement", "DECI", "DECE"})));
  r.grade_models.push_back(fit(data, "Model 3", "Grade",
                               terms({"Engagement", "DECI", "DECE", "Engagement:DECI", "Engagement:DECE"})));
  for (std::size_t i = 1; i < r.grade_models.size(); ++i)
    r.grade_comparisons.push_back({fmt::format("Model {}-{}", i, i + 1),
                                   partial_f(r.grade_models[i - 1].report, r.grade_models[i].report)});
  return r;
}

Rq2Report run_rq2(std::span<const StudentProfile> profiles, std::size_t k, const Config& config) {
  const JoinResult joined = filter_profiles(profiles, ProfileRequirements::rq2());
  Dataset data = profiles_dataset(joined.profiles, config.center_dec);
  const StepwiseOptions step_options{config.alpha, {}};

  Rq2Report r;
  r.n = joined.profiles.size();
  std::vector<std::string> names = {"Engagement", "Grade"};
  for (auto m : metric_names()) names.emplace_back(m);
  r.correlations = correlation_matrix(data, names);

  // Stepwise grade model over the metrics.
  std::vector<Term> pool;
  for (const auto& m : config.candidate_metrics) pool.push_back(Term{{m}, std::nullopt});
  const std::size_t mains = pool.size();
  for (std::size_t i = 0; i < mains; ++i)
    for (std::size_t j = i + 1; j < mains; ++j) pool.push_back(Term::product(pool[i], pool[j]));
  std::vector<std::vector<Term>> starts;
  for (const auto& m : config.candidate_metrics) {
    const auto& c = r.correlations.at(m, "Grade");
    if (c && c->p < config.alpha) {
      r.grade_correlated.push_back(m);
      starts.push_back({Term{{m}, std::nullopt}});
    }
  }
  r.selection = stepwise_select(data, "Grade", {}, pool, step_options, starts);
  const StepwisePath& path = r.selection.paths[r.selection.chosen];
  for (std::size_t i = 0; i < path.models.size(); ++i)
    r.selection_models.push_back({fmt::format("Model {}", i + 1), path.models[i]});
  for (std::size_t i = 0; i < path.comparisons.size(); ++i)
    r.selection_comparisons.push_back({fmt::format("Model {}-{}", i + 1, i + 2), path.comparisons[i]});

  const std::vector<Term>& selected = r.selection.terms;
  if (!selected.empty()) {
    std::vector<Term> with_engagement = terms({"Engagement"});
    with_engagement.insert(with_engagement.end(), selected.begin(), selected.end());
    const auto base = ols_fit(data, "Grade", terms({"Engagement"}));
    const auto full = ols_fit(data, "Grade", with_engagement);
    r.metrics_over_engagement = ModelComparison{"Engagement vs Engagement + metrics", partial_f(base, full)};
  }
  std::vector<Term> dec_terms = selected;
  for (const char* t : {"DECI", "DECE"}) dec_terms.push_back(Term::parse(t));
  r.dec_model = fit(data, "Metrics + DEC", "Grade", dec_terms);
  r.dec_added = {"Metrics vs Metrics + DEC", partial_f(r.selection.report, r.dec_model.report)};

  // Strategy clusters.
  ClusterSummary& cs = r.clusters;
  cs.features = config.cluster_features;
  for (const auto& p : joined.profiles) cs.student_ids.push_back(p.student_id);
  Eigen::MatrixXd features(static_cast<Eigen::Index>(r.n), static_cast<Eigen::Index>(cs.features.size()));
  for (std::size_t j = 0; j < cs.features.size(); ++j)
    features.col(static_cast<Eigen::Index>(j)) = data.numeric(cs.features[j]);
  cs.assignment = ward_cluster(znorm(features, cs.features), k);

  std::vector<std::string> display;
  for (auto m : metric_names()) {
    const auto& v = data.numeric(std::string(m));
    if ((v.array() != v(0)).any()) display.emplace_back(m);
  }
  Eigen::MatrixXd shown(static_cast<Eigen::Index>(r.n), static_cast<Eigen::Index>(display.size()));
  for (std::size_t j = 0; j < display.size(); ++j) shown.col(static_cast<Eigen::Index>(j)) = data.numeric(display[j]);
  const Eigen::MatrixXd shown_z = znorm(shown, display);
  cs.display_metrics = display;
  cs.display_centroids = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), shown_z.cols());
  for (std::size_t i = 0; i < r.n; ++i)
    cs.display_centroids.row(cs.assignment.labels[i]) += shown_z.row(static_cast<Eigen::Index>(i));
  for (std::size_t c = 0; c < k; ++c)
    cs.display_centroids.row(static_cast<Eigen::Index>(c)) /= static_cast<double>(cs.assignment.sizes[c]);

  // Cluster moderation of the DEC slopes.
  data.add_factor("cluster", cs.assignment.labels);
  const auto smallest = *std::min_element(cs.assignment.sizes.begin(), cs.assignment.sizes.end());
  if (k < 2) {
    r.moderation_diagnostic = "moderation tests need at least two clusters";
  } else if (smallest < 3) {
    r.moderation_diagnostic =
        fmt::format("moderation tests refused: a cluster has only {} member(s); at least 3 are required", smallest);
  } else {
    const std::vector<Term> eq1 = terms({"C(cluster)", "DECI", "DECE", "C(cluster):DECI", "C(cluster):DECE",
                                         "Engagement", "Engagement:DECI", "Engagement:DECE"});
    try {
      r.moderation_model = fit(data, "Cluster moderation", "Grade", eq1);
      const auto deci_block = terms({"C(cluster):DECI"});
      const auto dece_block = terms({"C(cluster):DECE"});
      r.deci_block = ModelComparison{"C(cluster):DECI", omnibus_block_test(data, "Grade", eq1, deci_block)};
      r.dece_block = ModelComparison{"C(cluster):DECE", omnibus_block_test(data, "Grade", eq1, dece_block)};
    } catch (const Error& e) {
      r.moderation_model.reset();
      r.moderation_diagnostic = std::string("moderation model could not be fitted: ") + e.what();
    }
  }

  if (r.moderation_model) {
    const auto& deci = data.numeric("DECI");
    const auto& dece = data.numeric("DECE");
    const auto& eng = data.numeric("Engagement");
    const std::size_t g = config.grid_points;
    for (std::size_t c = 0; c < k; ++c) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo, dece_sum = 0, eng_sum = 0;
      for (std::size_t i = 0; i < r.n; ++i) {
        if (cs.assignment.labels[i] != static_cast<int>(c)) continue;
        const auto ii = static_cast<Eigen::Index>(i);
        lo = std::min(lo, deci(ii));
        hi = std::max(hi, deci(ii));
        dece_sum += dece(ii);
        eng_sum += eng(ii);
      }
      const double members = static_cast<double>(cs.assignment.sizes[c]);
      PredictionCurve curve;
      curve.cluster = static_cast<int>(c);
      Dataset grid(g);
      Eigen::VectorXd x(static_cast<Eigen::Index>(g));
      for (std::size_t i = 0; i < g; ++i)
        x(static_cast<Eigen::Index>(i)) = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(g - 1);
      curve.deci.assign(x.data(), x.data() + x.size());
      grid.add_numeric("DECI", x);
      grid.add_numeric("DECE", Eigen::VectorXd::Constant(static_cast<Eigen::Index>(g), dece_sum / members));
      grid.add_numeric("Engagement", Eigen::VectorXd::Constant(static_cast<Eigen::Index>(g), eng_sum / members));
      grid.add_factor("cluster", std::vector<int>(g, static_cast<int>(c)));
      curve.predictions = predict_with_intervals(r.moderation_model->report, grid);
      r.curves.push_back(std::move(curve));
    }
  }
  return r;
}

}  // namespace readtrace
