// readtrace: reading-log analytics from the command line.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "readtrace/clustering.hpp"
#include "readtrace/config.hpp"
#include "readtrace/encoder.hpp"
#include "readtrace/ingest.hpp"
#include "readtrace/parallel.hpp"
#include "readtrace/pipeline.hpp"
#include "readtrace/questionnaire.hpp"
#include "readtrace/report.hpp"
#include "readtrace/sessionizer.hpp"
#include "readtrace/synth.hpp"

namespace fs = std::filesystem;
using namespace readtrace;

namespace {

struct Common {
  std::string config_path;
  std::vector<std::string> settings;
  std::optional<long long> gap_ms;
  std::optional<double> alpha;
};

Config load_config(const Common& c) {
  Config cfg = c.config_path.empty() ? Config{} : Config::load(c.config_path);
  for (const auto& kv : c.settings) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw Error("--set expects key=value, got '" + kv + "'");
    cfg.set(std::string(csv::trim(kv.substr(0, eq))), std::string(csv::trim(kv.substr(eq + 1))));
  }
  if (c.gap_ms) cfg.set("gap_ms", std::to_string(*c.gap_ms));
  if (c.alpha) cfg.set("alpha", fmt::format("{}", *c.alpha));
  return cfg;
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config_path, "key = value configuration file")->check(CLI::ExistingFile);
  app->add_option("--set", c.settings, "override one configuration key (key=value)");
  app->add_option("--gap-ms", c.gap_ms, "session gap threshold in ms");
  app->add_option("--alpha", c.alpha, "significance level");
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return in;
}

// Writes to `path`, or to stdout for "-".
template <class Fn>
void with_out(const std::string& path, Fn fn) {
  if (path == "-") {
    fn(std::cout);
    return;
  }
  if (const auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  fn(out);
  if (!out) throw Error("failed writing " + path);
}

EventsByStudent read_events(const std::string& path) {
  auto in = open_in(path);
  return parse_events(in, event_format_for_path(path));
}

Manifest read_manifest(const std::string& path) {
  auto in = open_in(path);
  return parse_manifest(in);
}

void report_rejects(const std::string& what, const std::vector<RowError>& rejected) {
  for (const auto& r : rejected) fmt::print(stderr, "warning: {} line {}: {}\n", what, r.line, r.message);
}

std::vector<std::vector<Session>> sessionize_all(const EventsByStudent& events, Millis gap) {
  std::vector<const std::vector<RawEvent>*> streams;
  for (const auto& [id, list] : events) streams.push_back(&list);
  std::vector<std::vector<Session>> out(streams.size());
  parallel_for(streams.size(), [&](std::size_t i) { out[i] = sessionize(*streams[i], gap); });
  std::size_t lone = 0;
  for (const auto& student : out)
    for (const auto& s : student) lone += s.is_lone_close() ? 1 : 0;
  if (lone > 0) fmt::print(stderr, "warning: {} session(s) consist of a lone close event\n", lone);
  return out;
}

ScoredScales read_scales(const std::string& path) {
  auto in = open_in(path);
  auto parsed = parse_questionnaire(in);
  report_rejects("questionnaire", parsed.rejected);
  return score_scales(parsed.responses);
}

std::map<std::string, double> read_grades(const std::string& path) {
  auto in = open_in(path);
  auto parsed = parse_grades(in);
  report_rejects("grades", parsed.rejected);
  for (const auto& w : parsed.warnings) fmt::print(stderr, "warning: grades: {}\n", w);
  return std::move(parsed.grades);
}

void print_attrition(const JoinResult& j) {
  for (const auto& s : j.attrition)
    fmt::print(stderr, "join: {} has {} students, {} not retained\n", s.source, s.available, s.dropped);
  if (j.missing_fields > 0) fmt::print(stderr, "join: {} students lack a required value\n", j.missing_fields);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reading-log analytics: sessions, sequence metrics, engagement, models and clusters"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "show help for every subcommand");
  Common common;

  // sessionize
  std::string events_path, out_path = "-";
  auto* sessionize_cmd = app.add_subcommand("sessionize", "split event logs into reading sessions");
  sessionize_cmd->add_option("--events", events_path, "event log (.csv or .jsonl)")->required();
  sessionize_cmd->add_option("--out", out_path, "sessions CSV (default stdout)");
  add_common(sessionize_cmd, common);

  // encode
  bool collapsed = false;
  auto* encode_cmd = app.add_subcommand("encode", "encode sessions as symbol sequences");
  encode_cmd->add_option("--events", events_path, "event log (.csv or .jsonl)")->required();
  encode_cmd->add_option("--out", out_path, "sequences CSV (default stdout)");
  encode_cmd->add_flag("--collapse", collapsed, "recode runs of page turns as jumps");
  add_common(encode_cmd, common);

  // metrics
  auto* metrics_cmd = app.add_subcommand("metrics", "per-student sequence metrics");
  metrics_cmd->add_option("--events", events_path, "event log (.csv or .jsonl)")->required();
  metrics_cmd->add_option("--out", out_path, "metrics CSV (default stdout)");
  add_common(metrics_cmd, common);

  // engagement
  std::string materials_path;
  auto* engagement_cmd = app.add_subcommand("engagement", "engagement indicator per student");
  engagement_cmd->add_option("--events", events_path, "event log (.csv or .jsonl)")->required();
  engagement_cmd->add_option("--materials", materials_path, "material manifest CSV")->required();
  engagement_cmd->add_option("--out", out_path, "engagement CSV (default stdout)");
  add_common(engagement_cmd, common);

  // scales
  std::string questionnaire_path, reliability_path;
  auto* scales_cmd = app.add_subcommand("scales", "score questionnaire scales");
  scales_cmd->add_option("--questionnaire", questionnaire_path, "questionnaire CSV")->required();
  scales_cmd->add_option("--out", out_path, "scale scores CSV (default stdout)");
  scales_cmd->add_option("--reliability", reliability_path, "write Cronbach's alpha per scale to this CSV");

  // cluster
  std::string metrics_path, tree_path;
  std::optional<std::size_t> k;
  auto* cluster_cmd = app.add_subcommand("cluster", "Ward clustering of metric profiles");
  cluster_cmd->add_option("--metrics", metrics_path, "metrics CSV from `metrics`")->required();
  cluster_cmd->add_option("--out", out_path, "assignments CSV (default stdout)");
  cluster_cmd->add_option("--tree", tree_path, "write the merge tree as JSON");
  cluster_cmd->add_option("--k", k, "number of clusters");
  add_common(cluster_cmd, common);

  // analyze
  std::string profiles_path, grades_path, out_dir = "report", format = "markdown", profiles_out;
  auto* analyze_cmd = app.add_subcommand("analyze", "run an analysis workflow");
  analyze_cmd->require_subcommand(1);
  std::vector<CLI::App*> analyses;
  for (const char* name : {"rq1", "rq2"}) {
    auto* a = analyze_cmd->add_subcommand(
        name, std::string(name) == "rq1" ? "traits, engagement and grades" : "sequence metrics, clusters and grades");
    a->add_option("--profiles", profiles_path, "profiles CSV (instead of the raw sources)");
    a->add_option("--events", events_path, "event log (.csv or .jsonl)");
    a->add_option("--materials", materials_path, "material manifest CSV");
    a->add_option("--questionnaire", questionnaire_path, "questionnaire CSV");
    a->add_option("--grades", grades_path, "grades CSV");
    a->add_option("--out-dir", out_dir, "report directory");
    a->add_option("--format", format, "json, markdown, text or csv")
        ->check(CLI::IsMember({"json", "markdown", "text", "csv"}));
    a->add_option("--profiles-out", profiles_out, "also write the joined profiles CSV");
    if (std::string(name) == "rq2") a->add_option("--k", k, "number of clusters");
    add_common(a, common);
    analyses.push_back(a);
  }

  // synth
  std::size_t n = 100;
  std::uint64_t seed = 1;
  std::string mix_text;
  double activity = 1.0;
  bool no_clip = false;
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic cohort");
  synth_cmd->add_option("--n", n, "number of students")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--mix", mix_text, "archetype mix, e.g. balanced:0.5,sticky:0.5");
  synth_cmd->add_option("--seed", seed, "random seed");
  synth_cmd->add_option("--activity", activity, "scale factor on sessions per student");
  synth_cmd->add_flag("--no-clip", no_clip, "do not clip grades to [0,4]");
  synth_cmd->add_option("--out-dir", out_dir, "output directory")->required();
  add_common(synth_cmd, common);

  // report
  std::string report_in;
  auto* report_cmd = app.add_subcommand("report", "re-render a JSON report or describe a profiles file");
  auto* report_in_opt = report_cmd->add_option("--in", report_in, "report.json written by `analyze`");
  report_cmd->add_option("--profiles", profiles_path, "profiles CSV to describe")->excludes(report_in_opt);
  report_cmd->add_option("--questionnaire", questionnaire_path, "questionnaire CSV for reliability");
  report_cmd->add_option("--out-dir", out_dir, "report directory");
  report_cmd->add_option("--format", format, "json, markdown, text or csv")
      ->check(CLI::IsMember({"json", "markdown", "text", "csv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*sessionize_cmd) {
      const Config cfg = load_config(common);
      const auto events = read_events(events_path);
      const auto sessions = sessionize_all(events, cfg.sequence.gap_threshold_ms);
      std::size_t total = 0;
      with_out(out_path, [&](std::ostream& out) {
        out << "student_id,material_id,session_index,start_ms,end_ms,n_events,terminal\n";
        for (const auto& student : sessions)
          for (std::size_t i = 0; i < student.size(); ++i, ++total) {
            const Session& s = student[i];
            out << csv::quote(s.student_id) << ',' << csv::quote(s.material_id) << ',' << i << ',' << s.start_ms()
                << ',' << s.end_ms() << ',' << s.events.size() << ',' << to_string(s.terminal) << '\n';
          }
      });
      fmt::print(stderr, "sessionize: {} students, {} sessions\n", events.size(), total);
    } else if (*encode_cmd) {
      const Config cfg = load_config(common);
      const auto events = read_events(events_path);
      const auto sessions = sessionize_all(events, cfg.sequence.gap_threshold_ms);
      std::size_t total = 0;
      with_out(out_path, [&](std::ostream& out) {
        out << "student_id,material_id,session_index,sequence\n";
        for (const auto& student : sessions)
          for (std::size_t i = 0; i < student.size(); ++i, ++total) {
            auto seq = encode(student[i], cfg.sequence.append_terminal_gap, cfg.sequence.intervals);
            if (collapsed) seq = collapse_jumps(seq);
            out << csv::quote(student[i].student_id) << ',' << csv::quote(student[i].material_id) << ',' << i << ','
                << seq.tokens << '\n';
          }
      });
      fmt::print(stderr, "encode: {} sequences\n", total);
    } else if (*metrics_cmd) {
      const Config cfg = load_config(common);
      const auto events = read_events(events_path);
      std::vector<const std::vector<RawEvent>*> streams;
      for (const auto& [id, list] : events) streams.push_back(&list);
      std::vector<std::optional<StudentMetrics>> results(streams.size());
      parallel_for(streams.size(), [&](std::size_t i) { results[i] = metrics_for_student(*streams[i], cfg.sequence); });
      std::vector<StudentMetrics> metrics;
      for (auto& r : results)
        if (r) metrics.push_back(std::move(*r));
      with_out(out_path, [&](std::ostream& out) { write_metrics_csv(out, metrics); });
      fmt::print(stderr, "metrics: {} students\n", metrics.size());
    } else if (*engagement_cmd) {
      const Config cfg = load_config(common);
      const auto features = compute_features(read_events(events_path), read_manifest(materials_path), cfg);
      for (const auto& w : features.warnings) fmt::print(stderr, "warning: {}\n", w);
      with_out(out_path, [&](std::ostream& out) {
        out << "student_id,score";
        for (std::size_t m = 0; m < kNumSubMetrics; ++m) {
          const auto name = sub_metric_name(static_cast<SubMetric>(m));
          out << ',' << name << ',' << name << "_rank";
        }
        out << '\n';
        for (std::size_t i = 0; i < features.engagement.size(); ++i) {
          const auto& e = features.engagement[i];
          out << csv::quote(e.student_id) << ',' << fmt::format("{}", e.score);
          for (std::size_t m = 0; m < kNumSubMetrics; ++m)
            out << ',' << fmt::format("{}", features.submetrics[i].values[m]) << ',' << fmt::format("{}", e.ranks[m]);
          out << '\n';
        }
      });
      fmt::print(stderr, "engagement: {} students\n", features.engagement.size());
    } else if (*scales_cmd) {
      const auto scored = read_scales(questionnaire_path);
      auto opt = [](const std::optional<double>& v) { return v ? fmt::format("{}", *v) : std::string(); };
      with_out(out_path, [&](std::ostream& out) {
        out << "student_id,DECI,DECE,MW_S,MW_D\n";
        for (const auto& [id, s] : scored.by_student)
          out << csv::quote(id) << ',' << opt(s.deci) << ',' << opt(s.dece) << ',' << opt(s.mw_s) << ','
              << opt(s.mw_d) << '\n';
      });
      for (const auto& r : scored.reliability)
        fmt::print(stderr, "reliability: {} n={} alpha={}\n", r.scale_id, r.n_respondents,
                   r.alpha ? fmt::format("{:.3f}", *r.alpha) : "undefined");
      if (!reliability_path.empty())
        with_out(reliability_path, [&](std::ostream& out) {
          out << "scale_id,n_respondents,alpha\n";
          for (const auto& r : scored.reliability) out << r.scale_id << ',' << r.n_respondents << ',' << opt(r.alpha) << '\n';
        });
      fmt::print(stderr, "scales: {} students\n", scored.by_student.size());
    } else if (*cluster_cmd) {
      const Config cfg = load_config(common);
      auto in = open_in(metrics_path);
      const auto metrics = read_metrics_csv(in);
      std::vector<StudentMetrics> complete;
      for (const auto& m : metrics) {
        bool ok = true;
        for (const auto& f : cfg.cluster_features) ok = ok && m.get(f).has_value();
        if (ok) complete.push_back(m);
      }
      if (complete.size() < metrics.size())
        fmt::print(stderr, "warning: {} students lack a clustering feature and were skipped\n",
                   metrics.size() - complete.size());
      Eigen::MatrixXd x(static_cast<Eigen::Index>(complete.size()), static_cast<Eigen::Index>(cfg.cluster_features.size()));
      for (std::size_t i = 0; i < complete.size(); ++i)
        for (std::size_t j = 0; j < cfg.cluster_features.size(); ++j)
          x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = *complete[i].get(cfg.cluster_features[j]);
      const auto assignment = ward_cluster(znorm(x, cfg.cluster_features), k.value_or(cfg.k));
      with_out(out_path, [&](std::ostream& out) {
        out << "student_id,cluster\n";
        for (std::size_t i = 0; i < complete.size(); ++i)
          out << csv::quote(complete[i].student_id) << ',' << assignment.labels[i] << '\n';
      });
      if (!tree_path.empty()) {
        nlohmann::json tree = nlohmann::json::array();
        for (const auto& m : assignment.merges)
          tree.push_back({{"left", m.left}, {"right", m.right}, {"height", m.height}, {"size", m.size}});
        nlohmann::json doc{{"features", cfg.cluster_features}, {"n", complete.size()}, {"merges", tree}};
        with_out(tree_path, [&](std::ostream& out) { out << doc.dump(2) << '\n'; });
      }
      std::string sizes;
      for (auto s : assignment.sizes) sizes += (sizes.empty() ? "" : ",") + std::to_string(s);
      fmt::print(stderr, "cluster: {} students, k={}, sizes {}\n", complete.size(), assignment.k, sizes);
    } else if (*analyze_cmd) {
      const bool rq1 = analyses[0]->parsed();
      Config cfg = load_config(common);
      if (k) cfg.k = *k;
      std::vector<StudentProfile> profiles;
      if (!profiles_path.empty()) {
        auto in = open_in(profiles_path);
        profiles = read_profiles_csv(in);
      } else {
        if (events_path.empty() || materials_path.empty() || questionnaire_path.empty() || grades_path.empty()) {
          fmt::print(stderr, "analyze: give --profiles or all of --events, --materials, --questionnaire, --grades\n");
          return 2;
        }
        const auto features = compute_features(read_events(events_path), read_manifest(materials_path), cfg);
        for (const auto& w : features.warnings) fmt::print(stderr, "warning: {}\n", w);
        const auto scales = read_scales(questionnaire_path);
        const auto joined = join_profiles(features.metrics, features.engagement_map(), scales.by_student,
                                          read_grades(grades_path),
                                          rq1 ? ProfileRequirements::rq1() : ProfileRequirements::rq2());
        print_attrition(joined);
        profiles = joined.profiles;
      }
      if (!profiles_out.empty()) with_out(profiles_out, [&](std::ostream& out) { write_profiles_csv(out, profiles); });
      const ReportBundle bundle = rq1 ? to_bundle(run_rq1(profiles, cfg)) : to_bundle(run_rq2(profiles, cfg.k, cfg));
      const auto files = emit_report(bundle, report_format_from_string(format), out_dir);
      fmt::print(stderr, "analyze {}: {} profiles, {} tables, {} file(s) in {}\n", rq1 ? "rq1" : "rq2", profiles.size(),
                 bundle.tables.size(), files.size(), out_dir);
    } else if (*synth_cmd) {
      const Config cfg = load_config(common);
      SynthOptions o;
      o.n = n;
      o.seed = seed;
      o.activity = activity;
      o.clip_grades = !no_clip;
      if (!mix_text.empty()) o.mix = SynthOptions::parse_mix(mix_text);
      const Cohort cohort = gen_cohort(o, cfg);
      write_cohort(cohort, out_dir);
      std::size_t total = 0;
      for (const auto& [id, list] : cohort.events) total += list.size();
      fmt::print(stderr, "synth: {} students, {} events written to {}\n", cohort.events.size(), total, out_dir);
    } else if (*report_cmd) {
      ReportBundle bundle;
      if (!report_in.empty()) {
        auto in = open_in(report_in);
        bundle = bundle_from_json(std::string(std::istreambuf_iterator<char>(in), {}));
      } else if (!profiles_path.empty()) {
        auto in = open_in(profiles_path);
        const auto profiles = read_profiles_csv(in);
        std::vector<ScaleReliability> reliability;
        if (!questionnaire_path.empty()) reliability = read_scales(questionnaire_path).reliability;
        bundle = ReportBundle{fmt::format("Descriptive statistics (n={})", profiles.size()),
                              {descriptives_table(profiles, reliability)}};
      } else {
        fmt::print(stderr, "report: give --in or --profiles\n");
        return 2;
      }
      const auto files = emit_report(bundle, report_format_from_string(format), out_dir);
      fmt::print(stderr, "report: {} tables, {} file(s) in {}\n", bundle.tables.size(), files.size(), out_dir);
    }
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
