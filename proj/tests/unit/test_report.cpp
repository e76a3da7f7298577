#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "readtrace/pipeline.hpp"
#include "readtrace/report.hpp"
#include "readtrace/synth.hpp"

using namespace readtrace;

namespace {

ReportBundle sample_bundle() {
  ReportBundle b;
  b.title = "Sample";
  Table t;
  t.name = "numbers";
  t.caption = "Some numbers";
  t.columns = {"Name", "r", "n", "p"};
  t.rows.push_back({std::string("alpha"), Starred{0.4321, 0.003}, 12L, 0.0004});
  t.rows.push_back({std::string("beta, quoted"), Starred{-0.002, 0.9}, std::monostate{}, 0.25});
  t.notes = {"a note"};
  b.tables.push_back(t);
  return b;
}

std::vector<StudentProfile> profiles() {
  SynthOptions o;
  o.n = 90;
  o.seed = 23;
  const auto c = gen_cohort(o);
  const auto f = compute_features(c.events, c.manifest);
  const auto s = score_scales(c.questionnaire);
  return join_profiles(f.metrics, f.engagement_map(), s.by_student, c.grades, {true, true, true, true, true})
      .profiles;
}

}  // namespace

TEST_CASE("json round trip preserves every cell type") {
  const auto b = sample_bundle();
  CHECK(bundle_from_json(to_json(b)) == b);
  CHECK_THROWS(bundle_from_json("{not json"));
}

TEST_CASE("markdown and text rendering") {
  const auto b = sample_bundle();
  const auto md = to_markdown(b);
  CHECK(md.find("# Sample") != std::string::npos);
  CHECK(md.find("## Some numbers") != std::string::npos);
  CHECK(md.find("0.43**") != std::string::npos);
  CHECK(md.find(">-0.01") != std::string::npos);
  CHECK(md.find("<0.001") != std::string::npos);
  CHECK(md.find("- a note") != std::string::npos);
  const auto txt = to_text(b);
  CHECK(txt.find("0.43**") != std::string::npos);
  CHECK(txt.find("  a note") != std::string::npos);
}

TEST_CASE("format names") {
  CHECK(report_format_from_string("md") == ReportFormat::Markdown);
  CHECK(report_format_from_string("json") == ReportFormat::Json);
  CHECK(report_format_from_string("txt") == ReportFormat::Text);
  CHECK(report_format_from_string("csv") == ReportFormat::Csv);
  CHECK_THROWS_AS(report_format_from_string("xml"), Error);
}

TEST_CASE("emit writes the expected files") {
  const auto dir = std::filesystem::temp_directory_path() / "readtrace_report_test";
  std::filesystem::remove_all(dir);
  const auto b = sample_bundle();
  const auto json = emit_report(b, ReportFormat::Json, dir);
  REQUIRE(json.size() == 1);
  std::ifstream in(json[0]);
  std::string text((std::istreambuf_iterator<char>(in)), {});
  CHECK(bundle_from_json(text) == b);
  const auto csv = emit_report(b, ReportFormat::Csv, dir);
  REQUIRE(csv.size() == 1);
  CHECK(csv[0].filename() == "numbers.csv");
  std::ifstream c(csv[0]);
  std::string header;
  std::getline(c, header);
  CHECK(header == "Name,r,n,p");
  std::string row;
  std::getline(c, row);
  CHECK(row.rfind("alpha,0.4321,12,", 0) == 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("analysis bundles") {
  const auto p = profiles();
  const auto rq1 = to_bundle(run_rq1(p));
  CHECK(rq1.table("grade_models").rows.size() > 3);
  CHECK(rq1.table("grade_models").notes.size() >= 2);
  CHECK_THROWS_AS(rq1.table("missing"), Error);
  CHECK(bundle_from_json(to_json(rq1)) == rq1);

  const auto rq2 = to_bundle(run_rq2(p, 3));
  for (auto name : {"correlations", "selection", "dec_model", "cluster_centroids", "cluster_assignments"})
    CHECK_NOTHROW(rq2.table(name));
  CHECK(rq2.table("cluster_assignments").rows.size() == p.size());
  CHECK(bundle_from_json(to_json(rq2)) == rq2);

  const auto d = descriptives_table(p);
  CHECK(d.rows.size() >= 6);
}
