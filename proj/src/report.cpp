#include "readtrace/report.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include "json.hpp"

#include "readtrace/ingest.hpp"
#include "readtrace/stats.hpp"

namespace readtrace {

using nlohmann::json;

namespace {

std::string stars(double p) { return p < 0.01 ? "**" : p < 0.05 ? "*" : ""; }

Cell opt_cell(const std::optional<double>& v) { return v ? Cell{*v} : Cell{}; }

Cell corr_cell(const std::optional<Correlation>& c) { return c ? Cell{Starred{c->r, c->p}} : Cell{}; }

std::string test_note(const std::string& label, const FTestResult& t) {
  std::string out = fmt::format("{}: dR2={:.3f}, F({},{})={:.2f}, p={:.3f}", label, t.delta_r2, t.df1, t.df2, t.f, t.p);
  if (t.partial_eta_sq) out += fmt::format(", partial eta2={:.3f}", *t.partial_eta_sq);
  return out;
}

Table correlation_table(std::string name, std::string caption, const CorrelationMatrix& m,
                        std::size_t full_rows) {
  // The first `full_rows` variables get every column; the rest form the upper
  // triangle of the remaining block.
  Table t{std::move(name), std::move(caption), {""}, {}, {"* p<0.05, ** p<0.01"}};
  const std::size_t n = m.names.size();
  const std::size_t first_col = full_rows > 0 ? full_rows : 1;
  for (std::size_t j = first_col; j < n; ++j) t.columns.push_back(m.names[j]);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    std::vector<Cell> row{m.names[i]};
    for (std::size_t j = first_col; j < n; ++j)
      row.push_back(i < full_rows || j > i ? corr_cell(m.cells[i][j]) : Cell{});
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string render_cell(const Cell& c, const std::string& column) {
  struct Visitor {
    const std::string& column;
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(double v) const {
      if (column == "p") return v < 0.001 ? "<0.001" : fmt::format("{:.3f}", v);
      return fmt::format("{:.3f}", v);
    }
    std::string operator()(long v) const { return fmt::format("{}", v); }
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(const Starred& s) const {
      if (std::abs(s.value) < 0.005) return (s.value < 0 ? ">-0.01" : "<0.01") + stars(s.p);
      return fmt::format("{:.2f}{}", s.value, stars(s.p));
    }
  };
  return std::visit(Visitor{column}, c);
}

std::string csv_cell(const Cell& c) {
  struct Visitor {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(double v) const { return fmt::format("{}", v); }
    std::string operator()(long v) const { return fmt::format("{}", v); }
    std::string operator()(const std::string& s) const { return csv::quote(s); }
    std::string operator()(const Starred& s) const { return fmt::format("{}", s.value); }
  };
  return std::visit(Visitor{}, c);
}

json cell_json(const Cell& c) {
  struct Visitor {
    json operator()(std::monostate) const { return nullptr; }
    json operator()(double v) const { return v; }
    json operator()(long v) const { return v; }
    json operator()(const std::string& s) const { return s; }
    json operator()(const Starred& s) const { return json{{"value", s.value}, {"p", s.p}}; }
  };
  return std::visit(Visitor{}, c);
}

Cell cell_from_json(const json& j) {
  if (j.is_null()) return {};
  if (j.is_number_float()) return j.get<double>();
  if (j.is_number_integer()) return j.get<long>();
  if (j.is_string()) return j.get<std::string>();
  if (j.is_object()) return Starred{j.at("value").get<double>(), j.at("p").get<double>()};
  throw Error("report json: unsupported cell " + j.dump());
}

json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

std::vector<std::string> render_rows(const Table& t, std::vector<std::vector<std::string>>& cells) {
  std::vector<std::size_t> width(t.columns.size(), 0);
  for (std::size_t j = 0; j < t.columns.size(); ++j) width[j] = t.columns[j].size();
  for (const auto& row : t.rows) {
    std::vector<std::string> r;
    for (std::size_t j = 0; j < t.columns.size(); ++j) {
      r.push_back(j < row.size() ? render_cell(row[j], t.columns[j]) : "");
      width[j] = std::max(width[j], r.back().size());
    }
    cells.push_back(std::move(r));
  }
  std::vector<std::string> header;
  for (std::size_t j = 0; j < t.columns.size(); ++j) header.push_back(fmt::format("{:<{}}", t.columns[j], width[j]));
  for (auto& r : cells)
    for (std::size_t j = 0; j < r.size(); ++j)
      r[j] = j == 0 ? fmt::format("{:<{}}", r[j], width[j]) : fmt::format("{:>{}}", r[j], width[j]);
  return header;
}

}  // namespace

const Table& ReportBundle::table(const std::string& name) const {
  for (const auto& t : tables)
    if (t.name == name) return t;
  throw Error("report has no table '" + name + "'");
}

ReportFormat report_format_from_string(const std::string& s) {
  if (s == "json") return ReportFormat::Json;
  if (s == "markdown" || s == "md") return ReportFormat::Markdown;
  if (s == "text" || s == "txt") return ReportFormat::Text;
  if (s == "csv") return ReportFormat::Csv;
  throw Error("unknown report format '" + s + "'");
}

Table model_table(std::string name, std::string caption, std::span<const NamedModel> models,
                  std::span<const ModelComparison> comparisons) {
  Table t{std::move(name), std::move(caption), {"Predictor", "R2", "F", "beta", "CI low", "CI high", "t", "p"}, {}, {}};
  for (const auto& m : models) {
    const RegressionReport& r = m.report;
    t.rows.push_back({m.name, r.r2, r.f_model, {}, {}, {}, {}, r.p_model});
    for (std::size_t j = 0; j < r.design.columns.size(); ++j) {
      const auto i = static_cast<Eigen::Index>(j);
      const std::string& col = r.design.columns[j];
      t.rows.push_back({col == "Intercept" ? std::string("Constant") : col, {}, {}, r.beta(i), r.ci_low(i),
                        r.ci_high(i), r.t(i), r.p(i)});
    }
  }
  for (const auto& c : comparisons) t.notes.push_back(test_note(c.label, c.test));
  return t;
}

ReportBundle to_bundle(const Rq1Report& r) {
  ReportBundle b{fmt::format("Traits, engagement and grades (n={})", r.n), {}};
  b.tables.push_back(correlation_table("correlations", "Pearson correlations between selected variables",
                                       r.correlations, 0));

  Table eng{"engagement_models", "Regression of the engagement indicator on trait-level predictors",
            {"Model", "R2", "F", "df1", "df2", "p"}, {}, {}};
  for (const auto& m : r.engagement_models)
    eng.rows.push_back({m.name, m.report.r2, m.report.f_model, static_cast<long>(m.report.df_model),
                        static_cast<long>(m.report.df_resid), m.report.p_model});
  b.tables.push_back(std::move(eng));

  b.tables.push_back(model_table("grade_models",
                                 "Step-wise regression of final grades on the engagement indicator and DEC",
                                 r.grade_models, r.grade_comparisons));
  return b;
}

ReportBundle to_bundle(const Rq2Report& r) {
  ReportBundle b{fmt::format("Reading sequence metrics, strategies and grades (n={})", r.n), {}};
  b.tables.push_back(correlation_table(
      "correlations", "Pearson correlations between reading sequence metrics, engagement and grades",
      r.correlations, 2));

  Table sel = model_table("selection", "Step-wise regression of final grades on the selected sequence metrics",
                          r.selection_models, r.selection_comparisons);
  std::string correlated;
  for (const auto& m : r.grade_correlated) correlated += (correlated.empty() ? "" : ", ") + m;
  sel.notes.insert(sel.notes.begin(),
                   "Metrics correlated with grade: " + (correlated.empty() ? std::string("none") : correlated));
  if (r.metrics_over_engagement)
    sel.notes.push_back(test_note(r.metrics_over_engagement->label, r.metrics_over_engagement->test));
  else
    sel.notes.push_back("No metric was selected; engagement comparison skipped");
  b.tables.push_back(std::move(sel));

  const NamedModel dec[] = {r.dec_model};
  const ModelComparison dec_cmp[] = {r.dec_added};
  b.tables.push_back(model_table("dec_model", "Selected metrics with DECI and DECE", dec, dec_cmp));

  const auto& cs = r.clusters;
  Table centroids{"cluster_centroids", "Clusters' z-normalized metric values", {"Cluster", "Size"}, {}, {}};
  centroids.columns.insert(centroids.columns.end(), cs.display_metrics.begin(), cs.display_metrics.end());
  std::string features;
  for (const auto& f : cs.features) features += (features.empty() ? "" : ", ") + f;
  centroids.notes.push_back("Clustered on: " + features);
  for (std::size_t c = 0; c < cs.assignment.k; ++c) {
    std::vector<Cell> row{static_cast<long>(c), static_cast<long>(cs.assignment.sizes[c])};
    for (Eigen::Index j = 0; j < cs.display_centroids.cols(); ++j)
      row.emplace_back(cs.display_centroids(static_cast<Eigen::Index>(c), j));
    centroids.rows.push_back(std::move(row));
  }
  b.tables.push_back(std::move(centroids));

  Table assign{"cluster_assignments", "Cluster of each student", {"student_id", "cluster"}, {}, {}};
  for (std::size_t i = 0; i < cs.student_ids.size(); ++i)
    assign.rows.push_back({cs.student_ids[i], static_cast<long>(cs.assignment.labels[i])});
  b.tables.push_back(std::move(assign));

  if (r.moderation_model) {
    const NamedModel mod[] = {*r.moderation_model};
    b.tables.push_back(model_table("moderation", "Grade ~ C(cluster) x (DECI + DECE) + Engagement x (DECI + DECE)", mod));
  }
  Table omni{"omnibus", "Omnibus tests of the cluster interaction blocks",
             {"Block", "F", "df1", "df2", "p", "partial eta2"}, {}, {}};
  for (const auto* block : {&r.deci_block, &r.dece_block}) {
    if (!*block) continue;
    const FTestResult& t = (*block)->test;
    omni.rows.push_back({(*block)->label, t.f, static_cast<long>(t.df1), static_cast<long>(t.df2), t.p,
                         opt_cell(t.partial_eta_sq)});
  }
  if (!r.moderation_diagnostic.empty()) omni.notes.push_back(r.moderation_diagnostic);
  b.tables.push_back(std::move(omni));

  Table curves{"prediction_curves", "Predicted grade over DECI per cluster",
               {"cluster", "DECI", "fit", "ci_low", "ci_high", "pi_low", "pi_high"}, {}, {}};
  for (const auto& c : r.curves)
    for (std::size_t i = 0; i < c.deci.size(); ++i) {
      const Prediction& p = c.predictions[i];
      curves.rows.push_back({static_cast<long>(c.cluster), c.deci[i], p.fit, p.ci_low, p.ci_high, p.pi_low, p.pi_high});
    }
  b.tables.push_back(std::move(curves));
  return b;
}

Table descriptives_table(std::span<const StudentProfile> profiles, std::span<const ScaleReliability> reliability) {
  Table t{"descriptives", "Descriptive statistics. Grades are on a 0-4 scale; engagement in percent.",
          {"Measure", "N", "Mean", "SD", "Skew", "Kurtosis", "Cronbach's alpha"}, {}, {}};
  struct Source {
    const char* name;
    const char* scale;
    double factor;
    std::optional<double> StudentProfile::*field;
  };
  const Source sources[] = {{"DECI", "DECI", 1, &StudentProfile::deci},
                            {"DECE", "DECE", 1, &StudentProfile::dece},
                            {"Engagement", nullptr, 100, &StudentProfile::engagement},
                            {"Grade", nullptr, 1, &StudentProfile::grade},
                            {"MW-S", "MW-S", 1, &StudentProfile::mw_s},
                            {"MW-D", "MW-D", 1, &StudentProfile::mw_d}};
  for (const auto& s : sources) {
    std::vector<double> values;
    for (const auto& p : profiles)
      if (p.*(s.field)) values.push_back(*(p.*(s.field)) * s.factor);
    if (values.empty()) continue;
    const auto d = descriptives(Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size())));
    Cell alpha{};
    if (s.scale)
      for (const auto& rel : reliability)
        if (rel.scale_id == s.scale) alpha = opt_cell(rel.alpha);
    t.rows.push_back({std::string(s.name), static_cast<long>(d.n), d.mean, opt_cell(d.sd), opt_cell(d.skewness),
                      opt_cell(d.excess_kurtosis), alpha});
  }
  t.notes.push_back("Kurtosis is excess kurtosis");
  return t;
}

std::string to_json(const ReportBundle& bundle) {
  json tables = json::array();
  for (const auto& t : bundle.tables) {
    json rows = json::array();
    for (const auto& row : t.rows) {
      json r = json::array();
      for (const auto& c : row) r.push_back(cell_json(c));
      rows.push_back(std::move(r));
    }
    tables.push_back(
        {{"name", t.name}, {"caption", t.caption}, {"columns", t.columns}, {"rows", rows}, {"notes", t.notes}});
  }
  json j{{"title", bundle.title}, {"tables", tables}};
  return j.dump(2) + "\n";
}

ReportBundle bundle_from_json(const std::string& text) {
  ReportBundle b;
  try {
    const json j = json::parse(text);
    b.title = j.at("title").get<std::string>();
    for (const auto& jt : j.at("tables")) {
      Table t;
      t.name = jt.at("name").get<std::string>();
      t.caption = jt.at("caption").get<std::string>();
      t.columns = jt.at("columns").get<std::vector<std::string>>();
      t.notes = jt.at("notes").get<std::vector<std::string>>();
      for (const auto& jr : jt.at("rows")) {
        std::vector<Cell> row;
        for (const auto& jc : jr) row.push_back(cell_from_json(jc));
        t.rows.push_back(std::move(row));
      }
      b.tables.push_back(std::move(t));
    }
  } catch (const json::exception& e) {
    throw Error(std::string("report json: ") + e.what());
  }
  return b;
}

std::string to_json(const RegressionReport& r) {
  json j{{"response", r.response},
         {"n", r.n},
         {"columns", r.design.columns},
         {"beta", vec_json(r.beta)},
         {"se", vec_json(r.se)},
         {"t", vec_json(r.t)},
         {"p", vec_json(r.p)},
         {"ci_low", vec_json(r.ci_low)},
         {"ci_high", vec_json(r.ci_high)},
         {"r2", r.r2},
         {"f", r.f_model},
         {"p_model", r.p_model},
         {"df_model", r.df_model},
         {"df_resid", r.df_resid},
         {"residual_variance", r.residual_variance}};
  return j.dump(2) + "\n";
}

std::string to_markdown(const ReportBundle& bundle) {
  std::ostringstream out;
  out << "# " << bundle.title << "\n";
  for (const auto& t : bundle.tables) {
    out << "\n## " << t.caption << "\n\n";
    std::vector<std::vector<std::string>> cells;
    const auto header = render_rows(t, cells);
    out << '|';
    for (const auto& h : header) out << ' ' << h << " |";
    out << "\n|";
    for (std::size_t j = 0; j < header.size(); ++j)
      out << (j == 0 ? ":" : "") << std::string(header[j].size() + 1, '-') << (j == 0 ? "|" : ":|");
    out << '\n';
    for (const auto& r : cells) {
      out << '|';
      for (const auto& c : r) out << ' ' << c << " |";
      out << '\n';
    }
    if (!t.notes.empty()) out << '\n';
    for (const auto& n : t.notes) out << "- " << n << '\n';
  }
  return out.str();
}

std::string to_text(const ReportBundle& bundle) {
  std::ostringstream out;
  out << bundle.title << "\n";
  for (const auto& t : bundle.tables) {
    out << '\n' << t.caption << '\n';
    std::vector<std::vector<std::string>> cells;
    const auto header = render_rows(t, cells);
    std::string line;
    for (std::size_t j = 0; j < header.size(); ++j) line += (j ? "  " : "") + header[j];
    out << line << '\n' << std::string(line.size(), '-') << '\n';
    for (const auto& r : cells) {
      std::string l;
      for (std::size_t j = 0; j < r.size(); ++j) l += (j ? "  " : "") + r[j];
      out << l << '\n';
    }
    for (const auto& n : t.notes) out << "  " << n << '\n';
  }
  return out.str();
}

std::vector<std::filesystem::path> emit_report(const ReportBundle& bundle, ReportFormat format,
                                               const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  auto write = [&](const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) throw Error("cannot write " + path.string());
    written.push_back(path);
  };
  switch (format) {
    case ReportFormat::Json:
      write(dir / "report.json", to_json(bundle));
      break;
    case ReportFormat::Markdown:
      write(dir / "report.md", to_markdown(bundle));
      break;
    case ReportFormat::Text:
      write(dir / "report.txt", to_text(bundle));
      break;
    case ReportFormat::Csv:
      for (const auto& t : bundle.tables) {
        std::string content;
        for (std::size_t j = 0; j < t.columns.size(); ++j) content += (j ? "," : "") + csv::quote(t.columns[j]);
        content += '\n';
        for (const auto& row : t.rows) {
          for (std::size_t j = 0; j < row.size(); ++j) content += (j ? "," : "") + csv_cell(row[j]);
          content += '\n';
        }
        write(dir / (t.name + ".csv"), content);
      }
      break;
  }
  return written;
}

}  // namespace readtrace
