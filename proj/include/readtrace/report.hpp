#pragma once

// Report bundles: named tables rendered as JSON, markdown, aligned text or a
// directory of CSV files.

#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "readtrace/pipeline.hpp"

namespace readtrace {

/// A value printed with significance stars (* p<0.05, ** p<0.01).
struct Starred {
  double value = 0;
  double p = 1;
  friend bool operator==(const Starred&, const Starred&) = default;
};

using Cell = std::variant<std::monostate, double, long, std::string, Starred>;

struct Table {
  std::string name;     // file stem in a csv bundle
  std::string caption;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::string> notes;
  friend bool operator==(const Table&, const Table&) = default;
};

struct ReportBundle {
  std::string title;
  std::vector<Table> tables;
  friend bool operator==(const ReportBundle&, const ReportBundle&) = default;

  const Table& table(const std::string& name) const;
};

enum class ReportFormat { Json, Markdown, Text, Csv };

ReportFormat report_format_from_string(const std::string& s);

ReportBundle to_bundle(const Rq1Report& report);
ReportBundle to_bundle(const Rq2Report& report);

/// Descriptive statistics of the joined profiles; engagement in percent.
Table descriptives_table(std::span<const StudentProfile> profiles,
                         std::span<const ScaleReliability> reliability = {});

/// Predictor rows with R^2, F, beta, its 95% CI, t and p per model; the
/// comparisons become notes.
Table model_table(std::string name, std::string caption, std::span<const NamedModel> models,
                  std::span<const ModelComparison> comparisons = {});

std::string to_json(const ReportBundle& bundle);
ReportBundle bundle_from_json(const std::string& text);
std::string to_json(const RegressionReport& report);

std::string to_markdown(const ReportBundle& bundle);
std::string to_text(const ReportBundle& bundle);

/// Writes the bundle under `dir` and returns the files written. Json,
/// Markdown and Text produce one file; Csv produces one file per table.
std::vector<std::filesystem::path> emit_report(const ReportBundle& bundle, ReportFormat format,
                                               const std::filesystem::path& dir);

}  // namespace readtrace
