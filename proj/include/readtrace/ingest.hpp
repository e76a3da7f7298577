#pragma once

// Readers and writers for the on-disk formats: event logs (CSV or JSONL),
// questionnaire responses, grades and the material manifest.

#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "readtrace/core.hpp"

namespace readtrace {

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct RowError {
  std::size_t line = 0;
  std::string message;
};

enum class EventFormat { Csv, Jsonl };

/// Picks the format from a file extension (.jsonl/.ndjson vs anything else).
EventFormat event_format_for_path(std::string_view path);

using EventsByStudent = std::map<std::string, std::vector<RawEvent>>;

/// Events grouped by student and stably sorted by timestamp. Malformed rows
/// throw ParseError carrying the 1-based line number.
EventsByStudent parse_events(std::istream& in, EventFormat format);

void write_events_csv(std::ostream& out, const EventsByStudent& events);
void write_events_jsonl(std::ostream& out, const EventsByStudent& events);

struct MaterialManifestEntry {
  std::string material_id;
  int n_pages = 1;
};

using Manifest = std::map<std::string, int>;

Manifest parse_manifest(std::istream& in);
void write_manifest_csv(std::ostream& out, const Manifest& manifest);

struct ScaleSpec {
  std::map<std::string, int> item_counts;

  /// DECI and DECE with 8 items, MW-S and MW-D with 4.
  static ScaleSpec standard();
};

struct QuestionnaireResponse {
  std::string student_id;
  std::string scale_id;
  std::vector<int> item_scores;
};

struct QuestionnaireParse {
  std::vector<QuestionnaireResponse> responses;
  std::vector<RowError> rejected;
};

/// Rows with a wrong item count, an unknown scale or a score outside [1,7]
/// are rejected; the rest are returned.
QuestionnaireParse parse_questionnaire(std::istream& in,
                                       const ScaleSpec& spec = ScaleSpec::standard());
void write_questionnaire_csv(std::ostream& out, std::span<const QuestionnaireResponse> rows);

struct GradesParse {
  std::map<std::string, double> grades;
  std::vector<RowError> rejected;
  std::vector<std::string> warnings;
};

GradesParse parse_grades(std::istream& in);
void write_grades_csv(std::ostream& out, const std::map<std::string, double>& grades);

namespace csv {

/// Splits one CSV record; supports double-quoted fields with "" escapes.
std::vector<std::string> split(std::string_view line);
std::string quote(std::string_view field);
std::string_view trim(std::string_view s);

}  // namespace csv

}  // namespace readtrace
