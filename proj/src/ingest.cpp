#include "readtrace/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

namespace readtrace {

namespace csv {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) throw Error("unterminated quoted field");
  fields.emplace_back(trim(cur));
  return fields;
}

std::string quote(std::string_view field) {
  if (field.find_first_of(",\"\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace csv

namespace {

template <class T>
std::optional<T> parse_number(std::string_view s) {
  s = csv::trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  T value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

bool blank(std::string_view line) { return csv::trim(line).empty(); }

struct EventColumns {
  std::size_t student = 0, material = 0, page = 0, type = 0, timestamp = 0, width = 0;
};

EventColumns locate_event_columns(const std::vector<std::string>& header) {
  auto find = [&](std::string_view name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw ParseError(1, "missing required column '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  EventColumns c;
  c.student = find("student_id");
  c.material = find("material_id");
  c.page = find("page");
  c.type = find("event_type");
  c.timestamp = find("timestamp_ms");
  c.width = header.size();
  return c;
}

RawEvent make_event(std::size_t line, std::string student, std::string material,
                    std::optional<long long> page, std::string_view type,
                    std::optional<long long> ts) {
  if (student.empty()) throw ParseError(line, "empty student_id");
  if (material.empty()) throw ParseError(line, "empty material_id");
  if (!page || *page < 1 || *page > std::numeric_limits<int>::max())
    throw ParseError(line, "page must be a positive integer");
  if (!ts || *ts < 0) throw ParseError(line, "timestamp_ms must be a non-negative integer");
  if (csv::trim(type).empty()) throw ParseError(line, "empty event_type");
  RawEvent e;
  e.student_id = std::move(student);
  e.material_id = std::move(material);
  e.page = static_cast<int>(*page);
  e.kind = EventKind::from_label(csv::trim(type));
  e.timestamp = *ts;
  return e;
}

EventsByStudent group_and_sort(std::vector<RawEvent> events) {
  EventsByStudent out;
  for (auto& e : events) out[e.student_id].push_back(std::move(e));
  for (auto& [id, list] : out)
    std::stable_sort(list.begin(), list.end(),
                     [](const RawEvent& a, const RawEvent& b) { return a.timestamp < b.timestamp; });
  return out;
}

std::optional<long long> json_integer(const nlohmann::json& v) {
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_string()) return parse_number<long long>(v.get<std::string>());
  return std::nullopt;
}

// Header rows are optional in the small tabular files; a first row whose
// leading field matches `first_column` is skipped.
bool is_header(std::size_t line, const std::vector<std::string>& fields, std::string_view first_column) {
  return line == 1 && !fields.empty() && fields[0] == first_column;
}

}  // namespace

EventFormat event_format_for_path(std::string_view path) {
  auto ends_with = [&](std::string_view suffix) {
    return path.size() >= suffix.size() && path.substr(path.size() - suffix.size()) == suffix;
  };
  return ends_with(".jsonl") || ends_with(".ndjson") ? EventFormat::Jsonl : EventFormat::Csv;
}

EventsByStudent parse_events(std::istream& in, EventFormat format) {
  std::vector<RawEvent> events;
  std::string line;
  std::size_t line_no = 0;

  if (format == EventFormat::Csv) {
    std::optional<EventColumns> cols;
    while (std::getline(in, line)) {
      ++line_no;
      if (blank(line)) continue;
      std::vector<std::string> f;
      try {
        f = csv::split(line);
      } catch (const Error& e) {
        throw ParseError(line_no, e.what());
      }
      if (!cols) {
        if (line_no != 1) throw ParseError(line_no, "header row must be the first line");
        cols = locate_event_columns(f);
        continue;
      }
      if (f.size() != cols->width)
        throw ParseError(line_no, fmt::format("expected {} fields, got {}", cols->width, f.size()));
      events.push_back(make_event(line_no, f[cols->student], f[cols->material],
                                  parse_number<long long>(f[cols->page]), f[cols->type],
                                  parse_number<long long>(f[cols->timestamp])));
    }
    if (!cols) throw ParseError(1, "missing header row");
  } else {
    while (std::getline(in, line)) {
      ++line_no;
      if (blank(line)) continue;
      nlohmann::json obj;
      try {
        obj = nlohmann::json::parse(line);
      } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(line_no, std::string("invalid JSON: ") + e.what());
      }
      if (!obj.is_object()) throw ParseError(line_no, "expected a JSON object");
      for (const char* key : {"student_id", "material_id", "page", "event_type", "timestamp_ms"})
        if (!obj.contains(key)) throw ParseError(line_no, std::string("missing required field '") + key + "'");
      auto text = [&](const char* key) -> std::string {
        const auto& v = obj[key];
        if (v.is_string()) return v.get<std::string>();
        if (v.is_number_integer()) return std::to_string(v.get<long long>());
        throw ParseError(line_no, std::string("field '") + key + "' must be a string");
      };
      events.push_back(make_event(line_no, text("student_id"), text("material_id"),
                                  json_integer(obj["page"]), text("event_type"),
                                  json_integer(obj["timestamp_ms"])));
    }
  }
  return group_and_sort(std::move(events));
}

void write_events_csv(std::ostream& out, const EventsByStudent& events) {
  out << "student_id,material_id,page,event_type,timestamp_ms\n";
  for (const auto& [id, list] : events)
    for (const RawEvent& e : list)
      out << csv::quote(e.student_id) << ',' << csv::quote(e.material_id) << ',' << e.page << ','
          << csv::quote(e.kind.to_label()) << ',' << e.timestamp << '\n';
}

void write_events_jsonl(std::ostream& out, const EventsByStudent& events) {
  for (const auto& [id, list] : events)
    for (const RawEvent& e : list) {
      nlohmann::json obj = {{"student_id", e.student_id},
                            {"material_id", e.material_id},
                            {"page", e.page},
                            {"event_type", e.kind.to_label()},
                            {"timestamp_ms", e.timestamp}};
      out << obj.dump() << '\n';
    }
}

Manifest parse_manifest(std::istream& in) {
  Manifest m;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    auto f = csv::split(line);
    if (is_header(line_no, f, "material_id")) continue;
    if (f.size() != 2) throw ParseError(line_no, "expected material_id,n_pages");
    auto pages = parse_number<int>(f[1]);
    if (f[0].empty()) throw ParseError(line_no, "empty material_id");
    if (!pages || *pages < 1) throw ParseError(line_no, "n_pages must be a positive integer");
    if (!m.emplace(f[0], *pages).second) throw ParseError(line_no, "duplicate material_id " + f[0]);
  }
  return m;
}

void write_manifest_csv(std::ostream& out, const Manifest& manifest) {
  out << "material_id,n_pages\n";
  for (const auto& [id, pages] : manifest) out << csv::quote(id) << ',' << pages << '\n';
}

ScaleSpec ScaleSpec::standard() {
  return ScaleSpec{{{"DECI", 8}, {"DECE", 8}, {"MW-S", 4}, {"MW-D", 4}}};
}

QuestionnaireParse parse_questionnaire(std::istream& in, const ScaleSpec& spec) {
  QuestionnaireParse out;
  std::set<std::pair<std::string, std::string>> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    std::vector<std::string> f;
    try {
      f = csv::split(line);
    } catch (const Error& e) {
      out.rejected.push_back({line_no, e.what()});
      continue;
    }
    if (is_header(line_no, f, "student_id")) continue;
    while (!f.empty() && f.back().empty()) f.pop_back();
    if (f.size() < 2 || f[0].empty()) {
      out.rejected.push_back({line_no, "expected student_id,scale_id,items..."});
      continue;
    }
    auto spec_it = spec.item_counts.find(f[1]);
    if (spec_it == spec.item_counts.end()) {
      out.rejected.push_back({line_no, "unknown scale '" + f[1] + "'"});
      continue;
    }
    const std::size_t n_items = f.size() - 2;
    if (n_items != static_cast<std::size_t>(spec_it->second)) {
      out.rejected.push_back(
          {line_no, fmt::format("scale {} expects {} items, got {}", f[1], spec_it->second, n_items)});
      continue;
    }
    QuestionnaireResponse r{f[0], f[1], {}};
    std::string problem;
    for (std::size_t i = 2; i < f.size(); ++i) {
      auto v = parse_number<int>(f[i]);
      if (!v || *v < 1 || *v > 7) {
        problem = fmt::format("item {} score '{}' outside 1..7", i - 1, f[i]);
        break;
      }
      r.item_scores.push_back(*v);
    }
    if (!problem.empty()) {
      out.rejected.push_back({line_no, problem});
      continue;
    }
    if (!seen.emplace(r.student_id, r.scale_id).second) {
      out.rejected.push_back({line_no, "duplicate response for " + r.student_id + "/" + r.scale_id});
      continue;
    }
    out.responses.push_back(std::move(r));
  }
  return out;
}

void write_questionnaire_csv(std::ostream& out, std::span<const QuestionnaireResponse> rows) {
  std::size_t width = 0;
  for (const auto& r : rows) width = std::max(width, r.item_scores.size());
  out << "student_id,scale_id";
  for (std::size_t i = 1; i <= width; ++i) out << ",item" << i;
  out << '\n';
  for (const auto& r : rows) {
    out << csv::quote(r.student_id) << ',' << r.scale_id;
    for (std::size_t i = 0; i < width; ++i) {
      out << ',';
      if (i < r.item_scores.size()) out << r.item_scores[i];
    }
    out << '\n';
  }
}

GradesParse parse_grades(std::istream& in) {
  GradesParse out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    std::vector<std::string> f;
    try {
      f = csv::split(line);
    } catch (const Error& e) {
      out.rejected.push_back({line_no, e.what()});
      continue;
    }
    if (is_header(line_no, f, "student_id")) continue;
    if (f.size() != 2 || f[0].empty()) {
      out.rejected.push_back({line_no, "expected student_id,grade"});
      continue;
    }
    auto g = parse_number<double>(f[1]);
    if (!g) {
      out.rejected.push_back({line_no, "grade '" + f[1] + "' is not numeric"});
      continue;
    }
    if (!(*g >= 0.0 && *g <= 4.0)) {
      out.rejected.push_back({line_no, "grade " + f[1] + " outside [0,4]"});
      continue;
    }
    auto [it, inserted] = out.grades.insert_or_assign(f[0], *g);
    if (!inserted)
      out.warnings.push_back(fmt::format("line {}: duplicate grade for {}, keeping the last", line_no, f[0]));
  }
  return out;
}

void write_grades_csv(std::ostream& out, const std::map<std::string, double>& grades) {
  out << "student_id,grade\n";
  for (const auto& [id, g] : grades) out << csv::quote(id) << ',' << fmt::format("{}", g) << '\n';
}

}  // namespace readtrace
