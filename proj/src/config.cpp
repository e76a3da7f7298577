#include "readtrace/config.hpp"

#include <charconv>
#include <fstream>
#include <istream>

#include "readtrace/ingest.hpp"

namespace readtrace {

namespace {

template <class T>
T number(const std::string& key, const std::string& value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size())
    throw Error("config: '" + key + "' expects a number, got '" + value + "'");
  return out;
}

bool boolean(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw Error("config: '" + key + "' expects true/false, got '" + value + "'");
}

std::vector<std::string> list(const std::string& value) {
  std::vector<std::string> out;
  for (auto& item : csv::split(value))
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

void Config::set(const std::string& key, const std::string& value) {
  if (key == "gap_ms") sequence.gap_threshold_ms = number<Millis>(key, value);
  else if (key == "short_ms") sequence.intervals.short_min = number<Millis>(key, value);
  else if (key == "medium_ms") sequence.intervals.medium_min = number<Millis>(key, value);
  else if (key == "long_ms") sequence.intervals.long_min = number<Millis>(key, value);
  else if (key == "append_terminal_gap") sequence.append_terminal_gap = boolean(key, value);
  else if (key == "dwell_ms") engagement.dwell_threshold_ms = number<Millis>(key, value);
  else if (key == "tz_offset_minutes") engagement.utc_offset_ms = number<Millis>(key, value) * 60'000;
  else if (key == "highlight_labels") engagement.highlight_labels = list(value);
  else if (key == "note_labels") engagement.note_labels = list(value);
  else if (key == "alpha") alpha = number<double>(key, value);
  else if (key == "k") k = number<std::size_t>(key, value);
  else if (key == "cluster_features") cluster_features = list(value);
  else if (key == "candidate_metrics") candidate_metrics = list(value);
  else if (key == "center_dec") center_dec = boolean(key, value);
  else if (key == "grid_points") grid_points = number<std::size_t>(key, value);
  else throw Error("config: unknown key '" + key + "'");

  sequence.intervals.validate();
  if (sequence.gap_threshold_ms <= 0) throw Error("config: gap_ms must be positive");
  if (!(alpha >= 0 && alpha <= 1)) throw Error("config: alpha must lie in [0, 1]");
  if (k < 1) throw Error("config: k must be at least 1");
  if (grid_points < 2) throw Error("config: grid_points must be at least 2");
}

Config Config::parse(std::istream& in) {
  Config c;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (csv::trim(line).empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, "expected key = value");
    const std::string key(csv::trim(std::string_view(line).substr(0, eq)));
    const std::string value(csv::trim(std::string_view(line).substr(eq + 1)));
    try {
      c.set(key, value);
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file " + path);
  return parse(in);
}

std::vector<std::string> config_keys() {
  return {"gap_ms",          "short_ms",         "medium_ms",        "long_ms",     "append_terminal_gap",
          "dwell_ms",        "tz_offset_minutes", "highlight_labels", "note_labels", "alpha",
          "k",               "cluster_features", "candidate_metrics", "center_dec",  "grid_points"};
}

}  // namespace readtrace
