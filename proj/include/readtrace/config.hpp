#pragma once

// Plain-text `key = value` configuration shared by every stage.

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "readtrace/engagement.hpp"
#include "readtrace/metrics.hpp"

namespace readtrace {

struct Config {
  SequenceOptions sequence;
  EngagementOptions engagement;
  double alpha = 0.05;
  std::size_t k = 4;
  std::vector<std::string> cluster_features{"Stickiness", "Quickness", "N_Stops"};
  /// Metrics offered to the stepwise grade model.
  std::vector<std::string> candidate_metrics{"N_Jumps",   "N_Stops",    "N_Responsive", "Sequential",
                                             "Stickiness", "Quickness", "Stableness"};
  /// Mean-center DECI and DECE before they enter any model.
  bool center_dec = false;
  std::size_t grid_points = 25;

  /// Applies one setting; throws Error on unknown keys or bad values.
  void set(const std::string& key, const std::string& value);

  /// Reads `key = value` lines; `#` starts a comment.
  static Config parse(std::istream& in);
  static Config load(const std::string& path);
};

/// Keys accepted by Config::set, for help text.
std::vector<std::string> config_keys();

}  // namespace readtrace
