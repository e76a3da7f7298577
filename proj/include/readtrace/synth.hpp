#pragma once

// Seeded synthetic cohorts: strategy archetypes drive the event streams,
// traits come from truncated normals and grades from a planted linear model.

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "readtrace/config.hpp"
#include "readtrace/ingest.hpp"

namespace readtrace {

struct ArchetypeSpec {
  std::string name;
  /// Probabilities of a suppressed (<3 s), short, medium and long interval
  /// between reading events.
  std::array<double, 4> interval_mix{0.1, 0.3, 0.5, 0.1};
  double jump_rate = 0.05;        // chance that a navigation step is a multi-page jump
  double responsive_rate = 0.03;  // chance of a highlight or note instead of a page turn
  double sessions_mean = 12;      // per student, Poisson
  double events_mean = 25;        // per session, Poisson
  double timeout_prob = 0.3;      // session ends without a close event

  void validate() const;

  static ArchetypeSpec balanced();
  static ArchetypeSpec sticky();
  static ArchetypeSpec jumpy();
  static ArchetypeSpec quick();
  /// One of the four names above; throws otherwise.
  static ArchetypeSpec by_name(const std::string& name);
};

struct PlantedModel {
  double intercept = 0;
  double engagement = 0;
  double deci = 0;
  double dece = 0;
  double engagement_deci = 0;
  double engagement_dece = 0;
  double noise_sd = 0.5;

  double predict(double eng, double deci_v, double dece_v) const;

  /// Intercept -3.99, engagement 10.24, DECI 1.4, DECE -0.39,
  /// engagement:DECI -2.06, engagement:DECE 0.82, noise 0.5.
  static PlantedModel reference();
};

struct SynthOptions {
  std::size_t n = 100;
  std::vector<std::pair<ArchetypeSpec, double>> mix = default_mix();
  PlantedModel planted = PlantedModel::reference();
  std::uint64_t seed = 1;
  bool clip_grades = true;
  /// Multiplies every archetype's sessions_mean.
  double activity = 1.0;
  std::size_t n_materials = 4;
  int pages_per_material = 40;

  /// balanced 0.5, sticky 0.22, jumpy 0.17, quick 0.11.
  static std::vector<std::pair<ArchetypeSpec, double>> default_mix();
  /// "balanced:0.5,sticky:0.5" style lists.
  static std::vector<std::pair<ArchetypeSpec, double>> parse_mix(const std::string& text);
};

struct Cohort {
  EventsByStudent events;
  Manifest manifest;
  std::vector<QuestionnaireResponse> questionnaire;
  std::map<std::string, double> grades;
  std::map<std::string, std::string> archetype;  // student_id -> archetype name
};

/// Deterministic given the options. Grades use the engagement indicator the
/// library computes from the generated logs and the scored DEC scales.
Cohort gen_cohort(const SynthOptions& options, const Config& config = {});

/// Only the event logs (no traits or grades); cheaper for metric studies.
EventsByStudent gen_events(const SynthOptions& options, Manifest* manifest = nullptr);

/// events.csv, questionnaire.csv, grades.csv, materials.csv.
void write_cohort(const Cohort& cohort, const std::filesystem::path& dir);

}  // namespace readtrace
