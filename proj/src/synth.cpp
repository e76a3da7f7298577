#include "readtrace/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include <fmt/format.h>

#include "readtrace/pipeline.hpp"
#include "readtrace/questionnaire.hpp"

namespace readtrace {

namespace {

constexpr Millis kBaseTimestamp = 1'700'000'000'000;
constexpr Millis kMinute = 60'000;
constexpr Millis kHour = 60 * kMinute;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index, std::uint64_t lane) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(index * 4 + lane)));
}

std::string student_id(std::size_t i, std::size_t n) {
  const int width = std::max(4, static_cast<int>(std::to_string(n).size()));
  return fmt::format("S{:0{}}", i + 1, width);
}

std::string material_id(std::size_t m) { return fmt::format("M{:02}", m + 1); }

Millis uniform_ms(std::mt19937_64& rng, Millis lo, Millis hi) {
  return std::uniform_int_distribution<Millis>(lo, hi)(rng);
}

Millis draw_interval(std::mt19937_64& rng, std::discrete_distribution<int>& classes) {
  switch (classes(rng)) {
    case 0: return uniform_ms(rng, 0, 2'999);
    case 1: return uniform_ms(rng, 3'000, 9'999);
    case 2: return uniform_ms(rng, 10'000, 119'999);
    default: return uniform_ms(rng, 120'000, 359'999);
  }
}

std::vector<RawEvent> student_events(const std::string& id, const ArchetypeSpec& a, const SynthOptions& o,
                                     std::mt19937_64& rng) {
  std::discrete_distribution<int> classes(a.interval_mix.begin(), a.interval_mix.end());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::poisson_distribution<int> n_sessions_dist(a.sessions_mean * o.activity);
  std::poisson_distribution<int> n_events_dist(a.events_mean);
  std::uniform_int_distribution<std::size_t> pick_material(0, o.n_materials - 1);
  std::vector<int> position(o.n_materials, 1);

  std::vector<RawEvent> out;
  Millis t = kBaseTimestamp + uniform_ms(rng, 0, 7 * 24 * kHour);
  const int sessions = std::max(1, n_sessions_dist(rng));
  for (int s = 0; s < sessions; ++s) {
    const std::size_t m = pick_material(rng);
    const std::string mat = material_id(m);
    int& page = position[m];
    auto emit = [&](EventKind kind) { out.push_back({id, mat, page, std::move(kind), t}); };
    auto turn = [&](bool forward) { page = std::clamp(page + (forward ? 1 : -1), 1, o.pages_per_material); };

    emit(EventKind::open());
    const int events = std::max(2, n_events_dist(rng));
    for (int e = 0; e < events; ++e) {
      t += draw_interval(rng, classes);
      const double u = unit(rng);
      if (u < a.responsive_rate) {
        emit(EventKind::other(unit(rng) < 0.6 ? "MARKER" : "MEMO"));
      } else if (u < a.responsive_rate + a.jump_rate) {
        const bool forward = unit(rng) < 0.7;
        const int length = std::uniform_int_distribution<int>(2, 5)(rng);
        for (int j = 0; j < length; ++j) {
          if (j > 0) t += uniform_ms(rng, 200, 2'500);
          turn(forward);
          emit(forward ? EventKind::next() : EventKind::prev());
        }
      } else {
        const bool forward = unit(rng) < 0.9;
        turn(forward);
        emit(forward ? EventKind::next() : EventKind::prev());
      }
    }
    if (unit(rng) < a.timeout_prob) {
      t += kDefaultGapThreshold + uniform_ms(rng, kMinute, 6 * kHour);
    } else {
      t += draw_interval(rng, classes);
      emit(EventKind::close());
      t += uniform_ms(rng, 30 * kMinute, 72 * kHour);
    }
  }
  return out;
}

// Bivariate normal truncated to the Likert support by rejection.
std::pair<double, double> trait_pair(std::mt19937_64& rng, double m1, double s1, double m2, double s2, double r) {
  std::normal_distribution<double> z(0.0, 1.0);
  for (;;) {
    const double z1 = z(rng);
    const double z2 = r * z1 + std::sqrt(1 - r * r) * z(rng);
    const double a = m1 + s1 * z1;
    const double b = m2 + s2 * z2;
    if (a >= 1 && a <= 7 && b >= 1 && b <= 7) return {a, b};
  }
}

QuestionnaireResponse items(const std::string& id, const std::string& scale, int count, double latent,
                            std::mt19937_64& rng) {
  std::normal_distribution<double> noise(0.0, 0.6);
  QuestionnaireResponse r{id, scale, {}};
  for (int i = 0; i < count; ++i)
    r.item_scores.push_back(static_cast<int>(std::clamp(std::lround(latent + noise(rng)), 1L, 7L)));
  return r;
}

}  // namespace

void ArchetypeSpec::validate() const {
  double total = 0;
  for (double p : interval_mix) {
    if (!(p >= 0)) throw Error("archetype " + name + ": negative interval probability");
    total += p;
  }
  if (std::abs(total - 1) > 1e-9) throw Error("archetype " + name + ": interval mix does not sum to 1");
  if (!(jump_rate >= 0) || !(responsive_rate >= 0) || jump_rate + responsive_rate > 1)
    throw Error("archetype " + name + ": jump and responsive rates must be >= 0 and sum to at most 1");
  if (!(sessions_mean > 0) || !(events_mean > 0)) throw Error("archetype " + name + ": means must be positive");
  if (!(timeout_prob >= 0 && timeout_prob <= 1)) throw Error("archetype " + name + ": timeout_prob outside [0,1]");
}

ArchetypeSpec ArchetypeSpec::balanced() { return {"balanced", {0.15, 0.35, 0.45, 0.05}, 0.05, 0.03, 12, 25, 0.3}; }
ArchetypeSpec ArchetypeSpec::sticky() { return {"sticky", {0.10, 0.15, 0.35, 0.40}, 0.03, 0.02, 10, 15, 0.6}; }
ArchetypeSpec ArchetypeSpec::jumpy() { return {"jumpy", {0.20, 0.30, 0.40, 0.10}, 0.25, 0.05, 14, 30, 0.4}; }
ArchetypeSpec ArchetypeSpec::quick() { return {"quick", {0.20, 0.60, 0.17, 0.03}, 0.05, 0.02, 12, 30, 0.15}; }

ArchetypeSpec ArchetypeSpec::by_name(const std::string& name) {
  if (name == "balanced") return balanced();
  if (name == "sticky") return sticky();
  if (name == "jumpy") return jumpy();
  if (name == "quick") return quick();
  throw Error("unknown archetype '" + name + "'");
}

double PlantedModel::predict(double eng, double deci_v, double dece_v) const {
  return intercept + engagement * eng + deci * deci_v + dece * dece_v + engagement_deci * eng * deci_v +
         engagement_dece * eng * dece_v;
}

PlantedModel PlantedModel::reference() { return {-3.99, 10.24, 1.4, -0.39, -2.06, 0.82, 0.5}; }

std::vector<std::pair<ArchetypeSpec, double>> SynthOptions::default_mix() {
  return {{ArchetypeSpec::balanced(), 0.5},
          {ArchetypeSpec::sticky(), 0.22},
          {ArchetypeSpec::jumpy(), 0.17},
          {ArchetypeSpec::quick(), 0.11}};
}

std::vector<std::pair<ArchetypeSpec, double>> SynthOptions::parse_mix(const std::string& text) {
  std::vector<std::pair<ArchetypeSpec, double>> out;
  for (const auto& part : csv::split(text)) {
    const auto colon = part.find(':');
    if (colon == std::string::npos) throw Error("mix entry '" + part + "' is not name:weight");
    double w = 0;
    try {
      std::size_t used = 0;
      w = std::stod(part.substr(colon + 1), &used);
      if (used != part.size() - colon - 1) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw Error("mix entry '" + part + "' has a bad weight");
    }
    out.emplace_back(ArchetypeSpec::by_name(std::string(csv::trim(part.substr(0, colon)))), w);
  }
  return out;
}

EventsByStudent gen_events(const SynthOptions& o, Manifest* manifest) {
  if (o.n < 1) throw Error("synth: n must be at least 1");
  if (o.n_materials < 1 || o.pages_per_material < 1) throw Error("synth: need at least one material and page");
  if (!(o.activity > 0)) throw Error("synth: activity must be positive");
  double total = 0;
  std::vector<double> weights;
  for (const auto& [a, w] : o.mix) {
    a.validate();
    if (!(w >= 0)) throw Error("invalid mix: negative weight for " + a.name);
    weights.push_back(w);
    total += w;
  }
  if (o.mix.empty() || std::abs(total - 1) > 1e-6) throw Error(fmt::format("invalid mix: weights sum to {}", total));

  EventsByStudent events;
  for (std::size_t i = 0; i < o.n; ++i) {
    auto rng = substream(o.seed, i, 0);
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
    const ArchetypeSpec& a = o.mix[pick(rng)].first;
    const std::string id = student_id(i, o.n);
    events[id] = student_events(id, a, o, rng);
  }
  if (manifest) {
    manifest->clear();
    for (std::size_t m = 0; m < o.n_materials; ++m) (*manifest)[material_id(m)] = o.pages_per_material;
  }
  return events;
}

Cohort gen_cohort(const SynthOptions& o, const Config& config) {
  Cohort c;
  c.events = gen_events(o, &c.manifest);
  {
    std::vector<double> weights;
    for (const auto& [a, w] : o.mix) weights.push_back(w);
    for (std::size_t i = 0; i < o.n; ++i) {
      auto rng = substream(o.seed, i, 0);
      std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
      c.archetype[student_id(i, o.n)] = o.mix[pick(rng)].first.name;
    }
  }

  const auto spec = ScaleSpec::standard();
  for (std::size_t i = 0; i < o.n; ++i) {
    auto rng = substream(o.seed, i, 1);
    const std::string id = student_id(i, o.n);
    const auto [deci, dece] = trait_pair(rng, 4.27, 1.21, 4.20, 1.26, 0.75);
    const auto [mws, mwd] = trait_pair(rng, 4.51, 1.21, 4.36, 1.48, 0.45);
    c.questionnaire.push_back(items(id, "DECI", spec.item_counts.at("DECI"), deci, rng));
    c.questionnaire.push_back(items(id, "DECE", spec.item_counts.at("DECE"), dece, rng));
    c.questionnaire.push_back(items(id, "MW-S", spec.item_counts.at("MW-S"), mws, rng));
    c.questionnaire.push_back(items(id, "MW-D", spec.item_counts.at("MW-D"), mwd, rng));
  }

  const auto features = compute_features(c.events, c.manifest, config);
  const auto engagement = features.engagement_map();
  const auto scales = score_scales(c.questionnaire);
  for (std::size_t i = 0; i < o.n; ++i) {
    auto rng = substream(o.seed, i, 2);
    const std::string id = student_id(i, o.n);
    const auto& s = scales.by_student.at(id);
    const double mu = o.planted.predict(engagement.at(id), *s.deci, *s.dece);
    double g = mu + std::normal_distribution<double>(0.0, 1.0)(rng) * o.planted.noise_sd;
    if (o.clip_grades) g = std::clamp(g, 0.0, 4.0);
    c.grades[id] = g;
  }
  return c;
}

void write_cohort(const Cohort& cohort, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw Error("cannot write " + (dir / name).string());
    return out;
  };
  {
    auto out = open("events.csv");
    write_events_csv(out, cohort.events);
  }
  {
    auto out = open("questionnaire.csv");
    write_questionnaire_csv(out, cohort.questionnaire);
  }
  {
    auto out = open("grades.csv");
    write_grades_csv(out, cohort.grades);
  }
  {
    auto out = open("materials.csv");
    write_manifest_csv(out, cohort.manifest);
  }
}

}  // namespace readtrace
