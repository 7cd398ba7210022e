#include "swiperec/abtest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include "swiperec/error.hpp"

namespace swiperec {

void Experiment::validate() const {
  if (name.empty()) {
    throw Error(ErrorKind::Validation, "experiment name must not be empty");
  }
  if (variants.empty()) {
    throw Error(ErrorKind::Validation, "experiment needs at least one variant");
  }
  double sum = 0.0;
  std::unordered_set<std::string> labels;
  for (const Variant& v : variants) {
    if (v.label.empty()) {
      throw Error(ErrorKind::Validation, "variant label must not be empty");
    }
    if (!labels.insert(v.label).second) {
      throw Error(ErrorKind::Validation, "duplicate variant label '" + v.label + "'");
    }
    if (!(v.weight > 0.0)) {
      throw Error(ErrorKind::Validation, "variant '" + v.label + "' needs a positive weight");
    }
    sum += v.weight;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error(ErrorKind::Validation, "variant weights must sum to 1");
  }
}

Experiment Experiment::from_json(const nlohmann::json& j) {
  Experiment e;
  try {
    e.name = j.at("name").get<std::string>();
    e.salt = j.value("salt", std::string{});
    for (const auto& v : j.at("variants")) {
      e.variants.push_back(Variant{v.at("label").get<std::string>(), v.at("weight").get<double>()});
    }
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::Validation, std::string("bad experiment document: ") + ex.what());
  }
  e.validate();
  return e;
}

nlohmann::json Experiment::to_json() const {
  nlohmann::json variants_json = nlohmann::json::array();
  for (const Variant& v : variants) {
    variants_json.push_back({{"label", v.label}, {"weight", v.weight}});
  }
  return {{"name", name}, {"salt", salt}, {"variants", variants_json}};
}

Experiment Experiment::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::Store, "cannot read experiment file " + path.string());
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::Validation,
                "experiment file " + path.string() + " is not valid JSON: " + ex.what());
  }
  return from_json(j);
}

std::uint64_t stable_digest(std::string_view salt, std::string_view key) {
  std::uint64_t h = 14695981039346656037ULL;  // FNV-1a offset basis
  auto mix = [&h](std::string_view s) {
    for (const char c : s) {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ULL;  // FNV prime
    }
  };
  mix(salt);
  h ^= 0x1f;  // separator so ("ab","c") != ("a","bc")
  h *= 1099511628211ULL;
  mix(key);
  // splitmix64 finalizer for uniform high bits
  h += 0x9e3779b97f4a7c15ULL;
  h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ULL;
  h = (h ^ (h >> 27)) * 0x94d049bb133111ebULL;
  return h ^ (h >> 31);
}

const std::string& assign_variant(const Experiment& experiment, const UserId& user_id) {
  const double u = static_cast<double>(stable_digest(experiment.salt, user_id) >> 11) * 0x1.0p-53;
  double cumulative = 0.0;
  for (const Experiment::Variant& v : experiment.variants) {
    cumulative += v.weight;
    if (u < cumulative) return v.label;
  }
  return experiment.variants.back().label;  // guard against rounding at the top end
}

VariantComparison compare(const EventSet& events, const Experiment& experiment,
                          std::optional<TimeWindow> window) {
  experiment.validate();
  const EventSet windowed = window ? filter_events(events, *window) : events;

  std::unordered_map<std::string, EventSet> split;
  for (const Experiment::Variant& v : experiment.variants) split.emplace(v.label, EventSet{});

  VariantComparison comparison;
  comparison.experiment_name = experiment.name;
  comparison.window = window;

  auto bucket_of = [&](const std::optional<std::string>& variant) -> EventSet* {
    if (!variant) return nullptr;
    const auto it = split.find(*variant);
    return it == split.end() ? nullptr : &it->second;
  };

  for (const auto& e : windowed.swipes) {
    if (EventSet* b = bucket_of(e.variant)) b->swipes.push_back(e);
    else ++comparison.unattributed_events;
  }
  for (const auto& e : windowed.impressions) {
    if (EventSet* b = bucket_of(e.variant)) b->impressions.push_back(e);
    else ++comparison.unattributed_events;
  }
  for (const auto& e : windowed.referral_clicks) {
    if (EventSet* b = bucket_of(e.variant)) b->referral_clicks.push_back(e);
    else ++comparison.unattributed_events;
  }
  for (const auto& e : windowed.sessions) {
    if (EventSet* b = bucket_of(e.variant)) b->sessions.push_back(e);
    else ++comparison.unattributed_events;
  }

  for (const Experiment::Variant& v : experiment.variants) {
    const EventSet& arm_events = split.at(v.label);
    VariantComparison::Arm arm;
    arm.label = v.label;
    arm.events = arm_events.total();
    const auto positives =
        PositiveActionIndex::build(arm_events.swipes, arm_events.referral_clicks).predicate();
    arm.funnel = funnel(arm_events.impressions, positives);
    arm.user = user_metrics(arm_events);
    comparison.arms.push_back(std::move(arm));
  }
  return comparison;
}

}  // namespace swiperec
