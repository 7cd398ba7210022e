#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "swiperec/metrics.hpp"
#include "swiperec/types.hpp"

namespace swiperec {

/// A split-test definition. Assignment is a pure function of (salt, user_id),
/// so no assignment table needs to be stored; changing the salt reshuffles
/// every user.
struct Experiment {
  struct Variant {
    std::string label;
    double weight = 0.0;
  };

  std::string name;
  std::vector<Variant> variants;
  std::string salt;

  /// Positive weights summing to 1 (within 1e-9) and distinct labels.
  /// Throws Error(Validation) otherwise.
  void validate() const;

  static Experiment from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  static Experiment load(const std::filesystem::path& path);
};

/// Stable digest of (salt, user_id) mapped to [0, 1) and partitioned by
/// cumulative variant weights. Same inputs always yield the same label.
const std::string& assign_variant(const Experiment& experiment, const UserId& user_id);

/// Stable 64-bit digest used by assign_variant (FNV-1a with a splitmix64
/// finalizer); exposed for anything else needing reproducible bucketing.
std::uint64_t stable_digest(std::string_view salt, std::string_view key);

/// Per-variant funnel and user metrics over one shared window.
struct VariantComparison {
  struct Arm {
    std::string label;
    std::uint64_t events = 0;
    FunnelReport funnel;
    UserMetricsReport user;
  };

  std::string experiment_name;
  std::optional<TimeWindow> window;
  std::vector<Arm> arms;               // experiment variant order
  std::uint64_t unattributed_events = 0;  // events without a known variant label
};

/// Splits the log by each event's variant label and evaluates every arm over
/// the same window. Events with no label (or a label outside the experiment)
/// land in the unattributed count; per-arm event counts plus unattributed
/// always add up to the windowed total.
VariantComparison compare(const EventSet& events, const Experiment& experiment,
                          std::optional<TimeWindow> window = std::nullopt);

}  // namespace swiperec
