#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "swiperec/abtest.hpp"
#include "swiperec/types.hpp"

namespace swiperec {

/// Latent style-space shape for generated users and products.
struct StyleConfig {
  std::size_t dimensions = 8;
  std::size_t clusters = 4;
  double noise = 0.25;  // spread of members around their cluster center
};

/// Monotone map from style affinity (dot product in [-1, 1]) to raid
/// probability: clamp(base + slope * affinity, 0, 1).
struct RaidProbabilityConfig {
  double base = 0.5;
  double slope = 0.45;
};

enum class FeedPolicy { PureFallback, EngineDriven };

struct SimulationConfig {
  std::size_t n_users = 50;
  std::size_t n_products = 100;
  std::size_t sessions_per_user = 3;
  std::size_t swipes_per_session = 20;
  std::size_t feed_size = 5;
  FeedPolicy feed_policy = FeedPolicy::EngineDriven;
  std::uint64_t seed = 1;
  StyleConfig style;
  RaidProbabilityConfig raid_probability;
  double referral_click_probability = 0.05;
  TimestampMs start_ms = 1704067200000;  // 2024-01-01T00:00:00Z
  std::int64_t session_interval_days = 7;
  std::optional<Experiment> experiment;  // stamps variant labels when present

  /// Throws Error(Config) on inconsistent settings (zero counts, probability
  /// parameters out of range, sessions that cannot fit the round interval).
  void validate() const;

  static SimulationConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  static SimulationConfig load(const std::filesystem::path& path);
};

/// Unit style vectors for every user and product, drawn around shared cluster
/// centers, plus the monotone affinity -> raid-probability map.
class LatentStyleModel {
 public:
  static LatentStyleModel generate(const SimulationConfig& config);

  std::size_t dimensions() const { return dimensions_; }
  const std::vector<double>& user_style(std::size_t user_index) const;
  const std::vector<double>& product_style(std::size_t product_index) const;

  /// Dot product of unit vectors, in [-1, 1].
  double affinity(std::size_t user_index, std::size_t product_index) const;
  double raid_probability(double affinity) const;

 private:
  std::size_t dimensions_ = 0;
  RaidProbabilityConfig raid_;
  std::vector<std::vector<double>> users_;
  std::vector<std::vector<double>> products_;
};

struct SimulationSummary {
  std::uint64_t users = 0;
  std::uint64_t products = 0;
  std::uint64_t sessions = 0;
  std::uint64_t swipes = 0;
  std::uint64_t impressions = 0;
  std::uint64_t recommender_impressions = 0;
  std::uint64_t referral_clicks = 0;
};

/// Generates a synthetic event store (events, catalogue, user registry) at
/// store_dir. Fully reproducible from config.seed: the same config writes a
/// byte-identical store. Engine-driven feeds rebuild the matrix between
/// session rounds and log real recommender impressions with their similarity
/// scores.
SimulationSummary simulate(const SimulationConfig& config,
                           const std::filesystem::path& store_dir);

}  // namespace swiperec
