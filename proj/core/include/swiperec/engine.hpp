#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "swiperec/abtest.hpp"
#include "swiperec/dedup.hpp"
#include "swiperec/eventstore.hpp"
#include "swiperec/matrix.hpp"
#include "swiperec/metrics.hpp"
#include "swiperec/recommender.hpp"
#include "swiperec/types.hpp"

namespace swiperec {

/// Recommendation as served over the CLI/HTTP surface. Mirrors
/// RecommendationOutcome: source "recommender" carries products and the
/// similarity of the neighbor used; source "fallback" carries the reason no
/// personalized pick was possible (callers then serve their normal feed).
struct RecommendationResponse {
  UserId target;
  std::vector<ProductId> products;
  std::optional<double> similarity;
  ImpressionSource source = ImpressionSource::Fallback;
  std::optional<NoRecommendationReason> reason;
};

struct IngestResult {
  std::uint64_t accepted = 0;
  std::uint64_t rejected = 0;
  std::vector<ReplayIssue> errors;  // line number -> reason
};

/// Full three-perspective metric payload for a window.
struct EvaluationReport {
  std::optional<TimeWindow> window;
  DatasetStats dataset;
  bool users_from_registry = false;     // else distinct ids observed in the window
  bool products_from_catalogue = false; // else distinct ids observed in the window
  std::optional<double> sparsity_pct;
  std::optional<double> catalogue_coverage_pct;
  std::optional<double> coverage_pct;
  FunnelReport funnel;
  std::vector<SimilarityBucket> buckets;
  UserMetricsReport user;
};

struct EngineOptions {
  std::optional<std::filesystem::path> clusters_file;
  double bucket_width = 0.05;
};

/// The shared engine behind the CLI and the HTTP service: one store
/// directory, one matrix snapshot, identical answers on both surfaces.
/// Recommendations read an immutable snapshot that only refresh() replaces;
/// metrics always read the live log. Appends and snapshot swaps are
/// serialized internally, so one Engine may serve concurrent callers.
class Engine {
 public:
  explicit Engine(std::filesystem::path store_dir, EngineOptions options = {});

  /// Throws Error(NotFound) for users absent from both the registry and the
  /// log. Users known but without raids get a fallback response with reason
  /// ColdUser.
  RecommendationResponse recommend(const UserId& user, std::size_t n = 5) const;

  EvaluationReport evaluate(std::optional<TimeWindow> window = std::nullopt) const;

  VariantComparison compare(const Experiment& experiment,
                            std::optional<TimeWindow> window = std::nullopt) const;

  /// Appends every valid JSON-lines event; invalid lines are counted and
  /// reported, valid ones still land. Does not rebuild the snapshot.
  IngestResult ingest_lines(std::string_view body);
  /// Same for a parsed JSON array of envelopes.
  IngestResult ingest_array(const nlohmann::json& array);

  /// Rebuilds the matrix snapshot from the log. Atomic from the point of
  /// view of concurrent recommend() calls.
  void refresh();

  std::shared_ptr<const InteractionMatrix> matrix() const;
  std::uint64_t event_count() const;
  const std::filesystem::path& store_dir() const { return store_dir_; }
  bool has_catalogue() const { return has_catalogue_; }
  bool has_registry() const { return has_registry_; }

 private:
  EventSet windowed_events(std::optional<TimeWindow> window) const;
  void canonicalize(EventSet& events) const;
  IngestResult ingest_envelopes(std::vector<std::pair<std::uint64_t, EventEnvelope>>&& parsed,
                                std::vector<ReplayIssue>&& parse_errors);
  void rebuild_snapshot();

  std::filesystem::path store_dir_;
  EngineOptions options_;
  std::optional<ProductClusterMap> clusters_;
  std::vector<ProductRecord> catalogue_;
  std::vector<UserId> registry_;
  bool has_catalogue_ = false;
  bool has_registry_ = false;

  mutable std::mutex mutex_;  // guards log_ appends, snapshot swap, known_users_
  mutable EventLog log_;
  std::shared_ptr<const InteractionMatrix> snapshot_;
  std::unordered_set<UserId> known_users_;
};

}  // namespace swiperec
