#pragma once

#include <nlohmann/json.hpp>

#include "swiperec/abtest.hpp"
#include "swiperec/engine.hpp"
#include "swiperec/error.hpp"
#include "swiperec/metrics.hpp"

namespace swiperec {

nlohmann::json to_json(const TimeWindow& window);
nlohmann::json to_json(const DatasetStats& stats);
nlohmann::json to_json(const FunnelReport& report);
nlohmann::json to_json(const SimilarityBucket& bucket);
nlohmann::json to_json(const UserMetricsReport& report);
nlohmann::json to_json(const EvaluationReport& report);
nlohmann::json to_json(const VariantComparison& comparison);
nlohmann::json to_json(const RecommendationResponse& response);
nlohmann::json to_json(const IngestResult& result);

/// {"error": {"kind": ..., "message": ...}}
nlohmann::json error_json(ErrorKind kind, const std::string& message);

}  // namespace swiperec
