#include "swiperec/json_io.hpp"

namespace swiperec {

namespace {

nlohmann::json opt(const std::optional<double>& value) {
  if (!value) return nullptr;
  return *value;
}

}  // namespace

nlohmann::json to_json(const TimeWindow& window) {
  return {{"from_ms", window.from_ms}, {"to_ms", window.to_ms}};
}

nlohmann::json to_json(const DatasetStats& stats) {
  return {{"total_users", stats.total_users},
          {"total_products", stats.total_products},
          {"total_swipes", stats.total_swipes},
          {"products_swiped_min_twice", stats.products_swiped_min_twice},
          {"products_raided", stats.products_raided}};
}

nlohmann::json to_json(const FunnelReport& report) {
  return {{"total_shown", report.total_shown},
          {"recommended_shown", report.recommended_shown},
          {"positive_actions_on_recommended", report.positive_actions_on_recommended},
          {"recommended_share_pct", opt(report.recommended_share_pct())},
          {"precision_pct", opt(report.precision_pct())},
          {"display",
           {{"recommended_share", report.recommended_share_display()},
            {"precision", report.precision_display()}}}};
}

nlohmann::json to_json(const SimilarityBucket& bucket) {
  return {{"lower", bucket.lower},
          {"upper", bucket.upper},
          {"impressions", bucket.impressions},
          {"positives", bucket.positives},
          {"precision", opt(bucket.precision)}};
}

nlohmann::json to_json(const UserMetricsReport& report) {
  nlohmann::json monthly = nlohmann::json::object();
  for (const auto& [month, count] : report.monthly_swipes) monthly[month] = count;
  return {{"sessions", report.sessions},
          {"avg_session_minutes", opt(report.avg_session_minutes)},
          {"avg_swipes_per_new_user", opt(report.avg_swipes_per_new_user)},
          {"referral_clicks", report.referral_clicks},
          {"returning_users", report.returning_users},
          {"monthly_swipes", std::move(monthly)},
          {"users_with_recommendation", report.users_with_recommendation},
          {"avg_swipes_to_first_recommendation",
           opt(report.avg_swipes_to_first_recommendation)}};
}

nlohmann::json to_json(const EvaluationReport& report) {
  nlohmann::json buckets = nlohmann::json::array();
  for (const SimilarityBucket& b : report.buckets) buckets.push_back(to_json(b));
  nlohmann::json dataset = to_json(report.dataset);
  dataset["sparsity_pct"] = opt(report.sparsity_pct);
  dataset["catalogue_coverage_pct"] = opt(report.catalogue_coverage_pct);
  dataset["coverage_pct"] = opt(report.coverage_pct);
  dataset["users_denominator"] = report.users_from_registry ? "registry" : "observed";
  dataset["products_denominator"] = report.products_from_catalogue ? "catalogue" : "observed";
  return {{"window", report.window ? to_json(*report.window) : nlohmann::json(nullptr)},
          {"dataset", std::move(dataset)},
          {"funnel", to_json(report.funnel)},
          {"buckets", std::move(buckets)},
          {"user", to_json(report.user)}};
}

nlohmann::json to_json(const VariantComparison& comparison) {
  nlohmann::json arms = nlohmann::json::array();
  for (const VariantComparison::Arm& arm : comparison.arms) {
    arms.push_back({{"label", arm.label},
                    {"events", arm.events},
                    {"funnel", to_json(arm.funnel)},
                    {"user", to_json(arm.user)}});
  }
  return {{"experiment", comparison.experiment_name},
          {"window",
           comparison.window ? to_json(*comparison.window) : nlohmann::json(nullptr)},
          {"arms", std::move(arms)},
          {"unattributed_events", comparison.unattributed_events}};
}

nlohmann::json to_json(const RecommendationResponse& response) {
  nlohmann::json j{{"target", response.target},
                   {"source", to_string(response.source)},
                   {"products", response.products}};
  if (response.similarity) j["similarity"] = *response.similarity;
  if (response.reason) j["reason"] = to_string(*response.reason);
  return j;
}

nlohmann::json to_json(const IngestResult& result) {
  nlohmann::json errors = nlohmann::json::array();
  for (const ReplayIssue& issue : result.errors) {
    errors.push_back({{"line", issue.line_number}, {"reason", issue.message}});
  }
  return {{"accepted", result.accepted}, {"rejected", result.rejected}, {"errors", std::move(errors)}};
}

nlohmann::json error_json(ErrorKind kind, const std::string& message) {
  return {{"error", {{"kind", to_string(kind)}, {"message", message}}}};
}

}  // namespace swiperec
