#include "swiperec/engine.hpp"

#include <algorithm>
#include <chrono>

#include "swiperec/error.hpp"

namespace swiperec {

namespace {

TimestampMs now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

}  // namespace

Engine::Engine(std::filesystem::path store_dir, EngineOptions options)
    : store_dir_(std::move(store_dir)), options_(std::move(options)),
      log_(EventLog::open(store_dir_)) {
  if (options_.clusters_file) {
    clusters_ = ProductClusterMap::load(*options_.clusters_file);
  }
  const auto catalogue_path = store_dir_ / StoreLayout::kCatalogue;
  if (std::filesystem::exists(catalogue_path)) {
    catalogue_ = load_catalogue(catalogue_path);
    has_catalogue_ = true;
  }
  const auto registry_path = store_dir_ / StoreLayout::kUserRegistry;
  if (std::filesystem::exists(registry_path)) {
    registry_ = load_user_registry(registry_path);
    has_registry_ = true;
  }
  rebuild_snapshot();
}

void Engine::rebuild_snapshot() {
  const auto envelopes = log_.replay();
  std::vector<SwipeEvent> swipes;
  std::unordered_set<UserId> known(registry_.begin(), registry_.end());
  for (const EventEnvelope& e : envelopes) {
    known.insert(e.user_id());
    if (const auto* swipe = std::get_if<SwipeEvent>(&e.payload)) {
      swipes.push_back(*swipe);
    }
  }
  auto matrix = std::make_shared<InteractionMatrix>(
      build_matrix(swipes, clusters_ ? &*clusters_ : nullptr));
  {
    std::lock_guard lock(mutex_);
    snapshot_ = std::move(matrix);
    known_users_ = std::move(known);
  }
}

void Engine::refresh() { rebuild_snapshot(); }

std::shared_ptr<const InteractionMatrix> Engine::matrix() const {
  std::lock_guard lock(mutex_);
  return snapshot_;
}

std::uint64_t Engine::event_count() const {
  std::lock_guard lock(mutex_);
  return log_.size();
}

RecommendationResponse Engine::recommend(const UserId& user, std::size_t n) const {
  std::shared_ptr<const InteractionMatrix> matrix;
  bool known = false;
  {
    std::lock_guard lock(mutex_);
    matrix = snapshot_;
    known = known_users_.count(user) != 0;
  }

  RecommendationResponse response;
  response.target = user;

  if (!matrix->user_index(user)) {
    if (!known) {
      throw Error(ErrorKind::NotFound, "unknown user '" + user + "'");
    }
    // Registered (or seen in the log) but never swiped: cold start.
    response.source = ImpressionSource::Fallback;
    response.reason = NoRecommendationReason::ColdUser;
    return response;
  }

  const RecommendationOutcome outcome = swiperec::recommend(*matrix, user, n, now_ms());
  if (outcome.recommended()) {
    const RecommendationRecord& record = outcome.record();
    response.products = record.queued;
    response.similarity = record.similarity;
    response.source = ImpressionSource::Recommender;
  } else {
    response.source = ImpressionSource::Fallback;
    response.reason = outcome.reason();
  }
  return response;
}

EventSet Engine::windowed_events(std::optional<TimeWindow> window) const {
  ReplayFilter filter;
  filter.window = window;
  return split_events(log_.replay(filter));
}

void Engine::canonicalize(EventSet& events) const {
  if (!clusters_) return;
  for (auto& e : events.swipes) e.product_id = clusters_->canonical(e.product_id);
  for (auto& e : events.impressions) e.product_id = clusters_->canonical(e.product_id);
  for (auto& e : events.referral_clicks) e.product_id = clusters_->canonical(e.product_id);
}

EvaluationReport Engine::evaluate(std::optional<TimeWindow> window) const {
  EventSet events = windowed_events(window);
  canonicalize(events);

  EvaluationReport report;
  report.window = window;

  // Denominators: registry/catalogue counts when those files exist, distinct
  // observed ids otherwise, and the report says which was used.
  std::uint64_t total_users = 0;
  if (has_registry_) {
    total_users = registry_.size();
    report.users_from_registry = true;
  } else {
    std::unordered_set<UserId> users;
    for (const auto& e : events.swipes) users.insert(e.user_id);
    for (const auto& e : events.impressions) users.insert(e.user_id);
    for (const auto& e : events.referral_clicks) users.insert(e.user_id);
    for (const auto& e : events.sessions) users.insert(e.user_id);
    total_users = users.size();
  }

  std::uint64_t total_products = 0;
  if (has_catalogue_) {
    std::unordered_set<ProductId> products;
    for (const auto& p : catalogue_) {
      products.insert(clusters_ ? clusters_->canonical(p.product_id) : p.product_id);
    }
    total_products = products.size();
    report.products_from_catalogue = true;
  } else {
    std::unordered_set<ProductId> products;
    for (const auto& e : events.swipes) products.insert(e.product_id);
    for (const auto& e : events.impressions) products.insert(e.product_id);
    for (const auto& e : events.referral_clicks) products.insert(e.product_id);
    total_products = products.size();
  }

  // Events are already canonical here, so no second remap.
  report.dataset = make_dataset_stats(events.swipes, total_users, total_products, nullptr);
  if (total_users > 0 && total_products > 0) {
    report.sparsity_pct = sparsity(report.dataset);
  }
  if (total_products > 0) {
    report.catalogue_coverage_pct = catalogue_coverage(report.dataset);
    report.coverage_pct = coverage(report.dataset);
  }

  const auto positives =
      PositiveActionIndex::build(events.swipes, events.referral_clicks).predicate();
  report.funnel = funnel(events.impressions, positives);
  report.buckets = similarity_precision_buckets(events.impressions, positives, options_.bucket_width);
  report.user = user_metrics(events);
  return report;
}

VariantComparison Engine::compare(const Experiment& experiment,
                                  std::optional<TimeWindow> window) const {
  EventSet events = windowed_events(window);
  canonicalize(events);
  VariantComparison comparison = swiperec::compare(events, experiment, std::nullopt);
  comparison.window = window;
  return comparison;
}

IngestResult Engine::ingest_envelopes(
    std::vector<std::pair<std::uint64_t, EventEnvelope>>&& parsed,
    std::vector<ReplayIssue>&& parse_errors) {
  IngestResult result;
  result.rejected = parse_errors.size();
  result.errors = std::move(parse_errors);

  std::lock_guard lock(mutex_);
  for (auto& [line, envelope] : parsed) {
    try {
      log_.append(envelope);
      known_users_.insert(envelope.user_id());
      ++result.accepted;
    } catch (const Error& err) {
      if (err.kind() == ErrorKind::Store) throw;  // retriable, not a data problem
      ++result.rejected;
      result.errors.push_back(ReplayIssue{line, err.what()});
    }
  }
  std::sort(result.errors.begin(), result.errors.end(),
            [](const ReplayIssue& a, const ReplayIssue& b) { return a.line_number < b.line_number; });
  return result;
}

IngestResult Engine::ingest_lines(std::string_view body) {
  std::vector<std::pair<std::uint64_t, EventEnvelope>> parsed;
  std::vector<ReplayIssue> errors;
  std::uint64_t line_number = 0;
  std::size_t pos = 0;
  while (pos <= body.size()) {
    const std::size_t eol = body.find('\n', pos);
    std::string_view line = body.substr(pos, eol == std::string_view::npos ? body.size() - pos
                                                                           : eol - pos);
    pos = eol == std::string_view::npos ? body.size() + 1 : eol + 1;
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    try {
      parsed.emplace_back(line_number, envelope_from_line(line));
    } catch (const Error& err) {
      errors.push_back(ReplayIssue{line_number, err.what()});
    }
  }
  return ingest_envelopes(std::move(parsed), std::move(errors));
}

IngestResult Engine::ingest_array(const nlohmann::json& array) {
  if (!array.is_array()) {
    throw Error(ErrorKind::Validation, "expected a JSON array of events");
  }
  std::vector<std::pair<std::uint64_t, EventEnvelope>> parsed;
  std::vector<ReplayIssue> errors;
  std::uint64_t index = 0;
  for (const auto& item : array) {
    ++index;
    try {
      parsed.emplace_back(index, envelope_from_json(item));
    } catch (const Error& err) {
      errors.push_back(ReplayIssue{index, err.what()});
    }
  }
  return ingest_envelopes(std::move(parsed), std::move(errors));
}

}  // namespace swiperec
