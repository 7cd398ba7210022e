#include "swiperec/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_map>

#include "swiperec/dedup.hpp"
#include "swiperec/error.hpp"
#include "swiperec/timeutil.hpp"

namespace swiperec {

namespace {

std::string pair_key(const UserId& user, const ProductId& product) {
  std::string key;
  key.reserve(user.size() + product.size() + 1);
  key.append(user);
  key.push_back('\x1f');
  key.append(product);
  return key;
}

}  // namespace

DatasetStats make_dataset_stats(std::span<const SwipeEvent> swipes, std::uint64_t total_users,
                                std::uint64_t total_products, const ProductClusterMap* clusters) {
  DatasetStats stats;
  stats.total_users = total_users;
  stats.total_products = total_products;
  stats.total_swipes = swipes.size();

  std::unordered_map<ProductId, std::uint64_t> swipe_count;
  std::unordered_map<ProductId, bool> raided;
  for (const SwipeEvent& e : swipes) {
    const ProductId& canon = clusters ? clusters->canonical(e.product_id) : e.product_id;
    ++swipe_count[canon];
    if (e.direction == SwipeDirection::Raid) raided[canon] = true;
  }
  for (const auto& [product, count] : swipe_count) {
    if (count >= 2) ++stats.products_swiped_min_twice;
  }
  stats.products_raided = raided.size();
  return stats;
}

double sparsity(const DatasetStats& stats) {
  if (stats.total_products == 0 || stats.total_users == 0) {
    throw Error(ErrorKind::Validation, "sparsity undefined: zero products or users");
  }
  const double filled = static_cast<double>(stats.total_swipes) /
                        (static_cast<double>(stats.total_products) *
                         static_cast<double>(stats.total_users));
  return (1.0 - filled) * 100.0;
}

double catalogue_coverage(const DatasetStats& stats) {
  if (stats.total_products == 0) {
    throw Error(ErrorKind::Validation, "catalogue coverage undefined: zero products");
  }
  return static_cast<double>(stats.products_swiped_min_twice) /
         static_cast<double>(stats.total_products) * 100.0;
}

double coverage(const DatasetStats& stats) {
  if (stats.total_products == 0) {
    throw Error(ErrorKind::Validation, "coverage undefined: zero products");
  }
  return static_cast<double>(stats.products_raided) /
         static_cast<double>(stats.total_products) * 100.0;
}

std::optional<double> precision(std::uint64_t n_relevant_selected, std::uint64_t n_selected) {
  if (n_selected == 0) return std::nullopt;
  if (n_relevant_selected > n_selected) {
    throw Error(ErrorKind::Validation, "relevant selected exceeds selected");
  }
  return static_cast<double>(n_relevant_selected) / static_cast<double>(n_selected);
}

PositiveActionIndex PositiveActionIndex::build(std::span<const SwipeEvent> swipes,
                                               std::span<const ReferralClickEvent> referral_clicks) {
  PositiveActionIndex index;
  auto note = [&](const UserId& user, const ProductId& product, TimestampMs at) {
    auto [it, inserted] = index.latest_action_.emplace(pair_key(user, product), at);
    if (!inserted && at > it->second) it->second = at;
  };
  for (const SwipeEvent& e : swipes) {
    if (e.direction == SwipeDirection::Raid) note(e.user_id, e.product_id, e.timestamp_ms);
  }
  for (const ReferralClickEvent& e : referral_clicks) {
    note(e.user_id, e.product_id, e.timestamp_ms);
  }
  return index;
}

bool PositiveActionIndex::positive(const ImpressionEvent& impression) const {
  const auto it = latest_action_.find(pair_key(impression.user_id, impression.product_id));
  return it != latest_action_.end() && it->second >= impression.timestamp_ms;
}

std::vector<SimilarityBucket> similarity_precision_buckets(
    std::span<const ImpressionEvent> impressions, const PositivePredicate& positives,
    double bucket_width) {
  const double count_real = 1.0 / bucket_width;
  const auto bucket_count = static_cast<std::size_t>(std::llround(count_real));
  if (bucket_width <= 0.0 || bucket_count == 0 ||
      std::abs(count_real - static_cast<double>(bucket_count)) > 1e-9) {
    throw Error(ErrorKind::Validation, "bucket width must divide 1 evenly");
  }

  std::vector<SimilarityBucket> buckets(bucket_count);
  for (std::size_t i = 0; i < bucket_count; ++i) {
    buckets[i].lower = static_cast<double>(i) / static_cast<double>(bucket_count);
    buckets[i].upper = static_cast<double>(i + 1) / static_cast<double>(bucket_count);
  }

  for (const ImpressionEvent& e : impressions) {
    if (e.source != ImpressionSource::Recommender || !e.similarity_score) continue;
    const double score = *e.similarity_score;
    auto idx = static_cast<std::size_t>(score / bucket_width);
    if (idx >= bucket_count) idx = bucket_count - 1;  // score == 1.0 lands in the top bucket
    ++buckets[idx].impressions;
    if (positives(e)) ++buckets[idx].positives;
  }
  for (SimilarityBucket& b : buckets) {
    b.precision = precision(b.positives, b.impressions);
  }
  return buckets;
}

std::optional<double> FunnelReport::recommended_share_pct() const {
  if (total_shown == 0) return std::nullopt;
  return static_cast<double>(recommended_shown) / static_cast<double>(total_shown) * 100.0;
}

std::optional<double> FunnelReport::precision() const {
  return swiperec::precision(positive_actions_on_recommended, recommended_shown);
}

std::optional<double> FunnelReport::precision_pct() const {
  const auto p = precision();
  if (!p) return std::nullopt;
  return *p * 100.0;
}

std::string FunnelReport::recommended_share_display() const {
  const auto share = recommended_share_pct();
  if (!share) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", *share);
  return buf;
}

std::string FunnelReport::precision_display() const {
  const auto pct = precision_pct();
  if (!pct) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.0f%%", *pct);
  return buf;
}

FunnelReport FunnelReport::from_counts(std::uint64_t total_shown, std::uint64_t recommended_shown,
                                       std::uint64_t positive_actions_on_recommended) {
  if (recommended_shown > total_shown) {
    throw Error(ErrorKind::Validation, "recommended count exceeds total shown");
  }
  if (positive_actions_on_recommended > recommended_shown) {
    throw Error(ErrorKind::Validation, "positive actions exceed recommended count");
  }
  return FunnelReport{total_shown, recommended_shown, positive_actions_on_recommended};
}

FunnelReport funnel(std::span<const ImpressionEvent> impressions,
                    const PositivePredicate& positives) {
  FunnelReport report;
  for (const ImpressionEvent& e : impressions) {
    ++report.total_shown;
    if (e.source == ImpressionSource::Recommender) {
      ++report.recommended_shown;
      if (positives(e)) ++report.positive_actions_on_recommended;
    }
  }
  return report;
}

EventSet filter_events(const EventSet& events, const TimeWindow& window) {
  EventSet out;
  for (const auto& e : events.swipes) {
    if (window.contains(e.timestamp_ms)) out.swipes.push_back(e);
  }
  for (const auto& e : events.impressions) {
    if (window.contains(e.timestamp_ms)) out.impressions.push_back(e);
  }
  for (const auto& e : events.referral_clicks) {
    if (window.contains(e.timestamp_ms)) out.referral_clicks.push_back(e);
  }
  for (const auto& e : events.sessions) {
    if (window.contains(e.session_start_ms)) out.sessions.push_back(e);
  }
  return out;
}

UserMetricsReport user_metrics(const EventSet& events, std::optional<TimeWindow> window) {
  const EventSet filtered = window ? filter_events(events, *window) : events;
  UserMetricsReport report;

  report.sessions = filtered.sessions.size();
  if (report.sessions > 0) {
    // Integer millisecond total keeps the average independent of log order.
    std::int64_t total_ms = 0;
    for (const SessionEvent& s : filtered.sessions) {
      total_ms += s.session_end_ms - s.session_start_ms;
    }
    report.avg_session_minutes =
        static_cast<double>(total_ms) / 60000.0 / static_cast<double>(report.sessions);
  }

  // First session per user: earliest start, ties to the smaller event id.
  std::unordered_map<UserId, const SessionEvent*> first_session;
  std::unordered_map<UserId, std::uint64_t> session_count;
  for (const SessionEvent& s : filtered.sessions) {
    ++session_count[s.user_id];
    auto [it, inserted] = first_session.emplace(s.user_id, &s);
    if (!inserted && (s.session_start_ms < it->second->session_start_ms ||
                      (s.session_start_ms == it->second->session_start_ms &&
                       s.event_id < it->second->event_id))) {
      it->second = &s;
    }
  }
  for (const auto& [user, count] : session_count) {
    if (count >= 2) ++report.returning_users;
  }
  if (!first_session.empty()) {
    std::uint64_t first_session_swipes = 0;
    for (const SwipeEvent& e : filtered.swipes) {
      const auto it = first_session.find(e.user_id);
      if (it == first_session.end()) continue;
      if (e.timestamp_ms >= it->second->session_start_ms &&
          e.timestamp_ms <= it->second->session_end_ms) {
        ++first_session_swipes;
      }
    }
    report.avg_swipes_per_new_user =
        static_cast<double>(first_session_swipes) / static_cast<double>(first_session.size());
  }

  report.referral_clicks = filtered.referral_clicks.size();

  for (const SwipeEvent& e : filtered.swipes) {
    ++report.monthly_swipes[month_key(e.timestamp_ms)];
  }

  // Swipes strictly before each user's first recommender-sourced impression,
  // averaged over users who ever received one.
  std::unordered_map<UserId, TimestampMs> first_recommendation;
  for (const ImpressionEvent& e : filtered.impressions) {
    if (e.source != ImpressionSource::Recommender) continue;
    auto [it, inserted] = first_recommendation.emplace(e.user_id, e.timestamp_ms);
    if (!inserted && e.timestamp_ms < it->second) it->second = e.timestamp_ms;
  }
  report.users_with_recommendation = first_recommendation.size();
  if (!first_recommendation.empty()) {
    std::uint64_t swipes_before = 0;
    for (const SwipeEvent& e : filtered.swipes) {
      const auto it = first_recommendation.find(e.user_id);
      if (it != first_recommendation.end() && e.timestamp_ms < it->second) ++swipes_before;
    }
    report.avg_swipes_to_first_recommendation =
        static_cast<double>(swipes_before) / static_cast<double>(first_recommendation.size());
  }
  return report;
}

}  // namespace swiperec
