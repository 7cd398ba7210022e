#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace swiperec {

using UserId = std::string;
using ProductId = std::string;
using EventId = std::string;
using TimestampMs = std::int64_t;

enum class SwipeDirection { Raid, Dislike };
enum class ImpressionSource { Recommender, Fallback };

/// A left/right swipe on a product. Raid = positive (saved to the user's
/// board), Dislike = negative. The optional variant label attributes the
/// event to an experiment arm.
struct SwipeEvent {
  EventId event_id;
  UserId user_id;
  ProductId product_id;
  SwipeDirection direction = SwipeDirection::Raid;
  TimestampMs timestamp_ms = 0;
  std::optional<std::string> variant;

  friend bool operator==(const SwipeEvent&, const SwipeEvent&) = default;
};

/// One product shown to a user. similarity_score is present exactly when the
/// impression came from the recommender.
struct ImpressionEvent {
  EventId event_id;
  UserId user_id;
  ProductId product_id;
  ImpressionSource source = ImpressionSource::Fallback;
  std::optional<double> similarity_score;
  TimestampMs timestamp_ms = 0;
  std::optional<std::string> variant;

  friend bool operator==(const ImpressionEvent&, const ImpressionEvent&) = default;
};

/// Click on a product's referral link (a positive action).
struct ReferralClickEvent {
  EventId event_id;
  UserId user_id;
  ProductId product_id;
  TimestampMs timestamp_ms = 0;
  std::optional<std::string> variant;

  friend bool operator==(const ReferralClickEvent&, const ReferralClickEvent&) = default;
};

/// One visit. session_end_ms >= session_start_ms.
struct SessionEvent {
  EventId event_id;
  UserId user_id;
  TimestampMs session_start_ms = 0;
  TimestampMs session_end_ms = 0;
  std::optional<std::string> variant;

  friend bool operator==(const SessionEvent&, const SessionEvent&) = default;
};

/// Half-open interval [from_ms, to_ms).
struct TimeWindow {
  TimestampMs from_ms = 0;
  TimestampMs to_ms = 0;

  bool contains(TimestampMs t) const { return t >= from_ms && t < to_ms; }

  friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

/// Event log split by type, in original log order within each type.
struct EventSet {
  std::vector<SwipeEvent> swipes;
  std::vector<ImpressionEvent> impressions;
  std::vector<ReferralClickEvent> referral_clicks;
  std::vector<SessionEvent> sessions;

  std::size_t total() const {
    return swipes.size() + impressions.size() + referral_clicks.size() + sessions.size();
  }
};

const char* to_string(SwipeDirection direction) noexcept;
const char* to_string(ImpressionSource source) noexcept;
std::optional<SwipeDirection> swipe_direction_from_string(std::string_view s) noexcept;
std::optional<ImpressionSource> impression_source_from_string(std::string_view s) noexcept;

}  // namespace swiperec
