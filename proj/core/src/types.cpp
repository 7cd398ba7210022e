#include "swiperec/types.hpp"

#include "swiperec/error.hpp"

namespace swiperec {

const char* to_string(SwipeDirection direction) noexcept {
  return direction == SwipeDirection::Raid ? "raid" : "dislike";
}

const char* to_string(ImpressionSource source) noexcept {
  return source == ImpressionSource::Recommender ? "recommender" : "fallback";
}

std::optional<SwipeDirection> swipe_direction_from_string(std::string_view s) noexcept {
  if (s == "raid") return SwipeDirection::Raid;
  if (s == "dislike") return SwipeDirection::Dislike;
  return std::nullopt;
}

std::optional<ImpressionSource> impression_source_from_string(std::string_view s) noexcept {
  if (s == "recommender") return ImpressionSource::Recommender;
  if (s == "fallback") return ImpressionSource::Fallback;
  return std::nullopt;
}

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Validation: return "validation";
    case ErrorKind::NotFound: return "not_found";
    case ErrorKind::Store: return "store";
    case ErrorKind::Config: return "config";
  }
  return "unknown";
}

}  // namespace swiperec
