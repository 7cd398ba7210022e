#pragma once

#include <unistd.h>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "swiperec/types.hpp"

namespace testutil {

inline swiperec::SwipeEvent swipe(std::string event_id, std::string user, std::string product,
                                  swiperec::SwipeDirection direction, swiperec::TimestampMs ts,
                                  std::optional<std::string> variant = std::nullopt) {
  swiperec::SwipeEvent e;
  e.event_id = std::move(event_id);
  e.user_id = std::move(user);
  e.product_id = std::move(product);
  e.direction = direction;
  e.timestamp_ms = ts;
  e.variant = std::move(variant);
  return e;
}

inline swiperec::ImpressionEvent impression(std::string event_id, std::string user,
                                            std::string product, swiperec::ImpressionSource source,
                                            std::optional<double> score, swiperec::TimestampMs ts,
                                            std::optional<std::string> variant = std::nullopt) {
  swiperec::ImpressionEvent e;
  e.event_id = std::move(event_id);
  e.user_id = std::move(user);
  e.product_id = std::move(product);
  e.source = source;
  e.similarity_score = score;
  e.timestamp_ms = ts;
  e.variant = std::move(variant);
  return e;
}

/// Unique temp directory, removed on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("swiperec_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::string padded(const char* prefix, std::size_t i, int width = 3) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%0*zu", prefix, width, i);
  return buf;
}

}  // namespace testutil
