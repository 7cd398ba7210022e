#pragma once

#include <memory>
#include <string>

#include "swiperec/engine.hpp"

namespace swiperec {

struct HttpServiceOptions {
  /// Seconds between automatic snapshot rebuilds; 0 disables the timer
  /// (refresh stays available via POST /v1/admin/refresh).
  int refresh_interval_seconds = 0;
};

/// Minimal HTTP JSON surface over an Engine:
///   GET  /v1/healthz
///   GET  /v1/recommendations/{user_id}?n=5
///   POST /v1/events            (JSON array or JSON-lines body)
///   GET  /v1/metrics?from=&to=
///   POST /v1/admin/refresh
class HttpService {
 public:
  explicit HttpService(Engine& engine, HttpServiceOptions options = {});
  ~HttpService();

  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  /// Binds and serves on a background thread; port 0 picks a free port.
  /// Returns the bound port. Throws Error(Config) when binding fails.
  int start(const std::string& host, int port);

  /// Blocks until stop() is called from another thread (or the process ends).
  void wait();

  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace swiperec
