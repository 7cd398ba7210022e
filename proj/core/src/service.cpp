#include "swiperec/service.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <condition_variable>
#include <limits>
#include <thread>

#include <httplib.h>

#include "swiperec/error.hpp"
#include "swiperec/json_io.hpp"
#include "swiperec/timeutil.hpp"

namespace swiperec {

namespace {

int status_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Validation: return 400;
    case ErrorKind::Config: return 400;
    case ErrorKind::NotFound: return 404;
    case ErrorKind::Store: return 503;
  }
  return 500;
}

void reply_error(httplib::Response& res, ErrorKind kind, const std::string& message) {
  res.status = status_for(kind);
  res.set_content(error_json(kind, message).dump(), "application/json");
}

void reply_json(httplib::Response& res, const nlohmann::json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

template <typename Fn>
void handle(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const Error& err) {
    reply_error(res, err.kind(), err.what());
  } catch (const std::exception& ex) {
    res.status = 500;
    res.set_content(error_json(ErrorKind::Store, ex.what()).dump(), "application/json");
  }
}

}  // namespace

struct HttpService::Impl {
  Engine& engine;
  HttpServiceOptions options;
  httplib::Server server;
  std::thread serve_thread;
  std::thread refresh_thread;
  std::mutex stop_mutex;
  std::condition_variable stop_cv;
  std::atomic<bool> stopping{false};

  explicit Impl(Engine& e, HttpServiceOptions o) : engine(e), options(o) { register_routes(); }

  void register_routes() {
    server.Get("/v1/healthz", [](const httplib::Request&, httplib::Response& res) {
      reply_json(res, {{"status", "ok"}});
    });

    server.Get("/v1/recommendations/:user",
               [this](const httplib::Request& req, httplib::Response& res) {
                 handle(res, [&] {
                   const std::string user = req.path_params.at("user");
                   std::size_t n = 5;
                   if (req.has_param("n")) {
                     const std::string raw = req.get_param_value("n");
                     std::size_t value = 0;
                     auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), value);
                     if (ec != std::errc() || ptr != raw.data() + raw.size() || value == 0) {
                       throw Error(ErrorKind::Config, "query parameter n must be a positive integer");
                     }
                     n = value;
                   }
                   reply_json(res, to_json(engine.recommend(user, n)));
                 });
               });

    server.Post("/v1/events", [this](const httplib::Request& req, httplib::Response& res) {
      handle(res, [&] {
        IngestResult result;
        std::string_view body = req.body;
        const auto first = body.find_first_not_of(" \t\r\n");
        if (first != std::string_view::npos && body[first] == '[') {
          nlohmann::json parsed = nlohmann::json::parse(body, nullptr, false);
          if (parsed.is_discarded()) {
            throw Error(ErrorKind::Validation, "request body is not valid JSON");
          }
          result = engine.ingest_array(parsed);
        } else {
          result = engine.ingest_lines(body);
        }
        const bool all_invalid = result.accepted == 0 && result.rejected > 0;
        reply_json(res, to_json(result), all_invalid ? 400 : 202);
      });
    });

    server.Get("/v1/metrics", [this](const httplib::Request& req, httplib::Response& res) {
      handle(res, [&] {
        std::optional<TimeWindow> window;
        const bool has_from = req.has_param("from");
        const bool has_to = req.has_param("to");
        if (has_from || has_to) {
          TimeWindow w;
          w.from_ms = has_from ? parse_instant(req.get_param_value("from"))
                               : std::numeric_limits<TimestampMs>::min();
          w.to_ms = has_to ? parse_instant(req.get_param_value("to"))
                           : std::numeric_limits<TimestampMs>::max();
          if (w.to_ms < w.from_ms) {
            throw Error(ErrorKind::Config, "metrics window: to before from");
          }
          window = w;
        }
        reply_json(res, to_json(engine.evaluate(window)));
      });
    });

    server.Post("/v1/admin/refresh", [this](const httplib::Request&, httplib::Response& res) {
      handle(res, [&] {
        engine.refresh();
        const auto matrix = engine.matrix();
        reply_json(res, {{"status", "refreshed"},
                         {"users", matrix->user_count()},
                         {"products", matrix->product_count()}});
      });
    });
  }

  void start_refresh_timer() {
    if (options.refresh_interval_seconds <= 0) return;
    refresh_thread = std::thread([this] {
      std::unique_lock lock(stop_mutex);
      while (!stopping.load()) {
        if (stop_cv.wait_for(lock, std::chrono::seconds(options.refresh_interval_seconds),
                             [this] { return stopping.load(); })) {
          break;
        }
        lock.unlock();
        try {
          engine.refresh();
        } catch (...) {
          // Keep serving from the previous snapshot; the next tick retries.
        }
        lock.lock();
      }
    });
  }

  void stop() {
    {
      std::lock_guard lock(stop_mutex);
      stopping.store(true);
    }
    stop_cv.notify_all();
    server.stop();
    if (refresh_thread.joinable()) refresh_thread.join();
    if (serve_thread.joinable()) serve_thread.join();
  }
};

HttpService::HttpService(Engine& engine, HttpServiceOptions options)
    : impl_(std::make_unique<Impl>(engine, options)) {}

HttpService::~HttpService() {
  if (impl_) impl_->stop();
}

int HttpService::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
    if (bound <= 0) {
      throw Error(ErrorKind::Config, "cannot bind to " + host);
    }
  } else {
    if (!impl_->server.bind_to_port(host, port)) {
      throw Error(ErrorKind::Config, "cannot bind to " + host + ":" + std::to_string(port));
    }
  }
  impl_->start_refresh_timer();
  impl_->serve_thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void HttpService::wait() {
  while (!impl_->stopping.load() && impl_->server.is_running()) {
    std::this_thread::sleep_for(std::chrono::milliseconds(200));
  }
}

void HttpService::stop() { impl_->stop(); }

}  // namespace swiperec
