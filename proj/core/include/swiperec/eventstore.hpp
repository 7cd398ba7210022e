#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_set>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "swiperec/dedup.hpp"
#include "swiperec/matrix.hpp"
#include "swiperec/types.hpp"

namespace swiperec {

enum class EventType { Swipe, Impression, ReferralClick, Session };

const char* to_string(EventType type) noexcept;
std::optional<EventType> event_type_from_string(std::string_view s) noexcept;

inline constexpr int kSchemaVersion = 1;

/// One logged event with its schema version. The wire format is UTF-8 JSON
/// lines, one flat object per event: type, version, event_id, and the typed
/// payload fields (user_id, product_id, direction, source, similarity_score,
/// timestamp_ms, variant, session_start_ms, session_end_ms as applicable).
struct EventEnvelope {
  int version = kSchemaVersion;
  std::variant<SwipeEvent, ImpressionEvent, ReferralClickEvent, SessionEvent> payload;

  EventType type() const;
  const EventId& event_id() const;
  const UserId& user_id() const;
  /// Ordering timestamp: event time, or session start for sessions.
  TimestampMs event_time() const;
  const std::optional<std::string>& variant() const;

  friend bool operator==(const EventEnvelope&, const EventEnvelope&) = default;
};

EventEnvelope make_envelope(SwipeEvent e);
EventEnvelope make_envelope(ImpressionEvent e);
EventEnvelope make_envelope(ReferralClickEvent e);
EventEnvelope make_envelope(SessionEvent e);

/// Serializes to the wire object. Optional fields are omitted when absent.
nlohmann::json envelope_to_json(const EventEnvelope& envelope);

/// Parses and validates one wire object. Throws Error(Validation) with the
/// offending event_id (when present) on malformed input, bad enum values,
/// missing fields, or unknown schema versions.
EventEnvelope envelope_from_json(const nlohmann::json& j);

/// Parses one JSON-lines line.
EventEnvelope envelope_from_line(std::string_view line);

std::string envelope_to_line(const EventEnvelope& envelope);

struct ReplayFilter {
  std::optional<std::set<EventType>> types;
  std::optional<UserId> user;
  std::optional<TimeWindow> window;  // matches event_time()
  std::optional<std::string> variant;

  bool matches(const EventEnvelope& e) const;
};

struct ReplayIssue {
  std::uint64_t line_number = 0;  // 1-based
  std::string message;
};

/// Append-only JSON-lines event log in a store directory. Appends are
/// serialized by the caller (single-writer contract); replay opens its own
/// read handle, so concurrent readers see a consistent prefix.
class EventLog {
 public:
  /// Opens (creating if needed) DIR/events.jsonl and indexes existing event
  /// ids for uniqueness checks.
  static EventLog open(const std::filesystem::path& store_dir);

  /// Validates and appends, returning the strictly increasing position
  /// (0-based line index). Throws Error(Validation) on invalid envelopes or
  /// duplicate event ids, Error(Store) on write failure.
  std::uint64_t append(const EventEnvelope& envelope);

  /// Events matching the filter, in position order. Corrupt lines are
  /// reported through `issues` and skipped; in strict mode the first corrupt
  /// line throws Error(Validation) instead.
  std::vector<EventEnvelope> replay(const ReplayFilter& filter = {},
                                    std::vector<ReplayIssue>* issues = nullptr,
                                    bool strict = false) const;

  /// Replay of positions [0, count) with no filter.
  std::vector<EventEnvelope> replay_prefix(std::uint64_t count) const;
  /// Replay of positions [count, end) with no filter.
  std::vector<EventEnvelope> replay_from(std::uint64_t count) const;

  std::uint64_t size() const { return next_position_; }
  const std::filesystem::path& path() const { return file_; }
  const std::filesystem::path& store_dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::filesystem::path file_;
  std::ofstream out_;
  std::uint64_t next_position_ = 0;
  std::unordered_set<EventId> seen_ids_;
};

/// Splits envelopes by payload type, preserving order.
EventSet split_events(std::span<const EventEnvelope> envelopes);

/// Matrix state pinned to a log prefix: rebuilding from the first
/// event_count events reproduces `matrix` exactly.
struct Snapshot {
  TimestampMs as_of_ms = 0;
  std::uint64_t event_count = 0;
  InteractionMatrix matrix;
  std::optional<ProductClusterMap> cluster_map;
};

/// Self-describing single-file JSON snapshot.
void save_snapshot(const std::filesystem::path& path, const Snapshot& snapshot);
Snapshot load_snapshot(const std::filesystem::path& path);

/// Catalogue file: JSON lines of {product_id, title, referral_url?}.
std::vector<ProductRecord> load_catalogue(const std::filesystem::path& path);
void save_catalogue(const std::filesystem::path& path, std::span<const ProductRecord> products);

/// User registry: one user id per line.
std::vector<UserId> load_user_registry(const std::filesystem::path& path);
void save_user_registry(const std::filesystem::path& path, std::span<const UserId> users);

/// Conventional file names inside a store directory.
struct StoreLayout {
  static constexpr const char* kEvents = "events.jsonl";
  static constexpr const char* kCatalogue = "catalogue.jsonl";
  static constexpr const char* kUserRegistry = "users.txt";
  static constexpr const char* kSnapshot = "snapshot.json";
};

}  // namespace swiperec
