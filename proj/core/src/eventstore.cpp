#include "swiperec/eventstore.hpp"

#include <algorithm>

#include "swiperec/error.hpp"

namespace swiperec {

namespace {

struct TypeVisitor {
  EventType operator()(const SwipeEvent&) const { return EventType::Swipe; }
  EventType operator()(const ImpressionEvent&) const { return EventType::Impression; }
  EventType operator()(const ReferralClickEvent&) const { return EventType::ReferralClick; }
  EventType operator()(const SessionEvent&) const { return EventType::Session; }
};

void require(bool ok, const EventId& event_id, const char* what) {
  if (!ok) {
    std::string id = event_id.empty() ? std::string("<no id>") : event_id;
    throw Error(ErrorKind::Validation, "event '" + id + "': " + what);
  }
}

void validate_envelope(const EventEnvelope& e) {
  if (e.version != kSchemaVersion) {
    throw Error(ErrorKind::Validation,
                "event '" + (e.event_id().empty() ? std::string("<no id>") : e.event_id()) +
                    "': unknown schema version " + std::to_string(e.version));
  }
  const EventId& id = e.event_id();
  require(!id.empty(), id, "event_id must not be empty");
  require(!e.user_id().empty(), id, "user_id must not be empty");
  std::visit(
      [&](const auto& payload) {
        using T = std::decay_t<decltype(payload)>;
        if constexpr (std::is_same_v<T, SwipeEvent> || std::is_same_v<T, ImpressionEvent> ||
                      std::is_same_v<T, ReferralClickEvent>) {
          require(!payload.product_id.empty(), id, "product_id must not be empty");
        }
        if constexpr (std::is_same_v<T, ImpressionEvent>) {
          if (payload.source == ImpressionSource::Recommender) {
            require(payload.similarity_score.has_value(), id,
                    "similarity_score required for recommender impressions");
            require(*payload.similarity_score >= 0.0 && *payload.similarity_score <= 1.0, id,
                    "similarity_score must be in [0, 1]");
          } else {
            require(!payload.similarity_score.has_value(), id,
                    "similarity_score only allowed on recommender impressions");
          }
        }
        if constexpr (std::is_same_v<T, SessionEvent>) {
          require(payload.session_end_ms >= payload.session_start_ms, id,
                  "session_end_ms before session_start_ms");
        }
      },
      e.payload);
}

std::string field_string(const nlohmann::json& j, const char* field, const EventId& id) {
  const auto it = j.find(field);
  if (it == j.end() || !it->is_string()) {
    throw Error(ErrorKind::Validation,
                "event '" + (id.empty() ? std::string("<no id>") : id) + "': missing or non-string '" +
                    field + "'");
  }
  return it->get<std::string>();
}

TimestampMs field_timestamp(const nlohmann::json& j, const char* field, const EventId& id) {
  const auto it = j.find(field);
  if (it == j.end() || !it->is_number_integer()) {
    throw Error(ErrorKind::Validation,
                "event '" + id + "': missing or non-integer '" + field + "'");
  }
  return it->get<TimestampMs>();
}

std::optional<std::string> field_variant(const nlohmann::json& j) {
  const auto it = j.find("variant");
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    throw Error(ErrorKind::Validation, "'variant' must be a string when present");
  }
  return it->get<std::string>();
}

}  // namespace

const char* to_string(EventType type) noexcept {
  switch (type) {
    case EventType::Swipe: return "swipe";
    case EventType::Impression: return "impression";
    case EventType::ReferralClick: return "referral_click";
    case EventType::Session: return "session";
  }
  return "unknown";
}

std::optional<EventType> event_type_from_string(std::string_view s) noexcept {
  if (s == "swipe") return EventType::Swipe;
  if (s == "impression") return EventType::Impression;
  if (s == "referral_click") return EventType::ReferralClick;
  if (s == "session") return EventType::Session;
  return std::nullopt;
}

EventType EventEnvelope::type() const { return std::visit(TypeVisitor{}, payload); }

const EventId& EventEnvelope::event_id() const {
  return std::visit([](const auto& p) -> const EventId& { return p.event_id; }, payload);
}

const UserId& EventEnvelope::user_id() const {
  return std::visit([](const auto& p) -> const UserId& { return p.user_id; }, payload);
}

TimestampMs EventEnvelope::event_time() const {
  return std::visit(
      [](const auto& p) -> TimestampMs {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, SessionEvent>) {
          return p.session_start_ms;
        } else {
          return p.timestamp_ms;
        }
      },
      payload);
}

const std::optional<std::string>& EventEnvelope::variant() const {
  return std::visit(
      [](const auto& p) -> const std::optional<std::string>& { return p.variant; }, payload);
}

EventEnvelope make_envelope(SwipeEvent e) { return EventEnvelope{kSchemaVersion, std::move(e)}; }
EventEnvelope make_envelope(ImpressionEvent e) { return EventEnvelope{kSchemaVersion, std::move(e)}; }
EventEnvelope make_envelope(ReferralClickEvent e) { return EventEnvelope{kSchemaVersion, std::move(e)}; }
EventEnvelope make_envelope(SessionEvent e) { return EventEnvelope{kSchemaVersion, std::move(e)}; }

nlohmann::json envelope_to_json(const EventEnvelope& envelope) {
  nlohmann::json j;
  j["type"] = to_string(envelope.type());
  j["version"] = envelope.version;
  std::visit(
      [&j](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        j["event_id"] = p.event_id;
        j["user_id"] = p.user_id;
        if constexpr (std::is_same_v<T, SwipeEvent>) {
          j["product_id"] = p.product_id;
          j["direction"] = to_string(p.direction);
          j["timestamp_ms"] = p.timestamp_ms;
        } else if constexpr (std::is_same_v<T, ImpressionEvent>) {
          j["product_id"] = p.product_id;
          j["source"] = to_string(p.source);
          if (p.similarity_score) j["similarity_score"] = *p.similarity_score;
          j["timestamp_ms"] = p.timestamp_ms;
        } else if constexpr (std::is_same_v<T, ReferralClickEvent>) {
          j["product_id"] = p.product_id;
          j["timestamp_ms"] = p.timestamp_ms;
        } else {
          j["session_start_ms"] = p.session_start_ms;
          j["session_end_ms"] = p.session_end_ms;
        }
        if (p.variant) j["variant"] = *p.variant;
      },
      envelope.payload);
  return j;
}

EventEnvelope envelope_from_json(const nlohmann::json& j) {
  if (!j.is_object()) {
    throw Error(ErrorKind::Validation, "event must be a JSON object");
  }
  const EventId id = j.value("event_id", std::string{});

  const auto version_it = j.find("version");
  if (version_it == j.end() || !version_it->is_number_integer()) {
    throw Error(ErrorKind::Validation,
                "event '" + (id.empty() ? std::string("<no id>") : id) + "': missing 'version'");
  }
  const int version = version_it->get<int>();

  const auto type = event_type_from_string(j.value("type", std::string{}));
  if (!type) {
    throw Error(ErrorKind::Validation,
                "event '" + (id.empty() ? std::string("<no id>") : id) + "': unknown type '" +
                    j.value("type", std::string{}) + "'");
  }

  EventEnvelope envelope;
  envelope.version = version;
  switch (*type) {
    case EventType::Swipe: {
      SwipeEvent e;
      e.event_id = field_string(j, "event_id", id);
      e.user_id = field_string(j, "user_id", id);
      e.product_id = field_string(j, "product_id", id);
      const std::string dir = field_string(j, "direction", id);
      const auto direction = swipe_direction_from_string(dir);
      if (!direction) {
        throw Error(ErrorKind::Validation, "event '" + id + "': bad direction '" + dir + "'");
      }
      e.direction = *direction;
      e.timestamp_ms = field_timestamp(j, "timestamp_ms", id);
      e.variant = field_variant(j);
      envelope.payload = std::move(e);
      break;
    }
    case EventType::Impression: {
      ImpressionEvent e;
      e.event_id = field_string(j, "event_id", id);
      e.user_id = field_string(j, "user_id", id);
      e.product_id = field_string(j, "product_id", id);
      const std::string src = field_string(j, "source", id);
      const auto source = impression_source_from_string(src);
      if (!source) {
        throw Error(ErrorKind::Validation, "event '" + id + "': bad source '" + src + "'");
      }
      e.source = *source;
      const auto score_it = j.find("similarity_score");
      if (score_it != j.end() && !score_it->is_null()) {
        if (!score_it->is_number()) {
          throw Error(ErrorKind::Validation, "event '" + id + "': non-numeric similarity_score");
        }
        e.similarity_score = score_it->get<double>();
      }
      e.timestamp_ms = field_timestamp(j, "timestamp_ms", id);
      e.variant = field_variant(j);
      envelope.payload = std::move(e);
      break;
    }
    case EventType::ReferralClick: {
      ReferralClickEvent e;
      e.event_id = field_string(j, "event_id", id);
      e.user_id = field_string(j, "user_id", id);
      e.product_id = field_string(j, "product_id", id);
      e.timestamp_ms = field_timestamp(j, "timestamp_ms", id);
      e.variant = field_variant(j);
      envelope.payload = std::move(e);
      break;
    }
    case EventType::Session: {
      SessionEvent e;
      e.event_id = field_string(j, "event_id", id);
      e.user_id = field_string(j, "user_id", id);
      e.session_start_ms = field_timestamp(j, "session_start_ms", id);
      e.session_end_ms = field_timestamp(j, "session_end_ms", id);
      e.variant = field_variant(j);
      envelope.payload = std::move(e);
      break;
    }
  }
  validate_envelope(envelope);
  return envelope;
}

EventEnvelope envelope_from_line(std::string_view line) {
  nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded()) {
    throw Error(ErrorKind::Validation, "line is not valid JSON");
  }
  return envelope_from_json(j);
}

std::string envelope_to_line(const EventEnvelope& envelope) {
  return envelope_to_json(envelope).dump();
}

bool ReplayFilter::matches(const EventEnvelope& e) const {
  if (types && types->count(e.type()) == 0) return false;
  if (user && e.user_id() != *user) return false;
  if (window && !window->contains(e.event_time())) return false;
  if (variant && (!e.variant() || *e.variant() != *variant)) return false;
  return true;
}

EventLog EventLog::open(const std::filesystem::path& store_dir) {
  std::error_code ec;
  std::filesystem::create_directories(store_dir, ec);
  if (ec) {
    throw Error(ErrorKind::Store, "cannot create store directory " + store_dir.string());
  }

  EventLog log;
  log.dir_ = store_dir;
  log.file_ = store_dir / StoreLayout::kEvents;

  if (std::filesystem::exists(log.file_)) {
    std::ifstream in(log.file_);
    if (!in) {
      throw Error(ErrorKind::Store, "cannot read event log " + log.file_.string());
    }
    std::string line;
    while (std::getline(in, line)) {
      ++log.next_position_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      try {
        log.seen_ids_.insert(envelope_from_line(line).event_id());
      } catch (const Error&) {
        // Corrupt line: position still occupied; replay() reports it.
      }
    }
  }

  log.out_.open(log.file_, std::ios::app);
  if (!log.out_) {
    throw Error(ErrorKind::Store, "cannot open event log for append: " + log.file_.string());
  }
  return log;
}

std::uint64_t EventLog::append(const EventEnvelope& envelope) {
  validate_envelope(envelope);
  if (seen_ids_.count(envelope.event_id()) != 0) {
    throw Error(ErrorKind::Validation,
                "event '" + envelope.event_id() + "': duplicate event_id");
  }
  out_ << envelope_to_line(envelope) << '\n';
  out_.flush();
  if (!out_) {
    throw Error(ErrorKind::Store, "write to event log failed: " + file_.string());
  }
  seen_ids_.insert(envelope.event_id());
  return next_position_++;
}

std::vector<EventEnvelope> EventLog::replay(const ReplayFilter& filter,
                                            std::vector<ReplayIssue>* issues, bool strict) const {
  std::vector<EventEnvelope> events;
  std::ifstream in(file_);
  if (!in) {
    if (!std::filesystem::exists(file_)) return events;
    throw Error(ErrorKind::Store, "cannot read event log " + file_.string());
  }
  std::string line;
  std::uint64_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      EventEnvelope e = envelope_from_line(line);
      if (filter.matches(e)) events.push_back(std::move(e));
    } catch (const Error& err) {
      if (strict) {
        throw Error(ErrorKind::Validation,
                    "line " + std::to_string(line_number) + ": " + err.what());
      }
      if (issues) issues->push_back(ReplayIssue{line_number, err.what()});
    }
  }
  return events;
}

std::vector<EventEnvelope> EventLog::replay_prefix(std::uint64_t count) const {
  std::vector<EventEnvelope> events;
  std::ifstream in(file_);
  if (!in) return events;
  std::string line;
  std::uint64_t position = 0;
  while (position < count && std::getline(in, line)) {
    ++position;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    events.push_back(envelope_from_line(line));
  }
  return events;
}

std::vector<EventEnvelope> EventLog::replay_from(std::uint64_t count) const {
  std::vector<EventEnvelope> events;
  std::ifstream in(file_);
  if (!in) return events;
  std::string line;
  std::uint64_t position = 0;
  while (std::getline(in, line)) {
    ++position;
    if (position <= count) continue;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    events.push_back(envelope_from_line(line));
  }
  return events;
}

EventSet split_events(std::span<const EventEnvelope> envelopes) {
  EventSet set;
  for (const EventEnvelope& e : envelopes) {
    std::visit(
        [&set](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, SwipeEvent>) {
            set.swipes.push_back(p);
          } else if constexpr (std::is_same_v<T, ImpressionEvent>) {
            set.impressions.push_back(p);
          } else if constexpr (std::is_same_v<T, ReferralClickEvent>) {
            set.referral_clicks.push_back(p);
          } else {
            set.sessions.push_back(p);
          }
        },
        e.payload);
  }
  return set;
}

void save_snapshot(const std::filesystem::path& path, const Snapshot& snapshot) {
  nlohmann::json matrix_json;
  matrix_json["users"] = snapshot.matrix.users();
  matrix_json["products"] = snapshot.matrix.products();
  nlohmann::json raids = nlohmann::json::array();
  for (const auto& [u, p, at] : snapshot.matrix.raid_cells()) {
    raids.push_back({u, p, at});
  }
  nlohmann::json dislikes = nlohmann::json::array();
  for (const auto& [u, p] : snapshot.matrix.dislike_cells()) {
    dislikes.push_back({u, p});
  }
  matrix_json["raids"] = std::move(raids);
  matrix_json["dislikes"] = std::move(dislikes);

  nlohmann::json j;
  j["format"] = "swiperec-snapshot";
  j["version"] = 1;
  j["as_of_ms"] = snapshot.as_of_ms;
  j["event_count"] = snapshot.event_count;
  j["matrix"] = std::move(matrix_json);
  if (snapshot.cluster_map) {
    nlohmann::json mapping = nlohmann::json::object();
    for (const auto& [id, canon] : snapshot.cluster_map->mapping()) mapping[id] = canon;
    j["cluster_map"] = {{"threshold", snapshot.cluster_map->threshold()},
                        {"mapping", std::move(mapping)}};
  }

  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw Error(ErrorKind::Store, "cannot write snapshot to " + path.string());
  }
  out << j.dump() << '\n';
  if (!out.flush()) {
    throw Error(ErrorKind::Store, "failed writing snapshot to " + path.string());
  }
}

Snapshot load_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::Store, "cannot read snapshot " + path.string());
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::Validation, "snapshot " + path.string() + " is not valid JSON: " + ex.what());
  }
  if (j.value("format", std::string{}) != "swiperec-snapshot" || j.value("version", 0) != 1) {
    throw Error(ErrorKind::Validation, "snapshot " + path.string() + " has an unknown format/version");
  }

  Snapshot snapshot;
  try {
    snapshot.as_of_ms = j.at("as_of_ms").get<TimestampMs>();
    snapshot.event_count = j.at("event_count").get<std::uint64_t>();
    const auto& mj = j.at("matrix");
    auto users = mj.at("users").get<std::vector<UserId>>();
    auto products = mj.at("products").get<std::vector<ProductId>>();
    std::vector<InteractionMatrix::RaidCell> raids;
    for (const auto& cell : mj.at("raids")) {
      raids.emplace_back(cell.at(0).get<std::uint32_t>(), cell.at(1).get<std::uint32_t>(),
                         cell.at(2).get<TimestampMs>());
    }
    std::vector<InteractionMatrix::DislikeCell> dislikes;
    for (const auto& cell : mj.at("dislikes")) {
      dislikes.emplace_back(cell.at(0).get<std::uint32_t>(), cell.at(1).get<std::uint32_t>());
    }
    snapshot.matrix = InteractionMatrix::from_cells(std::move(users), std::move(products),
                                                    std::move(raids), std::move(dislikes));
    if (j.contains("cluster_map") && !j["cluster_map"].is_null()) {
      std::unordered_map<ProductId, ProductId> mapping;
      for (const auto& [id, canon] : j["cluster_map"].at("mapping").items()) {
        mapping.emplace(id, canon.get<ProductId>());
      }
      snapshot.cluster_map =
          ProductClusterMap(std::move(mapping), j["cluster_map"].at("threshold").get<double>());
    }
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::Validation, "snapshot " + path.string() + " is malformed: " + ex.what());
  }
  return snapshot;
}

std::vector<ProductRecord> load_catalogue(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::Store, "cannot read catalogue " + path.string());
  }
  std::vector<ProductRecord> products;
  std::string line;
  std::uint64_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw Error(ErrorKind::Validation,
                  "catalogue line " + std::to_string(line_number) + " is not a JSON object");
    }
    ProductRecord p;
    try {
      p.product_id = j.at("product_id").get<std::string>();
      p.title = j.at("title").get<std::string>();
      if (j.contains("referral_url") && !j["referral_url"].is_null()) {
        p.referral_url = j["referral_url"].get<std::string>();
      }
    } catch (const nlohmann::json::exception& ex) {
      throw Error(ErrorKind::Validation,
                  "catalogue line " + std::to_string(line_number) + ": " + ex.what());
    }
    if (p.product_id.empty()) {
      throw Error(ErrorKind::Validation,
                  "catalogue line " + std::to_string(line_number) + ": empty product_id");
    }
    products.push_back(std::move(p));
  }
  return products;
}

void save_catalogue(const std::filesystem::path& path, std::span<const ProductRecord> products) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw Error(ErrorKind::Store, "cannot write catalogue to " + path.string());
  }
  for (const ProductRecord& p : products) {
    nlohmann::json j{{"product_id", p.product_id}, {"title", p.title}};
    if (p.referral_url) j["referral_url"] = *p.referral_url;
    out << j.dump() << '\n';
  }
  if (!out.flush()) {
    throw Error(ErrorKind::Store, "failed writing catalogue to " + path.string());
  }
}

std::vector<UserId> load_user_registry(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::Store, "cannot read user registry " + path.string());
  }
  std::vector<UserId> users;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) users.push_back(line);
  }
  return users;
}

void save_user_registry(const std::filesystem::path& path, std::span<const UserId> users) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw Error(ErrorKind::Store, "cannot write user registry to " + path.string());
  }
  for (const UserId& u : users) out << u << '\n';
  if (!out.flush()) {
    throw Error(ErrorKind::Store, "failed writing user registry to " + path.string());
  }
}

}  // namespace swiperec
