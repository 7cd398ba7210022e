#include "swiperec/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <unordered_set>

#include "swiperec/dedup.hpp"
#include "swiperec/error.hpp"
#include "swiperec/eventstore.hpp"
#include "swiperec/matrix.hpp"
#include "swiperec/recommender.hpp"
#include "swiperec/rng.hpp"

namespace swiperec {

namespace {

constexpr std::int64_t kDayMs = 86400000;
constexpr std::int64_t kSwipeGapMs = 2000;

std::string padded_id(char prefix, std::size_t index, std::size_t width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%0*zu", prefix, static_cast<int>(width), index);
  return buf;
}

std::size_t id_width(std::size_t count) {
  std::size_t width = 1;
  while (count >= 10) {
    count /= 10;
    ++width;
  }
  return std::max<std::size_t>(width, 4);
}

std::vector<double> random_unit_vector(std::mt19937_64& gen, std::size_t dims) {
  std::vector<double> v(dims);
  double norm_sq = 0.0;
  do {
    norm_sq = 0.0;
    for (double& x : v) {
      x = rng::normal(gen);
      norm_sq += x * x;
    }
  } while (norm_sq == 0.0);
  const double inv = 1.0 / std::sqrt(norm_sq);
  for (double& x : v) x *= inv;
  return v;
}

std::vector<double> jittered_unit_vector(std::mt19937_64& gen, const std::vector<double>& center,
                                         double noise) {
  std::vector<double> v(center.size());
  double norm_sq = 0.0;
  for (std::size_t i = 0; i < center.size(); ++i) {
    v[i] = center[i] + noise * rng::normal(gen);
    norm_sq += v[i] * v[i];
  }
  if (norm_sq == 0.0) return random_unit_vector(gen, center.size());
  const double inv = 1.0 / std::sqrt(norm_sq);
  for (double& x : v) x *= inv;
  return v;
}

const char* kAdjectives[] = {"oak",    "walnut", "brass",   "linen",
                             "velvet", "ceramic", "rattan", "marble"};
const char* kNouns[] = {"lamp",  "vase",   "chair", "sofa",
                        "shelf", "mirror", "rug",   "table"};
const char kVariantLetters[] = {'a', 'b', 'c'};

}  // namespace

void SimulationConfig::validate() const {
  if (n_users == 0 || n_products == 0 || sessions_per_user == 0 || swipes_per_session == 0 ||
      feed_size == 0) {
    throw Error(ErrorKind::Config, "simulation counts must all be positive");
  }
  if (style.dimensions == 0 || style.clusters == 0) {
    throw Error(ErrorKind::Config, "style dimensions and clusters must be positive");
  }
  if (style.noise < 0.0) {
    throw Error(ErrorKind::Config, "style noise must be non-negative");
  }
  if (raid_probability.slope < 0.0) {
    throw Error(ErrorKind::Config, "raid probability slope must be non-negative (monotone map)");
  }
  if (referral_click_probability < 0.0 || referral_click_probability > 1.0) {
    throw Error(ErrorKind::Config, "referral click probability must be in [0, 1]");
  }
  if (session_interval_days <= 0) {
    throw Error(ErrorKind::Config, "session interval must be positive");
  }
  // Sessions are laid out in per-round slots so that a round's events finish
  // before the next matrix rebuild; the schedule must fit.
  const std::int64_t session_span =
      static_cast<std::int64_t>(swipes_per_session) * kSwipeGapMs + kSwipeGapMs;
  const std::int64_t slot = session_interval_days * kDayMs / static_cast<std::int64_t>(n_users + 1);
  if (slot < session_span) {
    throw Error(ErrorKind::Config,
                "session schedule does not fit the round interval; increase "
                "session_interval_days or reduce users/swipes");
  }
  if (experiment) experiment->validate();
}

SimulationConfig SimulationConfig::from_json(const nlohmann::json& j) {
  SimulationConfig c;
  try {
    c.n_users = j.value("n_users", c.n_users);
    c.n_products = j.value("n_products", c.n_products);
    c.sessions_per_user = j.value("sessions_per_user", c.sessions_per_user);
    c.swipes_per_session = j.value("swipes_per_session", c.swipes_per_session);
    c.feed_size = j.value("feed_size", c.feed_size);
    if (j.contains("feed_policy")) {
      const std::string policy = j.at("feed_policy").get<std::string>();
      if (policy == "engine") {
        c.feed_policy = FeedPolicy::EngineDriven;
      } else if (policy == "fallback") {
        c.feed_policy = FeedPolicy::PureFallback;
      } else {
        throw Error(ErrorKind::Config, "feed_policy must be 'engine' or 'fallback'");
      }
    }
    c.seed = j.value("seed", c.seed);
    if (j.contains("style")) {
      const auto& s = j.at("style");
      c.style.dimensions = s.value("dimensions", c.style.dimensions);
      c.style.clusters = s.value("clusters", c.style.clusters);
      c.style.noise = s.value("noise", c.style.noise);
    }
    if (j.contains("raid_probability")) {
      const auto& r = j.at("raid_probability");
      c.raid_probability.base = r.value("base", c.raid_probability.base);
      c.raid_probability.slope = r.value("slope", c.raid_probability.slope);
    }
    c.referral_click_probability =
        j.value("referral_click_probability", c.referral_click_probability);
    c.start_ms = j.value("start_ms", c.start_ms);
    c.session_interval_days = j.value("session_interval_days", c.session_interval_days);
    if (j.contains("experiment") && !j["experiment"].is_null()) {
      c.experiment = Experiment::from_json(j.at("experiment"));
    }
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::Config, std::string("bad simulation config: ") + ex.what());
  }
  c.validate();
  return c;
}

nlohmann::json SimulationConfig::to_json() const {
  nlohmann::json j{
      {"n_users", n_users},
      {"n_products", n_products},
      {"sessions_per_user", sessions_per_user},
      {"swipes_per_session", swipes_per_session},
      {"feed_size", feed_size},
      {"feed_policy", feed_policy == FeedPolicy::EngineDriven ? "engine" : "fallback"},
      {"seed", seed},
      {"style",
       {{"dimensions", style.dimensions}, {"clusters", style.clusters}, {"noise", style.noise}}},
      {"raid_probability",
       {{"base", raid_probability.base}, {"slope", raid_probability.slope}}},
      {"referral_click_probability", referral_click_probability},
      {"start_ms", start_ms},
      {"session_interval_days", session_interval_days},
  };
  if (experiment) j["experiment"] = experiment->to_json();
  return j;
}

SimulationConfig SimulationConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::Store, "cannot read simulation config " + path.string());
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::Config,
                "simulation config " + path.string() + " is not valid JSON: " + ex.what());
  }
  return from_json(j);
}

LatentStyleModel LatentStyleModel::generate(const SimulationConfig& config) {
  config.validate();
  LatentStyleModel model;
  model.dimensions_ = config.style.dimensions;
  model.raid_ = config.raid_probability;

  std::mt19937_64 gen(config.seed);
  std::vector<std::vector<double>> centers;
  centers.reserve(config.style.clusters);
  for (std::size_t c = 0; c < config.style.clusters; ++c) {
    centers.push_back(random_unit_vector(gen, model.dimensions_));
  }
  // Round-robin cluster membership keeps arms balanced and reproducible.
  model.users_.reserve(config.n_users);
  for (std::size_t u = 0; u < config.n_users; ++u) {
    model.users_.push_back(
        jittered_unit_vector(gen, centers[u % centers.size()], config.style.noise));
  }
  model.products_.reserve(config.n_products);
  for (std::size_t p = 0; p < config.n_products; ++p) {
    model.products_.push_back(
        jittered_unit_vector(gen, centers[p % centers.size()], config.style.noise));
  }
  return model;
}

const std::vector<double>& LatentStyleModel::user_style(std::size_t user_index) const {
  return users_.at(user_index);
}

const std::vector<double>& LatentStyleModel::product_style(std::size_t product_index) const {
  return products_.at(product_index);
}

double LatentStyleModel::affinity(std::size_t user_index, std::size_t product_index) const {
  const auto& u = users_.at(user_index);
  const auto& p = products_.at(product_index);
  double dot = 0.0;
  for (std::size_t i = 0; i < dimensions_; ++i) dot += u[i] * p[i];
  return dot;
}

double LatentStyleModel::raid_probability(double affinity) const {
  return std::clamp(raid_.base + raid_.slope * affinity, 0.0, 1.0);
}

namespace {

/// Catalogue with near-duplicate titles: products are grouped into small
/// "design groups" whose members share a long base title and differ in a
/// one-letter colour code, the shape the title clustering is meant to fold.
std::vector<ProductRecord> generate_catalogue(const SimulationConfig& config,
                                              std::mt19937_64& gen,
                                              const std::vector<ProductId>& product_ids) {
  std::vector<ProductRecord> catalogue;
  catalogue.reserve(config.n_products);
  std::size_t next = 0;
  std::size_t group = 0;
  while (next < config.n_products) {
    const double r = rng::uniform01(gen);
    std::size_t group_size = r < 0.60 ? 1 : (r < 0.85 ? 2 : 3);
    group_size = std::min(group_size, config.n_products - next);
    char base[96];
    std::snprintf(base, sizeof base, "%s %s collection piece no %04zu",
                  kAdjectives[group % std::size(kAdjectives)],
                  kNouns[(group / std::size(kAdjectives)) % std::size(kNouns)], group);
    for (std::size_t v = 0; v < group_size; ++v, ++next) {
      std::string title = base;
      if (group_size > 1) {
        title += " colour ";
        title += kVariantLetters[v];
      }
      catalogue.push_back(ProductRecord{
          product_ids[next], std::move(title),
          "https://shop.example/" + product_ids[next]});
    }
    ++group;
  }
  return catalogue;
}

}  // namespace

SimulationSummary simulate(const SimulationConfig& config,
                           const std::filesystem::path& store_dir) {
  config.validate();
  const LatentStyleModel model = LatentStyleModel::generate(config);

  std::vector<UserId> user_ids;
  user_ids.reserve(config.n_users);
  const std::size_t uw = id_width(config.n_users);
  for (std::size_t u = 0; u < config.n_users; ++u) user_ids.push_back(padded_id('u', u, uw));

  std::vector<ProductId> product_ids;
  product_ids.reserve(config.n_products);
  const std::size_t pw = id_width(config.n_products);
  for (std::size_t p = 0; p < config.n_products; ++p) product_ids.push_back(padded_id('p', p, pw));

  // Catalogue titles consume their own generator so the event stream is not
  // perturbed by catalogue size tweaks.
  std::mt19937_64 catalogue_gen(config.seed ^ 0x9e3779b97f4a7c15ULL);
  const auto catalogue = generate_catalogue(config, catalogue_gen, product_ids);

  EventLog log = EventLog::open(store_dir);
  if (log.size() != 0) {
    throw Error(ErrorKind::Config,
                "store directory already contains events: " + store_dir.string());
  }
  save_catalogue(log.store_dir() / StoreLayout::kCatalogue, catalogue);
  save_user_registry(log.store_dir() / StoreLayout::kUserRegistry, user_ids);

  std::vector<std::optional<std::string>> variant_of(config.n_users);
  if (config.experiment) {
    for (std::size_t u = 0; u < config.n_users; ++u) {
      variant_of[u] = assign_variant(*config.experiment, user_ids[u]);
    }
  }

  std::mt19937_64 gen(config.seed * 0x2545f4914f6cdd1dULL + 1);
  std::uint64_t event_counter = 0;
  auto next_event_id = [&event_counter] { return padded_id('e', event_counter++, 8); };

  SimulationSummary summary;
  summary.users = config.n_users;
  summary.products = config.n_products;

  std::vector<std::unordered_set<std::uint32_t>> swiped(config.n_users);
  std::vector<SwipeEvent> swipe_history;  // feeds the per-round matrix rebuild

  const std::int64_t interval_ms = config.session_interval_days * kDayMs;
  const std::int64_t slot_ms = interval_ms / static_cast<std::int64_t>(config.n_users + 1);

  std::unordered_map<ProductId, std::uint32_t> product_index;
  for (std::uint32_t p = 0; p < product_ids.size(); ++p) product_index.emplace(product_ids[p], p);

  for (std::size_t round = 0; round < config.sessions_per_user; ++round) {
    InteractionMatrix matrix;
    if (config.feed_policy == FeedPolicy::EngineDriven) {
      matrix = build_matrix(swipe_history);
    }
    const TimestampMs round_start =
        config.start_ms + static_cast<std::int64_t>(round) * interval_ms;

    for (std::size_t u = 0; u < config.n_users; ++u) {
      const TimestampMs session_start =
          round_start + static_cast<std::int64_t>(u) * slot_ms;
      TimestampMs now = session_start;
      std::size_t session_swipes = 0;

      while (session_swipes < config.swipes_per_session) {
        const std::size_t want =
            std::min(config.feed_size, config.swipes_per_session - session_swipes);

        // Fallback pool: a per-user rotation over unswiped products.
        std::vector<ProductId> pool;
        pool.reserve(want * 4);
        const std::size_t start = (u * 2654435761ULL) % config.n_products;
        for (std::size_t i = 0; i < config.n_products && pool.size() < want * 4; ++i) {
          const std::uint32_t p = static_cast<std::uint32_t>((start + i) % config.n_products);
          if (swiped[u].count(p) == 0) pool.push_back(product_ids[p]);
        }

        std::vector<FeedItem> items;
        if (config.feed_policy == FeedPolicy::EngineDriven) {
          items = feed(matrix, user_ids[u], want, pool);
        } else {
          for (std::size_t i = 0; i < std::min(want, pool.size()); ++i) {
            items.push_back(FeedItem{pool[i], ImpressionSource::Fallback, std::nullopt});
          }
        }

        std::size_t served = 0;
        for (const FeedItem& item : items) {
          const std::uint32_t p = product_index.at(item.product_id);
          // The round matrix is stale within a session; skip anything the
          // user already swiped since the rebuild.
          if (swiped[u].count(p) != 0) continue;
          ++served;

          ImpressionEvent impression;
          impression.event_id = next_event_id();
          impression.user_id = user_ids[u];
          impression.product_id = item.product_id;
          impression.source = item.source;
          impression.similarity_score = item.similarity;
          impression.timestamp_ms = now;
          impression.variant = variant_of[u];
          log.append(make_envelope(impression));
          ++summary.impressions;
          if (item.source == ImpressionSource::Recommender) ++summary.recommender_impressions;

          SwipeEvent swipe;
          swipe.event_id = next_event_id();
          swipe.user_id = user_ids[u];
          swipe.product_id = item.product_id;
          const double p_raid = model.raid_probability(model.affinity(u, p));
          swipe.direction =
              rng::uniform01(gen) < p_raid ? SwipeDirection::Raid : SwipeDirection::Dislike;
          swipe.timestamp_ms = now + kSwipeGapMs / 2;
          swipe.variant = variant_of[u];
          log.append(make_envelope(swipe));
          swipe_history.push_back(swipe);
          swiped[u].insert(p);
          ++summary.swipes;
          ++session_swipes;

          if (swipe.direction == SwipeDirection::Raid &&
              rng::uniform01(gen) < config.referral_click_probability) {
            ReferralClickEvent click;
            click.event_id = next_event_id();
            click.user_id = user_ids[u];
            click.product_id = item.product_id;
            click.timestamp_ms = now + kSwipeGapMs / 2 + 500;
            click.variant = variant_of[u];
            log.append(make_envelope(click));
            ++summary.referral_clicks;
          }

          now += kSwipeGapMs;
          if (session_swipes >= config.swipes_per_session) break;
        }
        if (served == 0) break;  // catalogue exhausted for this user
      }

      SessionEvent session;
      session.event_id = next_event_id();
      session.user_id = user_ids[u];
      session.session_start_ms = session_start;
      session.session_end_ms = now;
      session.variant = variant_of[u];
      log.append(make_envelope(session));
      ++summary.sessions;
    }
  }
  return summary;
}

}  // namespace swiperec
