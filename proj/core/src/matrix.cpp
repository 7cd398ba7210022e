#include "swiperec/matrix.hpp"

#include <algorithm>
#include <map>

#include "swiperec/dedup.hpp"
#include "swiperec/error.hpp"

namespace swiperec {

InteractionMatrix InteractionMatrix::from_cells(std::vector<UserId> users,
                                                std::vector<ProductId> products,
                                                std::vector<RaidCell> raids,
                                                std::vector<DislikeCell> dislikes) {
  if (!std::is_sorted(users.begin(), users.end()) ||
      std::adjacent_find(users.begin(), users.end()) != users.end()) {
    throw Error(ErrorKind::Validation, "matrix users must be sorted and unique");
  }
  if (!std::is_sorted(products.begin(), products.end()) ||
      std::adjacent_find(products.begin(), products.end()) != products.end()) {
    throw Error(ErrorKind::Validation, "matrix products must be sorted and unique");
  }

  InteractionMatrix m;
  m.users_ = std::move(users);
  m.products_ = std::move(products);
  m.user_index_.reserve(m.users_.size());
  for (std::uint32_t i = 0; i < m.users_.size(); ++i) m.user_index_.emplace(m.users_[i], i);
  m.product_index_.reserve(m.products_.size());
  for (std::uint32_t i = 0; i < m.products_.size(); ++i) m.product_index_.emplace(m.products_[i], i);

  m.raids_.resize(m.users_.size());
  m.raid_times_.resize(m.users_.size());
  m.dislikes_.resize(m.users_.size());
  m.raiders_of_.resize(m.products_.size());

  // Group by user, then sort by product index within each user.
  std::sort(raids.begin(), raids.end());
  std::sort(dislikes.begin(), dislikes.end());

  for (const auto& [u, p, at] : raids) {
    if (u >= m.users_.size() || p >= m.products_.size()) {
      throw Error(ErrorKind::Validation, "raid cell index out of bounds");
    }
    if (!m.raids_[u].empty() && m.raids_[u].back() == p) {
      throw Error(ErrorKind::Validation, "duplicate raid cell");
    }
    m.raids_[u].push_back(p);
    m.raid_times_[u].push_back(at);
    m.raiders_of_[p].push_back(u);
  }
  for (const auto& [u, p] : dislikes) {
    if (u >= m.users_.size() || p >= m.products_.size()) {
      throw Error(ErrorKind::Validation, "dislike cell index out of bounds");
    }
    if (!m.dislikes_[u].empty() && m.dislikes_[u].back() == p) {
      throw Error(ErrorKind::Validation, "duplicate dislike cell");
    }
    m.dislikes_[u].push_back(p);
  }
  for (std::uint32_t u = 0; u < m.users_.size(); ++u) {
    const auto& r = m.raids_[u];
    const auto& d = m.dislikes_[u];
    std::vector<std::uint32_t> both;
    std::set_intersection(r.begin(), r.end(), d.begin(), d.end(), std::back_inserter(both));
    if (!both.empty()) {
      throw Error(ErrorKind::Validation,
                  "raid and dislike cells overlap for user " + m.users_[u]);
    }
  }
  for (auto& raiders : m.raiders_of_) raiders.shrink_to_fit();

  m.raid_cells_ = raids.size();
  m.dislike_cells_ = dislikes.size();
  return m;
}

std::optional<std::uint32_t> InteractionMatrix::user_index(const UserId& id) const {
  auto it = user_index_.find(id);
  if (it == user_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::uint32_t> InteractionMatrix::product_index(const ProductId& id) const {
  auto it = product_index_.find(id);
  if (it == product_index_.end()) return std::nullopt;
  return it->second;
}

std::span<const std::uint32_t> InteractionMatrix::raids_of(std::uint32_t user) const {
  return raids_.at(user);
}

std::span<const TimestampMs> InteractionMatrix::raid_times_of(std::uint32_t user) const {
  return raid_times_.at(user);
}

std::span<const std::uint32_t> InteractionMatrix::dislikes_of(std::uint32_t user) const {
  return dislikes_.at(user);
}

std::span<const std::uint32_t> InteractionMatrix::raiders_of(std::uint32_t product) const {
  return raiders_of_.at(product);
}

bool InteractionMatrix::swiped(std::uint32_t user, std::uint32_t product) const {
  const auto& r = raids_.at(user);
  if (std::binary_search(r.begin(), r.end(), product)) return true;
  const auto& d = dislikes_.at(user);
  return std::binary_search(d.begin(), d.end(), product);
}

std::vector<InteractionMatrix::RaidCell> InteractionMatrix::raid_cells() const {
  std::vector<RaidCell> cells;
  cells.reserve(raid_cells_);
  for (std::uint32_t u = 0; u < raids_.size(); ++u) {
    for (std::size_t i = 0; i < raids_[u].size(); ++i) {
      cells.emplace_back(u, raids_[u][i], raid_times_[u][i]);
    }
  }
  return cells;
}

std::vector<InteractionMatrix::DislikeCell> InteractionMatrix::dislike_cells() const {
  std::vector<DislikeCell> cells;
  cells.reserve(dislike_cells_);
  for (std::uint32_t u = 0; u < dislikes_.size(); ++u) {
    for (std::uint32_t p : dislikes_[u]) cells.emplace_back(u, p);
  }
  return cells;
}

bool operator==(const InteractionMatrix& a, const InteractionMatrix& b) {
  return a.users_ == b.users_ && a.products_ == b.products_ && a.raids_ == b.raids_ &&
         a.raid_times_ == b.raid_times_ && a.dislikes_ == b.dislikes_;
}

InteractionMatrix build_matrix(std::span<const SwipeEvent> events,
                               const ProductClusterMap* clusters) {
  struct CellState {
    TimestampMs at;
    const EventId* event_id;
    SwipeDirection direction;
  };
  // (user_id, canonical product_id) -> winning swipe. std::map keeps the
  // user/product id collection deterministic and already sorted.
  std::map<std::pair<UserId, ProductId>, CellState> cells;

  for (const SwipeEvent& e : events) {
    if (e.event_id.empty() || e.user_id.empty() || e.product_id.empty()) {
      throw Error(ErrorKind::Validation,
                  "malformed swipe event '" + e.event_id + "': empty id field");
    }
    const ProductId& canon = clusters ? clusters->canonical(e.product_id) : e.product_id;
    auto key = std::make_pair(e.user_id, canon);
    auto it = cells.find(key);
    if (it == cells.end()) {
      cells.emplace(std::move(key), CellState{e.timestamp_ms, &e.event_id, e.direction});
    } else {
      CellState& cur = it->second;
      if (e.timestamp_ms > cur.at ||
          (e.timestamp_ms == cur.at && e.event_id > *cur.event_id)) {
        cur = CellState{e.timestamp_ms, &e.event_id, e.direction};
      }
    }
  }

  std::vector<UserId> users;
  std::vector<ProductId> products;
  for (const auto& [key, state] : cells) {
    if (users.empty() || users.back() != key.first) users.push_back(key.first);
    products.push_back(key.second);
  }
  std::sort(products.begin(), products.end());
  products.erase(std::unique(products.begin(), products.end()), products.end());

  std::unordered_map<UserId, std::uint32_t> uindex;
  uindex.reserve(users.size());
  for (std::uint32_t i = 0; i < users.size(); ++i) uindex.emplace(users[i], i);
  std::unordered_map<ProductId, std::uint32_t> pindex;
  pindex.reserve(products.size());
  for (std::uint32_t i = 0; i < products.size(); ++i) pindex.emplace(products[i], i);

  std::vector<InteractionMatrix::RaidCell> raids;
  std::vector<InteractionMatrix::DislikeCell> dislikes;
  for (const auto& [key, state] : cells) {
    const std::uint32_t u = uindex.at(key.first);
    const std::uint32_t p = pindex.at(key.second);
    if (state.direction == SwipeDirection::Raid) {
      raids.emplace_back(u, p, state.at);
    } else {
      dislikes.emplace_back(u, p);
    }
  }

  return InteractionMatrix::from_cells(std::move(users), std::move(products),
                                       std::move(raids), std::move(dislikes));
}

SparseBoolVector raid_vector(const InteractionMatrix& matrix, const UserId& user) {
  const auto idx = matrix.user_index(user);
  if (!idx) {
    throw Error(ErrorKind::NotFound, "unknown user '" + user + "'");
  }
  const auto raids = matrix.raids_of(*idx);
  return SparseBoolVector{matrix.product_count(), {raids.begin(), raids.end()}};
}

}  // namespace swiperec
