#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "swiperec/types.hpp"

namespace swiperec {

class ProductClusterMap;

/// Sparse boolean vector over a fixed product dimension. Indices are sorted
/// and unique.
struct SparseBoolVector {
  std::size_t dimension = 0;
  std::vector<std::uint32_t> indices;

  friend bool operator==(const SparseBoolVector&, const SparseBoolVector&) = default;
};

/// Immutable user x product swipe matrix. Users and products are ordered by
/// id, so indices (and everything computed from them) are reproducible. Each
/// cell holds the outcome of the latest swipe on that (user, product) pair;
/// raid cells keep the winning swipe's timestamp for recency ordering.
/// An inverted product -> raiders index is built with the matrix.
class InteractionMatrix {
 public:
  using RaidCell = std::tuple<std::uint32_t, std::uint32_t, TimestampMs>;  // user, product, raided_at
  using DislikeCell = std::pair<std::uint32_t, std::uint32_t>;

  InteractionMatrix() = default;

  /// users/products must be sorted by id and duplicate-free; cell indices in
  /// bounds; raid and dislike cells disjoint. Throws Error(Validation).
  static InteractionMatrix from_cells(std::vector<UserId> users,
                                      std::vector<ProductId> products,
                                      std::vector<RaidCell> raids,
                                      std::vector<DislikeCell> dislikes);

  std::size_t user_count() const { return users_.size(); }
  std::size_t product_count() const { return products_.size(); }
  const std::vector<UserId>& users() const { return users_; }
  const std::vector<ProductId>& products() const { return products_; }

  std::optional<std::uint32_t> user_index(const UserId& id) const;
  std::optional<std::uint32_t> product_index(const ProductId& id) const;

  /// Product indices raided by the user, sorted ascending.
  std::span<const std::uint32_t> raids_of(std::uint32_t user) const;
  /// Raid timestamps parallel to raids_of(user).
  std::span<const TimestampMs> raid_times_of(std::uint32_t user) const;
  /// Product indices disliked by the user, sorted ascending.
  std::span<const std::uint32_t> dislikes_of(std::uint32_t user) const;
  /// User indices that raided the product, sorted ascending.
  std::span<const std::uint32_t> raiders_of(std::uint32_t product) const;

  /// True when the user swiped the product in either direction.
  bool swiped(std::uint32_t user, std::uint32_t product) const;

  std::size_t raid_cell_count() const { return raid_cells_; }
  std::size_t dislike_cell_count() const { return dislike_cells_; }

  std::vector<RaidCell> raid_cells() const;
  std::vector<DislikeCell> dislike_cells() const;

  friend bool operator==(const InteractionMatrix& a, const InteractionMatrix& b);

 private:
  std::vector<UserId> users_;
  std::vector<ProductId> products_;
  std::vector<std::vector<std::uint32_t>> raids_;       // per user, sorted
  std::vector<std::vector<TimestampMs>> raid_times_;    // parallel to raids_
  std::vector<std::vector<std::uint32_t>> dislikes_;    // per user, sorted
  std::vector<std::vector<std::uint32_t>> raiders_of_;  // per product, sorted
  std::unordered_map<UserId, std::uint32_t> user_index_;
  std::unordered_map<ProductId, std::uint32_t> product_index_;
  std::size_t raid_cells_ = 0;
  std::size_t dislike_cells_ = 0;
};

/// Builds the matrix from a swipe log. When several swipes target the same
/// (user, canonical product) pair the latest timestamp wins; timestamp ties
/// go to the lexicographically larger event_id. With a cluster map, product
/// ids are canonicalized before cell assignment. Throws Error(Validation) on
/// events with empty ids.
InteractionMatrix build_matrix(std::span<const SwipeEvent> events,
                               const ProductClusterMap* clusters = nullptr);

/// The user's raid vector over the matrix's product dimension. Dislikes and
/// unseen products are both 0. Throws Error(NotFound) for unknown users.
SparseBoolVector raid_vector(const InteractionMatrix& matrix, const UserId& user);

}  // namespace swiperec
