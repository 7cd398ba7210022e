#include "swiperec/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <doctest.h>

#include "helpers.hpp"
#include "swiperec/error.hpp"

using namespace swiperec;
using testutil::swipe;

namespace {

SparseBoolVector vec(std::size_t dim, std::vector<std::uint32_t> indices) {
  std::sort(indices.begin(), indices.end());
  return SparseBoolVector{dim, std::move(indices)};
}

// Dense evaluation of the cosine formula over full 0/1 vectors.
double dense_cosine(const SparseBoolVector& a, const SparseBoolVector& b) {
  std::vector<double> da(a.dimension, 0.0), db(b.dimension, 0.0);
  for (auto i : a.indices) da[i] = 1.0;
  for (auto i : b.indices) db[i] = 1.0;
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < da.size(); ++i) {
    dot += da[i] * db[i];
    na += da[i] * da[i];
    nb += db[i] * db[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

SparseBoolVector random_sparse(std::mt19937& gen, std::size_t dim, double density) {
  std::vector<std::uint32_t> idx;
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (std::uint32_t i = 0; i < dim; ++i) {
    if (coin(gen) < density) idx.push_back(i);
  }
  return SparseBoolVector{dim, std::move(idx)};
}

InteractionMatrix random_matrix(std::mt19937& gen, std::size_t n_users, std::size_t n_products,
                                double density) {
  std::vector<SwipeEvent> events;
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::size_t id = 0;
  for (std::size_t u = 0; u < n_users; ++u) {
    for (std::size_t p = 0; p < n_products; ++p) {
      if (coin(gen) < density) {
        events.push_back(swipe(testutil::padded("e", id++, 5), testutil::padded("u", u),
                               testutil::padded("p", p),
                               coin(gen) < 0.8 ? SwipeDirection::Raid : SwipeDirection::Dislike,
                               static_cast<TimestampMs>(gen() % 500)));
      }
    }
  }
  return build_matrix(events);
}

// Exhaustive all-pairs search with the documented tie-break; independent of
// the inverted-index path.
std::vector<RankedNeighbor> exhaustive_neighbors(const InteractionMatrix& m, const UserId& target,
                                                 std::size_t k, double min_similarity) {
  const SparseBoolVector tv = raid_vector(m, target);
  std::vector<RankedNeighbor> all;
  for (const UserId& other : m.users()) {
    if (other == target) continue;
    const SparseBoolVector ov = raid_vector(m, other);
    std::vector<std::uint32_t> shared;
    std::set_intersection(tv.indices.begin(), tv.indices.end(), ov.indices.begin(),
                          ov.indices.end(), std::back_inserter(shared));
    const double score = cosine_similarity(tv, ov);
    if (score > min_similarity) {
      all.push_back(RankedNeighbor{other, score, static_cast<std::uint32_t>(shared.size())});
    }
  }
  std::stable_sort(all.begin(), all.end(), [](const RankedNeighbor& a, const RankedNeighbor& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.overlap != b.overlap) return a.overlap > b.overlap;
    return a.user_id < b.user_id;
  });
  if (all.size() > k) all.resize(k);
  return all;
}

}  // namespace

TEST_CASE("identical non-empty vectors have similarity 1") {
  const auto a = vec(10, {1, 4, 7});
  CHECK(cosine_similarity(a, a) == 1.0);
}

TEST_CASE("disjoint supports have similarity 0") {
  CHECK(cosine_similarity(vec(4, {0}), vec(4, {1})) == 0.0);
}

TEST_CASE("one shared product out of two each gives 0.5") {
  CHECK(cosine_similarity(vec(5, {0, 1}), vec(5, {0, 2})) == 0.5);
}

TEST_CASE("zero vectors compare as 0, not NaN") {
  CHECK(cosine_similarity(vec(5, {}), vec(5, {})) == 0.0);
  CHECK(cosine_similarity(vec(5, {}), vec(5, {1, 2})) == 0.0);
}

TEST_CASE("dimension mismatch is an error") {
  CHECK_THROWS_AS(cosine_similarity(vec(4, {0}), vec(5, {0})), Error);
}

TEST_CASE("sparse computation matches the dense formula on random pairs") {
  std::mt19937 gen(29);
  for (int i = 0; i < 300; ++i) {
    const std::size_t dim = 1 + gen() % 400;
    const auto a = random_sparse(gen, dim, 0.05);
    const auto b = random_sparse(gen, dim, 0.05);
    const double sparse = cosine_similarity(a, b);
    CHECK(std::abs(sparse - dense_cosine(a, b)) <= 1e-12);
    CHECK(sparse == cosine_similarity(b, a));  // symmetry, exact
    CHECK(sparse >= 0.0);
    CHECK(sparse <= 1.0);
  }
}

TEST_CASE("adding a product raided by neither user leaves similarity unchanged") {
  std::mt19937 gen(31);
  for (int i = 0; i < 50; ++i) {
    const std::size_t dim = 1 + gen() % 100;
    auto a = random_sparse(gen, dim, 0.1);
    auto b = random_sparse(gen, dim, 0.1);
    const double before = cosine_similarity(a, b);
    a.dimension = dim + 1;
    b.dimension = dim + 1;
    CHECK(cosine_similarity(a, b) == before);
  }
}

TEST_CASE("a user with the target's exact raid set ranks first with score 1") {
  const std::vector<SwipeEvent> events = {
      swipe("e1", "t", "p1", SwipeDirection::Raid, 1),
      swipe("e2", "t", "p2", SwipeDirection::Raid, 2),
      swipe("e3", "twin", "p1", SwipeDirection::Raid, 3),
      swipe("e4", "twin", "p2", SwipeDirection::Raid, 4),
      swipe("e5", "other", "p1", SwipeDirection::Raid, 5),
      swipe("e6", "other", "p3", SwipeDirection::Raid, 6),
  };
  const InteractionMatrix m = build_matrix(events);
  const auto neighbors = nearest_neighbors(m, NeighborQuery{"t", 2, 0.0});
  REQUIRE(neighbors.size() == 2);
  CHECK(neighbors[0].user_id == "twin");
  CHECK(neighbors[0].score == 1.0);
  CHECK(neighbors[0].overlap == 2);
}

TEST_CASE("cold target yields an empty list, not an error") {
  const std::vector<SwipeEvent> events = {
      swipe("e1", "cold", "p1", SwipeDirection::Dislike, 1),
      swipe("e2", "warm", "p1", SwipeDirection::Raid, 2),
  };
  const InteractionMatrix m = build_matrix(events);
  CHECK(nearest_neighbors(m, NeighborQuery{"cold", 5, 0.0}).empty());
}

TEST_CASE("unknown target is an error") {
  const InteractionMatrix m = build_matrix({});
  CHECK_THROWS_AS(nearest_neighbors(m, NeighborQuery{"ghost", 1, 0.0}), Error);
}

TEST_CASE("k must be positive") {
  const std::vector<SwipeEvent> events = {swipe("e1", "u", "p", SwipeDirection::Raid, 1)};
  const InteractionMatrix m = build_matrix(events);
  CHECK_THROWS_AS(nearest_neighbors(m, NeighborQuery{"u", 0, 0.0}), Error);
}

TEST_CASE("min_similarity is an exclusive bound") {
  const std::vector<SwipeEvent> events = {
      swipe("e1", "t", "p1", SwipeDirection::Raid, 1),
      swipe("e2", "t", "p2", SwipeDirection::Raid, 2),
      swipe("e3", "half", "p1", SwipeDirection::Raid, 3),
      swipe("e4", "half", "p3", SwipeDirection::Raid, 4),
  };
  const InteractionMatrix m = build_matrix(events);  // sim(t, half) is exactly 0.5
  CHECK(nearest_neighbors(m, NeighborQuery{"t", 5, 0.5}).empty());
  CHECK(nearest_neighbors(m, NeighborQuery{"t", 5, 0.4999}).size() == 1);
}

TEST_CASE("neighbor search equals the exhaustive oracle on random matrices") {
  std::mt19937 gen(37);
  for (int round = 0; round < 25; ++round) {
    const std::size_t n_users = 2 + gen() % 30;
    const std::size_t n_products = 5 + gen() % 80;
    const InteractionMatrix m = random_matrix(gen, n_users, n_products, 0.08);
    if (m.user_count() == 0) continue;
    const UserId target = m.users()[gen() % m.user_count()];
    for (std::size_t k = 1; k <= 5; ++k) {
      const auto fast = nearest_neighbors(m, NeighborQuery{target, k, 0.0});
      const auto slow = exhaustive_neighbors(m, target, k, 0.0);
      CHECK(fast == slow);
    }
  }
}

TEST_CASE("repeated queries return identical lists") {
  std::mt19937 gen(41);
  const InteractionMatrix m = random_matrix(gen, 20, 40, 0.1);
  REQUIRE(m.user_count() > 0);
  const UserId target = m.users().front();
  const auto first = nearest_neighbors(m, NeighborQuery{target, 10, 0.0});
  const auto second = nearest_neighbors(m, NeighborQuery{target, 10, 0.0});
  CHECK(first == second);
}

TEST_CASE("every returned score is in (min_similarity, 1] and overlap is positive") {
  std::mt19937 gen(43);
  const InteractionMatrix m = random_matrix(gen, 25, 50, 0.12);
  for (const UserId& target : m.users()) {
    for (const RankedNeighbor& n : nearest_neighbors(m, NeighborQuery{target, 100, 0.0})) {
      CHECK(n.score > 0.0);
      CHECK(n.score <= 1.0);
      CHECK(n.overlap >= 1);
    }
  }
}
