#include <benchmark/benchmark.h>

#include <cstdio>
#include <random>
#include <vector>

#include "swiperec/dedup.hpp"
#include "swiperec/matrix.hpp"
#include "swiperec/recommender.hpp"
#include "swiperec/similarity.hpp"

using namespace swiperec;

namespace {

std::string padded(const char* prefix, std::size_t i, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%0*zu", prefix, width, i);
  return buf;
}

std::vector<SwipeEvent> random_swipes(std::size_t n_users, std::size_t n_products,
                                      std::size_t n_events, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::vector<SwipeEvent> events;
  events.reserve(n_events);
  for (std::size_t i = 0; i < n_events; ++i) {
    SwipeEvent e;
    e.event_id = padded("e", i, 7);
    e.user_id = padded("u", gen() % n_users, 5);
    e.product_id = padded("p", gen() % n_products, 4);
    e.direction = (gen() % 100) < 80 ? SwipeDirection::Raid : SwipeDirection::Dislike;
    e.timestamp_ms = static_cast<TimestampMs>(i);
    events.push_back(std::move(e));
  }
  return events;
}

SparseBoolVector random_vector(std::mt19937_64& gen, std::size_t dim, double density) {
  SparseBoolVector v;
  v.dimension = dim;
  for (std::uint32_t i = 0; i < dim; ++i) {
    if ((gen() % 10000) < static_cast<std::uint64_t>(density * 10000)) v.indices.push_back(i);
  }
  return v;
}

void BM_CosineSimilarity(benchmark::State& state) {
  std::mt19937_64 gen(1);
  const auto a = random_vector(gen, static_cast<std::size_t>(state.range(0)), 0.05);
  const auto b = random_vector(gen, static_cast<std::size_t>(state.range(0)), 0.05);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cosine_similarity(a, b));
  }
}
BENCHMARK(BM_CosineSimilarity)->Arg(1000)->Arg(5000)->Arg(20000);

void BM_BuildMatrix(benchmark::State& state) {
  const auto events = random_swipes(2000, 1000, static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_matrix(events));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BuildMatrix)->Arg(10000)->Arg(50000)->Unit(benchmark::kMillisecond);

void BM_NearestNeighbors(benchmark::State& state) {
  const std::size_t n_users = static_cast<std::size_t>(state.range(0));
  const auto events = random_swipes(n_users, 5000, n_users * 50, 3);
  const InteractionMatrix matrix = build_matrix(events);
  std::mt19937_64 gen(4);
  for (auto _ : state) {
    const UserId& target = matrix.users()[gen() % matrix.user_count()];
    benchmark::DoNotOptimize(nearest_neighbors(matrix, NeighborQuery{target, 5, 0.0}));
  }
}
BENCHMARK(BM_NearestNeighbors)->Arg(1000)->Arg(10000)->Unit(benchmark::kMicrosecond);

void BM_Recommend(benchmark::State& state) {
  const auto events = random_swipes(10000, 5000, 500000, 5);
  const InteractionMatrix matrix = build_matrix(events);
  std::mt19937_64 gen(6);
  for (auto _ : state) {
    const UserId& target = matrix.users()[gen() % matrix.user_count()];
    benchmark::DoNotOptimize(recommend(matrix, target, 5));
  }
}
BENCHMARK(BM_Recommend)->Unit(benchmark::kMicrosecond);

void BM_ClusterProducts(benchmark::State& state) {
  std::mt19937_64 gen(7);
  std::vector<ProductRecord> catalogue;
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  for (std::size_t i = 0; i < n; ++i) {
    std::string title;
    const std::size_t len = 10 + gen() % 25;
    for (std::size_t k = 0; k < len; ++k) title.push_back('a' + gen() % 26);
    catalogue.push_back(ProductRecord{padded("p", i, 5), std::move(title), std::nullopt});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(cluster_products(catalogue, 0.85));
  }
}
BENCHMARK(BM_ClusterProducts)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
