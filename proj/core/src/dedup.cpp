#include "swiperec/dedup.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <numeric>
#include <vector>

#include "swiperec/error.hpp"

namespace swiperec {

ProductClusterMap::ProductClusterMap(std::unordered_map<ProductId, ProductId> mapping,
                                     double threshold)
    : mapping_(std::move(mapping)), threshold_(threshold) {
  for (const auto& [id, canon] : mapping_) {
    auto it = mapping_.find(canon);
    if (it == mapping_.end() || it->second != canon) {
      throw Error(ErrorKind::Validation,
                  "cluster map not idempotent: canonical id '" + canon + "' does not map to itself");
    }
  }
}

const ProductId& ProductClusterMap::canonical(const ProductId& id) const {
  auto it = mapping_.find(id);
  return it == mapping_.end() ? id : it->second;
}

std::size_t ProductClusterMap::cluster_count() const {
  std::size_t n = 0;
  for (const auto& [id, canon] : mapping_) {
    if (id == canon) ++n;
  }
  return n;
}

void ProductClusterMap::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw Error(ErrorKind::Store, "cannot write cluster map to " + path.string());
  }
  char header[64];
  std::snprintf(header, sizeof header, "# swiperec-cluster-map threshold=%.17g\n", threshold_);
  out << header;
  std::map<ProductId, ProductId> ordered(mapping_.begin(), mapping_.end());
  for (const auto& [id, canon] : ordered) {
    out << id << '\t' << canon << '\n';
  }
  if (!out.flush()) {
    throw Error(ErrorKind::Store, "failed writing cluster map to " + path.string());
  }
}

ProductClusterMap ProductClusterMap::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::Store, "cannot read cluster map from " + path.string());
  }
  double threshold = 0.0;
  std::unordered_map<ProductId, ProductId> mapping;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("threshold=");
      if (pos != std::string::npos) {
        const char* first = line.data() + pos + 10;
        std::from_chars(first, line.data() + line.size(), threshold);
      }
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size()) {
      throw Error(ErrorKind::Validation,
                  "bad cluster map line " + std::to_string(line_no) + " in " + path.string());
    }
    mapping.emplace(line.substr(0, tab), line.substr(tab + 1));
  }
  return ProductClusterMap(std::move(mapping), threshold);
}

std::string normalize_title(std::string_view title) {
  std::string out;
  out.reserve(title.size());
  bool pending_space = false;
  for (char c : title) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (out.empty()) {
    throw Error(ErrorKind::Validation, "title is empty after normalization");
  }
  return out;
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  if (a.size() > b.size()) std::swap(a, b);
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  if (n == 0) return m;

  std::vector<std::size_t> row(n + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t j = 1; j <= m; ++j) {
    std::size_t diag = row[0];
    row[0] = j;
    for (std::size_t i = 1; i <= n; ++i) {
      const std::size_t sub = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
      diag = row[i];
      row[i] = std::min({sub, row[i] + 1, row[i - 1] + 1});
    }
  }
  return row[n];
}

double title_similarity(std::string_view a, std::string_view b) {
  const std::size_t max_len = std::max(a.size(), b.size());
  if (max_len == 0) return 1.0;
  return 1.0 - static_cast<double>(edit_distance(a, b)) / static_cast<double>(max_len);
}

namespace {

// Edit distance when it is <= limit, nullopt otherwise. Band plus row-minimum
// early exit; cells outside the |i-j| <= limit band cannot reach the limit.
std::optional<std::size_t> edit_distance_within(std::string_view a, std::string_view b,
                                                std::size_t limit) {
  if (a.size() > b.size()) std::swap(a, b);
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  if (m - n > limit) return std::nullopt;
  if (n == 0) return m;

  const std::size_t inf = limit + 1;
  std::vector<std::size_t> prev(m + 1, inf);
  std::vector<std::size_t> cur(m + 1, inf);
  for (std::size_t j = 0; j <= std::min(m, limit); ++j) prev[j] = j;

  for (std::size_t i = 1; i <= n; ++i) {
    const std::size_t jlo = i > limit ? i - limit : 1;
    const std::size_t jhi = std::min(m, i + limit);
    std::fill(cur.begin(), cur.end(), inf);
    if (jlo == 1 && i <= limit) cur[0] = i;
    std::size_t row_min = inf;
    for (std::size_t j = jlo; j <= jhi; ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      const std::size_t del = prev[j] + 1;
      const std::size_t ins = cur[j - 1] + 1;
      cur[j] = std::min({sub, del, ins, inf});
      row_min = std::min(row_min, cur[j]);
    }
    if (row_min > limit) return std::nullopt;
    prev.swap(cur);
  }
  return prev[m] <= limit ? std::optional<std::size_t>(prev[m]) : std::nullopt;
}

struct DisjointSet {
  std::vector<std::size_t> parent;
  std::vector<std::size_t> rank;

  explicit DisjointSet(std::size_t n) : parent(n), rank(n, 0) {
    std::iota(parent.begin(), parent.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank[a] < rank[b]) std::swap(a, b);
    parent[b] = a;
    if (rank[a] == rank[b]) ++rank[a];
  }
};

}  // namespace

ProductClusterMap cluster_products(std::span<const ProductRecord> products, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw Error(ErrorKind::Validation, "cluster threshold must be in (0, 1]");
  }

  const std::size_t n = products.size();
  std::vector<std::string> titles(n);
  {
    std::unordered_map<ProductId, std::size_t> seen;
    seen.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (!seen.emplace(products[i].product_id, i).second) {
        throw Error(ErrorKind::Validation,
                    "duplicate product id '" + products[i].product_id + "' in catalogue");
      }
      try {
        titles[i] = normalize_title(products[i].title);
      } catch (const Error&) {
        throw Error(ErrorKind::Validation,
                    "product '" + products[i].product_id + "' has an empty title");
      }
    }
  }

  // Candidate generation: sort by normalized length so the length-difference
  // prefilter becomes a sliding window (editdistance >= length difference, so
  // a pair whose lengths alone force similarity <= threshold is never a
  // qualifying pair). The first-character block is applied only where a
  // one-edit difference already disqualifies the pair (short titles); for
  // longer titles a differing first character cannot rule the pair out.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return titles[a].size() < titles[b].size();
  });

  DisjointSet dsu(n);
  std::size_t lo = 0;
  for (std::size_t oj = 0; oj < n; ++oj) {
    const std::size_t j = order[oj];
    const std::size_t len_j = titles[j].size();
    // Any edit distance above this band keeps similarity at or below the
    // threshold with margin to spare, so skipping is exact.
    const std::size_t band =
        static_cast<std::size_t>((1.0 - threshold) * static_cast<double>(len_j)) + 1;
    while (lo < oj && len_j - titles[order[lo]].size() > band) ++lo;
    const bool first_char_decides =
        (1.0 - threshold) * static_cast<double>(len_j) < 0.999999999;
    for (std::size_t oi = lo; oi < oj; ++oi) {
      const std::size_t i = order[oi];
      if (dsu.find(i) == dsu.find(j)) continue;
      if (first_char_decides && titles[i][0] != titles[j][0]) continue;
      const auto dist = edit_distance_within(titles[i], titles[j], band);
      if (!dist) continue;
      const double sim =
          1.0 - static_cast<double>(*dist) / static_cast<double>(len_j);
      if (sim > threshold) dsu.unite(i, j);
    }
  }

  // Canonical id: lexicographically smallest member of each cluster.
  std::unordered_map<std::size_t, const ProductId*> canon_of_root;
  canon_of_root.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = dsu.find(i);
    auto [it, inserted] = canon_of_root.emplace(root, &products[i].product_id);
    if (!inserted && products[i].product_id < *it->second) {
      it->second = &products[i].product_id;
    }
  }

  std::unordered_map<ProductId, ProductId> mapping;
  mapping.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    mapping.emplace(products[i].product_id, *canon_of_root.at(dsu.find(i)));
  }
  return ProductClusterMap(std::move(mapping), threshold);
}

}  // namespace swiperec
