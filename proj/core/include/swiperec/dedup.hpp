#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>

#include "swiperec/types.hpp"

namespace swiperec {

struct ProductRecord {
  ProductId product_id;
  std::string title;
  std::optional<std::string> referral_url;

  friend bool operator==(const ProductRecord&, const ProductRecord&) = default;
};

/// product_id -> canonical product_id for near-duplicate title clusters.
/// The mapping is idempotent, every canonical id maps to itself, and ids
/// absent from the mapping are their own canonical id.
class ProductClusterMap {
 public:
  ProductClusterMap() = default;
  ProductClusterMap(std::unordered_map<ProductId, ProductId> mapping, double threshold);

  const ProductId& canonical(const ProductId& id) const;
  bool contains(const ProductId& id) const { return mapping_.count(id) != 0; }

  /// Number of mapped product ids.
  std::size_t size() const { return mapping_.size(); }
  /// Number of distinct canonical ids among mapped products.
  std::size_t cluster_count() const;
  double threshold() const { return threshold_; }
  const std::unordered_map<ProductId, ProductId>& mapping() const { return mapping_; }

  /// Two-column mapping file (product_id <TAB> canonical_id), one pair per
  /// line, sorted by product_id, with a '#' header carrying the threshold.
  void save(const std::filesystem::path& path) const;
  static ProductClusterMap load(const std::filesystem::path& path);

 private:
  std::unordered_map<ProductId, ProductId> mapping_;
  double threshold_ = 0.0;
};

/// Case-folds (ASCII), trims, and collapses internal whitespace runs to a
/// single space. Throws Error(Validation) when the result is empty.
std::string normalize_title(std::string_view title);

/// Unit-cost Levenshtein distance.
std::size_t edit_distance(std::string_view a, std::string_view b);

/// 1 - editdistance(a, b) / max(|a|, |b|); both inputs are expected to be
/// normalized. Two empty strings compare equal (1).
double title_similarity(std::string_view a, std::string_view b);

/// Single-link clustering of products whose normalized titles are strictly
/// more than `threshold` similar. Canonical id of each cluster is the
/// lexicographically smallest member id. The returned map carries one entry
/// per input product (identity entries included).
ProductClusterMap cluster_products(std::span<const ProductRecord> products,
                                   double threshold = 0.85);

}  // namespace swiperec
