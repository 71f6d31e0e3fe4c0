#pragma once

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "jaccess/embeddings.hpp"
#include "jaccess/types.hpp"

namespace jaccess {

// A sorted, duplicate-free set of item indices of size k.
class ItemSet {
 public:
  explicit ItemSet(std::vector<Index> indices) : indices_(std::move(indices)) {
    if (indices_.empty()) throw std::invalid_argument("ItemSet: k >= 1");
    std::sort(indices_.begin(), indices_.end());
    if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end())
      throw std::invalid_argument("ItemSet: duplicate index");
    if (indices_.front() < 0)
      throw std::invalid_argument("ItemSet: negative index");
  }

  Index k() const { return static_cast<Index>(indices_.size()); }
  const std::vector<Index>& indices() const { return indices_; }
  Index operator[](Index i) const { return indices_[static_cast<std::size_t>(i)]; }
  bool contains(Index v) const {
    return std::binary_search(indices_.begin(), indices_.end(), v);
  }
  bool operator==(const ItemSet& o) const { return indices_ == o.indices_; }

 private:
  std::vector<Index> indices_;
};

// Scores of every item under the max-inner-product rule: for each item row
// v_j the score is max_i u_i . v_j over the user's vectors (plain inner
// product when there is a single vector).
template <typename DerivedItems, typename DerivedUsers>
Vector max_inner_scores(const Eigen::MatrixBase<DerivedItems>& item_rows,
                        const Eigen::MatrixBase<DerivedUsers>& user_rows) {
  if (item_rows.cols() != user_rows.cols())
    throw std::invalid_argument("scores: dimension mismatch");
  return (item_rows * user_rows.transpose()).rowwise().maxCoeff();
}

// Single-vector scoring, Eq-style s(j) = u . v_j.
inline Vector score_single(const UserRep& user, const EmbeddingSet& items) {
  if (user.count() != 1)
    throw std::invalid_argument("score_single: user must have exactly one vector");
  return max_inner_scores(items.vectors(), user.vectors());
}

// Multi-vector scoring: elementwise max of the per-vector score vectors.
inline Vector score_multi(const UserRep& user, const EmbeddingSet& items) {
  return max_inner_scores(items.vectors(), user.vectors());
}

// The k indices with the largest scores; ties broken toward the smaller
// index so audits are reproducible.
inline ItemSet top_k(const Vector& scores, Index k) {
  const Index n = scores.size();
  if (k < 1 || k > n) throw std::invalid_argument("top_k: k out of range");
  if (!scores.allFinite()) throw DataError("top_k: non-finite score");
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::partial_sort(order.begin(), order.begin() + k, order.end(),
                    [&](Index a, Index b) {
                      if (scores(a) != scores(b)) return scores(a) > scores(b);
                      return a < b;
                    });
  order.resize(static_cast<std::size_t>(k));
  return ItemSet(std::move(order));
}

}  // namespace jaccess
