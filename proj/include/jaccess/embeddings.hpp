#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "jaccess/types.hpp"

namespace jaccess {

// Item identifiers plus their n x d feature vectors, immutable after
// construction. `normalized` asserts each row has unit Euclidean norm
// (within 1e-9); it is set by normalize_rows, never guessed.
class EmbeddingSet {
 public:
  EmbeddingSet(std::vector<std::string> ids, Matrix vectors,
               bool normalized = false);

  Index size() const { return vectors_.rows(); }
  Index dim() const { return vectors_.cols(); }
  bool normalized() const { return normalized_; }
  const std::vector<std::string>& ids() const { return ids_; }
  const std::string& id(Index i) const { return ids_[static_cast<std::size_t>(i)]; }
  const Matrix& vectors() const { return vectors_; }
  Eigen::Ref<const Vector> row(Index i) const { return vectors_.row(i).transpose(); }

 private:
  std::vector<std::string> ids_;
  Matrix vectors_;
  bool normalized_ = false;
};

// One user as an ordered list of m feature vectors (rows); m = 1 is the
// single-vector model.
class UserRep {
 public:
  explicit UserRep(Matrix vectors);
  explicit UserRep(const Vector& single);

  Index count() const { return vectors_.rows(); }
  Index dim() const { return vectors_.cols(); }
  const Matrix& vectors() const { return vectors_; }
  Eigen::Ref<const Vector> vector(Index i) const { return vectors_.row(i).transpose(); }

 private:
  Matrix vectors_;
};

enum class Similarity { Dot, Cosine };

// CSV rows `id,x1,...,xd`, no header, d inferred from the first row.
EmbeddingSet load_embeddings(const std::filesystem::path& path);

// Inverse of load_embeddings; writes 17 significant digits so a reload is
// bit-exact.
void save_embeddings(const EmbeddingSet& set, const std::filesystem::path& path);

// Divides each row by its Euclidean norm; errors on a zero row, naming it.
EmbeddingSet normalize_rows(const EmbeddingSet& set);

double pair_similarity(const EmbeddingSet& set, Index i, Index j,
                       Similarity mode);

}  // namespace jaccess
