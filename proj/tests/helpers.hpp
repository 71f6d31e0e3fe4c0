#pragma once

#include <random>
#include <vector>

#include "jaccess/embeddings.hpp"
#include "jaccess/recommend.hpp"
#include "jaccess/types.hpp"

namespace testutil {

using jaccess::Index;
using jaccess::Matrix;
using jaccess::Vector;

inline jaccess::EmbeddingSet make_items(
    const std::vector<std::vector<double>>& rows, bool normalized = false) {
  const auto n = static_cast<Index>(rows.size());
  const auto d = static_cast<Index>(rows.front().size());
  Matrix m(n, d);
  std::vector<std::string> ids;
  for (Index i = 0; i < n; ++i) {
    ids.push_back("item" + std::to_string(i));
    for (Index j = 0; j < d; ++j)
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return jaccess::EmbeddingSet(std::move(ids), std::move(m), normalized);
}

// The four-quadrant 2-D demo set whose pairs {0,2} and {1,3} are never the
// top two together (pair sums (0,6), (-1,3), (5,1), (-5,1), (1,-1), (0,-4)).
inline jaccess::EmbeddingSet quad4_items() {
  return make_items({{2, 4}, {-2, 2}, {-3, -1}, {3, -3}});
}

inline Matrix random_matrix(Index rows, Index cols, std::mt19937_64& eng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = gauss(eng);
  return m;
}

inline Matrix random_unit_rows(Index rows, Index cols, std::mt19937_64& eng) {
  Matrix m = random_matrix(rows, cols, eng);
  for (Index i = 0; i < rows; ++i) m.row(i) /= m.row(i).norm();
  return m;
}

inline jaccess::EmbeddingSet random_items(Index n, Index d,
                                          std::mt19937_64& eng,
                                          bool unit = false) {
  Matrix m = unit ? random_unit_rows(n, d, eng) : random_matrix(n, d, eng);
  std::vector<std::string> ids;
  for (Index i = 0; i < n; ++i) ids.push_back("r" + std::to_string(i));
  return jaccess::EmbeddingSet(std::move(ids), std::move(m), unit);
}

// Independent feasibility oracle for 2-column systems: a 1-degree sweep of
// unit directions. Returns the best min-row response seen.
inline double sweep_best_margin_2d(const Matrix& A) {
  double best = -std::numeric_limits<double>::infinity();
  for (int deg = 0; deg < 360; ++deg) {
    const double theta = deg * M_PI / 180.0;
    Vector u(2);
    u << std::cos(theta), std::sin(theta);
    best = std::max(best, (A * u).minCoeff());
  }
  return best;
}

// All size-k index subsets of [0, n).
inline std::vector<std::vector<Index>> all_subsets(Index n, Index k) {
  std::vector<std::vector<Index>> out;
  std::vector<Index> comb(static_cast<std::size_t>(k));
  std::iota(comb.begin(), comb.end(), Index{0});
  while (true) {
    out.push_back(comb);
    Index pos = k - 1;
    while (pos >= 0 && comb[static_cast<std::size_t>(pos)] == n - k + pos) --pos;
    if (pos < 0) break;
    ++comb[static_cast<std::size_t>(pos)];
    for (Index q = pos + 1; q < k; ++q)
      comb[static_cast<std::size_t>(q)] =
          comb[static_cast<std::size_t>(q - 1)] + 1;
  }
  return out;
}

}  // namespace testutil
