#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "jaccess/types.hpp"

namespace jaccess {

struct Rating {
  std::int64_t user = 0;
  std::int64_t item = 0;
  double value = 0.0;
};

// (user, item, rating) triples over dense 0-based indices with declared
// bounds. At most one triple per (user, item).
struct RatingDataset {
  std::vector<Rating> triples;
  std::int64_t n_users = 0;
  std::int64_t n_items = 0;

  void validate() const;
};

struct FactorModel {
  Matrix user_factors;  // n_users x d, zero rows for cold users
  Matrix item_factors;  // n_items x d
  bool norm_constrained = false;

  Index dim() const { return user_factors.cols(); }
};

struct AlsOptions {
  Index dim = 16;
  double reg = 0.1;
  int iterations = 20;
  std::uint64_t seed = 0;
  // Project nonzero rows of a factor matrix to the unit sphere after its
  // half-step (both sides), matching unit-norm ground-truth factors.
  bool norm_constraint = false;
};

struct AlsTrace {
  // Regularized objective after every half-step, in execution order
  // (user pass, item pass, user pass, ...). With norm_constraint the values
  // are post-projection, so only the unconstrained run is monotone.
  std::vector<double> objective;
  // Training RMSE at the end of each full iteration.
  std::vector<double> rmse;
};

// Explicit-feedback alternating least squares: per-row ridge regressions
// against the fixed opposite side, uniform(-0.1, 0.1) seeded init, cold
// rows pinned at zero. Deterministic for a fixed seed.
FactorModel train_als(const RatingDataset& data, const AlsOptions& opts,
                      AlsTrace* trace = nullptr);

double rmse(const FactorModel& model, const RatingDataset& data);

// Seeded K-fold cross validation over the grid; returns the regularization
// with the lowest mean held-out RMSE, ties resolved toward the smaller value.
double grid_search_reg(const RatingDataset& data, Index dim,
                       const std::vector<double>& reg_grid, int folds,
                       std::uint64_t seed, int iterations = 10);

// --- ratings files ---------------------------------------------------------

// Dense-index dataset plus the raw file id behind each index.
struct RatingsTable {
  RatingDataset data;
  std::vector<std::string> user_ids;
  std::vector<std::string> item_ids;
};

enum class RatingsFormat { Auto, Csv, MovieLens };

// CSV rows `user,item,rating` or MovieLens `User::Item::Rating::Timestamp`
// (timestamp ignored). Auto picks MovieLens for a `.dat` extension. Raw ids
// map to dense indices sorted numerically when all ids are integers,
// lexicographically otherwise.
RatingsTable load_ratings(const std::filesystem::path& path,
                          RatingsFormat format = RatingsFormat::Auto);

// Ratings whose ids already are dense indices within declared bounds.
RatingDataset load_ratings_indexed(const std::filesystem::path& path,
                                   std::int64_t n_users, std::int64_t n_items);

void save_ratings_csv(const RatingDataset& data,
                      const std::filesystem::path& path);

}  // namespace jaccess
