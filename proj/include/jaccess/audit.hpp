#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "jaccess/embeddings.hpp"
#include "jaccess/factorization.hpp"
#include "jaccess/recommend.hpp"
#include "jaccess/synth.hpp"
#include "jaccess/types.hpp"

namespace jaccess {

// Unordered recommended-pair counts over an item universe. Keys are global
// item indices with first < second; the map order makes reports stable.
struct PairCensus {
  std::vector<Index> universe;
  std::map<std::pair<Index, Index>, std::int64_t> counts;
  std::int64_t users_audited = 0;
  Index k = 2;

  std::int64_t unique_pairs() const {
    return static_cast<std::int64_t>(counts.size());
  }
  std::int64_t total_appearances() const;
  // unique pairs relative to every pair the universe could form
  double unique_fraction() const;
};

// Census of the trained model: per user, top-k over the universe, counting
// every unordered pair inside the top-k (one pair per user when k = 2).
PairCensus empirical_pair_census(const FactorModel& model,
                                 const ItemSet& universe, Index k = 2);

// Census under an arbitrary per-user recommender (e.g. the oracle).
PairCensus census_from(const std::function<ItemSet(Index)>& recommend_for,
                       Index n_users, const ItemSet& universe, Index k = 2);

struct BinnedMeans {
  std::vector<double> edges;             // bins + 1
  std::vector<double> mean_count;        // never-recommended pairs count as 0
  std::vector<std::int64_t> pair_count;  // pairs falling in each bin
};

// Equal-width bins over the observed pair similarities of the census
// universe; per-bin mean appearance count. `sim_source` must index the same
// global item ids as the census universe.
BinnedMeans similarity_binned_counts(const PairCensus& census,
                                     const EmbeddingSet& sim_source, int bins,
                                     Similarity mode);

struct BinnedFractions {
  std::vector<double> edges;
  std::vector<double> fraction;  // accessible fraction per bin, 0 when empty
  std::vector<std::int64_t> accessible_count;
  std::vector<std::int64_t> pair_count;
};

// Heuristic accessibility of every pair in `subset`, binned by similarity.
// Similarities default to `items`; pass `sim_source` to bin by another
// embedding of the same ids (e.g. ground-truth vectors).
BinnedFractions binned_heuristic_accessibility(
    const EmbeddingSet& items, const ItemSet& subset, int bins, double ridge,
    Similarity mode, const EmbeddingSet* sim_source = nullptr);

// Fraction of item pairs passing the heuristic per unordered topic pair;
// symmetric n_topics x n_topics matrix, entry (t, t') over the pairs with
// one item of each topic.
Matrix topic_pair_matrix(const EmbeddingSet& items,
                         const Eigen::VectorXi& topic_labels, double ridge);

struct MinorityExposure {
  double model_minority_item_fraction = 0.0;
  double oracle_minority_item_fraction = 0.0;
  double model_mixed_pair_fraction = 0.0;
  double oracle_mixed_pair_fraction = 0.0;
  std::int64_t minority_users = 0;
};

// Over minority users only: how much of the recommended top-k comes from the
// minority topic, and how often a recommended pair mixes topics, for the
// trained model and the oracle.
MinorityExposure minority_exposure(const FactorModel& model,
                                   const GroundTruth& truth, Index k = 2);

struct DiversityTable {
  std::vector<double> edges;  // over dot(u_true_0, u_true_1)
  std::vector<double> model_mean_similarity;
  std::vector<double> oracle_mean_similarity;
  std::vector<std::int64_t> user_count;
  double model_overall = 0.0;
  double oracle_overall = 0.0;
};

// Per user: x = similarity of the user's two true vectors, y = true
// similarity of the recommended top-k pair (mean over pairs for k > 2);
// binned means for model and oracle.
DiversityTable user_diversity_table(const GroundTruth& truth,
                                    const FactorModel& model, Index k = 2,
                                    int bins = 10);

// Spearman rank correlation with average ranks on ties.
double spearman_rank_correlation(const std::vector<double>& x,
                                 const std::vector<double>& y);

}  // namespace jaccess
