#include "jaccess/audit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "jaccess/accessibility.hpp"
#include "jaccess/parallel.hpp"

namespace jaccess {

namespace {

// Bin layout over an observed value range; a degenerate range puts
// everything into bin 0.
struct BinGrid {
  double lo = 0.0;
  double width = 0.0;
  int bins = 1;

  static BinGrid over(const std::vector<double>& values, int bins) {
    if (bins < 1) throw std::invalid_argument("bins >= 1 required");
    if (values.empty()) throw std::invalid_argument("no values to bin");
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    BinGrid g;
    g.lo = *mn;
    g.bins = bins;
    g.width = (*mx - *mn) / static_cast<double>(bins);
    return g;
  }

  int index(double v) const {
    if (width <= 0.0) return 0;
    const int b = static_cast<int>(std::floor((v - lo) / width));
    return std::clamp(b, 0, bins - 1);
  }

  std::vector<double> edges() const {
    std::vector<double> e(static_cast<std::size_t>(bins) + 1);
    for (int b = 0; b <= bins; ++b) e[static_cast<std::size_t>(b)] = lo + width * b;
    return e;
  }
};

void check_universe(const ItemSet& universe, Index n_items, Index k) {
  if (universe.indices().back() >= n_items)
    throw std::invalid_argument("universe index out of range");
  if (k < 1 || k > universe.k())
    throw std::invalid_argument("universe smaller than k");
}

ItemSet model_top_k(const FactorModel& model, Index user,
                    const ItemSet& universe, Index k, const Matrix& sub) {
  const Vector scores = sub * model.user_factors.row(user).transpose();
  const ItemSet local = top_k(scores, k);
  std::vector<Index> global;
  global.reserve(static_cast<std::size_t>(k));
  for (Index q : local.indices()) global.push_back(universe[q]);
  return ItemSet(std::move(global));
}

double mean_pair_similarity(const EmbeddingSet& items, const ItemSet& s,
                            Similarity mode) {
  double total = 0.0;
  std::int64_t pairs = 0;
  for (Index a = 0; a < s.k(); ++a)
    for (Index b = a + 1; b < s.k(); ++b) {
      total += pair_similarity(items, s[a], s[b], mode);
      ++pairs;
    }
  return pairs > 0 ? total / static_cast<double>(pairs) : 0.0;
}

std::vector<double> ranks_with_ties(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> rank(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t q = i; q <= j; ++q) rank[order[q]] = avg;
    i = j + 1;
  }
  return rank;
}

}  // namespace

std::int64_t PairCensus::total_appearances() const {
  std::int64_t total = 0;
  for (const auto& [key, count] : counts) total += count;
  return total;
}

double PairCensus::unique_fraction() const {
  const auto n = static_cast<double>(universe.size());
  const double all_pairs = n * (n - 1.0) / 2.0;
  return all_pairs > 0 ? static_cast<double>(unique_pairs()) / all_pairs : 0.0;
}

PairCensus census_from(const std::function<ItemSet(Index)>& recommend_for,
                       Index n_users, const ItemSet& universe, Index k) {
  if (n_users < 1) throw std::invalid_argument("census: n_users >= 1");
  if (k < 1 || k > universe.k())
    throw std::invalid_argument("census: universe smaller than k");
  PairCensus census;
  census.universe = universe.indices();
  census.k = k;
  census.users_audited = n_users;

  std::vector<ItemSet> tops;
  tops.reserve(static_cast<std::size_t>(n_users));
  for (Index u = 0; u < n_users; ++u) tops.push_back(recommend_for(u));

  for (const ItemSet& s : tops)
    for (Index a = 0; a < s.k(); ++a)
      for (Index b = a + 1; b < s.k(); ++b)
        ++census.counts[{s[a], s[b]}];
  return census;
}

PairCensus empirical_pair_census(const FactorModel& model,
                                 const ItemSet& universe, Index k) {
  check_universe(universe, model.item_factors.rows(), k);
  Matrix sub(universe.k(), model.dim());
  for (Index q = 0; q < universe.k(); ++q)
    sub.row(q) = model.item_factors.row(universe[q]);
  return census_from(
      [&](Index u) { return model_top_k(model, u, universe, k, sub); },
      model.user_factors.rows(), universe, k);
}

BinnedMeans similarity_binned_counts(const PairCensus& census,
                                     const EmbeddingSet& sim_source, int bins,
                                     Similarity mode) {
  const auto& uni = census.universe;
  if (uni.empty() || uni.back() >= sim_source.size())
    throw std::invalid_argument("similarity_binned_counts: universe/source mismatch");

  std::vector<double> sims;
  sims.reserve(uni.size() * (uni.size() - 1) / 2);
  for (std::size_t a = 0; a < uni.size(); ++a)
    for (std::size_t b = a + 1; b < uni.size(); ++b)
      sims.push_back(pair_similarity(sim_source, uni[a], uni[b], mode));

  const BinGrid grid = BinGrid::over(sims, bins);
  BinnedMeans out;
  out.edges = grid.edges();
  out.mean_count.assign(static_cast<std::size_t>(bins), 0.0);
  out.pair_count.assign(static_cast<std::size_t>(bins), 0);

  std::size_t q = 0;
  for (std::size_t a = 0; a < uni.size(); ++a)
    for (std::size_t b = a + 1; b < uni.size(); ++b, ++q) {
      const int bin = grid.index(sims[q]);
      const auto it = census.counts.find({uni[a], uni[b]});
      const std::int64_t count = it == census.counts.end() ? 0 : it->second;
      out.mean_count[static_cast<std::size_t>(bin)] += static_cast<double>(count);
      ++out.pair_count[static_cast<std::size_t>(bin)];
    }
  for (int b = 0; b < bins; ++b)
    if (out.pair_count[static_cast<std::size_t>(b)] > 0)
      out.mean_count[static_cast<std::size_t>(b)] /=
          static_cast<double>(out.pair_count[static_cast<std::size_t>(b)]);
  return out;
}

BinnedFractions binned_heuristic_accessibility(const EmbeddingSet& items,
                                               const ItemSet& subset, int bins,
                                               double ridge, Similarity mode,
                                               const EmbeddingSet* sim_source) {
  if (subset.indices().back() >= items.size())
    throw std::invalid_argument("binned_heuristic_accessibility: subset range");
  if (subset.k() < 2)
    throw std::invalid_argument("binned_heuristic_accessibility: need >= 2 items");
  const EmbeddingSet& sims_from = sim_source ? *sim_source : items;
  if (sims_from.size() < items.size())
    throw std::invalid_argument("binned_heuristic_accessibility: sim source size");

  std::vector<std::pair<Index, Index>> pairs;
  pairs.reserve(static_cast<std::size_t>(subset.k()) * (subset.k() - 1) / 2);
  for (Index a = 0; a < subset.k(); ++a)
    for (Index b = a + 1; b < subset.k(); ++b)
      pairs.emplace_back(subset[a], subset[b]);

  const HeuristicSolver solver(items, ridge);
  std::vector<std::uint8_t> ok(pairs.size(), 0);
  parallel_for(static_cast<std::int64_t>(pairs.size()), [&](std::int64_t q) {
    const auto& [a, b] = pairs[static_cast<std::size_t>(q)];
    ok[static_cast<std::size_t>(q)] =
        solver.accessible(ItemSet({a, b})).accessible ? 1 : 0;
  });

  std::vector<double> sims(pairs.size());
  for (std::size_t q = 0; q < pairs.size(); ++q)
    sims[q] = pair_similarity(sims_from, pairs[q].first, pairs[q].second, mode);

  const BinGrid grid = BinGrid::over(sims, bins);
  BinnedFractions out;
  out.edges = grid.edges();
  out.fraction.assign(static_cast<std::size_t>(bins), 0.0);
  out.accessible_count.assign(static_cast<std::size_t>(bins), 0);
  out.pair_count.assign(static_cast<std::size_t>(bins), 0);
  for (std::size_t q = 0; q < pairs.size(); ++q) {
    const auto bin = static_cast<std::size_t>(grid.index(sims[q]));
    out.accessible_count[bin] += ok[q];
    ++out.pair_count[bin];
  }
  for (int b = 0; b < bins; ++b) {
    const auto bi = static_cast<std::size_t>(b);
    if (out.pair_count[bi] > 0)
      out.fraction[bi] = static_cast<double>(out.accessible_count[bi]) /
                         static_cast<double>(out.pair_count[bi]);
  }
  return out;
}

Matrix topic_pair_matrix(const EmbeddingSet& items,
                         const Eigen::VectorXi& topic_labels, double ridge) {
  if (topic_labels.size() != items.size())
    throw std::invalid_argument("topic_pair_matrix: labels size mismatch");
  const int n_topics = topic_labels.maxCoeff() + 1;
  if (topic_labels.minCoeff() < 0)
    throw std::invalid_argument("topic_pair_matrix: negative label");
  std::vector<std::int64_t> per_topic(static_cast<std::size_t>(n_topics), 0);
  for (Index i = 0; i < topic_labels.size(); ++i)
    ++per_topic[static_cast<std::size_t>(topic_labels(i))];
  for (int t = 0; t < n_topics; ++t)
    if (per_topic[static_cast<std::size_t>(t)] == 0)
      throw DataError("topic_pair_matrix: topic " + std::to_string(t) +
                      " has zero items");

  std::vector<std::pair<Index, Index>> pairs;
  pairs.reserve(static_cast<std::size_t>(items.size()) * (items.size() - 1) / 2);
  for (Index a = 0; a < items.size(); ++a)
    for (Index b = a + 1; b < items.size(); ++b) pairs.emplace_back(a, b);

  const HeuristicSolver solver(items, ridge);
  std::vector<std::uint8_t> ok(pairs.size(), 0);
  parallel_for(static_cast<std::int64_t>(pairs.size()), [&](std::int64_t q) {
    const auto& [a, b] = pairs[static_cast<std::size_t>(q)];
    ok[static_cast<std::size_t>(q)] =
        solver.accessible(ItemSet({a, b})).accessible ? 1 : 0;
  });

  Matrix accessible = Matrix::Zero(n_topics, n_topics);
  Matrix total = Matrix::Zero(n_topics, n_topics);
  for (std::size_t q = 0; q < pairs.size(); ++q) {
    const int ta = topic_labels(pairs[q].first);
    const int tb = topic_labels(pairs[q].second);
    accessible(ta, tb) += ok[q];
    total(ta, tb) += 1.0;
    if (ta != tb) {
      accessible(tb, ta) += ok[q];
      total(tb, ta) += 1.0;
    }
  }
  Matrix fraction = Matrix::Zero(n_topics, n_topics);
  for (int a = 0; a < n_topics; ++a)
    for (int b = 0; b < n_topics; ++b)
      if (total(a, b) > 0) fraction(a, b) = accessible(a, b) / total(a, b);
  return fraction;
}

MinorityExposure minority_exposure(const FactorModel& model,
                                   const GroundTruth& truth, Index k) {
  if (!truth.topics())
    throw std::invalid_argument("minority_exposure: topic world required");
  if (model.user_factors.rows() != truth.n_users() ||
      model.item_factors.rows() != truth.items().size())
    throw std::invalid_argument("minority_exposure: model/truth shape mismatch");
  const TopicInfo& topics = *truth.topics();

  std::vector<Index> uni(static_cast<std::size_t>(truth.items().size()));
  std::iota(uni.begin(), uni.end(), Index{0});
  const ItemSet universe(std::move(uni));
  Matrix sub = model.item_factors;

  MinorityExposure out;
  std::int64_t minority_items_model = 0, minority_items_oracle = 0;
  std::int64_t mixed_model = 0, mixed_oracle = 0;
  std::int64_t pair_slots = 0, item_slots = 0;

  for (Index u = 0; u < truth.n_users(); ++u) {
    if (!topics.user_minority[static_cast<std::size_t>(u)]) continue;
    ++out.minority_users;

    const ItemSet rec_model = model_top_k(model, u, universe, k, sub);
    const ItemSet rec_oracle = oracle_top_k(truth, u, universe, k);

    for (Index q = 0; q < k; ++q) {
      ++item_slots;
      minority_items_model +=
          topics.item_topic(rec_model[q]) == topics.minority_topic ? 1 : 0;
      minority_items_oracle +=
          topics.item_topic(rec_oracle[q]) == topics.minority_topic ? 1 : 0;
    }
    for (Index a = 0; a < k; ++a)
      for (Index b = a + 1; b < k; ++b) {
        ++pair_slots;
        mixed_model += topics.item_topic(rec_model[a]) !=
                               topics.item_topic(rec_model[b])
                           ? 1
                           : 0;
        mixed_oracle += topics.item_topic(rec_oracle[a]) !=
                                topics.item_topic(rec_oracle[b])
                            ? 1
                            : 0;
      }
  }
  if (out.minority_users == 0)
    throw DataError("minority_exposure: no minority users");

  out.model_minority_item_fraction =
      static_cast<double>(minority_items_model) / static_cast<double>(item_slots);
  out.oracle_minority_item_fraction =
      static_cast<double>(minority_items_oracle) / static_cast<double>(item_slots);
  out.model_mixed_pair_fraction =
      static_cast<double>(mixed_model) / static_cast<double>(pair_slots);
  out.oracle_mixed_pair_fraction =
      static_cast<double>(mixed_oracle) / static_cast<double>(pair_slots);
  return out;
}

DiversityTable user_diversity_table(const GroundTruth& truth,
                                    const FactorModel& model, Index k,
                                    int bins) {
  if (model.user_factors.rows() != truth.n_users() ||
      model.item_factors.rows() != truth.items().size())
    throw std::invalid_argument("user_diversity_table: model/truth shape mismatch");
  if (k < 2) throw std::invalid_argument("user_diversity_table: k >= 2");

  std::vector<Index> uni(static_cast<std::size_t>(truth.items().size()));
  std::iota(uni.begin(), uni.end(), Index{0});
  const ItemSet universe(std::move(uni));
  const Matrix& sub = model.item_factors;

  const Index n_users = truth.n_users();
  std::vector<double> self_sim(static_cast<std::size_t>(n_users));
  std::vector<double> model_sim(static_cast<std::size_t>(n_users));
  std::vector<double> oracle_sim(static_cast<std::size_t>(n_users));
  for (Index u = 0; u < n_users; ++u) {
    self_sim[static_cast<std::size_t>(u)] =
        truth.user_vectors().row(2 * u).dot(truth.user_vectors().row(2 * u + 1));
    model_sim[static_cast<std::size_t>(u)] = mean_pair_similarity(
        truth.items(), model_top_k(model, u, universe, k, sub), Similarity::Dot);
    oracle_sim[static_cast<std::size_t>(u)] = mean_pair_similarity(
        truth.items(), oracle_top_k(truth, u, universe, k), Similarity::Dot);
  }

  const BinGrid grid = BinGrid::over(self_sim, bins);
  DiversityTable out;
  out.edges = grid.edges();
  out.model_mean_similarity.assign(static_cast<std::size_t>(bins), 0.0);
  out.oracle_mean_similarity.assign(static_cast<std::size_t>(bins), 0.0);
  out.user_count.assign(static_cast<std::size_t>(bins), 0);
  for (Index u = 0; u < n_users; ++u) {
    const auto b = static_cast<std::size_t>(grid.index(self_sim[static_cast<std::size_t>(u)]));
    out.model_mean_similarity[b] += model_sim[static_cast<std::size_t>(u)];
    out.oracle_mean_similarity[b] += oracle_sim[static_cast<std::size_t>(u)];
    ++out.user_count[b];
    out.model_overall += model_sim[static_cast<std::size_t>(u)];
    out.oracle_overall += oracle_sim[static_cast<std::size_t>(u)];
  }
  for (int b = 0; b < bins; ++b) {
    const auto bi = static_cast<std::size_t>(b);
    if (out.user_count[bi] > 0) {
      out.model_mean_similarity[bi] /= static_cast<double>(out.user_count[bi]);
      out.oracle_mean_similarity[bi] /= static_cast<double>(out.user_count[bi]);
    }
  }
  out.model_overall /= static_cast<double>(n_users);
  out.oracle_overall /= static_cast<double>(n_users);
  return out;
}

double spearman_rank_correlation(const std::vector<double>& x,
                                 const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("spearman: need two same-length series");
  const std::vector<double> rx = ranks_with_ties(x);
  const std::vector<double> ry = ranks_with_ties(y);
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0 || syy == 0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace jaccess
