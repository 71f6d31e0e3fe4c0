#include "jaccess/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include <json.hpp>

#include "jaccess/rng.hpp"

namespace jaccess {

namespace {

constexpr std::int64_t kMaxPairUniverse = 100'000'000;  // desk-scale guard

Matrix gaussian_matrix(Index rows, Index cols, std::mt19937_64& eng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = gauss(eng);
  return m;
}

void normalize_rows_inplace(Matrix& m) {
  for (Index i = 0; i < m.rows(); ++i) {
    const double norm = m.row(i).norm();
    if (norm < 1e-300) throw NumericsError("sampled a zero vector");
    m.row(i) /= norm;
  }
}

std::vector<std::string> index_ids(Index n) {
  std::vector<std::string> ids;
  ids.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) ids.push_back(std::to_string(i));
  return ids;
}

// Without-replacement pair sample: shuffled-index prefix, then sorted so the
// emitted ratings are ordered by (user, item).
std::vector<std::int64_t> sample_pairs(std::int64_t total, std::int64_t count,
                                       std::mt19937_64& eng) {
  std::vector<std::int64_t> all(static_cast<std::size_t>(total));
  std::iota(all.begin(), all.end(), std::int64_t{0});
  std::shuffle(all.begin(), all.end(), eng);
  all.resize(static_cast<std::size_t>(count));
  std::sort(all.begin(), all.end());
  return all;
}

RatingDataset sample_ratings(const Matrix& user_vectors, const Matrix& items,
                             double fraction, double noise_sd,
                             std::uint64_t seed) {
  const std::int64_t n_users = user_vectors.rows() / 2;
  const std::int64_t n_items = items.rows();
  const std::int64_t total = n_users * n_items;
  if (total > kMaxPairUniverse)
    throw DataError("rating sample: user x item universe too large for the "
                    "desk-scale generator");
  const std::int64_t count =
      std::llround(fraction * static_cast<double>(total));
  if (count < 1)
    throw DataError("rating sample: rating_fraction x users x items < 1");

  auto pair_eng = rng_stream(seed, "pair-sample");
  const std::vector<std::int64_t> pairs = sample_pairs(total, count, pair_eng);

  auto noise_eng = rng_stream(seed, "rating-noise");
  std::normal_distribution<double> noise(0.0, noise_sd > 0 ? noise_sd : 1.0);

  RatingDataset data{{}, n_users, n_items};
  data.triples.reserve(pairs.size());
  for (const std::int64_t p : pairs) {
    const std::int64_t u = p / n_items;
    const std::int64_t i = p % n_items;
    const double base =
        std::max(user_vectors.row(2 * u).dot(items.row(i)),
                 user_vectors.row(2 * u + 1).dot(items.row(i)));
    const double eps = noise_sd > 0 ? noise(noise_eng) : 0.0;
    data.triples.push_back({u, i, base + eps});
  }
  return data;
}

}  // namespace

GroundTruth::GroundTruth(EmbeddingSet items, Matrix user_vectors,
                         std::optional<TopicInfo> topics)
    : items_(std::move(items)), user_vectors_(std::move(user_vectors)),
      topics_(std::move(topics)) {
  if (!items_.normalized())
    throw std::invalid_argument("GroundTruth: items must be normalized");
  if (user_vectors_.rows() < 2 || user_vectors_.rows() % 2 != 0)
    throw std::invalid_argument("GroundTruth: two vectors per user required");
  if (user_vectors_.cols() != items_.dim())
    throw std::invalid_argument("GroundTruth: dimension mismatch");
  for (Index i = 0; i < user_vectors_.rows(); ++i)
    if (std::abs(user_vectors_.row(i).norm() - 1.0) > 1e-9)
      throw std::invalid_argument("GroundTruth: user vector not unit norm");
  if (topics_) {
    if (topics_->item_topic.size() != items_.size())
      throw std::invalid_argument("GroundTruth: topic labels size mismatch");
    if (static_cast<Index>(topics_->user_minority.size()) != n_users())
      throw std::invalid_argument("GroundTruth: user tags size mismatch");
  }
}

UserRep GroundTruth::user(Index i) const {
  if (i < 0 || i >= n_users())
    throw std::invalid_argument("GroundTruth: user index out of range");
  return UserRep(Matrix(user_vectors_.middleRows(2 * i, 2)));
}

std::pair<GroundTruth, RatingDataset> gen_sphere_world(
    const SphereWorldParams& p) {
  if (p.n_items < 1 || p.n_users < 1 || p.dim < 1)
    throw std::invalid_argument("gen_sphere_world: positive sizes required");
  if (!(p.rating_fraction > 0.0) || p.rating_fraction > 1.0)
    throw std::invalid_argument("gen_sphere_world: rating_fraction in (0,1]");
  if (p.noise_sd < 0)
    throw std::invalid_argument("gen_sphere_world: noise_sd >= 0");

  auto item_eng = rng_stream(p.seed, "sphere-items");
  Matrix item_vecs = gaussian_matrix(p.n_items, p.dim, item_eng);
  normalize_rows_inplace(item_vecs);

  auto user_eng = rng_stream(p.seed, "sphere-users");
  Matrix user_vecs = gaussian_matrix(2 * p.n_users, p.dim, user_eng);
  normalize_rows_inplace(user_vecs);

  RatingDataset ratings = sample_ratings(user_vecs, item_vecs,
                                         p.rating_fraction, p.noise_sd, p.seed);
  EmbeddingSet items(index_ids(p.n_items), std::move(item_vecs),
                     /*normalized=*/true);
  return {GroundTruth(std::move(items), std::move(user_vecs)),
          std::move(ratings)};
}

std::pair<GroundTruth, RatingDataset> gen_topic_world(
    const TopicWorldParams& p) {
  if (p.n_items < 1 || p.n_users < 1)
    throw std::invalid_argument("gen_topic_world: positive sizes required");
  if (p.n_topics < 2)
    throw std::invalid_argument("gen_topic_world: n_topics >= 2");
  if (p.dim < 20)
    throw std::invalid_argument(
        "gen_topic_world: d >= 20 required by the sign construction");
  if (p.minority_user_fraction < 0.0 || p.minority_user_fraction > 1.0)
    throw std::invalid_argument("gen_topic_world: minority fraction in [0,1]");
  if (p.topic_noise_sd < 0 || p.rating_noise_sd < 0)
    throw std::invalid_argument("gen_topic_world: noise sd >= 0");
  if (!(p.rating_fraction > 0.0) || p.rating_fraction > 1.0)
    throw std::invalid_argument("gen_topic_world: rating_fraction in (0,1]");

  const int minority = p.n_topics - 1;
  constexpr Index kSignDims = 20;

  auto anchor_eng = rng_stream(p.seed, "topic-anchors");
  Matrix anchors = gaussian_matrix(p.n_topics, p.dim, anchor_eng);
  for (int t = 0; t < p.n_topics; ++t)
    for (Index j = 0; j < kSignDims; ++j) {
      const double mag = std::abs(anchors(t, j));
      anchors(t, j) = t == minority ? -mag : mag;
    }
  normalize_rows_inplace(anchors);

  TopicInfo info;
  info.minority_topic = minority;
  info.anchors = anchors;

  auto item_eng = rng_stream(p.seed, "topic-items");
  std::uniform_int_distribution<int> pick_topic(0, p.n_topics - 1);
  std::normal_distribution<double> noise(0.0,
                                         p.topic_noise_sd > 0 ? p.topic_noise_sd : 1.0);
  Matrix item_vecs(p.n_items, p.dim);
  info.item_topic.resize(p.n_items);
  for (Index i = 0; i < p.n_items; ++i) {
    const int t = pick_topic(item_eng);
    info.item_topic(i) = t;
    for (Index j = 0; j < p.dim; ++j)
      item_vecs(i, j) =
          anchors(t, j) + (p.topic_noise_sd > 0 ? noise(item_eng) : 0.0);
  }
  normalize_rows_inplace(item_vecs);

  const Index n_minority = static_cast<Index>(
      std::floor(p.minority_user_fraction * static_cast<double>(p.n_users)));
  auto user_eng = rng_stream(p.seed, "topic-users");
  std::uniform_int_distribution<int> pick_majority(0, p.n_topics - 2);
  Matrix user_vecs(2 * p.n_users, p.dim);
  info.user_minority.assign(static_cast<std::size_t>(p.n_users), 0);
  for (Index u = 0; u < p.n_users; ++u) {
    const bool is_minority = u < n_minority;
    info.user_minority[static_cast<std::size_t>(u)] = is_minority ? 1 : 0;
    const int t0 = is_minority ? minority : pick_majority(user_eng);
    const int t1 = pick_majority(user_eng);
    const int picked[2] = {t0, t1};
    for (int q = 0; q < 2; ++q)
      for (Index j = 0; j < p.dim; ++j)
        user_vecs(2 * u + q, j) = anchors(picked[q], j) +
                                  (p.topic_noise_sd > 0 ? noise(user_eng) : 0.0);
  }
  normalize_rows_inplace(user_vecs);

  RatingDataset ratings = sample_ratings(
      user_vecs, item_vecs, p.rating_fraction, p.rating_noise_sd, p.seed);
  EmbeddingSet items(index_ids(p.n_items), std::move(item_vecs),
                     /*normalized=*/true);
  return {GroundTruth(std::move(items), std::move(user_vecs), std::move(info)),
          std::move(ratings)};
}

ItemSet oracle_top_k(const GroundTruth& truth, Index user,
                     const ItemSet& universe, Index k) {
  if (user < 0 || user >= truth.n_users())
    throw std::invalid_argument("oracle_top_k: user index out of range");
  if (universe.indices().back() >= truth.items().size())
    throw std::invalid_argument("oracle_top_k: universe index out of range");
  if (k < 1 || k > universe.k())
    throw std::invalid_argument("oracle_top_k: k out of range");

  const Matrix& V = truth.items().vectors();
  Matrix sub(universe.k(), V.cols());
  for (Index q = 0; q < universe.k(); ++q) sub.row(q) = V.row(universe[q]);

  const Vector scores =
      max_inner_scores(sub, truth.user_vectors().middleRows(2 * user, 2));
  const ItemSet local = top_k(scores, k);
  std::vector<Index> global;
  global.reserve(static_cast<std::size_t>(k));
  for (Index q : local.indices()) global.push_back(universe[q]);
  return ItemSet(std::move(global));
}

void save_world(const GroundTruth& truth, const RatingDataset& ratings,
                const WorldMeta& meta, const std::string& out_prefix) {
  save_embeddings(truth.items(), out_prefix + "_items.csv");

  std::vector<std::string> user_ids;
  user_ids.reserve(static_cast<std::size_t>(truth.user_vectors().rows()));
  for (Index u = 0; u < truth.n_users(); ++u) {
    user_ids.push_back(std::to_string(u) + ":0");
    user_ids.push_back(std::to_string(u) + ":1");
  }
  save_embeddings(EmbeddingSet(std::move(user_ids), truth.user_vectors(),
                               /*normalized=*/true),
                  out_prefix + "_users.csv");

  save_ratings_csv(ratings, out_prefix + "_ratings.csv");

  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["world"] = meta.world;
  j["seed"] = meta.seed;
  j["n_items"] = truth.items().size();
  j["n_users"] = truth.n_users();
  j["dim"] = truth.items().dim();
  j["user_vector_layout"] = "two rows per user, ids <user>:0 and <user>:1";
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& [key, value] : meta.params) params[key] = value;
  j["params"] = std::move(params);
  if (truth.topics()) {
    const TopicInfo& t = *truth.topics();
    j["topics"]["minority_topic"] = t.minority_topic;
    j["topics"]["item_topic"] =
        std::vector<int>(t.item_topic.data(),
                         t.item_topic.data() + t.item_topic.size());
    j["topics"]["user_minority"] =
        std::vector<int>(t.user_minority.begin(), t.user_minority.end());
    std::vector<std::vector<double>> anchors;
    for (Index r = 0; r < t.anchors.rows(); ++r)
      anchors.emplace_back(t.anchors.row(r).begin(), t.anchors.row(r).end());
    j["topics"]["anchors"] = std::move(anchors);
  }

  std::ofstream out(out_prefix + "_meta.json", std::ios::binary);
  if (!out) throw DataError("cannot write '" + out_prefix + "_meta.json'");
  out << j.dump(2) << '\n';
  if (!out) throw DataError("write failed for '" + out_prefix + "_meta.json'");
}

LoadedWorld load_world(const std::string& prefix) {
  std::ifstream in(prefix + "_meta.json");
  if (!in) throw DataError("cannot open '" + prefix + "_meta.json'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(prefix + "_meta.json: " + e.what());
  }

  WorldMeta meta;
  meta.world = j.value("world", "");
  meta.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("params"))
    for (const auto& [key, value] : j["params"].items())
      meta.params.emplace_back(key, value.get<double>());

  EmbeddingSet raw_items = load_embeddings(prefix + "_items.csv");
  EmbeddingSet items(raw_items.ids(), raw_items.vectors(), /*normalized=*/true);
  EmbeddingSet users = load_embeddings(prefix + "_users.csv");

  const std::int64_t n_users = j.at("n_users").get<std::int64_t>();
  if (users.size() != 2 * n_users)
    throw DataError(prefix + "_users.csv: expected two rows per user");

  std::optional<TopicInfo> topics;
  if (j.contains("topics")) {
    TopicInfo t;
    t.minority_topic = j["topics"].at("minority_topic").get<int>();
    const auto labels = j["topics"].at("item_topic").get<std::vector<int>>();
    t.item_topic = Eigen::Map<const Eigen::VectorXi>(
        labels.data(), static_cast<Index>(labels.size()));
    const auto tags = j["topics"].at("user_minority").get<std::vector<int>>();
    t.user_minority.assign(tags.begin(), tags.end());
    const auto anchors =
        j["topics"].at("anchors").get<std::vector<std::vector<double>>>();
    t.anchors.resize(static_cast<Index>(anchors.size()), items.dim());
    for (std::size_t r = 0; r < anchors.size(); ++r)
      for (Index c = 0; c < items.dim(); ++c)
        t.anchors(static_cast<Index>(r), c) = anchors[r][static_cast<std::size_t>(c)];
    topics = std::move(t);
  }

  RatingDataset ratings = load_ratings_indexed(
      prefix + "_ratings.csv", n_users, j.at("n_items").get<std::int64_t>());

  return LoadedWorld{GroundTruth(std::move(items), users.vectors(), std::move(topics)),
                     std::move(ratings), std::move(meta)};
}

}  // namespace jaccess
