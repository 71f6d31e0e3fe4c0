#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "jaccess/embeddings.hpp"
#include "jaccess/factorization.hpp"
#include "jaccess/recommend.hpp"
#include "jaccess/types.hpp"

namespace jaccess {

struct TopicInfo {
  Eigen::VectorXi item_topic;               // per-item topic index
  std::vector<std::uint8_t> user_minority;  // per-user tag, 1 = minority
  int minority_topic = -1;
  Matrix anchors;  // n_topics x d unit rows
};

// A synthetic world's true representations: unit item vectors plus exactly
// two unit vectors per user (rows 2i and 2i+1).
class GroundTruth {
 public:
  GroundTruth(EmbeddingSet items, Matrix user_vectors,
              std::optional<TopicInfo> topics = std::nullopt);

  const EmbeddingSet& items() const { return items_; }
  const Matrix& user_vectors() const { return user_vectors_; }
  Index n_users() const { return user_vectors_.rows() / 2; }
  UserRep user(Index i) const;
  const std::optional<TopicInfo>& topics() const { return topics_; }

 private:
  EmbeddingSet items_;
  Matrix user_vectors_;
  std::optional<TopicInfo> topics_;
};

struct SphereWorldParams {
  Index n_items = 0;
  Index n_users = 0;
  Index dim = 0;
  double rating_fraction = 0.1;
  double noise_sd = 0.01;
  std::uint64_t seed = 0;
};

// All vectors uniform on the unit sphere (normalized Gaussians); ratings on
// a without-replacement pair sample, value max_k u_{i,k} . v_j plus
// Gaussian noise.
std::pair<GroundTruth, RatingDataset> gen_sphere_world(
    const SphereWorldParams& p);

struct TopicWorldParams {
  Index n_items = 0;
  Index n_users = 0;
  Index dim = 64;
  int n_topics = 5;
  double minority_user_fraction = 0.2;
  double topic_noise_sd = 0.05;
  double rating_fraction = 0.1;
  double rating_noise_sd = 0.01;
  std::uint64_t seed = 0;
};

// Topic anchors with the leading 20 coordinates sign-forced (majority
// positive, minority negative) so the minority topic anti-correlates with
// every majority topic. Items and user vectors are noised anchor copies,
// re-normalized; minority users pair one minority anchor with one majority
// anchor, majority users draw both anchors from majority topics.
std::pair<GroundTruth, RatingDataset> gen_topic_world(
    const TopicWorldParams& p);

// Ground-truth recommender: multi-vector scores of the user's two true
// vectors over the true item vectors, restricted to `universe`.
ItemSet oracle_top_k(const GroundTruth& truth, Index user,
                     const ItemSet& universe, Index k);

// --- world files ------------------------------------------------------------

struct WorldMeta {
  std::string world;  // "sphere" | "topic"
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, double>> params;  // echoed flags
};

// Writes <prefix>_items.csv, <prefix>_users.csv, <prefix>_ratings.csv and
// <prefix>_meta.json (labels, tags, seed, parameters).
void save_world(const GroundTruth& truth, const RatingDataset& ratings,
                const WorldMeta& meta, const std::string& out_prefix);

struct LoadedWorld {
  GroundTruth truth;
  RatingDataset ratings;
  WorldMeta meta;
};

LoadedWorld load_world(const std::string& prefix);

}  // namespace jaccess
