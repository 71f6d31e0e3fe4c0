#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <set>

#include "helpers.hpp"
#include "jaccess/synth.hpp"

using namespace jaccess;
namespace fs = std::filesystem;

namespace {

SphereWorldParams small_sphere(std::uint64_t seed) {
  SphereWorldParams p;
  p.n_items = 40;
  p.n_users = 60;
  p.dim = 8;
  p.rating_fraction = 0.25;
  p.noise_sd = 0.01;
  p.seed = seed;
  return p;
}

TopicWorldParams small_topic(std::uint64_t seed) {
  TopicWorldParams p;
  p.n_items = 60;
  p.n_users = 80;
  p.dim = 24;
  p.n_topics = 4;
  p.minority_user_fraction = 0.25;
  p.rating_fraction = 0.3;
  p.seed = seed;
  return p;
}

}  // namespace

TEST_CASE("zero-noise sphere ratings equal the max inner product exactly") {
  SphereWorldParams p = small_sphere(5);
  p.noise_sd = 0.0;
  const auto [truth, ratings] = gen_sphere_world(p);
  for (const Rating& t : ratings.triples) {
    const double expect =
        std::max(truth.user_vectors().row(2 * t.user).dot(
                     truth.items().vectors().row(t.item)),
                 truth.user_vectors().row(2 * t.user + 1).dot(
                     truth.items().vectors().row(t.item)));
    CHECK(t.value == expect);
    CHECK(t.value >= -1.0);
    CHECK(t.value <= 1.0);
  }
}

TEST_CASE("sphere vectors are unit norm with near-orthogonal pairs at d=64") {
  SphereWorldParams p;
  p.n_items = 120;
  p.n_users = 30;
  p.dim = 64;
  p.rating_fraction = 0.1;
  p.seed = 11;
  const auto [truth, ratings] = gen_sphere_world(p);

  for (Index i = 0; i < truth.items().size(); ++i)
    CHECK(truth.items().vectors().row(i).norm() == doctest::Approx(1.0));
  for (Index i = 0; i < truth.user_vectors().rows(); ++i)
    CHECK(truth.user_vectors().row(i).norm() == doctest::Approx(1.0));

  double mean_abs_dot = 0.0;
  int pairs = 0;
  for (Index a = 0; a < 40; ++a)
    for (Index b = a + 1; b < 40; ++b) {
      mean_abs_dot += std::abs(truth.items().vectors().row(a).dot(
          truth.items().vectors().row(b)));
      ++pairs;
    }
  mean_abs_dot /= pairs;
  CHECK(mean_abs_dot < 0.2);  // concentration near 0 for d = 64
}

TEST_CASE("sphere world is deterministic and duplicate-free") {
  const auto [truth_a, ratings_a] = gen_sphere_world(small_sphere(21));
  const auto [truth_b, ratings_b] = gen_sphere_world(small_sphere(21));

  CHECK((truth_a.items().vectors() - truth_b.items().vectors())
            .cwiseAbs()
            .maxCoeff() == 0.0);
  CHECK((truth_a.user_vectors() - truth_b.user_vectors()).cwiseAbs().maxCoeff() ==
        0.0);
  REQUIRE(ratings_a.triples.size() == ratings_b.triples.size());
  for (std::size_t q = 0; q < ratings_a.triples.size(); ++q) {
    CHECK(ratings_a.triples[q].user == ratings_b.triples[q].user);
    CHECK(ratings_a.triples[q].item == ratings_b.triples[q].item);
    CHECK(ratings_a.triples[q].value == ratings_b.triples[q].value);
  }

  std::set<std::pair<std::int64_t, std::int64_t>> seen;
  for (const Rating& t : ratings_a.triples)
    CHECK(seen.insert({t.user, t.item}).second);
  CHECK(ratings_a.triples.size() ==
        static_cast<std::size_t>(std::llround(0.25 * 40 * 60)));

  const auto [truth_c, ratings_c] = gen_sphere_world(small_sphere(22));
  CHECK((truth_a.items().vectors() - truth_c.items().vectors())
            .cwiseAbs()
            .maxCoeff() > 0.0);
}

TEST_CASE("sphere world parameter validation") {
  SphereWorldParams p = small_sphere(1);
  p.rating_fraction = 0.0;
  CHECK_THROWS_AS(gen_sphere_world(p), std::invalid_argument);
  p = small_sphere(1);
  p.n_items = 2;
  p.n_users = 2;
  p.rating_fraction = 0.1;  // 0.4 pairs rounds to 0
  CHECK_THROWS_AS(gen_sphere_world(p), DataError);
}

TEST_CASE("topic anchors anti-correlate on the sign-forced block") {
  const auto [truth, ratings] = gen_topic_world(small_topic(31));
  REQUIRE(truth.topics().has_value());
  const TopicInfo& info = *truth.topics();
  const int minority = info.minority_topic;
  CHECK(minority == small_topic(31).n_topics - 1);

  for (int t = 0; t < small_topic(31).n_topics; ++t) {
    if (t == minority) continue;
    double leading = 0.0;
    for (Index j = 0; j < 20; ++j)
      leading += info.anchors(minority, j) * info.anchors(t, j);
    CHECK(leading < 0.0);
  }
}

TEST_CASE("minority anchor is the least similar to the majority anchors") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto [truth, ratings] = gen_topic_world(small_topic(seed));
    const TopicInfo& info = *truth.topics();
    const int n_topics = static_cast<int>(info.anchors.rows());

    // mean cosine of each anchor against the rest
    std::vector<double> mean_sim(static_cast<std::size_t>(n_topics), 0.0);
    for (int a = 0; a < n_topics; ++a) {
      for (int b = 0; b < n_topics; ++b)
        if (a != b)
          mean_sim[static_cast<std::size_t>(a)] +=
              info.anchors.row(a).dot(info.anchors.row(b));
      mean_sim[static_cast<std::size_t>(a)] /= n_topics - 1;
    }
    const auto argmin =
        std::min_element(mean_sim.begin(), mean_sim.end()) - mean_sim.begin();
    CHECK(argmin == info.minority_topic);
  }
}

TEST_CASE("exact minority user count and tag layout") {
  const auto [truth, ratings] = gen_topic_world(small_topic(7));
  const TopicInfo& info = *truth.topics();
  std::int64_t count = 0;
  for (const auto tag : info.user_minority) count += tag;
  CHECK(count == static_cast<std::int64_t>(std::floor(0.25 * 80)));
}

TEST_CASE("minority items rate higher among minority users") {
  const auto [truth, ratings] = gen_topic_world(small_topic(13));
  const TopicInfo& info = *truth.topics();
  double minority_sum = 0.0, majority_sum = 0.0;
  std::int64_t minority_n = 0, majority_n = 0;
  for (const Rating& t : ratings.triples) {
    if (info.item_topic(t.item) != info.minority_topic) continue;
    if (info.user_minority[static_cast<std::size_t>(t.user)]) {
      minority_sum += t.value;
      ++minority_n;
    } else {
      majority_sum += t.value;
      ++majority_n;
    }
  }
  REQUIRE(minority_n > 0);
  REQUIRE(majority_n > 0);
  CHECK(minority_sum / minority_n > majority_sum / majority_n);
}

TEST_CASE("topic world parameter validation") {
  TopicWorldParams p = small_topic(1);
  p.dim = 10;
  CHECK_THROWS_AS(gen_topic_world(p), std::invalid_argument);
  p = small_topic(1);
  p.n_topics = 1;
  CHECK_THROWS_AS(gen_topic_world(p), std::invalid_argument);
}

TEST_CASE("oracle recommends a user's exact item matches") {
  // items: orthogonal basis vectors; the user's two vectors equal items 2, 5
  Matrix items = Matrix::Identity(8, 8);
  Matrix user_vecs(2, 8);
  user_vecs.row(0) = items.row(2);
  user_vecs.row(1) = items.row(5);
  std::vector<std::string> ids;
  for (int i = 0; i < 8; ++i) ids.push_back(std::to_string(i));
  GroundTruth truth(EmbeddingSet(ids, items, true), user_vecs);

  std::vector<Index> uni(8);
  std::iota(uni.begin(), uni.end(), Index{0});
  const ItemSet top = oracle_top_k(truth, 0, ItemSet(uni), 2);
  CHECK(top == ItemSet({2, 5}));
}

TEST_CASE("oracle equals the score_multi/top_k composition") {
  const auto [truth, ratings] = gen_sphere_world(small_sphere(17));
  std::vector<Index> uni(static_cast<std::size_t>(truth.items().size()));
  std::iota(uni.begin(), uni.end(), Index{0});
  const ItemSet universe(std::move(uni));
  for (Index u = 0; u < 10; ++u) {
    const Vector scores = score_multi(truth.user(u), truth.items());
    CHECK(oracle_top_k(truth, u, universe, 2) == top_k(scores, 2));
    CHECK(oracle_top_k(truth, u, universe, 1) == top_k(scores, 1));
  }
}

TEST_CASE("oracle validates bounds") {
  const auto [truth, ratings] = gen_sphere_world(small_sphere(19));
  CHECK_THROWS_AS(oracle_top_k(truth, truth.n_users(), ItemSet({0, 1}), 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(oracle_top_k(truth, 0, ItemSet({0, 999}), 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(oracle_top_k(truth, 0, ItemSet({0, 1}), 3),
                  std::invalid_argument);
}

TEST_CASE("world files round-trip") {
  const fs::path dir = fs::temp_directory_path() / "jaccess_synth_tests";
  fs::create_directories(dir);
  const std::string prefix = (dir / "w").string();

  const auto [truth, ratings] = gen_topic_world(small_topic(23));
  WorldMeta meta;
  meta.world = "topic";
  meta.seed = 23;
  meta.params = {{"rating_fraction", 0.3}, {"topic_noise_sd", 0.05}};
  save_world(truth, ratings, meta, prefix);

  for (const char* suffix :
       {"_items.csv", "_users.csv", "_ratings.csv", "_meta.json"})
    CHECK(fs::exists(prefix + suffix));

  const LoadedWorld re = load_world(prefix);
  CHECK(re.meta.world == "topic");
  CHECK(re.meta.seed == 23);
  CHECK((re.truth.items().vectors() - truth.items().vectors())
            .cwiseAbs()
            .maxCoeff() == 0.0);
  CHECK((re.truth.user_vectors() - truth.user_vectors()).cwiseAbs().maxCoeff() ==
        0.0);
  REQUIRE(re.truth.topics().has_value());
  CHECK(re.truth.topics()->minority_topic == truth.topics()->minority_topic);
  CHECK((re.truth.topics()->item_topic - truth.topics()->item_topic).cwiseAbs().maxCoeff() == 0);
  REQUIRE(re.ratings.triples.size() == ratings.triples.size());
  for (std::size_t q = 0; q < ratings.triples.size(); ++q)
    CHECK(re.ratings.triples[q].value == ratings.triples[q].value);
}
