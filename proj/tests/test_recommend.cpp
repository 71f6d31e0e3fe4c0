#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "jaccess/recommend.hpp"

using namespace jaccess;
using testutil::all_subsets;
using testutil::random_matrix;

TEST_CASE("score_single basics") {
  const EmbeddingSet items = testutil::make_items({{1, 0}, {0, 1}});
  Vector u(2);
  u << 1, 0;
  const Vector s = score_single(UserRep(u), items);
  CHECK(s(0) == 1.0);
  CHECK(s(1) == 0.0);

  const Vector zero = score_single(UserRep(Vector(Vector::Zero(2))), items);
  CHECK(zero.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("score_single matches a naive loop") {
  std::mt19937_64 eng(3);
  const EmbeddingSet items = testutil::random_items(9, 4, eng);
  const Vector u = random_matrix(4, 1, eng);
  const Vector s = score_single(UserRep(u), items);
  for (Index j = 0; j < items.size(); ++j) {
    double dot = 0.0;
    for (Index q = 0; q < 4; ++q) dot += u(q) * items.vectors()(j, q);
    CHECK(s(j) == doctest::Approx(dot));
  }
}

TEST_CASE("score dimension mismatch") {
  const EmbeddingSet items = testutil::make_items({{1, 0}});
  CHECK_THROWS_AS(score_single(UserRep(Vector(Vector::Zero(3))), items),
                  std::invalid_argument);
  Matrix two = Matrix::Zero(2, 2);
  CHECK_THROWS_AS(score_single(UserRep(two), items), std::invalid_argument);
}

TEST_CASE("score_multi takes the max across user vectors") {
  const EmbeddingSet item = testutil::make_items({{0.5, 0.8}});
  Matrix u(2, 2);
  u << 1, 0, 0, 1;
  CHECK(score_multi(UserRep(u), item)(0) == doctest::Approx(0.8));
}

TEST_CASE("score_multi with m=1 equals score_single") {
  std::mt19937_64 eng(4);
  const EmbeddingSet items = testutil::random_items(7, 3, eng);
  const Vector u = random_matrix(3, 1, eng);
  CHECK((score_multi(UserRep(u), items) - score_single(UserRep(u), items))
            .cwiseAbs()
            .maxCoeff() == 0.0);
}

TEST_CASE("score_multi on the compass instance") {
  const EmbeddingSet items =
      testutil::make_items({{1, 0}, {0, 1}, {-1, 0}, {0, -1}});
  Matrix u(2, 2);
  u << 1, 0, -1, 0;
  const Vector s = score_multi(UserRep(u), items);
  CHECK(s(0) == doctest::Approx(1.0));
  CHECK(s(1) == doctest::Approx(0.0));
  CHECK(s(2) == doctest::Approx(1.0));
  CHECK(s(3) == doctest::Approx(0.0));
}

TEST_CASE("adding a user vector never lowers a score") {
  std::mt19937_64 eng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const EmbeddingSet items = testutil::random_items(8, 3, eng);
    const Matrix base = random_matrix(2, 3, eng);
    Matrix extended(3, 3);
    extended.topRows(2) = base;
    extended.row(2) = random_matrix(1, 3, eng);
    const Vector s0 = score_multi(UserRep(base), items);
    const Vector s1 = score_multi(UserRep(extended), items);
    CHECK((s1 - s0).minCoeff() >= 0.0);
  }
}

TEST_CASE("top_k basics and ties") {
  Vector s(3);
  s << 3, 1, 2;
  CHECK(top_k(s, 2) == ItemSet({0, 2}));

  Vector ties(3);
  ties << 1, 1, 1;
  CHECK(top_k(ties, 2) == ItemSet({0, 1}));

  CHECK_THROWS_AS(top_k(s, 0), std::invalid_argument);
  CHECK_THROWS_AS(top_k(s, 4), std::invalid_argument);
}

TEST_CASE("top_k equals the full-sort oracle") {
  std::mt19937_64 eng(6);
  for (int trial = 0; trial < 100; ++trial) {
    std::uniform_int_distribution<Index> nd(1, 20);
    const Index n = nd(eng);
    std::uniform_int_distribution<Index> kd(1, n);
    const Index k = kd(eng);
    const Vector s = random_matrix(n, 1, eng);

    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
      if (s(a) != s(b)) return s(a) > s(b);
      return a < b;
    });
    order.resize(static_cast<std::size_t>(k));
    CHECK(top_k(s, k) == ItemSet(std::move(order)));
  }
}

TEST_CASE("top_k maximizes the set sum over all size-k sets") {
  std::mt19937_64 eng(7);
  for (int trial = 0; trial < 50; ++trial) {
    std::uniform_int_distribution<Index> nd(3, 10), kd(1, 3);
    const Index n = nd(eng);
    const Index k = kd(eng);
    const Vector s = random_matrix(n, 1, eng);

    const ItemSet chosen = top_k(s, k);
    double chosen_sum = 0.0;
    for (Index i : chosen.indices()) chosen_sum += s(i);
    for (const auto& set : all_subsets(n, k)) {
      double sum = 0.0;
      for (Index i : set) sum += s(i);
      CHECK(chosen_sum >= sum - 1e-12);
    }
  }
}

TEST_CASE("positive scaling of the user leaves top_k unchanged") {
  std::mt19937_64 eng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const EmbeddingSet items = testutil::random_items(9, 3, eng);
    const Vector u = random_matrix(3, 1, eng);
    const ItemSet a = top_k(score_single(UserRep(u), items), 3);
    const ItemSet b = top_k(score_single(UserRep(Vector(7.5 * u)), items), 3);
    CHECK(a == b);
  }
}

TEST_CASE("ItemSet validation") {
  CHECK_THROWS_AS(ItemSet({}), std::invalid_argument);
  CHECK_THROWS_AS(ItemSet({1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(ItemSet({-1}), std::invalid_argument);
  const ItemSet s({4, 2, 7});
  CHECK(s.indices() == std::vector<Index>{2, 4, 7});
  CHECK(s.contains(4));
  CHECK_FALSE(s.contains(3));
}
