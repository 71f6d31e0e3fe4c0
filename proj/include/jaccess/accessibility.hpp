#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "jaccess/embeddings.hpp"
#include "jaccess/recommend.hpp"
#include "jaccess/types.hpp"

namespace jaccess {

enum class AccessMethod {
  DominanceLp,
  VertexLp,
  Voronoi,
  HeuristicLs,
  OracleSweep,
  OracleSample,
  MultiWitness,
};

std::string_view access_method_name(AccessMethod m);

struct AccessVerdict {
  bool accessible = false;
  // Present whenever `accessible` is true; re-scoring the witness through
  // the recommender reproduces the queried set exactly.
  std::optional<UserRep> witness;
  AccessMethod method = AccessMethod::DominanceLp;
  // Method-specific strictness: worst separating slack for the LP methods,
  // in-set/out-set score gap for the search-based ones. The sampling oracle
  // reports 0 when nothing was found (a "not found", not a proof).
  double margin = 0.0;
};

struct AccessOptions {
  // Strictness threshold applied to LP margins under the box normalization
  // ||u||_inf <= 1; responses at or below it count as inaccessible.
  double tolerance = 1e-9;
};

// Exact test of joint accessibility of `s` via the dominance system
//   u . v_i > u . v_j   for every i in s, j outside s
// (K(n-K) strict rows). Equivalent to the set-sum argmax condition because
// a strict top-K set must beat every single-swap rival and vice versa.
AccessVerdict joint_accessible(const EmbeddingSet& items, const ItemSet& s,
                               const AccessOptions& opts = {});

// Exact test via the sum-of-vectors vertex condition: enumerates every
// size-K set sum and asks whether the target sum strictly separates from
// all of them. Enumeration is guarded (<= 200,000 candidate sets); beyond
// that, use joint_accessible, which decides the same predicate.
AccessVerdict vertex_condition(const EmbeddingSet& items, const ItemSet& s,
                               const AccessOptions& opts = {});

// For normalized items: do the spherical Voronoi cells of v_i and v_j share
// a boundary point? Decided by one mixed LP: the bisector rows (v_i - v_j)
// enter with zero margin, the domination rows (v_i - v_k) stay strict.
AccessVerdict voronoi_neighbors(const EmbeddingSet& items, Index i, Index j,
                                const AccessOptions& opts = {});

// Least-squares user construction: u* = argmin ||V u - r|| (+ ridge) where
// r is the 0/1 indicator of s — a user who likes s and nothing else.
UserRep heuristic_user(const EmbeddingSet& items, const ItemSet& s,
                       double ridge = 0.0);

// Scores heuristic_user and declares s accessible iff it comes back as the
// exact top-K. Sound (a true verdict is a real witness) but incomplete.
AccessVerdict heuristic_accessible(const EmbeddingSet& items, const ItemSet& s,
                                   double ridge = 0.0);

// Exact d=2 oracle: walks every open arc between score-crossing angles on
// the unit circle and checks the top-K set at each arc midpoint.
AccessVerdict oracle_sweep_2d(const EmbeddingSet& items, const ItemSet& s);

// Randomized sound-only oracle for d > 2: seeded unit-sphere user samples;
// an inaccessible verdict only means "not found".
AccessVerdict oracle_sample(const EmbeddingSet& items, const ItemSet& s,
                            std::int64_t samples, std::uint64_t seed);

// Multi-vector witness with m = K vectors: per-item representative vectors
// rescaled to a common positive self-score level, so the queried set is the
// exact top-K under max-inner-product scoring. Requires every item in s to
// be individually accessible with a positive self-score (re-solved with an
// extra strict self row when the plain witness points away from the item).
UserRep multi_vector_witness(const EmbeddingSet& items, const ItemSet& s,
                             const AccessOptions& opts = {});

// Re-tests an inaccessible set after appending extra items; inaccessibility
// can only persist (every added item adds constraints). The matrix overload
// admits an empty extension.
AccessVerdict monotone_violation_extend(const EmbeddingSet& items,
                                        const ItemSet& s,
                                        const Matrix& extra_vectors,
                                        const std::vector<std::string>& extra_ids,
                                        const AccessOptions& opts = {});
AccessVerdict monotone_violation_extend(const EmbeddingSet& items,
                                        const ItemSet& s,
                                        const EmbeddingSet& extra,
                                        const AccessOptions& opts = {});

// Batched heuristic: one factorization of V shared across many sets, so a
// pair query costs a vector add plus one scoring pass.
class HeuristicSolver {
 public:
  HeuristicSolver(const EmbeddingSet& items, double ridge);

  Vector user_for(const ItemSet& s) const;
  AccessVerdict accessible(const ItemSet& s) const;

 private:
  Matrix item_vectors_;  // n x d
  Matrix gain_;          // d x n; u*(s) = sum of columns over s
};

}  // namespace jaccess
