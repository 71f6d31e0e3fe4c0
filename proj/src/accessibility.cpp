#include "jaccess/accessibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "jaccess/least_squares.hpp"
#include "jaccess/lp.hpp"
#include "jaccess/rng.hpp"

namespace jaccess {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_set(const EmbeddingSet& items, const ItemSet& s,
               bool require_proper) {
  if (s.indices().back() >= items.size())
    throw std::invalid_argument("item set index out of range");
  if (require_proper && s.k() >= items.size())
    throw std::invalid_argument("item set must satisfy k < n");
}

// Worst in-set score minus best out-of-set score; positive iff s is the
// strict top-K under `scores`.
double set_margin(const Vector& scores, const ItemSet& s) {
  double worst_in = kInf;
  double best_out = -kInf;
  for (Index j = 0; j < scores.size(); ++j) {
    if (s.contains(j))
      worst_in = std::min(worst_in, scores(j));
    else
      best_out = std::max(best_out, scores(j));
  }
  return best_out == -kInf ? kInf : worst_in - best_out;
}

Vector orthogonal_unit(const Vector& v) {
  Index smallest = 0;
  v.cwiseAbs().minCoeff(&smallest);
  Vector e = Vector::Zero(v.size());
  e(smallest) = 1.0;
  const Vector vhat = v.normalized();
  return (e - e.dot(vhat) * vhat).normalized();
}

std::int64_t binomial_capped(Index n, Index k, std::int64_t cap) {
  double v = 1.0;
  for (Index i = 1; i <= k; ++i) {
    v *= static_cast<double>(n - k + i) / static_cast<double>(i);
    if (v > 4.0 * static_cast<double>(cap)) return cap + 1;
  }
  return static_cast<std::int64_t>(std::llround(v));
}

}  // namespace

std::string_view access_method_name(AccessMethod m) {
  switch (m) {
    case AccessMethod::DominanceLp: return "dominance-lp";
    case AccessMethod::VertexLp: return "vertex-lp";
    case AccessMethod::Voronoi: return "voronoi";
    case AccessMethod::HeuristicLs: return "heuristic-ls";
    case AccessMethod::OracleSweep: return "oracle-sweep";
    case AccessMethod::OracleSample: return "oracle-sample";
    case AccessMethod::MultiWitness: return "multi-witness";
  }
  return "unknown";
}

AccessVerdict joint_accessible(const EmbeddingSet& items, const ItemSet& s,
                               const AccessOptions& opts) {
  check_set(items, s, /*require_proper=*/true);
  const Matrix& V = items.vectors();
  const Index n = items.size();
  const Index k = s.k();

  Matrix rows(k * (n - k), items.dim());
  Index r = 0;
  for (Index i : s.indices())
    for (Index j = 0; j < n; ++j) {
      if (s.contains(j)) continue;
      rows.row(r++) = V.row(i) - V.row(j);
    }

  const FeasibilityResult lp = lp_strict_feasible<double>(rows, opts.tolerance);
  AccessVerdict v;
  v.accessible = lp.feasible;
  v.method = AccessMethod::DominanceLp;
  v.margin = lp.margin;
  if (lp.feasible) v.witness = UserRep(*lp.witness);
  return v;
}

AccessVerdict vertex_condition(const EmbeddingSet& items, const ItemSet& s,
                               const AccessOptions& opts) {
  check_set(items, s, /*require_proper=*/true);
  const Index n = items.size();
  const Index k = s.k();
  constexpr std::int64_t kEnumerationCap = 200000;
  const std::int64_t n_sets = binomial_capped(n, k, kEnumerationCap);
  if (n_sets > kEnumerationCap)
    throw DataError(
        "vertex_condition: too many candidate sets to enumerate; use "
        "joint_accessible instead");

  const Matrix& V = items.vectors();
  Vector target = Vector::Zero(items.dim());
  for (Index i : s.indices()) target += V.row(i).transpose();

  Matrix rows(n_sets - 1, items.dim());
  std::vector<Index> comb(static_cast<std::size_t>(k));
  std::iota(comb.begin(), comb.end(), Index{0});
  Index r = 0;
  while (true) {
    if (!std::equal(comb.begin(), comb.end(), s.indices().begin(),
                    s.indices().end())) {
      Vector sum = Vector::Zero(items.dim());
      for (Index i : comb) sum += V.row(i).transpose();
      rows.row(r++) = (target - sum).transpose();
    }
    // next combination in lexicographic order
    Index pos = k - 1;
    while (pos >= 0 && comb[static_cast<std::size_t>(pos)] == n - k + pos)
      --pos;
    if (pos < 0) break;
    ++comb[static_cast<std::size_t>(pos)];
    for (Index q = pos + 1; q < k; ++q)
      comb[static_cast<std::size_t>(q)] = comb[static_cast<std::size_t>(q - 1)] + 1;
  }

  const FeasibilityResult lp = lp_strict_feasible<double>(rows, opts.tolerance);
  AccessVerdict v;
  v.accessible = lp.feasible;
  v.method = AccessMethod::VertexLp;
  v.margin = lp.margin;
  if (lp.feasible) v.witness = UserRep(*lp.witness);
  return v;
}

AccessVerdict voronoi_neighbors(const EmbeddingSet& items, Index i, Index j,
                                const AccessOptions& opts) {
  if (!items.normalized())
    throw std::invalid_argument("voronoi_neighbors: items must be normalized");
  const Index n = items.size();
  if (i < 0 || i >= n || j < 0 || j >= n)
    throw std::invalid_argument("voronoi_neighbors: index out of range");
  if (i == j) throw std::invalid_argument("voronoi_neighbors: i == j");

  const Matrix& V = items.vectors();
  AccessVerdict v;
  v.method = AccessMethod::Voronoi;

  if (n == 2) {
    // Two sites split the sphere into hemispheres meeting at the bisector.
    const Vector mid = V.row(i).transpose() + V.row(j).transpose();
    Vector u = mid.norm() > 1e-12 ? Vector(mid.normalized())
                                  : orthogonal_unit(V.row(i).transpose());
    v.accessible = true;
    v.margin = kInf;  // no competing sites
    v.witness = UserRep(u);
    return v;
  }

  Matrix rows(n, items.dim());
  std::vector<bool> strict(static_cast<std::size_t>(n), true);
  Index r = 0;
  for (Index k = 0; k < n; ++k) {
    if (k == i || k == j) continue;
    rows.row(r++) = V.row(i) - V.row(k);
  }
  rows.row(r) = V.row(i) - V.row(j);
  strict[static_cast<std::size_t>(r)] = false;
  ++r;
  rows.row(r) = V.row(j) - V.row(i);
  strict[static_cast<std::size_t>(r)] = false;

  const FeasibilityResult lp =
      lp_strict_feasible_mixed<double>(rows, strict, opts.tolerance);
  v.accessible = lp.feasible;
  v.margin = lp.margin;
  if (lp.feasible) v.witness = UserRep(Vector(lp.witness->normalized()));
  return v;
}

UserRep heuristic_user(const EmbeddingSet& items, const ItemSet& s,
                       double ridge) {
  check_set(items, s, /*require_proper=*/false);
  Vector indicator = Vector::Zero(items.size());
  for (Index i : s.indices()) indicator(i) = 1.0;
  return UserRep(least_squares<double>(items.vectors(), indicator, ridge));
}

AccessVerdict heuristic_accessible(const EmbeddingSet& items, const ItemSet& s,
                                   double ridge) {
  const UserRep user = heuristic_user(items, s, ridge);
  const Vector scores = score_single(user, items);
  AccessVerdict v;
  v.method = AccessMethod::HeuristicLs;
  v.margin = set_margin(scores, s);
  v.accessible = top_k(scores, s.k()) == s;
  if (v.accessible) v.witness = user;
  return v;
}

AccessVerdict oracle_sweep_2d(const EmbeddingSet& items, const ItemSet& s) {
  if (items.dim() != 2)
    throw std::invalid_argument("oracle_sweep_2d: requires d = 2");
  check_set(items, s, /*require_proper=*/false);
  const Matrix& V = items.vectors();
  const Index n = items.size();
  constexpr double kTwoPi = 2.0 * M_PI;

  std::vector<double> angles;
  for (Index a = 0; a < n; ++a)
    for (Index b = a + 1; b < n; ++b) {
      const double wx = V(a, 0) - V(b, 0);
      const double wy = V(a, 1) - V(b, 1);
      if (std::hypot(wx, wy) < 1e-15) continue;
      const double base = std::atan2(wy, wx);
      for (const double cand : {base + M_PI / 2.0, base - M_PI / 2.0}) {
        double t = std::fmod(cand, kTwoPi);
        if (t < 0) t += kTwoPi;
        angles.push_back(t);
      }
    }
  std::sort(angles.begin(), angles.end());
  angles.erase(std::unique(angles.begin(), angles.end(),
                           [](double a, double b) { return b - a < 1e-12; }),
               angles.end());

  std::vector<double> midpoints;
  if (angles.empty()) {
    midpoints.push_back(0.0);
  } else {
    for (std::size_t t = 0; t < angles.size(); ++t) {
      const double lo = angles[t];
      const double hi =
          t + 1 < angles.size() ? angles[t + 1] : angles.front() + kTwoPi;
      midpoints.push_back(std::fmod((lo + hi) / 2.0, kTwoPi));
    }
  }

  AccessVerdict v;
  v.method = AccessMethod::OracleSweep;
  v.margin = -kInf;
  for (const double theta : midpoints) {
    Vector u(2);
    u << std::cos(theta), std::sin(theta);
    const Vector scores = V * u;
    if (top_k(scores, s.k()) == s) {
      const double margin = set_margin(scores, s);
      if (!v.accessible || margin > v.margin) {
        v.accessible = true;
        v.margin = margin;
        v.witness = UserRep(u);
      }
    }
  }
  if (!v.accessible) v.margin = 0.0;
  return v;
}

AccessVerdict oracle_sample(const EmbeddingSet& items, const ItemSet& s,
                            std::int64_t samples, std::uint64_t seed) {
  if (samples < 1)
    throw std::invalid_argument("oracle_sample: samples >= 1 required");
  check_set(items, s, /*require_proper=*/false);
  const Matrix& V = items.vectors();

  auto eng = rng_stream(seed, "oracle-sample");
  std::normal_distribution<double> gauss(0.0, 1.0);

  AccessVerdict v;
  v.method = AccessMethod::OracleSample;
  for (std::int64_t t = 0; t < samples; ++t) {
    Vector u(items.dim());
    for (Index q = 0; q < items.dim(); ++q) u(q) = gauss(eng);
    const double norm = u.norm();
    if (norm < 1e-12) continue;
    u /= norm;
    const Vector scores = V * u;
    if (top_k(scores, s.k()) == s) {
      v.accessible = true;
      v.margin = set_margin(scores, s);
      v.witness = UserRep(u);
      return v;
    }
  }
  return v;  // not found: inconclusive, margin 0
}

UserRep multi_vector_witness(const EmbeddingSet& items, const ItemSet& s,
                             const AccessOptions& opts) {
  check_set(items, s, /*require_proper=*/false);
  const Matrix& V = items.vectors();
  const Index n = items.size();
  const Index d = items.dim();

  Matrix witness(s.k(), d);
  for (Index pos = 0; pos < s.k(); ++pos) {
    const Index item = s[pos];
    Matrix rows(n - 1, d);
    Index r = 0;
    for (Index j = 0; j < n; ++j) {
      if (j == item) continue;
      rows.row(r++) = V.row(item) - V.row(j);
    }

    FeasibilityResult lp = lp_strict_feasible<double>(rows, opts.tolerance);
    if (!lp.feasible)
      throw std::invalid_argument("multi_vector_witness: item '" +
                                  items.id(item) +
                                  "' is not individually accessible");
    Vector u = *lp.witness;
    double self = u.dot(V.row(item));
    if (self <= opts.tolerance) {
      // The common-level rescaling needs a positive self-score; ask the LP
      // for a representative on the right side of the item's hyperplane.
      Matrix rows2(n, d);
      rows2.topRows(n - 1) = rows;
      rows2.row(n - 1) = V.row(item);
      lp = lp_strict_feasible<double>(rows2, opts.tolerance);
      if (!lp.feasible)
        throw DataError("multi_vector_witness: item '" + items.id(item) +
                        "' admits no representative with positive self-score");
      u = *lp.witness;
      self = u.dot(V.row(item));
    }
    witness.row(pos) = u.transpose() / self;  // common level 1
  }

  UserRep rep((Matrix(witness)));
  const Vector scores = score_multi(rep, items);
  if (!(top_k(scores, s.k()) == s))
    throw NumericsError("multi_vector_witness: constructed witness failed re-check");
  return rep;
}

AccessVerdict monotone_violation_extend(const EmbeddingSet& items,
                                        const ItemSet& s,
                                        const Matrix& extra_vectors,
                                        const std::vector<std::string>& extra_ids,
                                        const AccessOptions& opts) {
  if (extra_vectors.rows() != static_cast<Index>(extra_ids.size()))
    throw std::invalid_argument("monotone_violation_extend: ids/rows mismatch");
  if (extra_vectors.rows() > 0 && extra_vectors.cols() != items.dim())
    throw std::invalid_argument("monotone_violation_extend: dimension mismatch");

  const AccessVerdict base = joint_accessible(items, s, opts);
  if (base.accessible)
    throw std::invalid_argument(
        "monotone_violation_extend: set is accessible under the base items");
  if (extra_vectors.rows() == 0) return base;

  std::vector<std::string> ids = items.ids();
  ids.insert(ids.end(), extra_ids.begin(), extra_ids.end());
  Matrix combined(items.size() + extra_vectors.rows(), items.dim());
  combined.topRows(items.size()) = items.vectors();
  combined.bottomRows(extra_vectors.rows()) = extra_vectors;
  const EmbeddingSet extended(std::move(ids), std::move(combined));
  return joint_accessible(extended, s, opts);
}

AccessVerdict monotone_violation_extend(const EmbeddingSet& items,
                                        const ItemSet& s,
                                        const EmbeddingSet& extra,
                                        const AccessOptions& opts) {
  return monotone_violation_extend(items, s, extra.vectors(), extra.ids(),
                                   opts);
}

HeuristicSolver::HeuristicSolver(const EmbeddingSet& items, double ridge)
    : item_vectors_(items.vectors()) {
  if (ridge < 0)
    throw std::invalid_argument("HeuristicSolver: ridge must be nonnegative");
  const Matrix& V = item_vectors_;
  if (ridge > 0) {
    Matrix gram = V.transpose() * V;
    gram.diagonal().array() += ridge;
    gain_ = Eigen::LLT<Matrix>(gram).solve(Matrix(V.transpose()));
  } else {
    Eigen::BDCSVD<Matrix> svd(V, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& sv = svd.singularValues();
    const double cutoff = sv.size() > 0
                              ? sv(0) * std::numeric_limits<double>::epsilon() *
                                    static_cast<double>(std::max(V.rows(), V.cols()))
                              : 0.0;
    Vector inv = Vector::Zero(sv.size());
    for (Index q = 0; q < sv.size(); ++q)
      if (sv(q) > cutoff) inv(q) = 1.0 / sv(q);
    gain_ = svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
  }
}

Vector HeuristicSolver::user_for(const ItemSet& s) const {
  if (s.indices().back() >= item_vectors_.rows())
    throw std::invalid_argument("HeuristicSolver: index out of range");
  Vector u = Vector::Zero(gain_.rows());
  for (Index i : s.indices()) u += gain_.col(i);
  return u;
}

AccessVerdict HeuristicSolver::accessible(const ItemSet& s) const {
  const Vector u = user_for(s);
  const Vector scores = item_vectors_ * u;
  AccessVerdict v;
  v.method = AccessMethod::HeuristicLs;
  v.margin = set_margin(scores, s);
  v.accessible = top_k(scores, s.k()) == s;
  if (v.accessible) v.witness = UserRep(u);
  return v;
}

}  // namespace jaccess
