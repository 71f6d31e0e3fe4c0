#include "jaccess/factorization.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <unordered_map>

#include "jaccess/parallel.hpp"
#include "jaccess/rng.hpp"

namespace jaccess {

namespace {

struct RawTriple {
  std::string user;
  std::string item;
  double value = 0.0;
  std::size_t line = 0;
};

double parse_rating(std::string_view token, const std::filesystem::path& path,
                    std::size_t line_no) {
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size() ||
      !std::isfinite(value))
    throw DataError(path.string() + ":" + std::to_string(line_no) +
                    ": unparseable rating '" + std::string(token) + "'");
  return value;
}

std::vector<RawTriple> read_raw(const std::filesystem::path& path,
                                bool movielens) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::vector<RawTriple> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    std::vector<std::string_view> fields;
    std::string_view rest = line;
    const std::string_view sep = movielens ? "::" : ",";
    while (true) {
      const auto at = rest.find(sep);
      fields.push_back(rest.substr(0, at));
      if (at == std::string_view::npos) break;
      rest.remove_prefix(at + sep.size());
    }
    const std::size_t needed = movielens ? 4 : 3;
    if (fields.size() < 3 || (!movielens && fields.size() != 3) ||
        (movielens && fields.size() != needed))
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": expected " + (movielens
                                           ? "'user::item::rating::timestamp'"
                                           : "'user,item,rating'"));
    RawTriple t;
    t.user = std::string(fields[0]);
    t.item = std::string(fields[1]);
    t.value = parse_rating(fields[2], path, line_no);
    t.line = line_no;
    out.push_back(std::move(t));
  }
  if (out.empty()) throw DataError(path.string() + ": no rows");
  return out;
}

bool all_integer(const std::vector<std::string>& ids) {
  for (const auto& s : ids) {
    if (s.empty()) return false;
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return false;
  }
  return true;
}

std::vector<std::string> sorted_unique_ids(std::vector<std::string> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  if (all_integer(ids)) {
    std::sort(ids.begin(), ids.end(), [](const auto& a, const auto& b) {
      std::int64_t va = 0, vb = 0;
      std::from_chars(a.data(), a.data() + a.size(), va);
      std::from_chars(b.data(), b.data() + b.size(), vb);
      return va < vb;
    });
  }
  return ids;
}

}  // namespace

void RatingDataset::validate() const {
  if (n_users < 0 || n_items < 0)
    throw DataError("RatingDataset: negative entity count");
  for (const Rating& t : triples) {
    if (t.user < 0 || t.user >= n_users || t.item < 0 || t.item >= n_items)
      throw DataError("RatingDataset: index out of declared bounds (user " +
                      std::to_string(t.user) + ", item " +
                      std::to_string(t.item) + ")");
    if (!std::isfinite(t.value))
      throw DataError("RatingDataset: non-finite rating");
  }
  std::vector<std::pair<std::int64_t, std::int64_t>> keys;
  keys.reserve(triples.size());
  for (const Rating& t : triples) keys.emplace_back(t.user, t.item);
  std::sort(keys.begin(), keys.end());
  const auto dup = std::adjacent_find(keys.begin(), keys.end());
  if (dup != keys.end())
    throw DataError("RatingDataset: duplicate (user " +
                    std::to_string(dup->first) + ", item " +
                    std::to_string(dup->second) + ")");
}

FactorModel train_als(const RatingDataset& data, const AlsOptions& opts,
                      AlsTrace* trace) {
  if (opts.iterations < 1)
    throw std::invalid_argument("train_als: iterations >= 1");
  if (opts.dim < 1) throw std::invalid_argument("train_als: dim >= 1");
  if (opts.reg < 0) throw std::invalid_argument("train_als: reg >= 0");
  if (data.triples.empty()) throw DataError("train_als: empty dataset");
  data.validate();

  const std::int64_t n_users = data.n_users;
  const std::int64_t n_items = data.n_items;
  const Index d = opts.dim;

  std::vector<std::vector<std::pair<std::int64_t, double>>> by_user(
      static_cast<std::size_t>(n_users));
  std::vector<std::vector<std::pair<std::int64_t, double>>> by_item(
      static_cast<std::size_t>(n_items));
  for (const Rating& t : data.triples) {
    by_user[static_cast<std::size_t>(t.user)].emplace_back(t.item, t.value);
    by_item[static_cast<std::size_t>(t.item)].emplace_back(t.user, t.value);
  }

  Matrix users(n_users, d);
  Matrix items(n_items, d);
  {
    auto eng = rng_stream(opts.seed, "als-init");
    std::uniform_real_distribution<double> unif(-0.1, 0.1);
    for (Index i = 0; i < users.rows(); ++i)
      for (Index j = 0; j < d; ++j) users(i, j) = unif(eng);
    for (Index i = 0; i < items.rows(); ++i)
      for (Index j = 0; j < d; ++j) items(i, j) = unif(eng);
  }
  // Cold rows stay zero throughout; they never enter a solve.
  for (std::size_t i = 0; i < by_user.size(); ++i)
    if (by_user[i].empty()) users.row(static_cast<Index>(i)).setZero();
  for (std::size_t i = 0; i < by_item.size(); ++i)
    if (by_item[i].empty()) items.row(static_cast<Index>(i)).setZero();

  const auto objective = [&]() {
    double sq = 0.0;
    for (const Rating& t : data.triples) {
      const double err = t.value - users.row(t.user).dot(items.row(t.item));
      sq += err * err;
    }
    return sq + opts.reg * (users.squaredNorm() + items.squaredNorm());
  };

  // One ridge solve per row against the fixed opposite side.
  const auto half_step =
      [&](Matrix& solve_side,
          const std::vector<std::vector<std::pair<std::int64_t, double>>>& lists,
          const Matrix& fixed_side) {
        parallel_for(static_cast<std::int64_t>(lists.size()),
                     [&](std::int64_t row) {
                       const auto& obs = lists[static_cast<std::size_t>(row)];
                       if (obs.empty()) return;
                       Matrix design(static_cast<Index>(obs.size()), d);
                       Vector target(static_cast<Index>(obs.size()));
                       for (std::size_t q = 0; q < obs.size(); ++q) {
                         design.row(static_cast<Index>(q)) =
                             fixed_side.row(obs[q].first);
                         target(static_cast<Index>(q)) = obs[q].second;
                       }
                       if (opts.reg > 0) {
                         Matrix gram = design.transpose() * design;
                         gram.diagonal().array() += opts.reg;
                         solve_side.row(row) =
                             Eigen::LLT<Matrix>(gram)
                                 .solve(design.transpose() * target)
                                 .transpose();
                       } else {
                         solve_side.row(row) =
                             design.completeOrthogonalDecomposition()
                                 .solve(target)
                                 .transpose();
                       }
                     });
      };

  const auto project_rows = [](Matrix& m) {
    for (Index i = 0; i < m.rows(); ++i) {
      const double norm = m.row(i).norm();
      if (norm > 1e-12) m.row(i) /= norm;
    }
  };

  for (int it = 0; it < opts.iterations; ++it) {
    half_step(users, by_user, items);
    if (opts.norm_constraint) project_rows(users);
    if (trace) trace->objective.push_back(objective());

    half_step(items, by_item, users);
    if (opts.norm_constraint) project_rows(items);
    if (trace) trace->objective.push_back(objective());

    if (!users.allFinite() || !items.allFinite())
      throw NumericsError("train_als: diverged to non-finite values at iteration " +
                          std::to_string(it + 1));
    if (trace) {
      double sq = 0.0;
      for (const Rating& t : data.triples) {
        const double err = t.value - users.row(t.user).dot(items.row(t.item));
        sq += err * err;
      }
      trace->rmse.push_back(
          std::sqrt(sq / static_cast<double>(data.triples.size())));
    }
  }

  FactorModel model;
  model.user_factors = std::move(users);
  model.item_factors = std::move(items);
  model.norm_constrained = opts.norm_constraint;
  return model;
}

double rmse(const FactorModel& model, const RatingDataset& data) {
  if (data.triples.empty()) throw DataError("rmse: empty dataset");
  if (model.user_factors.rows() < data.n_users ||
      model.item_factors.rows() < data.n_items)
    throw std::invalid_argument("rmse: model smaller than dataset bounds");
  double sq = 0.0;
  for (const Rating& t : data.triples) {
    const double err =
        t.value - model.user_factors.row(t.user).dot(model.item_factors.row(t.item));
    sq += err * err;
  }
  return std::sqrt(sq / static_cast<double>(data.triples.size()));
}

double grid_search_reg(const RatingDataset& data, Index dim,
                       const std::vector<double>& reg_grid, int folds,
                       std::uint64_t seed, int iterations) {
  if (folds < 2) throw std::invalid_argument("grid_search_reg: folds >= 2");
  if (reg_grid.empty())
    throw std::invalid_argument("grid_search_reg: empty grid");
  data.validate();
  if (static_cast<std::int64_t>(data.triples.size()) < folds)
    throw DataError("grid_search_reg: a fold would hold zero triples");

  std::vector<std::size_t> order(data.triples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  {
    auto eng = rng_stream(seed, "cv-folds");
    std::shuffle(order.begin(), order.end(), eng);
  }
  std::vector<int> fold_of(data.triples.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos)
    fold_of[order[pos]] = static_cast<int>(pos % static_cast<std::size_t>(folds));

  std::vector<double> grid = reg_grid;
  std::sort(grid.begin(), grid.end());

  double best_reg = grid.front();
  double best_score = std::numeric_limits<double>::infinity();
  for (const double reg : grid) {
    double mean = 0.0;
    for (int f = 0; f < folds; ++f) {
      RatingDataset train{{}, data.n_users, data.n_items};
      RatingDataset held{{}, data.n_users, data.n_items};
      for (std::size_t q = 0; q < data.triples.size(); ++q)
        (fold_of[q] == f ? held : train).triples.push_back(data.triples[q]);
      if (train.triples.empty() || held.triples.empty())
        throw DataError("grid_search_reg: a fold would hold zero triples");

      AlsOptions opts;
      opts.dim = dim;
      opts.reg = reg;
      opts.iterations = iterations;
      opts.seed = splitmix64(seed) + static_cast<std::uint64_t>(f);
      mean += rmse(train_als(train, opts), held);
    }
    mean /= folds;
    if (mean < best_score) {
      best_score = mean;
      best_reg = reg;
    }
  }
  return best_reg;
}

RatingsTable load_ratings(const std::filesystem::path& path,
                          RatingsFormat format) {
  bool movielens = false;
  switch (format) {
    case RatingsFormat::Csv: movielens = false; break;
    case RatingsFormat::MovieLens: movielens = true; break;
    case RatingsFormat::Auto: movielens = path.extension() == ".dat"; break;
  }
  const std::vector<RawTriple> raw = read_raw(path, movielens);

  std::vector<std::string> users, items;
  users.reserve(raw.size());
  items.reserve(raw.size());
  for (const RawTriple& t : raw) {
    users.push_back(t.user);
    items.push_back(t.item);
  }
  RatingsTable table;
  table.user_ids = sorted_unique_ids(std::move(users));
  table.item_ids = sorted_unique_ids(std::move(items));

  std::unordered_map<std::string_view, std::int64_t> user_index, item_index;
  for (std::size_t i = 0; i < table.user_ids.size(); ++i)
    user_index.emplace(table.user_ids[i], static_cast<std::int64_t>(i));
  for (std::size_t i = 0; i < table.item_ids.size(); ++i)
    item_index.emplace(table.item_ids[i], static_cast<std::int64_t>(i));

  table.data.n_users = static_cast<std::int64_t>(table.user_ids.size());
  table.data.n_items = static_cast<std::int64_t>(table.item_ids.size());
  table.data.triples.reserve(raw.size());
  for (const RawTriple& t : raw)
    table.data.triples.push_back(
        {user_index.at(t.user), item_index.at(t.item), t.value});

  try {
    table.data.validate();
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  return table;
}

RatingDataset load_ratings_indexed(const std::filesystem::path& path,
                                   std::int64_t n_users, std::int64_t n_items) {
  const std::vector<RawTriple> raw = read_raw(path, /*movielens=*/false);
  RatingDataset data{{}, n_users, n_items};
  data.triples.reserve(raw.size());
  for (const RawTriple& t : raw) {
    std::int64_t u = 0, i = 0;
    const auto [pu, eu] = std::from_chars(t.user.data(), t.user.data() + t.user.size(), u);
    const auto [pi, ei] = std::from_chars(t.item.data(), t.item.data() + t.item.size(), i);
    if (eu != std::errc() || pu != t.user.data() + t.user.size() ||
        ei != std::errc() || pi != t.item.data() + t.item.size())
      throw DataError(path.string() + ":" + std::to_string(t.line) +
                      ": expected integer indices");
    data.triples.push_back({u, i, t.value});
  }
  try {
    data.validate();
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  return data;
}

void save_ratings_csv(const RatingDataset& data,
                      const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  char buf[64];
  for (const Rating& t : data.triples) {
    std::snprintf(buf, sizeof(buf), "%.17g", t.value);
    out << t.user << ',' << t.item << ',' << buf << '\n';
  }
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

}  // namespace jaccess
