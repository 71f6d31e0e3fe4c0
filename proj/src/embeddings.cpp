#include "jaccess/embeddings.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <unordered_set>

namespace jaccess {

namespace {

double parse_double(std::string_view token, const std::filesystem::path& path,
                    std::size_t line_no) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    throw DataError(path.string() + ":" + std::to_string(line_no) +
                    ": unparseable number '" + std::string(token) + "'");
  return value;
}

}  // namespace

EmbeddingSet::EmbeddingSet(std::vector<std::string> ids, Matrix vectors,
                           bool normalized)
    : ids_(std::move(ids)), vectors_(std::move(vectors)),
      normalized_(normalized) {
  if (vectors_.rows() < 1 || vectors_.cols() < 1)
    throw std::invalid_argument("EmbeddingSet: need n >= 1 and d >= 1");
  if (static_cast<Index>(ids_.size()) != vectors_.rows())
    throw std::invalid_argument("EmbeddingSet: ids/rows mismatch");
  if (!vectors_.allFinite())
    throw DataError("EmbeddingSet: non-finite entry");
  std::unordered_set<std::string_view> seen;
  for (const auto& id : ids_)
    if (!seen.insert(id).second)
      throw DataError("EmbeddingSet: duplicate id '" + id + "'");
  if (normalized_) {
    for (Index i = 0; i < vectors_.rows(); ++i)
      if (std::abs(vectors_.row(i).norm() - 1.0) > 1e-9)
        throw std::invalid_argument("EmbeddingSet: row '" + ids_[i] +
                                    "' is not unit norm");
  }
}

UserRep::UserRep(Matrix vectors) : vectors_(std::move(vectors)) {
  if (vectors_.rows() < 1 || vectors_.cols() < 1)
    throw std::invalid_argument("UserRep: need m >= 1 and d >= 1");
  if (!vectors_.allFinite()) throw DataError("UserRep: non-finite entry");
}

UserRep::UserRep(const Vector& single) : UserRep(Matrix(single.transpose())) {}

EmbeddingSet load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");

  std::vector<std::string> ids;
  std::vector<std::vector<double>> rows;
  Index dim = -1;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    std::vector<std::string_view> fields;
    std::string_view rest = line;
    while (true) {
      const auto comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() < 2)
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": expected 'id,x1,...,xd'");
    if (dim < 0) dim = static_cast<Index>(fields.size()) - 1;
    if (static_cast<Index>(fields.size()) - 1 != dim)
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": expected " + std::to_string(dim) +
                      " coordinates, got " +
                      std::to_string(fields.size() - 1));

    ids.emplace_back(fields[0]);
    std::vector<double> coords(static_cast<std::size_t>(dim));
    for (Index j = 0; j < dim; ++j)
      coords[static_cast<std::size_t>(j)] =
          parse_double(fields[static_cast<std::size_t>(j) + 1], path, line_no);
    rows.push_back(std::move(coords));
  }
  if (rows.empty()) throw DataError(path.string() + ": no rows");

  {
    std::unordered_set<std::string_view> seen;
    for (std::size_t i = 0; i < ids.size(); ++i)
      if (!seen.insert(ids[i]).second)
        throw DataError(path.string() + ": duplicate id '" + ids[i] + "'");
  }

  Matrix m(static_cast<Index>(rows.size()), dim);
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < dim; ++j)
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return EmbeddingSet(std::move(ids), std::move(m));
}

void save_embeddings(const EmbeddingSet& set,
                     const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);  // binary: LF on every platform
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  char buf[64];
  for (Index i = 0; i < set.size(); ++i) {
    out << set.id(i);
    for (Index j = 0; j < set.dim(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", set.vectors()(i, j));
      out << ',' << buf;
    }
    out << '\n';
  }
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

EmbeddingSet normalize_rows(const EmbeddingSet& set) {
  Matrix m = set.vectors();
  for (Index i = 0; i < m.rows(); ++i) {
    const double norm = m.row(i).norm();
    if (norm < 1e-300)
      throw DataError("normalize_rows: zero row for item '" + set.id(i) + "'");
    m.row(i) /= norm;
  }
  return EmbeddingSet(set.ids(), std::move(m), /*normalized=*/true);
}

double pair_similarity(const EmbeddingSet& set, Index i, Index j,
                       Similarity mode) {
  if (i < 0 || i >= set.size() || j < 0 || j >= set.size())
    throw std::invalid_argument("pair_similarity: index out of range");
  const double dot = set.vectors().row(i).dot(set.vectors().row(j));
  if (mode == Similarity::Dot) return dot;
  const double ni = set.vectors().row(i).norm();
  const double nj = set.vectors().row(j).norm();
  if (ni < 1e-300 || nj < 1e-300)
    throw DataError("pair_similarity: cosine undefined for zero-norm row");
  return dot / (ni * nj);
}

}  // namespace jaccess
