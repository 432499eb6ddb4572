#include "orgsim/landscape.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace orgsim {

std::string to_string(StructureKind kind) {
  switch (kind) {
    case StructureKind::Decomposed: return "decomposed";
    case StructureKind::Interdependent: return "interdependent";
    case StructureKind::Roll: return "roll";
    case StructureKind::FromFile: return "file";
  }
  return "?";
}

namespace {

void validate_matrix(const InterdependenceMatrix& m) {
  if (m.n <= 0 || static_cast<int>(m.rows.size()) != m.n)
    throw std::invalid_argument("matrix: row count must equal n");
  for (int i = 0; i < m.n; ++i) {
    const auto& row = m.rows[i];
    if (static_cast<int>(row.size()) != m.k)
      throw std::invalid_argument("matrix: row " + std::to_string(i) +
                                  " must list exactly k dependencies");
    for (size_t j = 0; j < row.size(); ++j) {
      if (row[j] < 0 || row[j] >= m.n || row[j] == i)
        throw std::invalid_argument("matrix: bad dependency index in row " +
                                    std::to_string(i));
      if (j > 0 && row[j] <= row[j - 1])
        throw std::invalid_argument("matrix: row " + std::to_string(i) +
                                    " not strictly ascending");
    }
  }
}

}  // namespace

InterdependenceMatrix build_matrix(StructureKind kind, int n, int m_subtasks,
                                   int k) {
  if (m_subtasks <= 0 || n <= 0 || n % m_subtasks != 0)
    throw std::invalid_argument("build_matrix: n must be divisible by m");
  if (k < 0 || k >= n)
    throw std::invalid_argument("build_matrix: k out of range");
  const int s = n / m_subtasks;

  InterdependenceMatrix m;
  m.n = n;
  m.kind = kind;
  m.k = k;
  m.rows.resize(n);
  for (int i = 0; i < n; ++i) {
    const int block = i / s;
    auto& row = m.rows[i];
    switch (kind) {
      case StructureKind::Decomposed:
        if (k != s - 1)
          throw std::invalid_argument(
              "build_matrix: decomposed requires k == s-1 (no cross links)");
        for (int j = block * s; j < (block + 1) * s; ++j)
          if (j != i) row.push_back(j);
        break;
      case StructureKind::Interdependent: {
        if (k < s - 1)
          throw std::invalid_argument(
              "build_matrix: interdependent requires k >= s-1");
        for (int j = block * s; j < (block + 1) * s; ++j)
          if (j != i) row.push_back(j);
        for (int t = 0; t < k - (s - 1); ++t)
          row.push_back(((block + 1) * s + t) % n);
        std::sort(row.begin(), row.end());
        break;
      }
      case StructureKind::Roll:
        for (int t = 1; t <= k; ++t) row.push_back((i + t) % n);
        std::sort(row.begin(), row.end());
        break;
      case StructureKind::FromFile:
        throw std::invalid_argument(
            "build_matrix: FromFile matrices come from parse_matrix");
    }
  }
  validate_matrix(m);
  return m;
}

InterdependenceMatrix parse_matrix(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
      line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  const int n = static_cast<int>(lines.size());
  if (n == 0) throw std::invalid_argument("matrix file: empty");

  InterdependenceMatrix m;
  m.n = n;
  m.kind = StructureKind::FromFile;
  m.rows.resize(n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(lines[i].size()) != n)
      throw std::invalid_argument("matrix file: line " + std::to_string(i + 1) +
                                  " must have exactly " + std::to_string(n) +
                                  " characters");
    for (int j = 0; j < n; ++j) {
      const char c = lines[i][j];
      if (c != '0' && c != 'x')
        throw std::invalid_argument("matrix file: line " + std::to_string(i + 1) +
                                    ": characters must be '0' or 'x'");
      if (i == j) {
        if (c != 'x')
          throw std::invalid_argument("matrix file: diagonal must be 'x' (row " +
                                      std::to_string(i + 1) + ")");
      } else if (c == 'x') {
        m.rows[i].push_back(j);
      }
    }
  }
  m.k = static_cast<int>(m.rows[0].size());
  for (int i = 0; i < n; ++i)
    if (static_cast<int>(m.rows[i].size()) != m.k)
      throw std::invalid_argument(
          "matrix file: all rows must have the same dependency count");
  validate_matrix(m);
  return m;
}

InterdependenceMatrix load_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open matrix file: " + path);
  return parse_matrix(in);
}

void write_matrix(const InterdependenceMatrix& m, std::ostream& out) {
  for (int i = 0; i < m.n; ++i) {
    std::string line(m.n, '0');
    line[i] = 'x';
    for (int j : m.rows[i]) line[j] = 'x';
    out << line << '\n';
  }
}

Landscape::Landscape(InterdependenceMatrix matrix, std::uint64_t seed)
    : matrix_(std::move(matrix)), seed_(seed) {
  validate_matrix(matrix_);
  if (matrix_.n > 24)
    throw std::invalid_argument("landscape: n > 24 not supported");

  Xoshiro256ss rng(seed_);
  const size_t table_size = size_t{1} << (matrix_.k + 1);
  tables_.resize(matrix_.n);
  index_bits_.resize(matrix_.n);
  for (int i = 0; i < matrix_.n; ++i) {
    tables_[i].resize(table_size);
    for (auto& v : tables_[i]) v = rng.uniform();
    index_bits_[i].reserve(matrix_.k + 1);
    index_bits_[i].push_back(i);
    for (int j : matrix_.rows[i]) index_bits_[i].push_back(j);
  }

  auto [bits, value] = global_optimum(*this);
  optimum_bits_ = bits;
  optimum_value_ = value;
}

Landscape::Landscape(InterdependenceMatrix matrix,
                     std::vector<std::vector<double>> tables)
    : matrix_(std::move(matrix)), seed_(0), tables_(std::move(tables)) {
  validate_matrix(matrix_);
  if (matrix_.n > 24)
    throw std::invalid_argument("landscape: n > 24 not supported");
  const size_t table_size = size_t{1} << (matrix_.k + 1);
  if (static_cast<int>(tables_.size()) != matrix_.n)
    throw std::invalid_argument("landscape: need one table per decision");
  for (const auto& t : tables_)
    if (t.size() != table_size)
      throw std::invalid_argument("landscape: table size must be 2^(k+1)");
  index_bits_.resize(matrix_.n);
  for (int i = 0; i < matrix_.n; ++i) {
    index_bits_[i].reserve(matrix_.k + 1);
    index_bits_[i].push_back(i);
    for (int j : matrix_.rows[i]) index_bits_[i].push_back(j);
  }
  auto [bits, value] = global_optimum(*this);
  optimum_bits_ = bits;
  optimum_value_ = value;
}

std::pair<full_bits_t, double> global_optimum(const Landscape& landscape) {
  const int n = landscape.n();
  if (n > 24) throw std::invalid_argument("global_optimum: n > 24");
  full_bits_t best_bits = 0;
  double best = landscape.performance(0);
  const full_bits_t count = full_bits_t{1} << n;
  for (full_bits_t d = 1; d < count; ++d) {
    const double p = landscape.performance(d);
    if (p > best) {  // strict: ties keep the lowest bitstring
      best = p;
      best_bits = d;
    }
  }
  return {best_bits, best};
}

}  // namespace orgsim
