#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "orgsim/rng.hpp"

namespace orgsim {

// A full task solution (N bits) or partial subtask solution (S bits),
// stored little-endian: decision i lives at bit i.
using full_bits_t = std::uint32_t;
using part_bits_t = std::uint16_t;

enum class StructureKind { Decomposed, Interdependent, Roll, FromFile };

std::string to_string(StructureKind kind);

// Which decisions co-determine each performance contribution. Row i lists
// the k decisions (besides i itself) entering c_i, ascending.
struct InterdependenceMatrix {
  int n = 0;
  StructureKind kind = StructureKind::Decomposed;
  int k = 0;
  std::vector<std::vector<int>> rows;
};

// Decomposed: complete interdependence inside each block of s = n/m
// consecutive decisions, no cross-block links (requires k == s-1).
// Interdependent: intra-block links plus the k-(s-1) decisions cyclically
// following the block.
// Roll: row i depends on i+1 .. i+k (mod n).
InterdependenceMatrix build_matrix(StructureKind kind, int n, int m_subtasks,
                                   int k);

// Text format: n lines of n characters, 'x' at column j of row i meaning
// c_i depends on d_j; the diagonal must be 'x'. All rows must carry the
// same dependency count.
InterdependenceMatrix parse_matrix(std::istream& in);
InterdependenceMatrix load_matrix_file(const std::string& path);
void write_matrix(const InterdependenceMatrix& m, std::ostream& out);

class Landscape {
 public:
  // Draws one 2^(k+1)-entry U(0,1) payoff table per decision from
  // xoshiro256** seeded with `seed` (row by row, index order), then finds
  // and caches the global optimum by exhaustive enumeration (n <= 24).
  Landscape(InterdependenceMatrix matrix, std::uint64_t seed);

  // Injected payoff tables (one 2^(k+1)-entry row per decision); mostly
  // useful for controlled fields in tests.
  Landscape(InterdependenceMatrix matrix,
            std::vector<std::vector<double>> tables);

  int n() const { return matrix_.n; }
  int k() const { return matrix_.k; }
  std::uint64_t seed() const { return seed_; }
  const InterdependenceMatrix& matrix() const { return matrix_; }
  const std::vector<double>& table(int decision) const {
    return tables_[decision];
  }

  // c_n of Eq-style payoff lookup: index bits are (own decision first,
  // then dependencies ascending), own bit most significant.
  double contribution(full_bits_t d, int decision) const {
    const auto& pos = index_bits_[decision];
    std::uint32_t idx = 0;
    for (int p : pos) idx = (idx << 1) | ((d >> p) & 1u);
    return tables_[decision][idx];
  }

  // Mean of all n contributions.
  double performance(full_bits_t d) const {
    double sum = 0.0;
    for (int i = 0; i < matrix_.n; ++i) sum += contribution(d, i);
    return sum / matrix_.n;
  }

  full_bits_t optimum_bits() const { return optimum_bits_; }
  double optimum_value() const { return optimum_value_; }

 private:
  InterdependenceMatrix matrix_;
  std::uint64_t seed_;
  std::vector<std::vector<double>> tables_;
  std::vector<std::vector<int>> index_bits_;  // own index first, then deps
  full_bits_t optimum_bits_ = 0;
  double optimum_value_ = 0.0;
};

// Exact maximum over all 2^n solutions; ties resolved toward the lowest
// bitstring read as an unsigned integer. Throws if n > 24.
std::pair<full_bits_t, double> global_optimum(const Landscape& landscape);

}  // namespace orgsim
