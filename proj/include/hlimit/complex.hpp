#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace hlimit {

using Simplex = std::vector<std::uint32_t>;

/// Ranks b_0..b_K of homology with Z/2 coefficients.
struct BettiVector {
  std::vector<std::uint64_t> ranks;

  [[nodiscard]] std::uint64_t operator[](std::size_t k) const { return k < ranks.size() ? ranks[k] : 0; }
  [[nodiscard]] std::size_t size() const { return ranks.size(); }
  friend bool operator==(const BettiVector&, const BettiVector&) = default;
};

/// Abstract finite simplicial complex, closed under taking faces. Simplices
/// are strictly increasing vertex lists, grouped by dimension and sorted
/// lexicographically inside each dimension.
class SimplicialComplex {
 public:
  SimplicialComplex() = default;

  /// Adds every listed simplex together with all of its faces. Input vertex
  /// lists may be unsorted; repeated vertices throw std::invalid_argument.
  static SimplicialComplex closure_of(const std::vector<Simplex>& simplices);
  /// Takes an already face-closed, per-dimension sorted list without checks.
  static SimplicialComplex from_sorted_levels(std::vector<std::vector<Simplex>> levels);

  [[nodiscard]] int dimension() const { return static_cast<int>(levels_.size()) - 1; }
  [[nodiscard]] const std::vector<Simplex>& simplices(std::size_t dim) const;
  [[nodiscard]] std::size_t count(std::size_t dim) const { return simplices(dim).size(); }
  [[nodiscard]] std::size_t total_count() const;
  /// Index within its dimension, or npos.
  [[nodiscard]] std::size_t index_of(const Simplex& s) const;
  [[nodiscard]] bool contains(const Simplex& s) const { return index_of(s) != npos; }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::vector<std::vector<Simplex>> levels_;
};

/// Homology ranks up to degree max_k by Z/2 column reduction of the boundary
/// matrices, simplices ordered dimension-major then lexicographically.
[[nodiscard]] BettiVector simplicial_betti(const SimplicialComplex& complex, std::size_t max_k);

/// Rank over Z/2 of the boundary map from dim-simplices to (dim-1)-simplices.
[[nodiscard]] std::size_t boundary_rank(const SimplicialComplex& complex, std::size_t dim);

}  // namespace hlimit
