#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <set>
#include <vector>

#include "hlimit/complex.hpp"

// Brute-force Z/2 homology, sharing no code with the library: simplices are
// vertex bitmasks and boundary matrices are dense rows of bits.
namespace z2_oracle {

using hlimit::Simplex;
using hlimit::SimplicialComplex;
using Mask = std::uint32_t;

inline std::size_t rank_z2(std::vector<std::vector<std::uint64_t>> rows) {
  std::size_t rank = 0;
  const std::size_t words = rows.empty() ? 0 : rows[0].size();
  for (std::size_t col = 0; col < words * 64; ++col) {
    const std::size_t w = col / 64;
    const std::uint64_t bit = std::uint64_t{1} << (col % 64);
    std::size_t piv = rank;
    while (piv < rows.size() && !(rows[piv][w] & bit)) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[piv], rows[rank]);
    for (std::size_t r = 0; r < rows.size(); ++r)
      if (r != rank && (rows[r][w] & bit))
        for (std::size_t k = 0; k < words; ++k) rows[r][k] ^= rows[rank][k];
    ++rank;
  }
  return rank;
}

inline std::vector<std::uint64_t> oracle_betti(const std::set<Mask>& cx, std::size_t max_k) {
  std::vector<std::vector<Mask>> by_dim;
  for (Mask m : cx) {
    const std::size_t d = static_cast<std::size_t>(std::popcount(m)) - 1;
    if (by_dim.size() <= d) by_dim.resize(d + 1);
    by_dim[d].push_back(m);
  }
  const auto rank_of = [&](std::size_t d) -> std::size_t {  // rank of boundary d -> d-1
    if (d == 0 || d >= by_dim.size()) return 0;
    const auto& lower = by_dim[d - 1];
    std::vector<std::vector<std::uint64_t>> rows;
    for (Mask s : by_dim[d]) {
      std::vector<std::uint64_t> row((lower.size() + 63) / 64, 0);
      for (Mask v = s; v; v &= v - 1) {
        const Mask face = s & ~(v & -v);
        const auto at = std::lower_bound(lower.begin(), lower.end(), face) - lower.begin();
        row[at / 64] |= std::uint64_t{1} << (at % 64);
      }
      rows.push_back(std::move(row));
    }
    return rank_z2(std::move(rows));
  };
  std::vector<std::uint64_t> b(max_k + 1, 0);
  for (std::size_t k = 0; k <= max_k; ++k) {
    const std::size_t n = k < by_dim.size() ? by_dim[k].size() : 0;
    b[k] = n - rank_of(k) - rank_of(k + 1);
  }
  return b;
}

inline std::set<Mask> close_masks(const std::vector<Mask>& gens) {
  std::set<Mask> out;
  for (Mask g : gens)
    for (Mask s = g; s; s = (s - 1) & g) out.insert(s);
  return out;
}

inline SimplicialComplex to_complex(const std::set<Mask>& cx) {
  std::vector<Simplex> simplices;
  for (Mask m : cx) {
    Simplex s;
    for (std::uint32_t v = 0; v < 32; ++v)
      if (m >> v & 1) s.push_back(v);
    simplices.push_back(s);
  }
  return SimplicialComplex::closure_of(simplices);
}

inline std::set<Mask> to_masks(const SimplicialComplex& c) {
  std::set<Mask> out;
  for (int d = 0; d <= c.dimension(); ++d)
    for (const Simplex& s : c.simplices(static_cast<std::size_t>(d))) {
      Mask m = 0;
      for (auto v : s) m |= Mask{1} << v;
      out.insert(m);
    }
  return out;
}

}  // namespace z2_oracle
