#include "hlimit/complex.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace hlimit {

SimplicialComplex SimplicialComplex::closure_of(const std::vector<Simplex>& simplices) {
  std::vector<std::set<Simplex>> levels;
  for (Simplex s : simplices) {
    if (s.empty()) continue;
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end())
      throw std::invalid_argument("simplex lists a vertex twice");
    const std::size_t k = s.size();
    if (k > 31) throw std::invalid_argument("simplex dimension too large for face closure");
    if (levels.size() < k) levels.resize(k);
    for (std::uint32_t mask = 1; mask < (1u << k); ++mask) {
      Simplex face;
      for (std::size_t i = 0; i < k; ++i)
        if (mask & (1u << i)) face.push_back(s[i]);
      levels[face.size() - 1].insert(std::move(face));
    }
  }
  SimplicialComplex c;
  for (auto& level : levels) c.levels_.emplace_back(level.begin(), level.end());
  return c;
}

SimplicialComplex SimplicialComplex::from_sorted_levels(std::vector<std::vector<Simplex>> levels) {
  SimplicialComplex c;
  while (!levels.empty() && levels.back().empty()) levels.pop_back();
  c.levels_ = std::move(levels);
  return c;
}

const std::vector<Simplex>& SimplicialComplex::simplices(std::size_t dim) const {
  static const std::vector<Simplex> none;
  return dim < levels_.size() ? levels_[dim] : none;
}

std::size_t SimplicialComplex::total_count() const {
  std::size_t n = 0;
  for (const auto& l : levels_) n += l.size();
  return n;
}

std::size_t SimplicialComplex::index_of(const Simplex& s) const {
  if (s.empty() || s.size() > levels_.size()) return npos;
  const auto& level = levels_[s.size() - 1];
  auto it = std::lower_bound(level.begin(), level.end(), s);
  if (it == level.end() || *it != s) return npos;
  return static_cast<std::size_t>(it - level.begin());
}

std::size_t boundary_rank(const SimplicialComplex& complex, std::size_t dim) {
  if (dim == 0 || dim > static_cast<std::size_t>(std::max(complex.dimension(), 0))) return 0;
  const auto& cols = complex.simplices(dim);
  // pivot row -> column holding it
  std::unordered_map<std::uint32_t, std::vector<std::uint32_t>> owner;
  owner.reserve(cols.size());
  std::size_t rank = 0;
  std::vector<std::uint32_t> column, scratch;
  for (const auto& s : cols) {
    column.clear();
    for (std::size_t drop = 0; drop < s.size(); ++drop) {
      Simplex face;
      face.reserve(s.size() - 1);
      for (std::size_t i = 0; i < s.size(); ++i)
        if (i != drop) face.push_back(s[i]);
      column.push_back(static_cast<std::uint32_t>(complex.index_of(face)));
    }
    std::sort(column.begin(), column.end());
    while (!column.empty()) {
      auto it = owner.find(column.back());
      if (it == owner.end()) break;
      scratch.clear();
      std::set_symmetric_difference(column.begin(), column.end(), it->second.begin(), it->second.end(),
                                    std::back_inserter(scratch));
      column.swap(scratch);
    }
    if (!column.empty()) {
      ++rank;
      owner.emplace(column.back(), column);
    }
  }
  return rank;
}

BettiVector simplicial_betti(const SimplicialComplex& complex, std::size_t max_k) {
  BettiVector b;
  b.ranks.assign(max_k + 1, 0);
  std::vector<std::size_t> rank(max_k + 3, 0);
  for (std::size_t k = 1; k <= max_k + 1; ++k) rank[k] = boundary_rank(complex, k);
  for (std::size_t k = 0; k <= max_k; ++k) {
    const std::size_t n = complex.count(k);
    b.ranks[k] = n - rank[k] - rank[k + 1];
  }
  return b;
}

}  // namespace hlimit
