#include "hlimit/homology.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <optional>
#include <ostream>
#include <queue>
#include <unordered_map>
#include <unordered_set>

namespace hlimit {

namespace {

struct Neighbor {
  std::uint32_t v;
  double length;
};

// Sorted adjacency lists of the neighbor graph at `radius`.
std::vector<std::vector<Neighbor>> adjacency(const PointCloud& cloud, const std::vector<Edge>& edges) {
  std::vector<std::vector<Neighbor>> adj(cloud.size());
  for (const auto& e : edges) {
    adj[e.i].push_back({e.j, e.length});
    adj[e.j].push_back({e.i, e.length});
  }
  for (auto& list : adj) std::sort(list.begin(), list.end(), [](auto a, auto b) { return a.v < b.v; });
  return adj;
}

const Neighbor* find_neighbor(const std::vector<Neighbor>& list, std::uint32_t v) {
  auto it = std::lower_bound(list.begin(), list.end(), v, [](const Neighbor& n, std::uint32_t x) { return n.v < x; });
  return it != list.end() && it->v == v ? &*it : nullptr;
}

// Depth-first clique enumeration; per dimension the output is lexicographic.
template <class Visit>
void enumerate_cliques(const std::vector<std::vector<Neighbor>>& adj, std::size_t max_dim, Visit&& visit) {
  Simplex current;
  std::vector<double> values;
  auto extend = [&](auto&& self, const std::vector<std::uint32_t>& candidates, double value) -> void {
    visit(current, value);
    if (current.size() > max_dim) return;
    std::vector<std::uint32_t> next;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      const std::uint32_t v = candidates[c];
      const auto& nv = adj[v];
      next.clear();
      for (std::size_t d = c + 1; d < candidates.size(); ++d)
        if (find_neighbor(nv, candidates[d])) next.push_back(candidates[d]);
      double val = value;
      for (auto u : current) val = std::max(val, find_neighbor(adj[u], v)->length);
      current.push_back(v);
      self(self, next, val);
      current.pop_back();
    }
  };
  std::vector<std::uint32_t> candidates;
  for (std::uint32_t v = 0; v < adj.size(); ++v) {
    candidates.clear();
    for (const auto& n : adj[v])
      if (n.v > v) candidates.push_back(n.v);
    current.assign(1, v);
    // The top level is inlined so that `current` starts at {v}.
    visit(current, 0.0);
    if (max_dim == 0) continue;
    std::vector<std::uint32_t> next;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      const std::uint32_t u = candidates[c];
      next.clear();
      for (std::size_t d = c + 1; d < candidates.size(); ++d)
        if (find_neighbor(adj[u], candidates[d])) next.push_back(candidates[d]);
      current.push_back(u);
      extend(extend, next, find_neighbor(adj[v], u)->length);
      current.pop_back();
    }
  }
}

// Colexicographic rank of a sorted vertex list: sum of C(v_i, i + 1).
class SimplexKeys {
 public:
  SimplexKeys(std::size_t n, std::size_t max_size) : table_(max_size + 1, std::vector<std::uint64_t>(n + 1, 0)) {
    for (std::size_t k = 0; k <= max_size; ++k)
      for (std::size_t v = 0; v <= n; ++v) {
        if (k == 0) {
          table_[k][v] = 1;
        } else if (v == 0) {
          table_[k][v] = 0;
        } else {
          const unsigned __int128 s =
              static_cast<unsigned __int128>(table_[k][v - 1]) + table_[k - 1][v - 1];
          if (s >> 63) throw std::overflow_error("too many points for simplex keys");
          table_[k][v] = static_cast<std::uint64_t>(s);
        }
      }
  }
  [[nodiscard]] std::uint64_t key(const Simplex& s) const {
    std::uint64_t k = 0;
    for (std::size_t i = 0; i < s.size(); ++i) k += table_[i + 1][s[i]];
    return k;
  }

 private:
  std::vector<std::vector<std::uint64_t>> table_;
};

struct Filtered {
  double value;
  std::uint64_t key;
  friend bool operator<(const Filtered& a, const Filtered& b) {
    return a.value != b.value ? a.value < b.value : a.key < b.key;
  }
  friend bool operator>(const Filtered& a, const Filtered& b) { return b < a; }
  friend bool operator==(const Filtered& a, const Filtered& b) { return a.value == b.value && a.key == b.key; }
};

struct DisjointSets {
  std::vector<std::uint32_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0u); }
  std::uint32_t find(std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
};

}  // namespace

SimplicialComplex rips_complex(const PointCloud& cloud, double radius, std::size_t max_dim) {
  if (radius < 0) throw std::invalid_argument("radius must be non-negative");
  const auto adj = adjacency(cloud, neighbor_edges(cloud, radius));
  std::vector<std::vector<Simplex>> levels(max_dim + 1);
  enumerate_cliques(adj, max_dim, [&](const Simplex& s, double) { levels[s.size() - 1].push_back(s); });
  return SimplicialComplex::from_sorted_levels(std::move(levels));
}

BettiVector betti_numbers(const PointCloud& cloud, double radius, std::size_t max_k) {
  return simplicial_betti(rips_complex(cloud, radius, max_k + 1), max_k);
}

std::size_t component_count(const PointCloud& cloud, double radius) {
  if (radius < 0) throw std::invalid_argument("radius must be non-negative");
  DisjointSets sets(cloud.size());
  std::size_t components = cloud.size();
  visit_candidate_pairs(cloud, radius, [&](std::uint32_t i, std::uint32_t j) {
    const auto a = sets.find(i), b = sets.find(j);
    if (a == b) return;
    if (cloud.dim() != 0 && distance(cloud[i], cloud[j]) > radius) return;
    sets.parent[std::max(a, b)] = std::min(a, b);
    --components;
  });
  return components;
}

RipsPersistence::RipsPersistence(const PointCloud& cloud, double max_radius, std::size_t max_k)
    : max_radius_(max_radius), bars_(max_k + 1) {
  if (max_radius < 0) throw std::invalid_argument("radius must be non-negative");
  const std::size_t n = cloud.size();
  if (n == 0) return;
  const auto edges = neighbor_edges(cloud, max_radius);
  const auto adj = adjacency(cloud, edges);
  const SimplexKeys keys(n, max_k + 2);

  // Degree 0 by union-find; merging edges are the deaths.
  std::unordered_set<std::uint64_t> cleared;
  {
    DisjointSets sets(n);
    std::size_t components = n;
    for (const auto& e : edges) {
      const auto a = sets.find(e.i), b = sets.find(e.j);
      if (a == b) continue;
      sets.parent[std::max(a, b)] = std::min(a, b);
      bars_[0].push_back({0.0, e.length});
      cleared.insert(keys.key({e.i, e.j}));
      --components;
    }
    for (std::size_t c = 0; c < components; ++c) bars_[0].push_back({0.0, std::numeric_limits<double>::infinity()});
  }

  for (std::size_t k = 1; k <= max_k; ++k) {
    // Columns: k-simplices in filtration order.
    std::vector<Simplex> simplices;
    std::vector<Filtered> order;
    enumerate_cliques(adj, k, [&](const Simplex& s, double value) {
      if (s.size() != k + 1) return;
      const std::uint64_t key = keys.key(s);
      if (cleared.count(key)) return;
      simplices.push_back(s);
      order.push_back({value, key});
    });
    std::vector<std::uint32_t> idx(simplices.size());
    std::iota(idx.begin(), idx.end(), 0u);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return order[a] < order[b]; });

    using Heap = std::priority_queue<Filtered, std::vector<Filtered>, std::greater<>>;
    Simplex cofacet;
    auto push_coboundary = [&](Heap& heap, std::uint32_t col) {
      const Simplex& s = simplices[col];
      const double value = order[col].value;
      for (const auto& nb : adj[s[0]]) {
        if (std::binary_search(s.begin(), s.end(), nb.v)) continue;
        double val = std::max(value, nb.length);
        bool ok = true;
        for (std::size_t i = 1; i < s.size() && ok; ++i) {
          const Neighbor* e = find_neighbor(adj[s[i]], nb.v);
          if (!e) ok = false;
          else val = std::max(val, e->length);
        }
        if (!ok) continue;
        cofacet = s;
        cofacet.insert(std::upper_bound(cofacet.begin(), cofacet.end(), nb.v), nb.v);
        heap.push({val, keys.key(cofacet)});
      }
    };
    auto pop_pivot = [](Heap& heap) -> std::optional<Filtered> {
      while (!heap.empty()) {
        const Filtered top = heap.top();
        heap.pop();
        bool odd = true;
        while (!heap.empty() && heap.top() == top) {
          heap.pop();
          odd = !odd;
        }
        if (odd) {
          heap.push(top);
          return top;
        }
      }
      return std::nullopt;
    };

    std::unordered_map<std::uint64_t, std::uint32_t> pivot_owner;
    std::vector<std::vector<std::uint32_t>> reduction(simplices.size());
    std::unordered_set<std::uint64_t> next_cleared;
    for (auto it = idx.rbegin(); it != idx.rend(); ++it) {
      const std::uint32_t col = *it;
      Heap heap;
      std::vector<std::uint32_t> v{col};
      push_coboundary(heap, col);
      std::optional<Filtered> pivot;
      for (;;) {
        pivot = pop_pivot(heap);
        if (!pivot) break;
        auto owner = pivot_owner.find(pivot->key);
        if (owner == pivot_owner.end()) break;
        for (auto j : reduction[owner->second]) {
          push_coboundary(heap, j);
          v.push_back(j);
        }
      }
      if (pivot) {
        // Keep the reduction column small: equal entries cancel mod 2.
        std::sort(v.begin(), v.end());
        std::vector<std::uint32_t> kept;
        for (std::size_t a = 0; a < v.size();) {
          std::size_t b = a;
          while (b < v.size() && v[b] == v[a]) ++b;
          if ((b - a) % 2) kept.push_back(v[a]);
          a = b;
        }
        reduction[col] = std::move(kept);
        pivot_owner.emplace(pivot->key, col);
        next_cleared.insert(pivot->key);
        if (pivot->value > order[col].value) bars_[k].push_back({order[col].value, pivot->value});
      } else {
        bars_[k].push_back({order[col].value, std::numeric_limits<double>::infinity()});
      }
    }
    cleared = std::move(next_cleared);
  }
  for (auto& list : bars_)
    std::sort(list.begin(), list.end(), [](const Bar& a, const Bar& b) {
      return a.birth != b.birth ? a.birth < b.birth : a.death < b.death;
    });
}

BettiVector RipsPersistence::betti_at(double radius) const {
  if (radius > max_radius_) throw std::out_of_range("radius beyond the computed filtration");
  BettiVector b;
  b.ranks.assign(bars_.size(), 0);
  for (std::size_t k = 0; k < bars_.size(); ++k)
    for (const auto& bar : bars_[k])
      if (bar.birth <= radius && radius < bar.death) ++b.ranks[k];
  return b;
}

BettiCurve betti_curve(const PointCloud& cloud, const std::vector<double>& grid, std::size_t max_k) {
  BettiCurve curve;
  if (grid.empty()) return curve;
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("scale grid must be strictly increasing");
  const RipsPersistence persistence(cloud, grid.back(), max_k);
  curve.grid = grid;
  for (double r : grid) curve.betti.push_back(persistence.betti_at(r));
  return curve;
}

std::vector<double> geometric_grid(double lo, double hi, std::size_t steps) {
  if (!(lo > 0) || !(hi > lo)) throw std::invalid_argument("geometric grid needs 0 < lo < hi");
  if (steps < 2) throw std::invalid_argument("geometric grid needs at least two steps");
  std::vector<double> grid(steps);
  const double ratio = std::log(hi / lo) / static_cast<double>(steps - 1);
  for (std::size_t i = 0; i < steps; ++i) grid[i] = lo * std::exp(ratio * static_cast<double>(i));
  grid.back() = hi;
  return grid;
}

std::vector<double> default_scale_grid(const PointCloud& cloud, std::size_t steps) {
  const double lo = min_nonzero_distance(cloud) / 2.0;
  const double hi = diameter(cloud);
  if (!(lo > 0)) throw std::invalid_argument("cloud needs two distinct points for a scale grid");
  return geometric_grid(lo, hi, steps);
}

Plateau stable_plateau(const BettiCurve& curve, double min_width_fraction, PlateauMetric metric,
                       bool skip_leading) {
  if (curve.empty()) throw std::invalid_argument("empty Betti curve");
  const auto& g = curve.grid;
  auto position = [&](double x) {
    if (metric == PlateauMetric::Linear) return x;
    if (!(x > 0)) throw std::invalid_argument("log plateau metric needs positive scales");
    return std::log(x);
  };
  struct Run {
    std::size_t first, last;
  };
  std::vector<Run> runs;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!runs.empty() && curve.betti[i] == curve.betti[runs.back().first]) runs.back().last = i;
    else runs.push_back({i, i});
  }
  const double span = position(g.back()) - position(g.front());
  std::optional<Plateau> best;
  double best_width = -1.0;
  for (std::size_t r = skip_leading && runs.size() > 1 ? 1 : 0; r < runs.size(); ++r) {
    const auto [a, b] = runs[r];
    const double lo = g[a];
    const double hi = b + 1 < g.size() ? g[b + 1] : g[b];
    const double width = position(hi) - position(lo);
    if (width < min_width_fraction * span) continue;
    if (width > best_width) {
      best_width = width;
      best = Plateau{lo, hi, curve.betti[a], a, b};
    }
  }
  if (!best) throw NoPlateau("no run of constant Betti numbers is wide enough");
  return *best;
}

void write_curve_csv(std::ostream& os, const BettiCurve& curve) {
  std::size_t width = 0;
  for (const auto& b : curve.betti) width = std::max(width, b.size());
  os << "scale";
  for (std::size_t k = 0; k < width; ++k) os << ",b_" << k;
  os << '\n';
  const auto precision = os.precision(17);
  for (std::size_t i = 0; i < curve.size(); ++i) {
    os << curve.grid[i];
    for (std::size_t k = 0; k < width; ++k) os << ',' << curve.betti[i][k];
    os << '\n';
  }
  os.precision(precision);
}

}  // namespace hlimit
