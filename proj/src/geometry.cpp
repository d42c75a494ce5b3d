#include "hlimit/geometry.hpp"

#include <algorithm>
#include <unordered_map>
#include <array>
#include <functional>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "hlimit/rng.hpp"

namespace hlimit {

PointCloud::PointCloud(std::size_t dim, std::vector<double> coords, std::string label)
    : dim_(dim), coords_(std::move(coords)), label_(std::move(label)) {
  if (dim_ == 0 && !coords_.empty()) throw std::invalid_argument("zero-dimensional cloud with coordinates");
  if (dim_ != 0 && coords_.size() % dim_ != 0) throw std::invalid_argument("coordinate count is not a multiple of dim");
  for (double c : coords_)
    if (!std::isfinite(c)) throw std::invalid_argument("non-finite coordinate");
}

PointCloud PointCloud::from_points(const std::vector<std::vector<double>>& points, std::size_t dim) {
  if (dim == 0 && !points.empty()) dim = points.front().size();
  PointCloud c(dim);
  for (const auto& p : points) c.push_back(p);
  return c;
}

void PointCloud::push_back(std::span<const double> point) {
  if (point.size() != dim_)
    throw std::invalid_argument("point of length " + std::to_string(point.size()) + " in a cloud of dim " +
                                std::to_string(dim_));
  for (double c : point)
    if (!std::isfinite(c)) throw std::invalid_argument("non-finite coordinate");
  if (dim_ == 0) ++count0_;
  coords_.insert(coords_.end(), point.begin(), point.end());
}

double grid_spacing(const Box& box, std::span<const std::size_t> resolution) {
  double h = 0.0;
  for (std::size_t a = 0; a < box.dim(); ++a) {
    const std::size_t r = resolution.size() == 1 ? resolution[0] : resolution[a];
    const auto [lo, hi] = box.intervals[a];
    h = std::max(h, (hi - lo) / static_cast<double>(r - 1));
  }
  return h;
}

PointCloud sample_fiber(const Formula& f, double lambda, const Box& box, std::span<const std::size_t> resolution,
                        double tol) {
  const std::size_t n = box.dim();
  if (f.dim() > n)
    throw std::invalid_argument("box has " + std::to_string(n) + " axes, formula has " + std::to_string(f.dim()) +
                                " variables");
  if (resolution.size() != 1 && resolution.size() != n)
    throw std::invalid_argument("resolution needs one entry or one per axis");
  std::vector<std::size_t> res(n);
  for (std::size_t a = 0; a < n; ++a) {
    res[a] = resolution.size() == 1 ? resolution[0] : resolution[a];
    if (res[a] < 2) throw std::invalid_argument("resolution must be at least 2");
    const auto [lo, hi] = box.intervals[a];
    if (!(hi > lo)) throw std::invalid_argument("degenerate box axis " + std::to_string(a));
  }

  PointCloud out(n);
  std::vector<std::size_t> idx(n, 0);
  std::vector<double> x(n);
  for (;;) {
    for (std::size_t a = 0; a < n; ++a) {
      const auto [lo, hi] = box.intervals[a];
      // Endpoints are hit exactly; interior points by linear interpolation.
      x[a] = idx[a] + 1 == res[a] ? hi : lo + (hi - lo) * static_cast<double>(idx[a]) / static_cast<double>(res[a] - 1);
    }
    if (f.evaluate(std::span<const double>(x).first(f.dim()), lambda, tol)) out.push_back(x);
    std::size_t a = n;
    while (a > 0) {
      --a;
      if (++idx[a] < res[a]) break;
      idx[a] = 0;
      if (a == 0) return out;
    }
    if (n == 0) return out;
  }
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dimension mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return s;
}

double distance(std::span<const double> a, std::span<const double> b) { return std::sqrt(squared_distance(a, b)); }

double directed_hausdorff(const PointCloud& from, const PointCloud& to) {
  double worst = 0.0;
  for (std::size_t i = 0; i < from.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < to.size() && best > worst; ++j) best = std::min(best, squared_distance(from[i], to[j]));
    worst = std::max(worst, best);
  }
  return std::sqrt(worst);
}

double hausdorff_distance(const PointCloud& a, const PointCloud& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("Hausdorff distance of an empty cloud");
  if (a.dim() != b.dim()) throw std::invalid_argument("Hausdorff distance between clouds of different dimension");
  return directed_hausdorff(a, b) + directed_hausdorff(b, a);
}

double rho_p(std::span<const double> tuple, std::size_t n) {
  if (n == 0) return 0.0;
  if (tuple.size() % n != 0) throw std::invalid_argument("tuple length is not a multiple of the block size");
  const std::size_t k = tuple.size() / n;
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) sum += squared_distance(tuple.subspan(i * n, n), tuple.subspan(j * n, n));
  return sum;
}

double rho_p(const std::vector<std::vector<double>>& points) {
  if (points.empty()) return 0.0;
  const std::size_t n = points.front().size();
  std::vector<double> flat;
  for (const auto& p : points) {
    if (p.size() != n) throw std::invalid_argument("rho_p: points of different dimension");
    flat.insert(flat.end(), p.begin(), p.end());
  }
  return rho_p(flat, n);
}

namespace {

// Depth-first enumeration with pruning on the partial sum. The partial sums
// are accumulated in a different order than rho_p, so pruning keeps a small
// relative margin and every leaf is re-checked with rho_p itself.
class DiagonalEnumerator {
 public:
  DiagonalEnumerator(const PointCloud& cloud, std::size_t p, double delta, std::size_t cap, std::uint64_t seed)
      : cloud_(cloud), arity_(p + 1), delta_(delta), prune_(delta * (1 + 1e-9) + 1e-300), cap_(cap), rng_(seed) {
    prefix_.reserve(arity_);
    flat_.resize(arity_ * cloud.dim());
  }

  void run() { extend(0.0); }

  std::uint64_t count = 0;
  std::vector<std::vector<std::uint32_t>> kept;

 private:
  void extend(double partial) {
    const std::size_t n = cloud_.dim();
    if (prefix_.size() == arity_) {
      for (std::size_t b = 0; b < arity_; ++b) {
        auto pt = cloud_[prefix_[b]];
        std::copy(pt.begin(), pt.end(), flat_.begin() + static_cast<std::ptrdiff_t>(b * n));
      }
      if (rho_p(flat_, n) <= delta_) accept();
      return;
    }
    for (std::uint32_t j = 0; j < cloud_.size(); ++j) {
      double add = 0.0;
      for (auto i : prefix_) add += squared_distance(cloud_[i], cloud_[j]);
      if (partial + add > prune_) continue;
      prefix_.push_back(j);
      extend(partial + add);
      prefix_.pop_back();
    }
  }

  void accept() {
    ++count;
    if (kept.size() < cap_) {
      kept.push_back(prefix_);
      return;
    }
    const std::uint64_t slot = rng_.below(count);
    if (slot < cap_) kept[slot] = prefix_;
  }

  const PointCloud& cloud_;
  std::size_t arity_;
  double delta_;
  double prune_;
  std::size_t cap_;
  Rng rng_;
  std::vector<std::uint32_t> prefix_;
  std::vector<double> flat_;
};

}  // namespace

IndexTuples diagonal_index_tuples(const PointCloud& cloud, std::size_t p, double delta, std::size_t cap,
                                  std::uint64_t seed) {
  if (delta < 0) throw std::invalid_argument("expanded_diagonal: delta must be non-negative");
  if (cap == 0) throw std::invalid_argument("expanded_diagonal: cap must be at least 1");
  DiagonalEnumerator e(cloud, p, delta, cap, seed);
  e.run();
  std::sort(e.kept.begin(), e.kept.end());
  return IndexTuples{std::move(e.kept), e.count, e.count > cap};
}

TupleCloud expanded_diagonal(const PointCloud& cloud, std::size_t p, double delta, std::size_t cap,
                             std::uint64_t seed) {
  const IndexTuples idx = diagonal_index_tuples(cloud, p, delta, cap, seed);
  TupleCloud out;
  out.base_dim = cloud.dim();
  out.arity = p + 1;
  out.total = idx.total;
  out.subsampled = idx.subsampled;
  std::vector<double> coords;
  coords.reserve(idx.tuples.size() * out.arity * out.base_dim);
  for (const auto& t : idx.tuples)
    for (auto i : t) coords.insert(coords.end(), cloud[i].begin(), cloud[i].end());
  out.tuples = PointCloud(out.base_dim * out.arity, std::move(coords), cloud.label());
  if (out.base_dim == 0) {
    out.tuples = PointCloud(0, {}, cloud.label());
    for (std::size_t t = 0; t < idx.tuples.size(); ++t) out.tuples.push_back({});
  }
  return out;
}

double bounding_radius(const PointCloud& cloud) {
  if (cloud.empty()) throw std::invalid_argument("bounding_radius of an empty cloud");
  double r = 0.0;
  const std::vector<double> origin(cloud.dim(), 0.0);
  for (std::size_t i = 0; i < cloud.size(); ++i) r = std::max(r, squared_distance(cloud[i], origin));
  return std::sqrt(r);
}

double diameter(const PointCloud& cloud) {
  double d = 0.0;
  for (std::size_t i = 0; i < cloud.size(); ++i)
    for (std::size_t j = i + 1; j < cloud.size(); ++j) d = std::max(d, squared_distance(cloud[i], cloud[j]));
  return std::sqrt(d);
}

double min_nonzero_distance(const PointCloud& cloud) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cloud.size(); ++i)
    for (std::size_t j = i + 1; j < cloud.size(); ++j) {
      const double d = squared_distance(cloud[i], cloud[j]);
      if (d > 0) best = std::min(best, d);
    }
  return std::isinf(best) ? 0.0 : std::sqrt(best);
}

void visit_candidate_pairs(const PointCloud& cloud, double radius,
                           const std::function<void(std::uint32_t, std::uint32_t)>& consider) {
  const std::size_t m = cloud.size();
  if (m < 2) return;
  if (cloud.dim() == 0) {
    for (std::uint32_t i = 0; i < m; ++i)
      for (std::uint32_t j = i + 1; j < m; ++j) consider(i, j);
    return;
  }
  const std::size_t hashed = std::min<std::size_t>(cloud.dim(), 4);
  std::vector<double> lo(hashed, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t a = 0; a < hashed; ++a) lo[a] = std::min(lo[a], cloud[i][a]);
  const double cells = std::ldexp(1.0, 15);
  if (hashed >= 2 && radius > 0 && std::isfinite(radius)) {
    // Cells of side `radius` over the first coordinates; neighbors lie in
    // adjacent cells. Cell indices wrap at 2^16, which only merges cells.
    auto cell = [&](std::size_t i, std::size_t a) {
      const double c = std::floor((cloud[i][a] - lo[a]) / radius);
      return static_cast<std::int64_t>(std::min(c, cells * cells));
    };
    auto pack = [&](const std::array<std::int64_t, 4>& c) {
      std::uint64_t key = 0;
      for (std::size_t a = 0; a < hashed; ++a) key = (key << 16) | (static_cast<std::uint64_t>(c[a]) & 0xFFFF);
      return key;
    };
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> grid;
    std::vector<std::array<std::int64_t, 4>> coords(m);
    for (std::uint32_t i = 0; i < m; ++i) {
      for (std::size_t a = 0; a < hashed; ++a) coords[i][a] = cell(i, a);
      grid[pack(coords[i])].push_back(i);
    }
    std::size_t offsets = 1;
    for (std::size_t a = 0; a < hashed; ++a) offsets *= 3;
    std::vector<std::uint64_t> seen;
    for (std::uint32_t i = 0; i < m; ++i) {
      seen.clear();
      for (std::size_t o = 0; o < offsets; ++o) {
        std::array<std::int64_t, 4> c = coords[i];
        std::size_t rest = o;
        for (std::size_t a = 0; a < hashed; ++a) {
          c[a] += static_cast<std::int64_t>(rest % 3) - 1;
          rest /= 3;
        }
        const std::uint64_t key = pack(c);
        if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
        seen.push_back(key);
        auto it = grid.find(key);
        if (it == grid.end()) continue;
        for (std::uint32_t j : it->second)
          if (j > i) consider(i, j);
      }
    }
  } else {
    // Sweep along the first coordinate: only pairs whose first coordinates
    // are within the radius can be neighbors.
    std::vector<std::uint32_t> order(m);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) {
      const double xa = cloud[a][0], xb = cloud[b][0];
      return xa != xb ? xa < xb : a < b;
    });
    for (std::size_t u = 0; u < m; ++u) {
      const std::uint32_t a = order[u];
      const double xa = cloud[a][0];
      for (std::size_t v = u + 1; v < m; ++v) {
        const std::uint32_t b = order[v];
        if (cloud[b][0] - xa > radius) break;
        consider(std::min(a, b), std::max(a, b));
      }
    }
  }
}

std::vector<Edge> neighbor_edges(const PointCloud& cloud, double radius) {
  std::vector<Edge> edges;
  visit_candidate_pairs(cloud, radius, [&](std::uint32_t a, std::uint32_t b) {
    const double d = cloud.dim() == 0 ? 0.0 : distance(cloud[a], cloud[b]);
    if (d <= radius) edges.push_back({a, b, d});
  });
  std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
    if (x.length != y.length) return x.length < y.length;
    return x.i != y.i ? x.i < y.i : x.j < y.j;
  });
  return edges;
}

namespace {
void write_rows(std::ostream& os, const PointCloud& cloud) {
  std::ostringstream line;
  line << std::setprecision(17);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    line.str({});
    auto p = cloud[i];
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (k) line << ',';
      line << p[k];
    }
    os << line.str() << '\n';
  }
}
}  // namespace

void write_csv(std::ostream& os, const PointCloud& cloud) {
  os << "# dim=" << cloud.dim() << '\n';
  write_rows(os, cloud);
}

void write_csv(std::ostream& os, const TupleCloud& tuples) {
  os << "# dim=" << tuples.tuples.dim() << " base_dim=" << tuples.base_dim << " arity=" << tuples.arity << '\n';
  write_rows(os, tuples.tuples);
}

PointCloud read_point_cloud_csv(std::istream& is) {
  std::string line;
  std::size_t dim = 0;
  bool have_dim = false;
  std::size_t lineno = 0;
  PointCloud cloud;
  std::vector<double> row;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (line[0] == '#') {
      const auto pos = line.find("dim=");
      if (!have_dim && pos != std::string::npos && (pos == 0 || line[pos - 1] != '_')) {
        dim = std::stoul(line.substr(pos + 4));
        have_dim = true;
        cloud = PointCloud(dim);
      }
      continue;
    }
    if (!have_dim) throw std::runtime_error("point cloud CSV: missing '# dim=<n>' header");
    row.clear();
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw std::runtime_error("point cloud CSV line " + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
    }
    if (row.size() != dim)
      throw std::runtime_error("point cloud CSV line " + std::to_string(lineno) + ": expected " + std::to_string(dim) +
                               " values, got " + std::to_string(row.size()));
    cloud.push_back(row);
  }
  if (!have_dim) throw std::runtime_error("point cloud CSV: missing '# dim=<n>' header");
  return cloud;
}

PointCloud read_point_cloud_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_point_cloud_csv(in);
}

}  // namespace hlimit
