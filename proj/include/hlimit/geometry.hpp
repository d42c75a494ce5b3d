#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hlimit/formula.hpp"

namespace hlimit {

/// Finite point set in R^dim, stored row-major.
class PointCloud {
 public:
  PointCloud() = default;
  explicit PointCloud(std::size_t dim, std::string label = {}) : dim_(dim), label_(std::move(label)) {}
  PointCloud(std::size_t dim, std::vector<double> coords, std::string label = {});
  /// Convenience for tests and fixtures.
  static PointCloud from_points(const std::vector<std::vector<double>>& points, std::size_t dim = 0);

  [[nodiscard]] std::size_t dim() const { return dim_; }
  [[nodiscard]] std::size_t size() const { return dim_ == 0 ? count0_ : coords_.size() / dim_; }
  [[nodiscard]] bool empty() const { return size() == 0; }
  [[nodiscard]] std::span<const double> operator[](std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  [[nodiscard]] const std::vector<double>& coords() const { return coords_; }
  [[nodiscard]] const std::string& label() const { return label_; }
  void set_label(std::string label) { label_ = std::move(label); }

  /// Throws std::invalid_argument on a wrong length or a non-finite coordinate.
  void push_back(std::span<const double> point);

  friend bool operator==(const PointCloud& a, const PointCloud& b) {
    return a.dim_ == b.dim_ && a.coords_ == b.coords_ && a.size() == b.size();
  }

 private:
  std::size_t dim_ = 0;
  std::size_t count0_ = 0;  // number of points when dim_ == 0
  std::vector<double> coords_;
  std::string label_;
};

/// (p+1)-tuples of points of R^n, flattened into R^{n(p+1)}.
struct TupleCloud {
  std::size_t base_dim = 0;
  std::size_t arity = 1;
  PointCloud tuples;
  /// Number of qualifying tuples before subsampling.
  std::uint64_t total = 0;
  bool subsampled = false;

  [[nodiscard]] std::size_t size() const { return tuples.size(); }
  [[nodiscard]] std::span<const double> block(std::size_t t, std::size_t i) const {
    return tuples[t].subspan(i * base_dim, base_dim);
  }
};

/// Axis-aligned box, one [lo, hi] interval per coordinate.
struct Box {
  std::vector<std::pair<double, double>> intervals;
  [[nodiscard]] std::size_t dim() const { return intervals.size(); }
};

/// Largest per-axis grid spacing (hi - lo) / (resolution - 1).
[[nodiscard]] double grid_spacing(const Box& box, std::span<const std::size_t> resolution);

/// Grid points of `box` satisfying f at the given parameter, in lexicographic
/// grid order (first axis slowest). `resolution` holds one count per axis, or a
/// single count used for every axis.
[[nodiscard]] PointCloud sample_fiber(const Formula& f, double lambda, const Box& box,
                                      std::span<const std::size_t> resolution, double tol);

/// Euclidean distance; the single definition every module compares against.
[[nodiscard]] double distance(std::span<const double> a, std::span<const double> b);
[[nodiscard]] double squared_distance(std::span<const double> a, std::span<const double> b);

/// max_a min_b |a-b| + max_b min_a |a-b| (the sum of both directed terms).
[[nodiscard]] double hausdorff_distance(const PointCloud& a, const PointCloud& b);
[[nodiscard]] double directed_hausdorff(const PointCloud& from, const PointCloud& to);

/// Sum over i < j of |x_i - x_j|^2 for a flattened tuple of blocks of size n.
[[nodiscard]] double rho_p(std::span<const double> tuple, std::size_t n);
[[nodiscard]] double rho_p(const std::vector<std::vector<double>>& points);

struct IndexTuples {
  std::vector<std::vector<std::uint32_t>> tuples;
  std::uint64_t total = 0;
  bool subsampled = false;
};

/// Index form of expanded_diagonal.
[[nodiscard]] IndexTuples diagonal_index_tuples(const PointCloud& cloud, std::size_t p, double delta,
                                                std::size_t cap, std::uint64_t seed);

/// All ordered (p+1)-tuples of cloud points with rho_p <= delta, in
/// lexicographic index order. Above `cap` tuples a seeded uniform subsample of
/// size cap is kept (still in index order) and the result is flagged.
[[nodiscard]] TupleCloud expanded_diagonal(const PointCloud& cloud, std::size_t p, double delta,
                                           std::size_t cap, std::uint64_t seed);

[[nodiscard]] double bounding_radius(const PointCloud& cloud);
[[nodiscard]] double diameter(const PointCloud& cloud);
/// Smallest nonzero pairwise distance, or 0 when all points coincide.
[[nodiscard]] double min_nonzero_distance(const PointCloud& cloud);

struct Edge {
  std::uint32_t i;
  std::uint32_t j;
  double length;
};

/// Calls consider(i, j), i < j, for a superset of the pairs within `radius`
/// (every such pair exactly once).
void visit_candidate_pairs(const PointCloud& cloud, double radius,
                           const std::function<void(std::uint32_t, std::uint32_t)>& consider);

/// Pairs i < j with distance <= radius, sorted by (length, i, j).
[[nodiscard]] std::vector<Edge> neighbor_edges(const PointCloud& cloud, double radius);

// CSV: a "# dim=<n>" header (optionally "# base_dim=<n> arity=<k>" for tuple
// clouds) followed by one comma-separated point per line.
void write_csv(std::ostream& os, const PointCloud& cloud);
void write_csv(std::ostream& os, const TupleCloud& tuples);
[[nodiscard]] PointCloud read_point_cloud_csv(std::istream& is);
[[nodiscard]] PointCloud read_point_cloud_csv(const std::string& path);

}  // namespace hlimit
