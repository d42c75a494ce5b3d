#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <stdexcept>
#include <vector>

#include "hlimit/complex.hpp"
#include "hlimit/geometry.hpp"

namespace hlimit {

/// Flag complex of the graph {|x_i - x_j| <= radius}, simplices up to max_dim.
[[nodiscard]] SimplicialComplex rips_complex(const PointCloud& cloud, double radius, std::size_t max_dim);

/// Z/2 Betti numbers b_0..b_max_k of the Rips complex at `radius` (built to
/// dimension max_k + 1), by explicit boundary reduction.
[[nodiscard]] BettiVector betti_numbers(const PointCloud& cloud, double radius, std::size_t max_k);

/// b_0 of the Rips complex at `radius` by union-find, without storing edges.
[[nodiscard]] std::size_t component_count(const PointCloud& cloud, double radius);

struct Bar {
  double birth = 0.0;
  double death = std::numeric_limits<double>::infinity();
};

/// Persistence bars of the Rips filtration up to `max_radius`, degrees
/// 0..max_k. Betti numbers at any radius r <= max_radius are read off as the
/// number of bars with birth <= r < death; they coincide with betti_numbers.
class RipsPersistence {
 public:
  RipsPersistence(const PointCloud& cloud, double max_radius, std::size_t max_k);

  [[nodiscard]] const std::vector<std::vector<Bar>>& bars() const { return bars_; }
  [[nodiscard]] BettiVector betti_at(double radius) const;
  [[nodiscard]] double max_radius() const { return max_radius_; }

 private:
  double max_radius_;
  std::vector<std::vector<Bar>> bars_;
};

struct BettiCurve {
  std::vector<double> grid;
  std::vector<BettiVector> betti;

  [[nodiscard]] std::size_t size() const { return grid.size(); }
  [[nodiscard]] bool empty() const { return grid.empty(); }
};

/// betti_numbers at every grid scale. The grid must be strictly increasing.
[[nodiscard]] BettiCurve betti_curve(const PointCloud& cloud, const std::vector<double>& grid, std::size_t max_k);

/// `steps` points from lo to hi, evenly spaced in log scale.
[[nodiscard]] std::vector<double> geometric_grid(double lo, double hi, std::size_t steps);

/// 32 geometric steps from half the smallest nonzero pairwise distance to the
/// diameter.
[[nodiscard]] std::vector<double> default_scale_grid(const PointCloud& cloud, std::size_t steps = 32);

/// How plateau widths are measured along the grid.
enum class PlateauMetric { Linear, Log };

struct Plateau {
  double lo = 0.0;
  double hi = 0.0;
  BettiVector betti;
  std::size_t first = 0;  // grid indices of the run, inclusive
  std::size_t last = 0;
};

class NoPlateau : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Widest maximal run of equal Betti vectors. A run over grid indices a..b
/// spans [g_a, g_{b+1}] (or [g_a, g_b] when it ends the grid). With
/// skip_leading and more than one run, the leading run is skipped as
/// small-scale noise (radius curves start at one component per point).
/// Ties go to the smaller scale. Throws NoPlateau when no run reaches
/// min_width_fraction of the grid span.
[[nodiscard]] Plateau stable_plateau(const BettiCurve& curve, double min_width_fraction,
                                     PlateauMetric metric = PlateauMetric::Linear, bool skip_leading = true);

/// Columns: scale, b_0..b_K.
void write_curve_csv(std::ostream& os, const BettiCurve& curve);

}  // namespace hlimit
