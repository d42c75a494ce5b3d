#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "hlimit/complex.hpp"
#include "hlimit/geometry.hpp"

namespace hlimit {

/// Absolute tolerance for barycentric identities.
inline constexpr double kBarycentricTol = 1e-9;

struct LambdaVertex {
  std::vector<double> coords;
  double lambda = 0.0;
};

/// A point of the realization, addressed by a simplex of the complex and
/// barycentric weights over that simplex's vertices (weights >= 0, sum 1).
/// Zero weights are allowed; the carrier is the face of positive weights.
struct ComplexPoint {
  std::size_t simplex = 0;
  std::vector<double> weights;
};

struct StarComplex {
  std::vector<std::size_t> simplices;  // indices into LambdaComplex::simplices()
};

/// Finite simplicial complex in R^n x [0,1] whose last coordinate is the
/// parameter. The projection to the parameter is affine on each simplex, and
/// X_0 is the subcomplex of simplices whose vertices all have lambda = 0.
class LambdaComplex {
 public:
  /// Completes faces and validates: non-negative finite lambdas, equal
  /// coordinate lengths, no duplicate simplex, affinely independent vertices.
  /// With `strict` the pairwise intersections are checked as well.
  LambdaComplex(std::vector<LambdaVertex> vertices, std::vector<Simplex> simplices, bool strict = false);

  /// {"vertices": [{"coords": [...], "lambda": t}, ...], "simplices": [[i, j, ...], ...]}
  static LambdaComplex from_json(const nlohmann::json& j, bool strict = false);
  static LambdaComplex load(const std::string& path, bool strict = false);

  [[nodiscard]] std::size_t ambient_dim() const { return n_; }
  [[nodiscard]] const std::vector<LambdaVertex>& vertices() const { return vertices_; }
  /// Every simplex, faces included: ordered by dimension, then lexicographically.
  [[nodiscard]] const std::vector<Simplex>& simplices() const { return all_; }
  [[nodiscard]] const SimplicialComplex& complex() const { return complex_; }
  [[nodiscard]] std::size_t index_of(const Simplex& s) const;
  /// Simplices that are not a proper face of another simplex.
  [[nodiscard]] const std::vector<std::size_t>& maximal() const { return maximal_; }

  [[nodiscard]] bool vertex_in_x0(std::uint32_t v) const { return vertices_[v].lambda == 0.0; }
  [[nodiscard]] bool simplex_in_x0(std::size_t s) const;
  [[nodiscard]] double max_vertex_norm() const;

 private:
  std::size_t n_ = 0;
  std::vector<LambdaVertex> vertices_;
  SimplicialComplex complex_;
  std::vector<Simplex> all_;
  std::vector<std::size_t> maximal_;
};

/// Point in R^n (parameter dropped).
[[nodiscard]] std::vector<double> coordinates(const LambdaComplex& k, const ComplexPoint& pt);
/// Point in R^{n+1}, parameter last.
[[nodiscard]] std::vector<double> total_coordinates(const LambdaComplex& k, const ComplexPoint& pt);
[[nodiscard]] double projection(const LambdaComplex& k, const ComplexPoint& pt);
/// Index of the face on which the weights are positive.
[[nodiscard]] std::size_t carrier(const LambdaComplex& k, const ComplexPoint& pt);
[[nodiscard]] bool in_x0(const LambdaComplex& k, const ComplexPoint& pt);

/// Smallest parameter value of a vertex outside X_0. Throws when every vertex
/// lies in X_0.
[[nodiscard]] double lambda_min(const LambdaComplex& k);

/// X_0 together with the open simplices having at least one vertex in X_0.
[[nodiscard]] StarComplex star(const LambdaComplex& k);

/// Renormalizes the weights on the X_0 vertices of the carrier and zeroes the
/// others. Identity on X_0. Throws std::domain_error outside the star.
[[nodiscard]] ComplexPoint retract(const LambdaComplex& k, const ComplexPoint& xi);

/// retract restricted to the fiber over `lambda`, 0 < lambda < lambda_min.
[[nodiscard]] ComplexPoint f_lambda(const LambdaComplex& k, const ComplexPoint& xi, double lambda);

/// A point over `lambda` that f_lambda sends to zeta (a point of X_0). Built
/// by halving zeta's weights, spreading the other half over the non-X_0
/// vertices of an extending simplex, then sliding along the segment to zeta.
[[nodiscard]] ComplexPoint lift_point(const LambdaComplex& k, const ComplexPoint& zeta, double lambda);

/// (lambda'/lambda) xi + (1 - lambda'/lambda) F(xi), for 0 < lambda' < lambda < lambda_min.
[[nodiscard]] ComplexPoint homeo_h(const LambdaComplex& k, const ComplexPoint& xi, double lambda,
                                   double lambda_prime);
/// Inverse of homeo_h: (lambda/lambda') tau - (lambda/lambda' - 1) F(tau).
[[nodiscard]] ComplexPoint homeo_h_inverse(const LambdaComplex& k, const ComplexPoint& tau, double lambda,
                                           double lambda_prime);

/// p(p+1)(4 R m + 2 m^2).
[[nodiscard]] double eta_p(std::size_t p, double R, double m);

/// Deterministic sample of the fiber over `lambda`: each maximal simplex is
/// cut by the level set and `samples_per_simplex` convex combinations of the
/// cut polytope's vertices are drawn (the vertices themselves come first).
[[nodiscard]] std::vector<ComplexPoint> sample_lambda_fiber(const LambdaComplex& k, double lambda,
                                                            std::size_t samples_per_simplex, std::uint64_t seed);

/// Uniform random points of the realization of X_0 together with the ones
/// that have an extending simplex (lift_point preconditions hold).
[[nodiscard]] std::vector<ComplexPoint> sample_x0(const LambdaComplex& k, std::size_t samples_per_simplex,
                                                  std::uint64_t seed);

struct Displacement {
  double sampled = 0.0;  // max |x - f^lambda(x)| over the sample
  double bound = 0.0;    // 2 (lambda / lambda_0) max |vertex|
  std::size_t points = 0;
};

[[nodiscard]] Displacement max_displacement(const LambdaComplex& k, double lambda, std::size_t samples_per_simplex,
                                            std::uint64_t seed = 0);

/// Tuples of fiber points whose f^lambda images have rho_p <= epsilon. The
/// tuples carry the original R^n coordinates.
[[nodiscard]] TupleCloud fibered_product_sample(const LambdaComplex& k, double lambda, std::size_t p, double epsilon,
                                                const std::vector<ComplexPoint>& fiber_points,
                                                std::size_t cap = static_cast<std::size_t>(-1),
                                                std::uint64_t seed = 0);

}  // namespace hlimit
