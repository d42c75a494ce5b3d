#include "hlimit/simplicial.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>

#include <Eigen/Dense>

#include "hlimit/rng.hpp"

namespace hlimit {

namespace {

// Dense two-phase simplex for: maximize c.z subject to A z = b, z >= 0.
// Returns nullopt when infeasible; the problems here are bounded by
// construction (the feasible set is a product of simplices).
std::optional<double> lp_maximize(Eigen::MatrixXd A, Eigen::VectorXd b, const Eigen::VectorXd& c) {
  constexpr double eps = 1e-11;
  const Eigen::Index m = A.rows(), n = A.cols();
  for (Eigen::Index i = 0; i < m; ++i)
    if (b(i) < 0) {
      A.row(i) *= -1;
      b(i) *= -1;
    }
  // Columns: n originals, m artificials, then the right-hand side.
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m + 1, n + m + 1);
  T.topLeftCorner(m, n) = A;
  T.block(0, n, m, m).setIdentity();
  T.topRightCorner(m, 1) = b;
  std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
  std::iota(basis.begin(), basis.end(), n);

  auto pivot = [&](Eigen::Index r, Eigen::Index col) {
    T.row(r) /= T(r, col);
    for (Eigen::Index i = 0; i <= m; ++i)
      if (i != r && T(i, col) != 0) T.row(i) -= T(i, col) * T.row(r);
    basis[static_cast<std::size_t>(r)] = col;
  };
  // Bland's rule on the objective row (last row holds reduced costs to minimize).
  auto run = [&](Eigen::Index allowed) {
    for (int iter = 0; iter < 10000; ++iter) {
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < allowed; ++j)
        if (T(m, j) < -eps) {
          enter = j;
          break;
        }
      if (enter < 0) return;
      Eigen::Index leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < m; ++i)
        if (T(i, enter) > eps) {
          const double ratio = T(i, n + m) / T(i, enter);
          if (ratio < best - eps || (std::abs(ratio - best) <= eps && basis[static_cast<std::size_t>(i)] <
                                                                          basis[static_cast<std::size_t>(leave)])) {
            best = ratio;
            leave = i;
          }
        }
      if (leave < 0) throw std::logic_error("unbounded LP in simplex intersection test");
      pivot(leave, enter);
    }
    throw std::logic_error("LP iteration limit reached");
  };

  // Phase 1: minimize the sum of artificials.
  T.row(m).setZero();
  for (Eigen::Index i = 0; i < m; ++i) T.row(m) -= T.row(i);
  T.block(m, n, 1, m).setZero();
  run(n + m);
  if (-T(m, n + m) > 1e-9) return std::nullopt;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (basis[static_cast<std::size_t>(i)] < n) continue;
    for (Eigen::Index j = 0; j < n; ++j)
      if (std::abs(T(i, j)) > eps) {
        pivot(i, j);
        break;
      }
  }
  // Phase 2: minimize -c.z over the original columns.
  T.row(m).setZero();
  T.block(m, 0, 1, n) = -c.transpose();
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index bj = basis[static_cast<std::size_t>(i)];
    if (bj < n && T(m, bj) != 0) T.row(m) -= T(m, bj) * T.row(i);
  }
  run(n);
  return T(m, n + m);
}

void check_proper_intersection(const std::vector<LambdaVertex>& verts, const Simplex& s, const Simplex& t) {
  const Eigen::Index dim = static_cast<Eigen::Index>(verts.front().coords.size() + 1);
  const Eigen::Index a = static_cast<Eigen::Index>(s.size()), b = static_cast<Eigen::Index>(t.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(dim + 2, a + b);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim + 2);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(a + b);
  auto fill = [&](const Simplex& simplex, Eigen::Index offset, double sign, const Simplex& other) {
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(simplex.size()); ++i) {
      const auto& v = verts[simplex[static_cast<std::size_t>(i)]];
      for (Eigen::Index k = 0; k + 1 < dim; ++k) A(k, offset + i) = sign * v.coords[static_cast<std::size_t>(k)];
      A(dim - 1, offset + i) = sign * v.lambda;
      if (!std::binary_search(other.begin(), other.end(), simplex[static_cast<std::size_t>(i)])) c(offset + i) = 1.0;
    }
  };
  fill(s, 0, 1.0, t);
  fill(t, a, -1.0, s);
  A.block(dim, 0, 1, a).setOnes();
  A.block(dim + 1, a, 1, b).setOnes();
  rhs(dim) = 1.0;
  rhs(dim + 1) = 1.0;
  const auto best = lp_maximize(A, rhs, c);
  if (best && *best > 1e-9) throw std::invalid_argument("simplices do not meet in a common face");
}

}  // namespace

LambdaComplex::LambdaComplex(std::vector<LambdaVertex> vertices, std::vector<Simplex> simplices, bool strict)
    : vertices_(std::move(vertices)) {
  if (vertices_.empty()) throw std::invalid_argument("complex has no vertices");
  n_ = vertices_.front().coords.size();
  for (std::size_t v = 0; v < vertices_.size(); ++v) {
    const auto& vx = vertices_[v];
    if (vx.coords.size() != n_) throw std::invalid_argument("vertex " + std::to_string(v) + " has the wrong dimension");
    if (!std::isfinite(vx.lambda) || vx.lambda < 0)
      throw std::invalid_argument("vertex " + std::to_string(v) + " has a negative or non-finite lambda");
    for (double c : vx.coords)
      if (!std::isfinite(c)) throw std::invalid_argument("vertex " + std::to_string(v) + " has a non-finite coordinate");
  }
  std::vector<Simplex> listed;
  for (Simplex s : simplices) {
    std::sort(s.begin(), s.end());
    if (s.empty()) throw std::invalid_argument("empty simplex");
    if (std::adjacent_find(s.begin(), s.end()) != s.end())
      throw std::invalid_argument("simplex repeats a vertex (affinely dependent)");
    if (s.back() >= vertices_.size()) throw std::invalid_argument("simplex references a missing vertex");
    listed.push_back(std::move(s));
  }
  {
    auto sorted = listed;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::invalid_argument("duplicate simplex");
  }
  // Every vertex is a 0-simplex of the complex even if no simplex lists it.
  for (std::uint32_t v = 0; v < vertices_.size(); ++v) listed.push_back({v});
  complex_ = SimplicialComplex::closure_of(listed);

  for (int d = 0; d <= complex_.dimension(); ++d)
    for (const auto& s : complex_.simplices(static_cast<std::size_t>(d))) all_.push_back(s);

  for (const auto& s : all_) {
    if (s.size() < 2) continue;
    Eigen::MatrixXd edges(static_cast<Eigen::Index>(n_ + 1), static_cast<Eigen::Index>(s.size() - 1));
    const auto& base = vertices_[s[0]];
    for (std::size_t i = 1; i < s.size(); ++i) {
      const auto& v = vertices_[s[i]];
      for (std::size_t k = 0; k < n_; ++k)
        edges(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i - 1)) = v.coords[k] - base.coords[k];
      edges(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(i - 1)) = v.lambda - base.lambda;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(edges);
    lu.setThreshold(1e-10);
    if (lu.rank() != static_cast<Eigen::Index>(s.size() - 1))
      throw std::invalid_argument("simplex with affinely dependent vertices");
  }

  // A simplex is maximal when no simplex one dimension up contains it.
  for (std::size_t i = 0; i < all_.size(); ++i) {
    const auto& s = all_[i];
    bool is_face = false;
    for (const auto& t : complex_.simplices(s.size())) {
      if (std::includes(t.begin(), t.end(), s.begin(), s.end())) {
        is_face = true;
        break;
      }
    }
    if (!is_face) maximal_.push_back(i);
  }

  if (strict)
    for (std::size_t i = 0; i < maximal_.size(); ++i)
      for (std::size_t j = i + 1; j < maximal_.size(); ++j)
        check_proper_intersection(vertices_, all_[maximal_[i]], all_[maximal_[j]]);
}

LambdaComplex LambdaComplex::from_json(const nlohmann::json& j, bool strict) {
  std::vector<LambdaVertex> verts;
  for (const auto& v : j.at("vertices")) {
    LambdaVertex lv;
    lv.coords = v.at("coords").get<std::vector<double>>();
    lv.lambda = v.at("lambda").get<double>();
    verts.push_back(std::move(lv));
  }
  std::vector<Simplex> simplices;
  for (const auto& s : j.at("simplices")) {
    Simplex simplex;
    for (const auto& i : s) {
      const auto idx = i.get<std::int64_t>();
      if (idx < 0) throw std::invalid_argument("negative vertex index");
      simplex.push_back(static_cast<std::uint32_t>(idx));
    }
    simplices.push_back(std::move(simplex));
  }
  return LambdaComplex(std::move(verts), std::move(simplices), strict);
}

LambdaComplex LambdaComplex::load(const std::string& path, bool strict) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return from_json(nlohmann::json::parse(in), strict);
}

std::size_t LambdaComplex::index_of(const Simplex& s) const {
  auto it = std::lower_bound(all_.begin(), all_.end(), s, [](const Simplex& a, const Simplex& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  if (it == all_.end() || *it != s) return static_cast<std::size_t>(-1);
  return static_cast<std::size_t>(it - all_.begin());
}

bool LambdaComplex::simplex_in_x0(std::size_t s) const {
  const auto& simplex = all_.at(s);
  return std::all_of(simplex.begin(), simplex.end(), [&](auto v) { return vertex_in_x0(v); });
}

double LambdaComplex::max_vertex_norm() const {
  double r = 0.0;
  for (const auto& v : vertices_) {
    double s = v.lambda * v.lambda;
    for (double c : v.coords) s += c * c;
    r = std::max(r, s);
  }
  return std::sqrt(r);
}

// ---------------------------------------------------------------------------

namespace {

const Simplex& simplex_of(const LambdaComplex& k, const ComplexPoint& pt) {
  if (pt.simplex >= k.simplices().size()) throw std::out_of_range("complex point refers to a missing simplex");
  const Simplex& s = k.simplices()[pt.simplex];
  if (pt.weights.size() != s.size()) throw std::invalid_argument("complex point has the wrong number of weights");
  return s;
}

void renormalize(std::vector<double>& w) {
  for (double& x : w)
    if (x < 0 && x > -1e-12) x = 0.0;
  const double sum = std::accumulate(w.begin(), w.end(), 0.0);
  if (!(sum > 0)) throw std::domain_error("barycentric weights sum to zero");
  for (double& x : w) x /= sum;
}

void require_fiber(const LambdaComplex& k, const ComplexPoint& xi, double lambda) {
  const double pi = projection(k, xi);
  if (std::abs(pi - lambda) > kBarycentricTol)
    throw std::invalid_argument("point lies over " + std::to_string(pi) + ", not over " + std::to_string(lambda));
}

}  // namespace

std::vector<double> coordinates(const LambdaComplex& k, const ComplexPoint& pt) {
  const Simplex& s = simplex_of(k, pt);
  std::vector<double> x(k.ambient_dim(), 0.0);
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t c = 0; c < x.size(); ++c) x[c] += pt.weights[i] * k.vertices()[s[i]].coords[c];
  return x;
}

std::vector<double> total_coordinates(const LambdaComplex& k, const ComplexPoint& pt) {
  auto x = coordinates(k, pt);
  x.push_back(projection(k, pt));
  return x;
}

double projection(const LambdaComplex& k, const ComplexPoint& pt) {
  const Simplex& s = simplex_of(k, pt);
  double l = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) l += pt.weights[i] * k.vertices()[s[i]].lambda;
  return l;
}

std::size_t carrier(const LambdaComplex& k, const ComplexPoint& pt) {
  const Simplex& s = simplex_of(k, pt);
  Simplex face;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (pt.weights[i] > 0) face.push_back(s[i]);
  return k.index_of(face);
}

bool in_x0(const LambdaComplex& k, const ComplexPoint& pt) {
  const Simplex& s = simplex_of(k, pt);
  for (std::size_t i = 0; i < s.size(); ++i)
    if (pt.weights[i] > 0 && !k.vertex_in_x0(s[i])) return false;
  return true;
}

double lambda_min(const LambdaComplex& k) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& v : k.vertices())
    if (v.lambda != 0.0) best = std::min(best, v.lambda);
  if (std::isinf(best)) throw std::domain_error("every vertex lies in X_0");
  return best;
}

StarComplex star(const LambdaComplex& k) {
  StarComplex out;
  for (std::size_t i = 0; i < k.simplices().size(); ++i) {
    const auto& s = k.simplices()[i];
    if (std::any_of(s.begin(), s.end(), [&](auto v) { return k.vertex_in_x0(v); })) out.simplices.push_back(i);
  }
  return out;
}

ComplexPoint retract(const LambdaComplex& k, const ComplexPoint& xi) {
  const Simplex& s = simplex_of(k, xi);
  if (in_x0(k, xi)) return xi;
  double mass = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (k.vertex_in_x0(s[i]) && xi.weights[i] > 0) mass += xi.weights[i];
  if (!(mass > 0)) throw std::domain_error("point is outside the star of X_0");
  ComplexPoint out{xi.simplex, std::vector<double>(s.size(), 0.0)};
  for (std::size_t i = 0; i < s.size(); ++i)
    if (k.vertex_in_x0(s[i]) && xi.weights[i] > 0) out.weights[i] = xi.weights[i] / mass;
  renormalize(out.weights);
  return out;
}

ComplexPoint f_lambda(const LambdaComplex& k, const ComplexPoint& xi, double lambda) {
  const double l0 = lambda_min(k);
  if (!(lambda > 0 && lambda < l0))
    throw std::invalid_argument("lambda must lie in (0, " + std::to_string(l0) + ")");
  require_fiber(k, xi, lambda);
  return retract(k, xi);
}

ComplexPoint lift_point(const LambdaComplex& k, const ComplexPoint& zeta, double lambda) {
  const double l0 = lambda_min(k);
  if (!(lambda > 0 && lambda < l0))
    throw std::invalid_argument("lambda must lie in (0, " + std::to_string(l0) + ")");
  if (!in_x0(k, zeta)) throw std::invalid_argument("lift_point expects a point of X_0");
  const Simplex& zs = simplex_of(k, zeta);
  Simplex support;
  std::vector<double> v;
  for (std::size_t i = 0; i < zs.size(); ++i)
    if (zeta.weights[i] > 0) {
      support.push_back(zs[i]);
      v.push_back(zeta.weights[i]);
    }

  // First simplex (in complex order) that extends the carrier by vertices
  // outside X_0; keep only the carrier and those vertices.
  Simplex outside;
  for (const auto& t : k.simplices()) {
    if (!std::includes(t.begin(), t.end(), support.begin(), support.end())) continue;
    Simplex extra;
    for (auto u : t)
      if (!k.vertex_in_x0(u)) extra.push_back(u);
    if (!extra.empty()) {
      outside = std::move(extra);
      break;
    }
  }
  if (outside.empty()) throw std::domain_error("no simplex extends the carrier of zeta outside X_0");

  Simplex face = support;
  face.insert(face.end(), outside.begin(), outside.end());
  std::sort(face.begin(), face.end());
  const std::size_t face_index = k.index_of(face);

  // xi has weight v_i/2 on the carrier and 1/(2m) on each outside vertex;
  // the point over lambda on the segment from zeta through xi is
  // (1-t) zeta + t xi with t = lambda / pi(xi).
  const double m = static_cast<double>(outside.size());
  double pi_xi = 0.0;
  for (auto u : outside) pi_xi += k.vertices()[u].lambda / (2.0 * m);
  const double t = lambda / pi_xi;

  ComplexPoint out{face_index, std::vector<double>(face.size(), 0.0)};
  for (std::size_t i = 0; i < face.size(); ++i) {
    const auto it = std::find(support.begin(), support.end(), face[i]);
    if (it != support.end()) {
      out.weights[i] = v[static_cast<std::size_t>(it - support.begin())] * (1.0 - t / 2.0);
    } else {
      out.weights[i] = t / (2.0 * m);
    }
  }
  renormalize(out.weights);
  return out;
}

ComplexPoint homeo_h(const LambdaComplex& k, const ComplexPoint& xi, double lambda, double lambda_prime) {
  const double l0 = lambda_min(k);
  if (!(lambda_prime > 0 && lambda_prime < lambda && lambda < l0))
    throw std::invalid_argument("homeo_h requires 0 < lambda' < lambda < lambda_0");
  require_fiber(k, xi, lambda);
  const ComplexPoint f = retract(k, xi);
  const double t = lambda_prime / lambda;
  ComplexPoint out{xi.simplex, xi.weights};
  for (std::size_t i = 0; i < out.weights.size(); ++i) out.weights[i] = t * xi.weights[i] + (1.0 - t) * f.weights[i];
  renormalize(out.weights);
  return out;
}

ComplexPoint homeo_h_inverse(const LambdaComplex& k, const ComplexPoint& tau, double lambda, double lambda_prime) {
  const double l0 = lambda_min(k);
  if (!(lambda_prime > 0 && lambda_prime < lambda && lambda < l0))
    throw std::invalid_argument("homeo_h_inverse requires 0 < lambda' < lambda < lambda_0");
  require_fiber(k, tau, lambda_prime);
  const ComplexPoint f = retract(k, tau);
  const double a = lambda / lambda_prime;
  ComplexPoint out{tau.simplex, tau.weights};
  for (std::size_t i = 0; i < out.weights.size(); ++i) out.weights[i] = a * tau.weights[i] - (a - 1.0) * f.weights[i];
  renormalize(out.weights);
  return out;
}

double eta_p(std::size_t p, double R, double m) {
  if (R < 0 || m < 0) throw std::invalid_argument("eta_p requires R >= 0 and m >= 0");
  const double pp = static_cast<double>(p);
  return pp * (pp + 1.0) * (4.0 * R * m + 2.0 * m * m);
}

namespace {

// Dirichlet(1,...,1) combination of the rows of `corners`.
std::vector<double> random_convex_combination(const std::vector<std::vector<double>>& corners, Rng& rng) {
  std::vector<double> mix(corners.size());
  double total = 0.0;
  for (double& x : mix) {
    x = rng.exponential();
    total += x;
  }
  std::vector<double> w(corners.front().size(), 0.0);
  for (std::size_t c = 0; c < corners.size(); ++c)
    for (std::size_t i = 0; i < w.size(); ++i) w[i] += mix[c] / total * corners[c][i];
  return w;
}

}  // namespace

std::vector<ComplexPoint> sample_lambda_fiber(const LambdaComplex& k, double lambda, std::size_t samples_per_simplex,
                                              std::uint64_t seed) {
  Rng rng(seed);
  std::vector<ComplexPoint> out;
  for (std::size_t si : k.maximal()) {
    const Simplex& s = k.simplices()[si];
    // Vertices of the polytope {pi = lambda} inside the closed simplex.
    std::vector<std::vector<double>> corners;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double li = k.vertices()[s[i]].lambda;
      if (li == lambda) {
        std::vector<double> w(s.size(), 0.0);
        w[i] = 1.0;
        corners.push_back(std::move(w));
      }
      for (std::size_t j = i + 1; j < s.size(); ++j) {
        const double lj = k.vertices()[s[j]].lambda;
        if ((li - lambda) * (lj - lambda) < 0) {
          const double t = (lj - lambda) / (lj - li);
          std::vector<double> w(s.size(), 0.0);
          w[i] = t;
          w[j] = 1.0 - t;
          corners.push_back(std::move(w));
        }
      }
    }
    if (corners.empty()) continue;
    for (const auto& c : corners) out.push_back(ComplexPoint{si, c});
    for (std::size_t r = 0; r < samples_per_simplex; ++r) {
      ComplexPoint pt{si, random_convex_combination(corners, rng)};
      renormalize(pt.weights);
      out.push_back(std::move(pt));
    }
  }
  return out;
}

std::vector<ComplexPoint> sample_x0(const LambdaComplex& k, std::size_t samples_per_simplex, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<ComplexPoint> out;
  for (std::size_t si = 0; si < k.simplices().size(); ++si) {
    if (!k.simplex_in_x0(si)) continue;
    const Simplex& s = k.simplices()[si];
    const bool extends = std::any_of(k.simplices().begin(), k.simplices().end(), [&](const Simplex& t) {
      return std::includes(t.begin(), t.end(), s.begin(), s.end()) &&
             std::any_of(t.begin(), t.end(), [&](auto u) { return !k.vertex_in_x0(u); });
    });
    if (!extends) continue;
    std::vector<std::vector<double>> corners;
    for (std::size_t i = 0; i < s.size(); ++i) {
      std::vector<double> w(s.size(), 0.0);
      w[i] = 1.0;
      corners.push_back(std::move(w));
    }
    for (std::size_t r = 0; r < samples_per_simplex; ++r) {
      ComplexPoint pt{si, random_convex_combination(corners, rng)};
      // Points of this open simplex only; boundary points are covered by faces.
      for (double& w : pt.weights) w = std::max(w, 1e-12);
      renormalize(pt.weights);
      out.push_back(std::move(pt));
    }
  }
  return out;
}

Displacement max_displacement(const LambdaComplex& k, double lambda, std::size_t samples_per_simplex,
                              std::uint64_t seed) {
  const double l0 = lambda_min(k);
  if (!(lambda > 0 && lambda < l0))
    throw std::invalid_argument("lambda must lie in (0, " + std::to_string(l0) + ")");
  const auto fiber = sample_lambda_fiber(k, lambda, samples_per_simplex, seed);
  if (fiber.empty()) throw std::domain_error("empty fiber");
  Displacement d;
  d.points = fiber.size();
  for (const auto& xi : fiber) {
    const auto x = coordinates(k, xi);
    const auto fx = coordinates(k, f_lambda(k, xi, lambda));
    d.sampled = std::max(d.sampled, distance(x, fx));
  }
  d.bound = 2.0 * (lambda / l0) * k.max_vertex_norm();
  return d;
}

TupleCloud fibered_product_sample(const LambdaComplex& k, double lambda, std::size_t p, double epsilon,
                                  const std::vector<ComplexPoint>& fiber_points, std::size_t cap, std::uint64_t seed) {
  if (epsilon < 0) throw std::invalid_argument("epsilon must be non-negative");
  const std::size_t n = k.ambient_dim();
  PointCloud points(n), images(n);
  for (const auto& xi : fiber_points) {
    points.push_back(coordinates(k, xi));
    images.push_back(coordinates(k, f_lambda(k, xi, lambda)));
  }
  const IndexTuples idx = diagonal_index_tuples(images, p, epsilon, cap, seed);
  TupleCloud out;
  out.base_dim = n;
  out.arity = p + 1;
  out.total = idx.total;
  out.subsampled = idx.subsampled;
  out.tuples = PointCloud(n * (p + 1));
  std::vector<double> row;
  for (const auto& t : idx.tuples) {
    row.clear();
    for (auto i : t) row.insert(row.end(), points[i].begin(), points[i].end());
    out.tuples.push_back(row);
  }
  return out;
}

}  // namespace hlimit
