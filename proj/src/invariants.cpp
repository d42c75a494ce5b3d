#include "hlimit/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hlimit/rng.hpp"

namespace hlimit {

namespace {

class Tally {
 public:
  Tally(std::string name, double tol) : tol_(tol) { r_.name = std::move(name); }
  void add(double residual) {
    ++r_.checks;
    if (!(residual <= tol_)) r_.passed = false;
    if (std::isnan(residual)) residual = std::numeric_limits<double>::infinity();
    r_.worst_residual = std::max(r_.worst_residual, residual);
  }
  // An exception inside a check fails the invariant rather than the suite.
  template <class F>
  void guarded(F&& f) {
    try {
      f();
    } catch (const std::exception&) {
      ++r_.checks;
      r_.passed = false;
      r_.worst_residual = std::numeric_limits<double>::infinity();
    }
  }
  [[nodiscard]] InvariantResult result() const { return r_; }

 private:
  double tol_;
  InvariantResult r_;
};

double gap(const LambdaComplex& k, const ComplexPoint& a, const ComplexPoint& b) {
  return distance(total_coordinates(k, a), total_coordinates(k, b));
}

double norm(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

}  // namespace

std::vector<InvariantResult> run_invariant_suite(const LambdaComplex& k, const InvariantOptions& options) {
  const double l0 = lambda_min(k);
  std::vector<double> lambdas = options.lambdas;
  if (lambdas.empty())
    for (double f : {0.9, 0.5, 0.25, 0.1, 0.01}) lambdas.push_back(f * l0);
  std::vector<double> epsilons = options.epsilons;
  if (epsilons.empty())
    for (double e = 1e-4; e <= 10.0; e *= 10.0) epsilons.push_back(e);
  const double tol = options.tolerance;
  Rng rng(options.seed);

  Tally idempotence("retract idempotence", tol);
  Tally constancy("retract constant on segments to F(xi)", tol);
  Tally factorization("f^lambda = f^lambda' o h", tol);
  Tally bijectivity("h^{-1} o h = id", tol);
  Tally displacement("displacement <= 2(lambda/lambda_0) max|alpha|", tol);
  Tally lifting("lift round trip", tol);
  Tally inclusions("rho_p inclusions with eta_p", tol);

  for (std::size_t li = 0; li < lambdas.size(); ++li) {
    const double lambda = lambdas[li];
    const auto fiber = sample_lambda_fiber(k, lambda, options.samples_per_simplex, options.seed + li);
    std::vector<ComplexPoint> images;
    images.reserve(fiber.size());
    double m = 0.0, radius = 0.0;
    for (const auto& xi : fiber) {
      const ComplexPoint f = f_lambda(k, xi, lambda);
      images.push_back(f);
      const auto x = coordinates(k, xi);
      const auto fx = coordinates(k, f);
      m = std::max(m, distance(x, fx));
      radius = std::max({radius, norm(x), norm(fx)});
    }

    const double bound = 2.0 * (lambda / l0) * k.max_vertex_norm();
    for (std::size_t i = 0; i < fiber.size(); ++i) {
      const ComplexPoint& xi = fiber[i];
      const ComplexPoint& f = images[i];
      displacement.add(std::max(0.0, distance(coordinates(k, xi), coordinates(k, f)) - bound));
      idempotence.guarded([&] { idempotence.add(gap(k, retract(k, f), f)); });
      constancy.guarded([&] {
        const double t = 0.001 + 0.998 * rng.uniform();
        ComplexPoint mid{xi.simplex, xi.weights};
        for (std::size_t w = 0; w < mid.weights.size(); ++w) mid.weights[w] = t * xi.weights[w] + (1 - t) * f.weights[w];
        constancy.add(gap(k, retract(k, mid), f));
      });
      const double lp = lambda * (0.001 + 0.998 * rng.uniform());
      for (double lambda_prime : {lambda / 2, lp}) {
        factorization.guarded([&] {
          const ComplexPoint h = homeo_h(k, xi, lambda, lambda_prime);
          factorization.add(std::abs(projection(k, h) - lambda_prime));
          factorization.add(gap(k, f_lambda(k, h, lambda_prime), f));
        });
        bijectivity.guarded([&] {
          const ComplexPoint h = homeo_h(k, xi, lambda, lambda_prime);
          bijectivity.add(gap(k, homeo_h_inverse(k, h, lambda, lambda_prime), xi));
        });
      }
    }

    displacement.guarded([&] {
      const Displacement d = max_displacement(k, lambda, options.samples_per_simplex, options.seed + li);
      displacement.add(std::max(0.0, d.sampled - d.bound));
      displacement.add(std::abs(d.bound - bound));
    });

    for (const auto& zeta : sample_x0(k, options.samples_per_simplex, options.seed + 1000 + li)) {
      lifting.guarded([&] {
        const ComplexPoint tau = lift_point(k, zeta, lambda);
        lifting.add(std::abs(projection(k, tau) - lambda));
        lifting.add(gap(k, f_lambda(k, tau, lambda), zeta));
      });
    }

    // Random tuples of fiber points against the same tuples of images.
    if (fiber.empty()) continue;
    const std::size_t n = k.ambient_dim();
    for (std::size_t p : options.p_values) {
      const double eta = eta_p(p, radius, m);
      std::vector<double> xs(n * (p + 1)), fs(n * (p + 1));
      for (std::size_t t = 0; t < options.tuples_per_p; ++t) {
        for (std::size_t b = 0; b <= p; ++b) {
          const auto i = static_cast<std::size_t>(rng.below(fiber.size()));
          const auto x = coordinates(k, fiber[i]);
          const auto fx = coordinates(k, images[i]);
          std::copy(x.begin(), x.end(), xs.begin() + static_cast<std::ptrdiff_t>(b * n));
          std::copy(fx.begin(), fx.end(), fs.begin() + static_cast<std::ptrdiff_t>(b * n));
        }
        const double rx = rho_p(xs, n), rf = rho_p(fs, n);
        for (double e : epsilons) {
          if (rx <= e) inclusions.add(std::max(0.0, rf - (e + eta)));
          if (rf <= e) inclusions.add(std::max(0.0, rx - (e + eta)));
        }
      }
    }
  }

  return {idempotence.result(), constancy.result(), factorization.result(), bijectivity.result(),
          displacement.result(), lifting.result(),  inclusions.result()};
}

}  // namespace hlimit
