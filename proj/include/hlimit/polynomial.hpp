#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace hlimit {

/// Exponents of one monomial in x_1..x_n and the parameter l.
/// Trailing zero x-exponents are trimmed so equal monomials compare equal
/// regardless of how many variables were in scope when they were built.
struct Monomial {
  std::vector<std::uint32_t> x;
  std::uint32_t l = 0;

  Monomial() = default;
  Monomial(std::vector<std::uint32_t> x_exponents, std::uint32_t l_exponent);

  [[nodiscard]] std::uint32_t degree_x() const;
  [[nodiscard]] bool is_constant() const { return x.empty() && l == 0; }

  friend Monomial operator*(const Monomial& a, const Monomial& b);
  friend bool operator==(const Monomial&, const Monomial&) = default;
  friend std::strong_ordering operator<=>(const Monomial& a, const Monomial& b);
};

/// Sparse multivariate polynomial with exact rational coefficients.
/// Invariant: no zero coefficient is ever stored.
class Polynomial {
 public:
  using TermMap = std::map<Monomial, mpq_class>;

  Polynomial() = default;

  static Polynomial constant(const mpq_class& c);
  /// x_{index+1}; indices are 0-based here.
  static Polynomial x(std::size_t index);
  static Polynomial lambda();

  [[nodiscard]] const TermMap& terms() const { return terms_; }
  [[nodiscard]] bool is_zero() const { return terms_.empty(); }
  [[nodiscard]] bool is_constant() const;

  /// Maximum total degree in the x-variables only (0 for the zero polynomial).
  [[nodiscard]] std::uint32_t degree_x() const;
  [[nodiscard]] std::uint32_t degree_lambda() const;
  /// One past the largest x-index with a nonzero exponent.
  [[nodiscard]] std::size_t x_extent() const;

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(const Polynomial& other);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, const Polynomial& b) { return a *= b; }
  Polynomial operator-() const;

  [[nodiscard]] Polynomial pow(std::uint32_t e) const;

  /// Renames x_i to x_{i+offset}.
  [[nodiscard]] Polynomial shift_x(std::size_t offset) const;

  /// Exact evaluation at rational arguments.
  [[nodiscard]] mpq_class evaluate_exact(std::span<const mpq_class> x, const mpq_class& l) const;

  /// Text form accepted back by the formula parser, e.g. "3/2*x1^2*l - 1".
  [[nodiscard]] std::string to_string() const;

  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.terms_ == b.terms_; }

 private:
  void add_term(const Monomial& m, const mpq_class& c);

  TermMap terms_;
};

/// Floating-point form of a polynomial used on hot evaluation paths.
/// Coefficients are rounded to double once, at construction.
class CompiledPolynomial {
 public:
  CompiledPolynomial() = default;
  explicit CompiledPolynomial(const Polynomial& p);

  /// Requires x.size() >= the polynomial's x_extent().
  [[nodiscard]] double operator()(std::span<const double> x, double l) const;

 private:
  struct Term {
    double coefficient;
    std::uint32_t l_exponent;
    // (variable index, exponent) pairs with nonzero exponent
    std::vector<std::pair<std::uint32_t, std::uint32_t>> factors;
  };
  std::vector<Term> terms_;
};

}  // namespace hlimit
