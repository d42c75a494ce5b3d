#include "hlimit/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace hlimit {

Monomial::Monomial(std::vector<std::uint32_t> x_exponents, std::uint32_t l_exponent)
    : x(std::move(x_exponents)), l(l_exponent) {
  while (!x.empty() && x.back() == 0) x.pop_back();
}

std::uint32_t Monomial::degree_x() const {
  return std::accumulate(x.begin(), x.end(), std::uint32_t{0});
}

Monomial operator*(const Monomial& a, const Monomial& b) {
  std::vector<std::uint32_t> e(std::max(a.x.size(), b.x.size()), 0);
  for (std::size_t i = 0; i < a.x.size(); ++i) e[i] += a.x[i];
  for (std::size_t i = 0; i < b.x.size(); ++i) e[i] += b.x[i];
  return Monomial(std::move(e), a.l + b.l);
}

// Terms are kept in graded order with the highest total degree first, which
// is also the order in which they are printed.
std::strong_ordering operator<=>(const Monomial& a, const Monomial& b) {
  const auto da = a.degree_x() + a.l;
  const auto db = b.degree_x() + b.l;
  if (da != db) return db <=> da;
  const std::size_t n = std::max(a.x.size(), b.x.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto ea = i < a.x.size() ? a.x[i] : 0u;
    const auto eb = i < b.x.size() ? b.x[i] : 0u;
    if (ea != eb) return eb <=> ea;
  }
  return b.l <=> a.l;
}

Polynomial Polynomial::constant(const mpq_class& c) {
  Polynomial p;
  p.add_term(Monomial{}, c);
  return p;
}

Polynomial Polynomial::x(std::size_t index) {
  std::vector<std::uint32_t> e(index + 1, 0);
  e[index] = 1;
  Polynomial p;
  p.add_term(Monomial(std::move(e), 0), mpq_class(1));
  return p;
}

Polynomial Polynomial::lambda() {
  Polynomial p;
  p.add_term(Monomial({}, 1), mpq_class(1));
  return p;
}

void Polynomial::add_term(const Monomial& m, const mpq_class& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

bool Polynomial::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_constant());
}

std::uint32_t Polynomial::degree_x() const {
  std::uint32_t d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.degree_x());
  return d;
}

std::uint32_t Polynomial::degree_lambda() const {
  std::uint32_t d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.l);
  return d;
}

std::size_t Polynomial::x_extent() const {
  std::size_t n = 0;
  for (const auto& [m, c] : terms_) n = std::max(n, m.x.size());
  return n;
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  for (const auto& [m, c] : other.terms_) add_term(m, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  for (const auto& [m, c] : other.terms_) add_term(m, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(const Polynomial& other) {
  Polynomial product;
  for (const auto& [ma, ca] : terms_)
    for (const auto& [mb, cb] : other.terms_) product.add_term(ma * mb, ca * cb);
  terms_ = std::move(product.terms_);
  return *this;
}

Polynomial Polynomial::operator-() const {
  Polynomial p;
  for (const auto& [m, c] : terms_) p.terms_.emplace(m, -c);
  return p;
}

Polynomial Polynomial::pow(std::uint32_t e) const {
  Polynomial result = constant(1);
  Polynomial base = *this;
  while (e > 0) {
    if (e & 1u) result *= base;
    e >>= 1;
    if (e > 0) base *= base;
  }
  return result;
}

Polynomial Polynomial::shift_x(std::size_t offset) const {
  Polynomial p;
  for (const auto& [m, c] : terms_) {
    if (m.x.empty()) {
      p.terms_.emplace(m, c);
      continue;
    }
    std::vector<std::uint32_t> e(offset, 0);
    e.insert(e.end(), m.x.begin(), m.x.end());
    p.terms_.emplace(Monomial(std::move(e), m.l), c);
  }
  return p;
}

mpq_class Polynomial::evaluate_exact(std::span<const mpq_class> x, const mpq_class& l) const {
  if (x.size() < x_extent()) throw std::invalid_argument("polynomial evaluated at a point of too small dimension");
  mpq_class sum = 0;
  for (const auto& [m, c] : terms_) {
    mpq_class t = c;
    for (std::size_t i = 0; i < m.x.size(); ++i)
      for (std::uint32_t k = 0; k < m.x[i]; ++k) t *= x[i];
    for (std::uint32_t k = 0; k < m.l; ++k) t *= l;
    sum += t;
  }
  return sum;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    mpq_class mag = abs(c);
    if (first) {
      if (c < 0) out += "-";
    } else {
      out += c < 0 ? " - " : " + ";
    }
    first = false;

    std::vector<std::string> factors;
    for (std::size_t i = 0; i < m.x.size(); ++i) {
      if (m.x[i] == 0) continue;
      std::string f = "x" + std::to_string(i + 1);
      if (m.x[i] > 1) f += "^" + std::to_string(m.x[i]);
      factors.push_back(std::move(f));
    }
    if (m.l > 0) factors.push_back(m.l > 1 ? "l^" + std::to_string(m.l) : "l");

    if (factors.empty() || mag != 1) factors.insert(factors.begin(), mag.get_str());
    for (std::size_t i = 0; i < factors.size(); ++i) {
      if (i > 0) out += "*";
      out += factors[i];
    }
  }
  return out;
}

CompiledPolynomial::CompiledPolynomial(const Polynomial& p) {
  terms_.reserve(p.terms().size());
  for (const auto& [m, c] : p.terms()) {
    Term t{c.get_d(), m.l, {}};
    for (std::size_t i = 0; i < m.x.size(); ++i)
      if (m.x[i] != 0) t.factors.emplace_back(static_cast<std::uint32_t>(i), m.x[i]);
    terms_.push_back(std::move(t));
  }
}

namespace {
double ipow(double b, std::uint32_t e) {
  double r = 1.0;
  while (e > 0) {
    if (e & 1u) r *= b;
    e >>= 1;
    b *= b;
  }
  return r;
}
}  // namespace

double CompiledPolynomial::operator()(std::span<const double> x, double l) const {
  double sum = 0.0;
  for (const auto& t : terms_) {
    double v = t.coefficient;
    for (const auto& [i, e] : t.factors) v *= ipow(x[i], e);
    if (t.l_exponent) v *= ipow(l, t.l_exponent);
    sum += v;
  }
  return sum;
}

}  // namespace hlimit
