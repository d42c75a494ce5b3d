#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <string>
#include <vector>

#include "hlimit/formula.hpp"
#include "hlimit/geometry.hpp"
#include "hlimit/rng.hpp"

using namespace hlimit;

TEST_CASE("polynomial arithmetic is exact") {
  const Polynomial x = Polynomial::x(0), y = Polynomial::x(1), l = Polynomial::lambda();
  const Polynomial p = (x + y).pow(2) - x * x - y * y - Polynomial::constant(2) * x * y;
  CHECK(p.is_zero());
  const Polynomial q = parse_polynomial("3/2*x1^2*l - 1");
  CHECK(q == Polynomial::constant(mpq_class(3, 2)) * x * x * l - Polynomial::constant(1));
  CHECK(q.degree_x() == 2);
  CHECK(q.degree_lambda() == 1);
  CHECK(parse_polynomial(q.to_string()) == q);
  CHECK(parse_polynomial("0.25*x1") == Polynomial::constant(mpq_class(1, 4)) * x);
  CHECK(parse_polynomial("1/2*(x1 + 1)^3") == Polynomial::constant(mpq_class(1, 2)) * (x + Polynomial::constant(1)).pow(3));
}

TEST_CASE("parse_formula spot values") {
  SUBCASE("single equality") {
    const Formula f = parse_formula("x1^2 + x2^2 - 1 = 0");
    CHECK(f.table().size() == 1);
    CHECK(f.root().kind == FormulaNode::Kind::Atom);
    CHECK(f.p_closed());
  }
  SUBCASE("negation breaks P-closedness") {
    const Formula f = parse_formula("!(x1 >= 0)");
    CHECK(f.root().kind == FormulaNode::Kind::Not);
    CHECK_FALSE(f.p_closed());
  }
  SUBCASE("conjunction of non-strict atoms") {
    const Formula f = parse_formula("x1 - l <= 0 && x1 >= 0");
    CHECK(f.root().kind == FormulaNode::Kind::And);
    CHECK(f.root().children.size() == 2);
    CHECK(f.table().size() == 2);
    CHECK(f.p_closed());
  }
  SUBCASE("strict relations break P-closedness") { CHECK_FALSE(parse_formula("x1 < 0").p_closed()); }
  SUBCASE("identical polynomials are shared, sign flips are not") {
    const Formula f = parse_formula("x1 - 1 >= 0 && x1 - 1 <= 0 && 1 - x1 = 0");
    CHECK(f.table().size() == 2);
  }
  SUBCASE("parenthesized polynomial versus parenthesized formula") {
    CHECK(parse_formula("(x1 + 1)^2 = 0").table().size() == 1);
    CHECK(parse_formula("(x1 = 0 || x2 = 0) && l >= 0").root().kind == FormulaNode::Kind::And);
  }
}

TEST_CASE("parse errors carry positions") {
  auto error_at = [](const std::string& text) -> std::pair<std::size_t, std::size_t> {
    try {
      (void)parse_formula(text);
    } catch (const ParseError& e) {
      return {e.line(), e.column()};
    }
    return {0, 0};
  };
  CHECK(error_at("x1 + = 0").first == 1);
  CHECK(error_at("x1 = 0 &&\n  y = 0").first == 2);
  CHECK(error_at("x1^1.5 = 0").first == 1);
  CHECK(error_at("x1 = 0 &&").first == 1);
  CHECK_THROWS_AS((void)parse_formula("x0 = 0"), ParseError);
  CHECK_THROWS_AS((void)parse_formula("z = 0"), ParseError);
}

TEST_CASE("format_of") {
  CHECK(format_of(parse_formula("x1^2 + x2^2 - 1 = 0")) == AlgFormat{2, 2, 1});
  CHECK(format_of(parse_formula("x1^3*x2 - l*x1 = 0 && x2 - 1 >= 0")) == AlgFormat{2, 4, 2});
  CHECK(format_of(Formula()) == AlgFormat{0, 0, 0});
  // The parameter's degree does not count.
  CHECK(format_of(parse_formula("x1 - l^7 = 0")) == AlgFormat{1, 1, 1});
}

TEST_CASE("evaluate with tolerance") {
  const Formula circle = parse_formula("x1^2 + x2^2 - 1 = 0");
  const std::vector<double> on{1.0, 0.0}, off{1.1, 0.0};
  CHECK(circle.evaluate(on, 0.0, 1e-9));
  CHECK_FALSE(circle.evaluate(off, 0.0, 1e-9));
  const Formula below = parse_formula("x1 - l <= 0");
  const std::vector<double> half{0.5};
  CHECK(below.evaluate(half, 0.5, 0.0));
  CHECK_FALSE(parse_formula("x1 - l < 0").evaluate(half, 0.5, 0.0));
  CHECK_THROWS_AS((void)circle.evaluate(half, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("diagonal formula formats") {
  SUBCASE("p = 0 adds a trivially true distance atom") {
    const Formula f = parse_formula("x1 - 1 = 0");
    const Formula psi = diagonal_formula(f, 0, mpq_class(1, 10));
    CHECK(format_of(psi) == AlgFormat{1, 2, 2});
    CHECK(psi.evaluate(std::vector<double>{1.0}, 0.0, 0.0));
    CHECK(rho_polynomial(1, 0).is_zero());
  }
  SUBCASE("format rule on a (2,3,4) formula") {
    const Formula f = parse_formula("x1^3 = 0 && x2 = 0 && x1*x2 - 1 >= 0 && x1 + x2 <= 0");
    REQUIRE(format_of(f) == AlgFormat{2, 3, 4});
    CHECK(format_of(diagonal_formula(f, 1, 1)) == AlgFormat{4, 3, 9});
  }
  SUBCASE("format rule on a (1,1,1) formula, p = 2") {
    CHECK(format_of(diagonal_formula(parse_formula("x1 >= 0"), 2, 1)) == AlgFormat{3, 2, 4});
  }
  SUBCASE("rho polynomial matches the metric") {
    const Polynomial rho = rho_polynomial(2, 2);
    const std::vector<mpq_class> pts{0, 0, 1, 0, 0, 1};
    CHECK(rho.evaluate_exact(pts, 0) == 4);
  }
}

namespace {

// Random formula text over x1..x3 and l; `depth` bounds the nesting.
std::string random_polynomial(Rng& rng) {
  static const char* vars[] = {"x1", "x2", "x3", "l"};
  std::string out;
  const auto terms = 1 + rng.below(3);
  for (std::uint64_t t = 0; t < terms; ++t) {
    if (t) out += rng.below(2) ? " + " : " - ";
    out += std::to_string(1 + rng.below(5));
    if (rng.below(3) == 0) out += "/" + std::to_string(2 + rng.below(3));
    const auto factors = rng.below(3);
    for (std::uint64_t f = 0; f < factors; ++f) {
      out += std::string("*") + vars[rng.below(4)];
      if (rng.below(2)) out += "^" + std::to_string(1 + rng.below(3));
    }
  }
  return out;
}

std::string random_formula(Rng& rng, int depth) {
  static const char* rels[] = {"=", "<=", ">=", "<", ">"};
  const auto pick = depth == 0 ? 0 : rng.below(4);
  switch (pick) {
    case 1:
      return "(" + random_formula(rng, depth - 1) + " && " + random_formula(rng, depth - 1) + ")";
    case 2:
      return "(" + random_formula(rng, depth - 1) + " || " + random_formula(rng, depth - 1) + ")";
    case 3:
      return "!" + random_formula(rng, depth - 1);
    default:
      return random_polynomial(rng) + " " + rels[rng.below(5)] + " 0";
  }
}

}  // namespace

TEST_CASE("print then parse is the identity on generated formulas") {
  Rng rng(7);
  for (int i = 0; i < 500; ++i) {
    const std::string text = random_formula(rng, 3);
    const Formula f = parse_formula(text);
    const Formula g = parse_formula(f.to_string());
    INFO(text);
    INFO(f.to_string());
    CHECK(f.root() == g.root());
    CHECK(f.table() == g.table());
    // A variable whose terms cancel is named in the text but not in the print.
    CHECK(g.dim() <= f.dim());
    CHECK(g.p_closed() == f.p_closed());
  }
}

TEST_CASE("diagonal formula invariants on generated formulas") {
  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    const Formula f = parse_formula(random_formula(rng, 2));
    if (f.dim() == 0) continue;
    const AlgFormat af = format_of(f);
    for (std::size_t p = 0; p <= 3; ++p) {
      const mpq_class delta(1 + static_cast<long>(rng.below(20)), 4);
      const Formula psi = diagonal_formula(f, p, delta);
      CHECK(format_of(psi) == AlgFormat{af.n * (p + 1), std::max<std::uint64_t>(2, af.d), af.s * (p + 1) + 1});
      if (f.p_closed()) CHECK(psi.p_closed());
    }
  }
}

TEST_CASE("diagonal formula evaluates as the conjunction of its parts") {
  Rng rng(3);
  const std::vector<std::string> sources{"x1^2 + x2^2 - 1 <= 0", "x1 - l >= 0 || x2 > 0", "!(x1*x2 >= 0)"};
  for (const auto& src : sources) {
    const Formula f = parse_formula(src);
    const std::size_t n = f.dim();
    for (std::size_t p = 0; p <= 2; ++p) {
      const double delta = 1.5;
      const Formula psi = diagonal_formula(f, p, mpq_class(3, 2));
      for (int trial = 0; trial < 2000; ++trial) {
        std::vector<double> tuple(n * (p + 1));
        for (double& v : tuple) v = std::round((rng.uniform() * 3 - 1.5) * 8) / 8;  // dyadic: exact in both paths
        const double lambda = std::round(rng.uniform() * 8) / 8;
        bool expected = rho_p(tuple, n) <= delta;
        for (std::size_t b = 0; b <= p; ++b)
          expected = expected && f.evaluate(std::span<const double>(tuple).subspan(b * n, n), lambda, 0.0);
        CHECK(psi.evaluate(tuple, lambda, 0.0) == expected);
      }
    }
  }
}
