#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hlimit/polynomial.hpp"

namespace hlimit {

enum class Relation { Eq, Le, Ge, Lt, Gt };

[[nodiscard]] std::string_view to_string(Relation r);
[[nodiscard]] constexpr bool is_strict(Relation r) { return r == Relation::Lt || r == Relation::Gt; }

/// Raised by parse_formula; carries a 1-based source position.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column);
  [[nodiscard]] std::size_t line() const { return line_; }
  [[nodiscard]] std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Complexity triple (n, d, s): variable count, max x-degree, polynomial count.
struct AlgFormat {
  std::uint64_t n = 0;
  std::uint64_t d = 0;
  std::uint64_t s = 0;
  friend bool operator==(const AlgFormat&, const AlgFormat&) = default;
};

/// Boolean tree over sign conditions. An And with no children is true, an Or
/// with no children is false.
struct FormulaNode {
  enum class Kind { And, Or, Not, Atom };
  Kind kind = Kind::And;
  std::vector<FormulaNode> children;
  std::size_t poly = 0;  // Atom only: index into the polynomial table
  Relation rel = Relation::Eq;

  static FormulaNode atom(std::size_t poly, Relation rel);
  static FormulaNode all_of(std::vector<FormulaNode> children);
  static FormulaNode any_of(std::vector<FormulaNode> children);
  static FormulaNode negation(FormulaNode child);

  friend bool operator==(const FormulaNode&, const FormulaNode&) = default;
};

/// A quantifier-free formula on polynomials in x_1..x_n and one parameter l.
/// Immutable once built.
class Formula {
 public:
  /// Constant true (the empty conjunction).
  Formula();
  /// `dim` is the ambient x-dimension; it is raised to cover every variable
  /// used in the table. Throws std::invalid_argument on a dangling atom.
  Formula(FormulaNode root, std::vector<Polynomial> table, std::size_t dim = 0);

  [[nodiscard]] const FormulaNode& root() const { return root_; }
  [[nodiscard]] const std::vector<Polynomial>& table() const { return table_; }
  [[nodiscard]] std::size_t dim() const { return dim_; }
  [[nodiscard]] bool p_closed() const { return p_closed_; }

  /// Minimum degree reported by format_of; see diagonal_formula.
  [[nodiscard]] std::uint32_t degree_floor() const { return degree_floor_; }
  [[nodiscard]] Formula with_degree_floor(std::uint32_t floor) const;

  /// Atoms are tested with slack `tol`: "p = 0" holds when |p| <= tol,
  /// "p <= 0" when p <= tol, "p < 0" when p < -tol, and symmetrically.
  [[nodiscard]] bool evaluate(std::span<const double> x, double lambda, double tol) const;

  [[nodiscard]] std::string to_string() const;

  friend bool operator==(const Formula& a, const Formula& b) {
    return a.root_ == b.root_ && a.table_ == b.table_ && a.dim_ == b.dim_;
  }

 private:
  bool eval_node(const FormulaNode& node, std::span<const double> values, double tol) const;

  FormulaNode root_;
  std::vector<Polynomial> table_;
  std::vector<CompiledPolynomial> compiled_;
  std::size_t dim_ = 0;
  std::uint32_t degree_floor_ = 0;
  bool p_closed_ = true;
};

/// Incrementally assembles a Formula, deduplicating identical polynomials.
class FormulaBuilder {
 public:
  std::size_t intern(Polynomial p);
  FormulaNode atom(Polynomial p, Relation rel) { return FormulaNode::atom(intern(std::move(p)), rel); }
  [[nodiscard]] Formula build(FormulaNode root, std::size_t dim = 0) &&;

 private:
  std::vector<Polynomial> table_;
};

/// Parses the textual grammar:
///   formula := or ; or := and ("||" and)* ; and := unary ("&&" unary)* ;
///   unary := "!" unary | "(" formula ")" | atom ; atom := poly rel poly
/// Variables are x1, x2, ... and the parameter l.
[[nodiscard]] Formula parse_formula(std::string_view text);

/// Parses a bare polynomial expression in the same syntax.
[[nodiscard]] Polynomial parse_polynomial(std::string_view text);

[[nodiscard]] AlgFormat format_of(const Formula& f);

/// Sum over 0 <= i < j <= p of |x_i - x_j|^2 on blocks of n variables, as a
/// polynomial in x_1..x_{n(p+1)}. Zero for p = 0.
[[nodiscard]] Polynomial rho_polynomial(std::size_t n, std::size_t p);

/// The expanded-diagonal formula
///   f(x_0) && ... && f(x_p) && rho_p(x_0..x_p) - delta <= 0
/// over n(p+1) variables. Blocks are not deduplicated against each other and
/// the distance atom counts as degree 2, so format_of gives
/// (n(p+1), max(2,d), s(p+1)+1).
[[nodiscard]] Formula diagonal_formula(const Formula& f, std::size_t p, const mpq_class& delta);

}  // namespace hlimit
