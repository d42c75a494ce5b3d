#include "hlimit/formula.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <optional>

namespace hlimit {

std::string_view to_string(Relation r) {
  switch (r) {
    case Relation::Eq: return "=";
    case Relation::Le: return "<=";
    case Relation::Ge: return ">=";
    case Relation::Lt: return "<";
    case Relation::Gt: return ">";
  }
  return "?";
}

ParseError::ParseError(const std::string& message, std::size_t line, std::size_t column)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

FormulaNode FormulaNode::atom(std::size_t poly, Relation rel) {
  FormulaNode n;
  n.kind = Kind::Atom;
  n.poly = poly;
  n.rel = rel;
  return n;
}

FormulaNode FormulaNode::all_of(std::vector<FormulaNode> children) {
  FormulaNode n;
  n.kind = Kind::And;
  n.children = std::move(children);
  return n;
}

FormulaNode FormulaNode::any_of(std::vector<FormulaNode> children) {
  FormulaNode n;
  n.kind = Kind::Or;
  n.children = std::move(children);
  return n;
}

FormulaNode FormulaNode::negation(FormulaNode child) {
  FormulaNode n;
  n.kind = Kind::Not;
  n.children.push_back(std::move(child));
  return n;
}

// ---------------------------------------------------------------------------
// Formula

namespace {

bool check_node(const FormulaNode& node, std::size_t table_size, bool& p_closed) {
  switch (node.kind) {
    case FormulaNode::Kind::Atom:
      if (is_strict(node.rel)) p_closed = false;
      return node.poly < table_size && node.children.empty();
    case FormulaNode::Kind::Not:
      p_closed = false;
      if (node.children.size() != 1) return false;
      break;
    default:
      break;
  }
  return std::all_of(node.children.begin(), node.children.end(),
                     [&](const FormulaNode& c) { return check_node(c, table_size, p_closed); });
}

}  // namespace

Formula::Formula() = default;

Formula::Formula(FormulaNode root, std::vector<Polynomial> table, std::size_t dim)
    : root_(std::move(root)), table_(std::move(table)), dim_(dim) {
  if (!check_node(root_, table_.size(), p_closed_))
    throw std::invalid_argument("formula references a polynomial outside its table");
  compiled_.reserve(table_.size());
  for (const auto& p : table_) {
    dim_ = std::max(dim_, p.x_extent());
    compiled_.emplace_back(p);
  }
}

Formula Formula::with_degree_floor(std::uint32_t floor) const {
  Formula f = *this;
  f.degree_floor_ = floor;
  return f;
}

bool Formula::eval_node(const FormulaNode& node, std::span<const double> values, double tol) const {
  switch (node.kind) {
    case FormulaNode::Kind::And:
      for (const auto& c : node.children)
        if (!eval_node(c, values, tol)) return false;
      return true;
    case FormulaNode::Kind::Or:
      for (const auto& c : node.children)
        if (eval_node(c, values, tol)) return true;
      return false;
    case FormulaNode::Kind::Not:
      return !eval_node(node.children.front(), values, tol);
    case FormulaNode::Kind::Atom: {
      const double v = values[node.poly];
      switch (node.rel) {
        case Relation::Eq: return std::abs(v) <= tol;
        case Relation::Le: return v <= tol;
        case Relation::Ge: return v >= -tol;
        case Relation::Lt: return v < -tol;
        case Relation::Gt: return v > tol;
      }
    }
  }
  return false;
}

bool Formula::evaluate(std::span<const double> x, double lambda, double tol) const {
  if (x.size() != dim_)
    throw std::invalid_argument("point has dimension " + std::to_string(x.size()) + ", formula expects " +
                                std::to_string(dim_));
  thread_local std::vector<double> values;
  values.resize(compiled_.size());
  for (std::size_t i = 0; i < compiled_.size(); ++i) values[i] = compiled_[i](x, lambda);
  return eval_node(root_, values, tol);
}

namespace {

void print_node(const FormulaNode& node, const std::vector<Polynomial>& table, std::string& out) {
  auto print_child = [&](const FormulaNode& c) {
    if (c.kind == FormulaNode::Kind::Atom) {
      print_node(c, table, out);
    } else {
      out += "(";
      print_node(c, table, out);
      out += ")";
    }
  };
  switch (node.kind) {
    case FormulaNode::Kind::Atom:
      out += table[node.poly].to_string();
      out += " ";
      out += to_string(node.rel);
      out += " 0";
      return;
    case FormulaNode::Kind::Not:
      out += "!";
      print_child(node.children.front());
      return;
    case FormulaNode::Kind::And:
    case FormulaNode::Kind::Or: {
      if (node.children.empty()) {
        out += node.kind == FormulaNode::Kind::And ? "0 = 0" : "1 = 0";
        return;
      }
      const char* sep = node.kind == FormulaNode::Kind::And ? " && " : " || ";
      for (std::size_t i = 0; i < node.children.size(); ++i) {
        if (i > 0) out += sep;
        print_child(node.children[i]);
      }
      return;
    }
  }
}

}  // namespace

std::string Formula::to_string() const {
  std::string out;
  print_node(root_, table_, out);
  return out;
}

std::size_t FormulaBuilder::intern(Polynomial p) {
  auto it = std::find(table_.begin(), table_.end(), p);
  if (it != table_.end()) return static_cast<std::size_t>(it - table_.begin());
  table_.push_back(std::move(p));
  return table_.size() - 1;
}

Formula FormulaBuilder::build(FormulaNode root, std::size_t dim) && {
  return Formula(std::move(root), std::move(table_), dim);
}

// ---------------------------------------------------------------------------
// Parser

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, AndAnd, OrOr, Bang, Rel, End };

struct Token {
  Tok kind;
  std::string text;
  Relation rel = Relation::Eq;
  std::size_t line;
  std::size_t column;
};

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t line = 1, col = 1, i = 0;
  auto advance = [&](std::size_t k) {
    for (std::size_t j = 0; j < k; ++j) {
      if (s[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    const std::size_t l0 = line, c0 = col;
    auto push = [&](Tok k, std::size_t len, Relation r = Relation::Eq) {
      out.push_back(Token{k, std::string(s.substr(i, len)), r, l0, c0});
      advance(len);
    };
    auto next_is = [&](char n) { return i + 1 < s.size() && s[i + 1] == n; };
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      if (j < s.size() && s[j] == '.') {
        ++j;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      }
      if (j - i == 1 && c == '.') throw ParseError("stray '.'", l0, c0);
      push(Tok::Number, j - i);
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      push(Tok::Ident, j - i);
    } else if (c == '&' && next_is('&')) {
      push(Tok::AndAnd, 2);
    } else if (c == '|' && next_is('|')) {
      push(Tok::OrOr, 2);
    } else if (c == '<' && next_is('=')) {
      push(Tok::Rel, 2, Relation::Le);
    } else if (c == '>' && next_is('=')) {
      push(Tok::Rel, 2, Relation::Ge);
    } else if (c == '<') {
      push(Tok::Rel, 1, Relation::Lt);
    } else if (c == '>') {
      push(Tok::Rel, 1, Relation::Gt);
    } else if (c == '=') {
      push(Tok::Rel, 1, Relation::Eq);
    } else {
      switch (c) {
        case '+': push(Tok::Plus, 1); break;
        case '-': push(Tok::Minus, 1); break;
        case '*': push(Tok::Star, 1); break;
        case '/': push(Tok::Slash, 1); break;
        case '^': push(Tok::Caret, 1); break;
        case '(': push(Tok::LParen, 1); break;
        case ')': push(Tok::RParen, 1); break;
        case '!': push(Tok::Bang, 1); break;
        default: throw ParseError(std::string("unexpected character '") + c + "'", l0, c0);
      }
    }
  }
  out.push_back(Token{Tok::End, "", Relation::Eq, line, col});
  return out;
}

mpq_class decimal_to_rational(const std::string& text) {
  const auto dot = text.find('.');
  if (dot == std::string::npos) return mpq_class(mpz_class(text, 10));
  std::string digits = text.substr(0, dot) + text.substr(dot + 1);
  if (digits.empty()) digits = "0";
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), 10, text.size() - dot - 1);
  mpq_class q(mpz_class(digits, 10), den);
  q.canonicalize();
  return q;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(tokenize(text)) {}

  Formula formula() {
    FormulaNode root = parse_or();
    expect_end();
    return std::move(builder_).build(std::move(root), max_dim_);
  }

  Polynomial polynomial() {
    Polynomial p = parse_expr();
    expect_end();
    return p;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& take() { return toks_[pos_++]; }
  bool accept(Tok k) {
    if (peek().kind != k) return false;
    ++pos_;
    return true;
  }
  [[noreturn]] void fail(const std::string& msg, const Token& at) const {
    throw ParseError(msg, at.line, at.column);
  }
  void expect(Tok k, const char* what) {
    if (!accept(k)) fail(std::string("expected ") + what, peek());
  }
  void expect_end() {
    if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "'", peek());
  }

  FormulaNode parse_or() {
    std::vector<FormulaNode> items;
    items.push_back(parse_and());
    while (accept(Tok::OrOr)) items.push_back(parse_and());
    if (items.size() == 1) return std::move(items.front());
    return FormulaNode::any_of(std::move(items));
  }

  FormulaNode parse_and() {
    std::vector<FormulaNode> items;
    items.push_back(parse_unary());
    while (accept(Tok::AndAnd)) items.push_back(parse_unary());
    if (items.size() == 1) return std::move(items.front());
    return FormulaNode::all_of(std::move(items));
  }

  // "(" may open either a sub-formula or a polynomial; try the former and
  // fall back to an atom, reporting whichever attempt got further.
  FormulaNode parse_unary() {
    if (accept(Tok::Bang)) return FormulaNode::negation(parse_unary());
    if (peek().kind == Tok::LParen) {
      const std::size_t start = pos_;
      const auto saved_builder = builder_;
      const auto saved_dim = max_dim_;
      std::optional<ParseError> first_error;
      std::size_t first_error_pos = start;
      try {
        ++pos_;
        FormulaNode inner = parse_or();
        expect(Tok::RParen, "')'");
        const Tok next = peek().kind;
        if (next == Tok::AndAnd || next == Tok::OrOr || next == Tok::RParen || next == Tok::End) return inner;
      } catch (const ParseError& e) {
        first_error = e;
        first_error_pos = pos_;
      }
      pos_ = start;
      builder_ = saved_builder;
      max_dim_ = saved_dim;
      try {
        return parse_atom();
      } catch (const ParseError&) {
        if (first_error && first_error_pos > pos_) throw *first_error;
        throw;
      }
    }
    return parse_atom();
  }

  FormulaNode parse_atom() {
    Polynomial lhs = parse_expr();
    if (peek().kind != Tok::Rel) fail("expected a relation (=, <=, >=, <, >)", peek());
    const Relation rel = take().rel;
    Polynomial rhs = parse_expr();
    return builder_.atom(lhs - rhs, rel);
  }

  Polynomial parse_expr() {
    Polynomial acc = parse_term();
    for (;;) {
      if (accept(Tok::Plus)) {
        acc += parse_term();
      } else if (accept(Tok::Minus)) {
        acc -= parse_term();
      } else {
        return acc;
      }
    }
  }

  Polynomial parse_term() {
    Polynomial acc = parse_factor();
    for (;;) {
      if (accept(Tok::Star)) {
        acc *= parse_factor();
      } else if (peek().kind == Tok::Slash) {
        const Token& slash = take();
        Polynomial d = parse_factor();
        if (!d.is_constant()) fail("division is only allowed by a constant", slash);
        if (d.is_zero()) fail("division by zero", slash);
        const mpq_class inv = 1 / d.terms().begin()->second;
        acc *= Polynomial::constant(inv);
      } else {
        return acc;
      }
    }
  }

  Polynomial parse_factor() {
    if (accept(Tok::Minus)) return -parse_factor();
    if (accept(Tok::Plus)) return parse_factor();
    Polynomial base = parse_primary();
    if (peek().kind == Tok::Caret) {
      const Token& caret = take();
      const Token& e = peek();
      if (e.kind != Tok::Number || e.text.find('.') != std::string::npos)
        fail("exponent must be a non-negative integer literal", e.kind == Tok::End ? caret : e);
      take();
      const unsigned long long exp = std::stoull(e.text);
      if (exp > 1000) fail("exponent too large", e);
      if (peek().kind == Tok::Slash && toks_[pos_ + 1].kind == Tok::Number)
        fail("exponent must be a non-negative integer literal", peek());
      base = base.pow(static_cast<std::uint32_t>(exp));
    }
    return base;
  }

  Polynomial parse_primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Number:
        take();
        return Polynomial::constant(decimal_to_rational(t.text));
      case Tok::Ident: {
        take();
        if (t.text == "l") return Polynomial::lambda();
        if (t.text.size() >= 2 && t.text[0] == 'x' &&
            std::all_of(t.text.begin() + 1, t.text.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }) &&
            t.text[1] != '0') {
          const std::size_t index = std::stoul(t.text.substr(1));
          max_dim_ = std::max(max_dim_, index);
          return Polynomial::x(index - 1);
        }
        fail("unknown variable '" + t.text + "' (expected x1, x2, ... or l)", t);
      }
      case Tok::LParen: {
        take();
        Polynomial inner = parse_expr();
        expect(Tok::RParen, "')'");
        return inner;
      }
      default:
        fail(t.kind == Tok::End ? "unexpected end of input" : "unexpected '" + t.text + "'", t);
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  FormulaBuilder builder_;
  std::size_t max_dim_ = 0;
};

}  // namespace

Formula parse_formula(std::string_view text) { return Parser(text).formula(); }

Polynomial parse_polynomial(std::string_view text) { return Parser(text).polynomial(); }

AlgFormat format_of(const Formula& f) {
  std::uint64_t d = f.degree_floor();
  for (const auto& p : f.table()) d = std::max<std::uint64_t>(d, p.degree_x());
  return AlgFormat{f.dim(), d, f.table().size()};
}

Polynomial rho_polynomial(std::size_t n, std::size_t p) {
  Polynomial rho;
  for (std::size_t i = 0; i <= p; ++i)
    for (std::size_t j = i + 1; j <= p; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        const Polynomial diff = Polynomial::x(i * n + k) - Polynomial::x(j * n + k);
        rho += diff * diff;
      }
  return rho;
}

namespace {

FormulaNode shift_atoms(const FormulaNode& node, std::size_t offset) {
  FormulaNode out = node;
  if (out.kind == FormulaNode::Kind::Atom) out.poly += offset;
  for (auto& c : out.children) c = shift_atoms(c, offset);
  return out;
}

}  // namespace

Formula diagonal_formula(const Formula& f, std::size_t p, const mpq_class& delta) {
  if (delta <= 0) throw std::invalid_argument("diagonal_formula requires delta > 0");
  const std::size_t n = f.dim();
  const std::size_t s = f.table().size();
  std::vector<Polynomial> table;
  table.reserve(s * (p + 1) + 1);
  std::vector<FormulaNode> blocks;
  for (std::size_t i = 0; i <= p; ++i) {
    for (const auto& poly : f.table()) table.push_back(poly.shift_x(i * n));
    blocks.push_back(shift_atoms(f.root(), i * s));
  }
  table.push_back(rho_polynomial(n, p) - Polynomial::constant(delta));
  blocks.push_back(FormulaNode::atom(table.size() - 1, Relation::Le));
  return Formula(FormulaNode::all_of(std::move(blocks)), std::move(table), n * (p + 1))
      .with_degree_floor(std::max<std::uint32_t>(2, f.degree_floor()));
}

}  // namespace hlimit
