#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "hlimit/formula.hpp"

namespace hlimit {

struct PfaffFormat {
  std::uint64_t n = 0;
  std::uint64_t ell = 0;
  std::uint64_t alpha = 0;
  std::uint64_t beta = 0;
  std::uint64_t s = 0;
  friend bool operator==(const PfaffFormat&, const PfaffFormat&) = default;
};

/// Exact bound value. Every O(x) has been replaced by c*x with
/// c = constant_assumed; `flags` lists the substitutions that were made.
struct BoundValue {
  mpz_class value;
  std::uint64_t constant_assumed = 1;
  std::vector<std::string> flags;

  [[nodiscard]] std::string decimal() const { return value.get_str(10); }
};

/// 2^{l(l-1)/2} b_1...b_n (b_1+...+b_n - n + min(n,l) a + 1)^l; betas >= 1.
[[nodiscard]] BoundValue khovanskii_bound(std::uint64_t ell, std::uint64_t alpha, const std::vector<std::uint64_t>& betas);
/// 2^{l(l-1)/2} (n+1)^l.
[[nodiscard]] BoundValue fewnomial_bound(std::uint64_t n, std::uint64_t ell);
/// 2^{l(l-1)/2} b^n (c n(a+b))^l.
[[nodiscard]] BoundValue khovanskii_domain_bound(std::uint64_t n, std::uint64_t ell, std::uint64_t alpha,
                                                 std::uint64_t beta, std::uint64_t c = 1);
/// (c s d)^n, P-closed semialgebraic sets.
[[nodiscard]] BoundValue basu_bound(std::uint64_t n, std::uint64_t d, std::uint64_t s, std::uint64_t c = 1);
/// (c s^2 d)^n, arbitrary quantifier-free semialgebraic sets.
[[nodiscard]] BoundValue gv_bound(std::uint64_t n, std::uint64_t d, std::uint64_t s, std::uint64_t c = 1);
/// 2^{l(l-1)/2} s^n (c n(a+b))^{n+l}.
[[nodiscard]] BoundValue pclosed_pfaffian_bound(const PfaffFormat& f, std::uint64_t c = 1);
/// 2^{l(l-1)/2} s^{2n} (c n(a+b))^{n+l}.
[[nodiscard]] BoundValue qf_pfaffian_bound(const PfaffFormat& f, std::uint64_t c = 1);
/// (c k^2 s^2 d)^{(k+1)n}; s^2 becomes s when p_closed.
[[nodiscard]] BoundValue hausdorff_limit_bound_alg(std::uint64_t k, std::uint64_t n, std::uint64_t d, std::uint64_t s,
                                                   std::uint64_t c = 1, bool p_closed = false);
/// 2^{l^2(k+1)^2/2} s^{2n(k+1)} (c k n(a+b))^{(k+1)(n+l)}; s^{2n(k+1)} becomes
/// s^{n(k+1)} when p_closed.
[[nodiscard]] BoundValue relative_closure_bound(std::uint64_t k, const PfaffFormat& f, std::uint64_t c = 1,
                                                bool p_closed = false);
/// Bound for one expanded diagonal:
/// 2^{l(p+1)[l(p+1)-1]/2} s^{2n(p+1)} (c n p (a+b))^{(p+1)(n+l)}.
[[nodiscard]] BoundValue diagonal_betti_bound(std::uint64_t p, const PfaffFormat& f, std::uint64_t c = 1);
/// Sum of diagonal_betti_bound over p = 0..k.
[[nodiscard]] BoundValue relative_closure_assembled(std::uint64_t k, const PfaffFormat& f, std::uint64_t c = 1);

/// (n(p+1), max(2,d), s(p+1)+1).
[[nodiscard]] AlgFormat diagonal_format_alg(const AlgFormat& f, std::uint64_t p);
/// (n(p+1), l(p+1), a, b, s(p+1)+1).
[[nodiscard]] PfaffFormat diagonal_format_pfaff(const PfaffFormat& f, std::uint64_t p);

}  // namespace hlimit
