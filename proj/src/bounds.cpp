#include "hlimit/bounds.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace hlimit {

namespace {

constexpr std::uint64_t kMaxExponent = std::uint64_t{1} << 34;

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("bound exponent overflows 64 bits");
  return r;
}

mpz_class to_mpz(std::uint64_t x) {
  mpz_class z;
  mpz_import(z.get_mpz_t(), 1, 1, sizeof x, 0, 0, &x);
  return z;
}

mpz_class power(const mpz_class& base, std::uint64_t exponent) {
  if (exponent > kMaxExponent) throw std::overflow_error("bound exponent too large");
  mpz_class r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), static_cast<unsigned long>(exponent));
  return r;
}

// base^exponent with a zero base raised to 1; keeps every bound monotone in
// all of its arguments and never below 1.
mpz_class clamped_power(mpz_class base, std::uint64_t exponent, const char* what, BoundValue& out) {
  if (base == 0 && exponent > 0) {
    base = 1;
    out.flags.push_back(std::string("zero base ") + what + " clamped to 1");
  }
  return power(base, exponent);
}

void times_two_power(mpz_class& x, std::uint64_t exponent) {
  if (exponent > kMaxExponent) throw std::overflow_error("bound exponent too large");
  mpz_mul_2exp(x.get_mpz_t(), x.get_mpz_t(), static_cast<mp_bitcnt_t>(exponent));
}

std::uint64_t triangular(std::uint64_t l) { return l == 0 ? 0 : checked_mul(l, l - 1) / 2; }

std::uint64_t k_or_one(std::uint64_t k, BoundValue& out) {
  if (k == 0) {
    out.flags.push_back("k = 0 evaluated as max(k,1) = 1");
    return 1;
  }
  return k;
}

BoundValue with_constant(std::uint64_t c) {
  if (c < 1) throw std::invalid_argument("constant c must be at least 1");
  BoundValue b;
  b.constant_assumed = c;
  return b;
}

}  // namespace

BoundValue khovanskii_bound(std::uint64_t ell, std::uint64_t alpha, const std::vector<std::uint64_t>& betas) {
  if (betas.empty()) throw std::invalid_argument("khovanskii_bound needs at least one degree");
  if (std::any_of(betas.begin(), betas.end(), [](auto b) { return b < 1; }))
    throw std::invalid_argument("khovanskii_bound degrees must be at least 1");
  BoundValue out;
  const auto n = static_cast<std::uint64_t>(betas.size());
  mpz_class product = 1, sum = 0;
  for (auto b : betas) {
    product *= to_mpz(b);
    sum += to_mpz(b);
  }
  const mpz_class inner = sum - to_mpz(n) + to_mpz(std::min(n, ell)) * to_mpz(alpha) + 1;
  out.value = product * power(inner, ell);
  times_two_power(out.value, triangular(ell));
  return out;
}

BoundValue fewnomial_bound(std::uint64_t n, std::uint64_t ell) {
  BoundValue out;
  out.value = power(to_mpz(n) + 1, ell);
  times_two_power(out.value, triangular(ell));
  return out;
}

BoundValue khovanskii_domain_bound(std::uint64_t n, std::uint64_t ell, std::uint64_t alpha, std::uint64_t beta,
                                   std::uint64_t c) {
  BoundValue out = with_constant(c);
  const mpz_class inner = to_mpz(c) * to_mpz(n) * (to_mpz(alpha) + to_mpz(beta));
  out.value = clamped_power(to_mpz(beta), n, "beta", out) * clamped_power(inner, ell, "c n(alpha+beta)", out);
  times_two_power(out.value, triangular(ell));
  return out;
}

BoundValue basu_bound(std::uint64_t n, std::uint64_t d, std::uint64_t s, std::uint64_t c) {
  BoundValue out = with_constant(c);
  out.value = clamped_power(to_mpz(c) * to_mpz(s) * to_mpz(d), n, "c s d", out);
  return out;
}

BoundValue gv_bound(std::uint64_t n, std::uint64_t d, std::uint64_t s, std::uint64_t c) {
  BoundValue out = with_constant(c);
  out.value = clamped_power(to_mpz(c) * to_mpz(s) * to_mpz(s) * to_mpz(d), n, "c s^2 d", out);
  return out;
}

namespace {

BoundValue pfaffian_bound(const PfaffFormat& f, std::uint64_t c, std::uint64_t s_power) {
  BoundValue out = with_constant(c);
  const mpz_class inner = to_mpz(c) * to_mpz(f.n) * (to_mpz(f.alpha) + to_mpz(f.beta));
  out.value = clamped_power(to_mpz(f.s), checked_mul(s_power, f.n), "s", out) *
              clamped_power(inner, f.n + f.ell, "c n(alpha+beta)", out);
  times_two_power(out.value, triangular(f.ell));
  return out;
}

}  // namespace

BoundValue pclosed_pfaffian_bound(const PfaffFormat& f, std::uint64_t c) { return pfaffian_bound(f, c, 1); }

BoundValue qf_pfaffian_bound(const PfaffFormat& f, std::uint64_t c) { return pfaffian_bound(f, c, 2); }

BoundValue hausdorff_limit_bound_alg(std::uint64_t k, std::uint64_t n, std::uint64_t d, std::uint64_t s,
                                     std::uint64_t c, bool p_closed) {
  BoundValue out = with_constant(c);
  const std::uint64_t kk = k_or_one(k, out);
  mpz_class s_term = to_mpz(s);
  if (p_closed) out.flags.push_back("P-closed: s^2 replaced by s");
  else s_term *= to_mpz(s);
  const mpz_class base = to_mpz(c) * to_mpz(kk) * to_mpz(kk) * s_term * to_mpz(d);
  out.value = clamped_power(base, checked_mul(k + 1, n), "c k^2 s^2 d", out);
  return out;
}

BoundValue relative_closure_bound(std::uint64_t k, const PfaffFormat& f, std::uint64_t c, bool p_closed) {
  BoundValue out = with_constant(c);
  const std::uint64_t kk = k_or_one(k, out);
  const std::uint64_t lk = checked_mul(f.ell, k + 1);
  const std::uint64_t sq = checked_mul(lk, lk);
  if (sq % 2) out.flags.push_back("exponent l^2(k+1)^2/2 rounded up to an integer");
  std::uint64_t s_power = checked_mul(checked_mul(2, f.n), k + 1);
  if (p_closed) {
    s_power /= 2;
    out.flags.push_back("P-closed: s^{2n(k+1)} replaced by s^{n(k+1)}");
  }
  const mpz_class inner = to_mpz(c) * to_mpz(kk) * to_mpz(f.n) * (to_mpz(f.alpha) + to_mpz(f.beta));
  out.value = clamped_power(to_mpz(f.s), s_power, "s", out) *
              clamped_power(inner, checked_mul(k + 1, f.n + f.ell), "c k n(alpha+beta)", out);
  times_two_power(out.value, sq / 2 + sq % 2);
  return out;
}

BoundValue diagonal_betti_bound(std::uint64_t p, const PfaffFormat& f, std::uint64_t c) {
  BoundValue out = with_constant(c);
  const std::uint64_t pp = p == 0 ? 1 : p;
  if (p == 0) out.flags.push_back("p = 0 evaluated as max(p,1) = 1");
  const std::uint64_t lp = checked_mul(f.ell, p + 1);
  const mpz_class inner = to_mpz(c) * to_mpz(f.n) * to_mpz(pp) * (to_mpz(f.alpha) + to_mpz(f.beta));
  out.value = clamped_power(to_mpz(f.s), checked_mul(checked_mul(2, f.n), p + 1), "s", out) *
              clamped_power(inner, checked_mul(p + 1, f.n + f.ell), "c n p(alpha+beta)", out);
  times_two_power(out.value, triangular(lp));
  return out;
}

BoundValue relative_closure_assembled(std::uint64_t k, const PfaffFormat& f, std::uint64_t c) {
  BoundValue out = with_constant(c);
  out.value = 0;
  for (std::uint64_t p = 0; p <= k; ++p) {
    BoundValue term = diagonal_betti_bound(p, f, c);
    out.value += term.value;
    for (auto& flag : term.flags)
      if (std::find(out.flags.begin(), out.flags.end(), flag) == out.flags.end()) out.flags.push_back(flag);
  }
  return out;
}

AlgFormat diagonal_format_alg(const AlgFormat& f, std::uint64_t p) {
  return AlgFormat{checked_mul(f.n, p + 1), std::max<std::uint64_t>(2, f.d), checked_mul(f.s, p + 1) + 1};
}

PfaffFormat diagonal_format_pfaff(const PfaffFormat& f, std::uint64_t p) {
  return PfaffFormat{checked_mul(f.n, p + 1), checked_mul(f.ell, p + 1), f.alpha, f.beta,
                     checked_mul(f.s, p + 1) + 1};
}

}  // namespace hlimit
