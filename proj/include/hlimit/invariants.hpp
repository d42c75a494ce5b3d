#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "hlimit/simplicial.hpp"

namespace hlimit {

struct InvariantResult {
  std::string name;
  bool passed = true;
  double worst_residual = 0.0;
  std::size_t checks = 0;
};

struct InvariantOptions {
  /// Parameter values in (0, lambda_0); empty means fractions of lambda_0.
  std::vector<double> lambdas;
  std::vector<std::size_t> p_values{1, 2};
  /// Thresholds for the rho_p inclusions; empty means a geometric range.
  std::vector<double> epsilons;
  std::size_t samples_per_simplex = 400;
  std::size_t tuples_per_p = 2000;
  double tolerance = 1e-9;
  std::uint64_t seed = 0;
};

/// Checks, on seeded samples: retraction idempotence, constancy of F along
/// segments to F(xi), f^lambda = f^lambda' o h, h^{-1} o h = id, the
/// displacement bound, lift round trips and the rho_p inclusions with eta_p.
[[nodiscard]] std::vector<InvariantResult> run_invariant_suite(const LambdaComplex& k, const InvariantOptions& options);

}  // namespace hlimit
