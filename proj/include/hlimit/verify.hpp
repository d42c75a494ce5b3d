#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "hlimit/formula.hpp"
#include "hlimit/geometry.hpp"

namespace hlimit {

/// Bad family file, bad flags, empty fibers: exit status 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A stated threshold to compare against the observed one: the first scale
/// at which b_0 of the p-th expanded diagonal changes, as a polynomial in l.
struct Claim {
  std::size_t p = 1;
  std::string delta_expr;
  Polynomial delta;
};

/// {"formula": ..., "box": [[lo,hi], ...], "lambda_range": [lo,hi]}, plus the
/// optional keys "name", "resolution" and "claims": [{"p": 1, "delta_expr": "l"}].
struct Family {
  std::string name;
  std::string formula_text;
  Formula formula;
  Box box;
  double lambda_lo = 0.0;
  double lambda_hi = 1.0;
  std::optional<std::size_t> resolution;
  std::vector<Claim> claims;
};

[[nodiscard]] Family family_from_json(const nlohmann::json& j);
[[nodiscard]] Family load_family(const std::string& path);

struct VerifyOptions {
  std::optional<double> lambda_limit;  // default lambda_fiber / 50
  std::optional<double> lambda_fiber;  // default: top of lambda_range
  std::size_t k_max = 1;
  std::optional<std::size_t> resolution;  // default: family's, else 64
  std::optional<double> tol;              // default: twice the grid spacing
  std::uint64_t seed = 0;
  std::map<std::size_t, double> delta;  // fixed delta per p; others are automatic
  std::optional<double> radius;         // fixed Rips radius instead of the plateau
  std::size_t cap = 20000;
  bool allow_subsample = true;
  double min_width_fraction = 0.2;
  std::size_t grid_steps = 32;
};

struct VerifyOutcome {
  nlohmann::json report;
  int exit_code = 0;  // 0 pass, 1 inequality violated, 3 no plateau
};

/// Samples the fiber at lambda_limit as the limit proxy and at lambda_fiber as
/// A, reads Betti numbers on stable plateaus and checks, for each k <= k_max,
/// b_k(limit) <= sum over p + q = k of b_q(D^p(delta)). Throws InputError.
[[nodiscard]] VerifyOutcome verify_limit(const Family& family, const VerifyOptions& options);

/// Report without its "timings" member, for reproducibility comparisons.
[[nodiscard]] nlohmann::json without_timings(nlohmann::json report);

}  // namespace hlimit
