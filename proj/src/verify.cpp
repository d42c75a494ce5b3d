#include "hlimit/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>

#include "hlimit/homology.hpp"

namespace hlimit {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

json betti_json(const BettiVector& b) { return json(b.ranks); }

BettiVector rips_betti(const PointCloud& cloud, double radius, std::size_t max_k) {
  if (max_k == 0) return BettiVector{{component_count(cloud, radius)}};
  return RipsPersistence(cloud, radius, max_k).betti_at(radius);
}

// Smallest distance between points in different components of the Rips graph
// at `radius`; nullopt when the graph is connected.
std::optional<double> min_intercomponent_distance(const PointCloud& cloud, double radius) {
  const std::size_t n = cloud.size();
  std::vector<std::uint32_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0u);
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : neighbor_edges(cloud, radius)) parent[find(e.i)] = find(e.j);
  std::optional<double> best;
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = i + 1; j < n; ++j)
      if (find(i) != find(j)) {
        const double d = distance(cloud[i], cloud[j]);
        if (!best || d < *best) best = d;
      }
  return best;
}

struct DiagonalCurve {
  std::vector<double> grid;
  std::vector<BettiVector> betti;
  std::vector<std::uint64_t> total;
  std::vector<bool> subsampled;
};

class Pipeline {
 public:
  Pipeline(const Family& family, const VerifyOptions& options) : family_(family), opt_(options) {}

  VerifyOutcome run();

 private:
  TupleCloud diagonal(std::size_t p, double delta) const {
    TupleCloud d = expanded_diagonal(fiber_, p, delta, opt_.cap, opt_.seed + p);
    if (d.subsampled && !opt_.allow_subsample)
      throw InputError("expanded diagonal for p=" + std::to_string(p) + " has " + std::to_string(d.total) +
                       " tuples, above the cap of " + std::to_string(opt_.cap));
    return d;
  }

  DiagonalCurve diagonal_curve(std::size_t p, std::size_t q_max, double rips_radius) const {
    DiagonalCurve c;
    const double scale = static_cast<double>(p * (p + 1)) / 2.0;
    const double lo = std::pow(min_nonzero_distance(fiber_) / 2.0, 2);
    const double hi = scale * std::pow(diameter(fiber_), 2);
    c.grid = geometric_grid(lo, hi, opt_.grid_steps);
    for (double delta : c.grid) {
      const TupleCloud d = diagonal(p, delta);
      c.betti.push_back(rips_betti(d.tuples, rips_radius, q_max));
      c.total.push_back(d.total);
      c.subsampled.push_back(d.subsampled);
    }
    return c;
  }

  json claim_report(const Claim& claim, const DiagonalCurve& curve) const;

  const Family& family_;
  const VerifyOptions& opt_;
  PointCloud fiber_;
  double radius_ = 0.0;
  double lambda_fiber_ = 0.0;
};

json Pipeline::claim_report(const Claim& claim, const DiagonalCurve& curve) const {
  json out;
  out["p"] = claim.p;
  out["delta_expr"] = claim.delta_expr;
  const double claimed = CompiledPolynomial(claim.delta)(std::span<const double>{}, lambda_fiber_);
  out["claimed_delta"] = claimed;

  std::optional<std::size_t> change;
  for (std::size_t i = 1; i < curve.grid.size(); ++i)
    if (curve.betti[i][0] != curve.betti[0][0]) {
      change = i;
      break;
    }
  const auto inter = min_intercomponent_distance(fiber_, radius_);
  std::optional<double> predicted;
  if (inter) predicted = static_cast<double>(claim.p) * *inter * *inter;
  out["predicted_delta"] = predicted ? json(*predicted) : json(nullptr);
  out["predicted_from"] = "p times the squared distance between the closest points of different components";

  // A value matches when it lies in the bracket (g_{i-1}, g_i] widened by one
  // grid step on each side.
  auto matches = [&](double v) {
    if (!change) return false;
    const std::size_t i = *change;
    const double lower = i >= 2 ? curve.grid[i - 2] : 0.0;
    const double upper = i + 1 < curve.grid.size() ? curve.grid[i + 1] : curve.grid[i];
    return v > lower && v <= upper;
  };
  if (change) {
    out["observed_transition"] = {{"index", *change},
                                  {"lower", curve.grid[*change - 1]},
                                  {"upper", curve.grid[*change]},
                                  {"b0_before", curve.betti[*change - 1][0]},
                                  {"b0_after", curve.betti[*change][0]}};
  } else {
    out["observed_transition"] = nullptr;
  }
  const bool claim_ok = matches(claimed);
  const bool prediction_ok = predicted && matches(*predicted);
  out["claim_matches_observed"] = claim_ok;
  out["prediction_matches_observed"] = prediction_ok;
  if (!claim_ok)
    out["flag"] = "stated threshold " + claim.delta_expr + " does not match the observed transition of b_0";
  return out;
}

VerifyOutcome Pipeline::run() {
  const auto start = Clock::now();
  json timings;
  VerifyOutcome outcome;
  json& report = outcome.report;

  lambda_fiber_ = opt_.lambda_fiber.value_or(family_.lambda_hi);
  const double lambda_limit = opt_.lambda_limit.value_or(lambda_fiber_ / 50.0);
  if (!(lambda_limit > 0 && lambda_limit < lambda_fiber_))
    throw InputError("need 0 < lambda_limit < lambda_fiber");
  const std::size_t resolution = opt_.resolution.value_or(family_.resolution.value_or(64));
  if (resolution < 2) throw InputError("resolution must be at least 2");
  const std::vector<std::size_t> res{resolution};
  const double spacing = grid_spacing(family_.box, res);
  const double tol = opt_.tol.value_or(2.0 * spacing);
  if (opt_.cap < 1) throw InputError("cap must be at least 1");

  json intervals = json::array();
  for (auto [lo, hi] : family_.box.intervals) intervals.push_back({lo, hi});
  report["family"] = {{"name", family_.name},
                      {"formula", family_.formula_text},
                      {"box", intervals},
                      {"lambda_range", {family_.lambda_lo, family_.lambda_hi}}};
  report["parameters"] = {{"lambda_limit", lambda_limit},
                          {"lambda_fiber", lambda_fiber_},
                          {"k_max", opt_.k_max},
                          {"resolution", resolution},
                          {"grid_spacing", spacing},
                          {"tol", tol},
                          {"seed", opt_.seed},
                          {"cap", opt_.cap},
                          {"allow_subsample", opt_.allow_subsample},
                          {"min_width_fraction", opt_.min_width_fraction},
                          {"grid_steps", opt_.grid_steps}};

  auto t = Clock::now();
  const PointCloud limit = sample_fiber(family_.formula, lambda_limit, family_.box, res, tol);
  const PointCloud half = sample_fiber(family_.formula, lambda_limit / 2.0, family_.box, res, tol);
  fiber_ = sample_fiber(family_.formula, lambda_fiber_, family_.box, res, tol);
  timings["sampling"] = seconds_since(t);
  if (limit.empty()) throw InputError("empty fiber at lambda_limit");
  if (fiber_.empty()) throw InputError("empty fiber at lambda_fiber");

  json lim;
  lim["points"] = limit.size();
  lim["bounding_radius"] = bounding_radius(limit);
  lim["convergence_hausdorff"] = half.empty() ? json(nullptr) : json(hausdorff_distance(limit, half));
  report["fiber"] = {{"points", fiber_.size()}, {"bounding_radius", bounding_radius(fiber_)}};

  t = Clock::now();
  BettiVector limit_betti;
  bool no_plateau = false;
  if (opt_.radius) {
    if (!(*opt_.radius >= 0)) throw InputError("radius must be non-negative");
    radius_ = *opt_.radius;
    limit_betti = rips_betti(limit, radius_, opt_.k_max);
    lim["radius_mode"] = "fixed";
  } else {
    if (!(min_nonzero_distance(limit) > 0)) throw InputError("limit sample has a single point; pass a radius");
    const BettiCurve curve = betti_curve(limit, default_scale_grid(limit, opt_.grid_steps), opt_.k_max);
    lim["radius_mode"] = "plateau";
    json c = json::array();
    for (std::size_t i = 0; i < curve.size(); ++i) c.push_back({{"radius", curve.grid[i]}, {"betti", betti_json(curve.betti[i])}});
    lim["curve"] = c;
    try {
      const Plateau pl = stable_plateau(curve, opt_.min_width_fraction, PlateauMetric::Log);
      radius_ = std::sqrt(pl.lo * pl.hi);
      limit_betti = pl.betti;
      lim["plateau"] = {{"lo", pl.lo}, {"hi", pl.hi}};
    } catch (const NoPlateau&) {
      no_plateau = true;
      lim["plateau"] = nullptr;
    }
  }
  timings["limit"] = seconds_since(t);
  if (!no_plateau) {
    lim["radius"] = radius_;
    lim["betti"] = betti_json(limit_betti);
  }
  report["limit"] = lim;

  std::vector<BettiVector> diag_betti(opt_.k_max + 1);
  std::map<std::size_t, DiagonalCurve> curves;
  json diagonals = json::array();
  for (std::size_t p = 0; p <= opt_.k_max && !no_plateau; ++p) {
    t = Clock::now();
    const std::size_t q_max = opt_.k_max - p;
    const double rips_radius = std::sqrt(static_cast<double>(p + 1)) * radius_;
    json d;
    d["p"] = p;
    d["q_max"] = q_max;
    d["rips_radius"] = rips_radius;
    double delta = 0.0;
    if (p == 0) {
      d["delta_mode"] = "trivial";
    } else if (auto it = opt_.delta.find(p); it != opt_.delta.end()) {
      d["delta_mode"] = "fixed";
      delta = it->second;
      if (!(delta >= 0)) throw InputError("delta must be non-negative");
    } else {
      d["delta_mode"] = "plateau";
      DiagonalCurve curve = diagonal_curve(p, q_max, rips_radius);
      json c = json::array();
      bool any_sub = false;
      for (std::size_t i = 0; i < curve.grid.size(); ++i) {
        c.push_back({{"delta", curve.grid[i]},
                     {"betti", betti_json(curve.betti[i])},
                     {"tuples", curve.total[i]},
                     {"subsampled", static_cast<bool>(curve.subsampled[i])}});
        any_sub = any_sub || curve.subsampled[i];
      }
      d["curve"] = c;
      d["curve_subsampled"] = any_sub;
      const BettiCurve bc{curve.grid, curve.betti};
      try {
        // Small delta is the meaningful end here: no leading run is skipped.
        const Plateau pl = stable_plateau(bc, opt_.min_width_fraction, PlateauMetric::Log, false);
        d["plateau"] = {{"lo", pl.lo}, {"hi", pl.hi}};
        delta = curve.grid[(pl.first + pl.last) / 2];
      } catch (const NoPlateau&) {
        no_plateau = true;
        d["plateau"] = nullptr;
      }
      curves.emplace(p, std::move(curve));
    }
    if (!no_plateau) {
      const TupleCloud D = p == 0 ? TupleCloud{fiber_.dim(), 1, fiber_, fiber_.size(), false} : diagonal(p, delta);
      diag_betti[p] = rips_betti(D.tuples, rips_radius, q_max);
      d["delta"] = delta;
      d["tuples"] = D.size();
      d["total_tuples"] = D.total;
      d["subsampled"] = D.subsampled;
      d["betti"] = betti_json(diag_betti[p]);
    }
    timings["diagonal_p" + std::to_string(p)] = seconds_since(t);
    diagonals.push_back(d);
  }
  report["diagonals"] = diagonals;

  bool all_hold = true;
  json inequalities = json::array();
  if (!no_plateau) {
    for (std::size_t k = 0; k <= opt_.k_max; ++k) {
      std::uint64_t rhs = 0;
      json terms = json::array();
      for (std::size_t p = 0; p <= k; ++p) {
        const std::uint64_t b = diag_betti[p][k - p];
        rhs += b;
        terms.push_back({{"p", p}, {"q", k - p}, {"b", b}});
      }
      const bool holds = limit_betti[k] <= rhs;
      all_hold = all_hold && holds;
      inequalities.push_back({{"k", k}, {"lhs", limit_betti[k]}, {"rhs", rhs}, {"terms", terms}, {"holds", holds}});
    }
  }
  report["inequalities"] = inequalities;

  if (!family_.claims.empty() && radius_ > 0) {
    t = Clock::now();
    json claims = json::array();
    for (const auto& claim : family_.claims) {
      if (claim.p == 0) throw InputError("claims need p >= 1");
      auto it = curves.find(claim.p);
      if (it == curves.end())
        it = curves.emplace(claim.p, diagonal_curve(claim.p, 0, std::sqrt(static_cast<double>(claim.p + 1)) * radius_))
                 .first;
      claims.push_back(claim_report(claim, it->second));
    }
    report["claims"] = claims;
    timings["claims"] = seconds_since(t);
  }

  if (no_plateau) {
    report["status"] = "no_plateau";
    outcome.exit_code = 3;
  } else if (!all_hold) {
    report["status"] = "violation";
    outcome.exit_code = 1;
  } else {
    report["status"] = "pass";
    outcome.exit_code = 0;
  }
  timings["total"] = seconds_since(start);
  report["timings"] = timings;
  return outcome;
}

}  // namespace

Family family_from_json(const json& j) {
  Family f;
  try {
    f.name = j.value("name", std::string{});
    f.formula_text = j.at("formula").get<std::string>();
    for (const auto& iv : j.at("box")) {
      const auto pair = iv.get<std::vector<double>>();
      if (pair.size() != 2 || !(pair[1] > pair[0])) throw InputError("box intervals must be [lo, hi] with lo < hi");
      f.box.intervals.emplace_back(pair[0], pair[1]);
    }
    const auto range = j.at("lambda_range").get<std::vector<double>>();
    if (range.size() != 2 || !(range[1] > range[0]) || range[0] < 0)
      throw InputError("lambda_range must be [lo, hi] with 0 <= lo < hi");
    f.lambda_lo = range[0];
    f.lambda_hi = range[1];
    if (j.contains("resolution")) f.resolution = j.at("resolution").get<std::size_t>();
    if (j.contains("claims"))
      for (const auto& c : j.at("claims")) {
        Claim claim;
        claim.p = c.at("p").get<std::size_t>();
        claim.delta_expr = c.at("delta_expr").get<std::string>();
        claim.delta = parse_polynomial(claim.delta_expr);
        if (claim.delta.x_extent() != 0) throw InputError("claim thresholds may only depend on l");
        f.claims.push_back(std::move(claim));
      }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed family file: ") + e.what());
  } catch (const ParseError& e) {
    throw InputError(std::string("family formula: ") + e.what());
  }
  Formula parsed;
  try {
    parsed = parse_formula(f.formula_text);
  } catch (const ParseError& e) {
    throw InputError(std::string("family formula: ") + e.what());
  }
  if (parsed.dim() > f.box.dim())
    throw InputError("formula uses " + std::to_string(parsed.dim()) + " variables but the box has " +
                     std::to_string(f.box.dim()) + " axes");
  f.formula = Formula(parsed.root(), parsed.table(), f.box.dim());
  return f;
}

Family load_family(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
  return family_from_json(j);
}

VerifyOutcome verify_limit(const Family& family, const VerifyOptions& options) {
  try {
    return Pipeline(family, options).run();
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

json without_timings(json report) {
  report.erase("timings");
  return report;
}

}  // namespace hlimit
