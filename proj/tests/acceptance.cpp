// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "hlimit/bounds.hpp"
#include "hlimit/homology.hpp"
#include "hlimit/invariants.hpp"
#include "hlimit/rng.hpp"
#include "hlimit/verify.hpp"
#include "z2_oracle.hpp"

using namespace hlimit;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
  }
};

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1e", x);
  return buf;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Criterion 1 -------------------------------------------------------------

Outcome limit_inequalities() {
  Outcome o;
  std::string summary;
  for (const char* path : {"fixtures/circle.json", "fixtures/wedge.json"}) {
    const Family fam = load_family(path);
    VerifyOptions opt;
    opt.k_max = 1;
    opt.seed = 0;
    opt.resolution = std::max<std::size_t>(64, fam.resolution.value_or(64));
    const auto t0 = Clock::now();
    const VerifyOutcome out = verify_limit(fam, opt);
    const double secs = seconds_since(t0);
    const auto& r = out.report;
    o.require(out.exit_code == 0 && r["status"] == "pass", std::string(path) + ": status " + r["status"].dump());
    o.require(r["limit"]["points"].get<std::size_t>() >= 64, std::string(path) + ": limit fiber under 64 points");
    o.require(r["fiber"]["points"].get<std::size_t>() >= 64, std::string(path) + ": fiber under 64 points");
    o.require(r["inequalities"].size() == 2, std::string(path) + ": expected inequalities for k = 0, 1");
    for (const auto& ineq : r["inequalities"]) o.require(ineq["holds"].get<bool>(), std::string(path) + ": violated");
    o.require(secs < 60.0, std::string(path) + ": took " + std::to_string(secs) + " s");
    summary += std::string(path) + " b=" + r["limit"]["betti"].dump() + " " + std::to_string(secs).substr(0, 4) + "s; ";
  }
  if (o.pass) o.detail = summary;
  return o;
}

// Criterion 2 -------------------------------------------------------------

Outcome segment_points_regression() {
  Outcome o;
  const Family fam = load_family("fixtures/segment_points.json");
  std::string summary;
  for (double lambda : {0.2, 0.1, 0.05}) {
    VerifyOptions opt;
    opt.lambda_fiber = lambda;
    opt.tol = 1e-9;
    // Finer than every gap between components, coarser than the grid.
    opt.radius = 1.5 * grid_spacing(fam.box, std::vector<std::size_t>{*fam.resolution});
    const VerifyOutcome out = verify_limit(fam, opt);
    const auto& d1 = out.report["diagonals"][1];
    const auto& curve = d1["curve"];
    std::size_t change = 0;
    for (std::size_t i = 1; i < curve.size() && change == 0; ++i)
      if (curve[i]["betti"][0] != curve[0]["betti"][0]) change = i;
    const double target = lambda * lambda;
    const std::string tag = "lambda=" + std::to_string(lambda);
    o.require(change > 0, tag + ": b_0 of D^1 never changes");
    if (change == 0) continue;
    // Transition bracket (g_{i-1}, g_i], widened by one grid step each side.
    const double lo = change >= 2 ? curve[change - 2]["delta"].get<double>() : 0.0;
    const double hi = change + 1 < curve.size() ? curve[change + 1]["delta"].get<double>()
                                                : std::numeric_limits<double>::infinity();
    o.require(lo < target && target <= hi, tag + ": transition not within one step of lambda^2");
    const auto& claim = out.report["claims"].at(0);
    o.require(!claim["claim_matches_observed"].get<bool>(), tag + ": stated threshold l not flagged");
    o.require(claim["prediction_matches_observed"].get<bool>(), tag + ": lambda^2 prediction missed");
    summary += tag.substr(0, 11) + " at (" + std::to_string(curve[change - 1]["delta"].get<double>()) + "," +
               std::to_string(curve[change]["delta"].get<double>()) + "]; ";
  }
  if (o.pass) o.detail = summary + "threshold l flagged";
  return o;
}

// Criterion 3 -------------------------------------------------------------

Outcome simplicial_invariants() {
  Outcome o;
  std::size_t fewest = std::numeric_limits<std::size_t>::max();
  double worst = 0.0;
  for (const char* path : {"fixtures/single_edge.json", "fixtures/two_simplex.json", "fixtures/two_triangle_fan.json"}) {
    const LambdaComplex k = LambdaComplex::load(path, true);
    InvariantOptions opt;
    const auto results = run_invariant_suite(k, opt);
    o.require(results.size() == 7, std::string(path) + ": expected 7 invariants");
    for (const auto& r : results) {
      o.require(r.passed, std::string(path) + ": " + r.name + " failed");
      o.require(r.worst_residual <= 1e-9, std::string(path) + ": " + r.name + " residual too large");
      o.require(r.checks >= 1000, std::string(path) + ": " + r.name + " sampled fewer than 1000 points");
      fewest = std::min(fewest, r.checks);
      worst = std::max(worst, r.worst_residual);
    }
  }
  if (o.pass) o.detail = "3 complexes x 7 invariants, >= " + std::to_string(fewest) + " checks, worst residual " + sci(worst);
  return o;
}

// Criterion 4 -------------------------------------------------------------

PointCloud uniform_cloud(Rng& rng, std::size_t dim, std::size_t count) {
  PointCloud c(dim);
  std::vector<double> p(dim);
  for (std::size_t i = 0; i < count; ++i) {
    for (auto& v : p) v = rng.uniform();
    c.push_back(p);
  }
  return c;
}

Outcome homology_oracle() {
  using namespace z2_oracle;
  Outcome o;
  std::size_t agreed = 0, total = 0;
  const auto compare = [&](const std::set<Mask>& cx, std::size_t max_k) {
    ++total;
    if (simplicial_betti(to_complex(cx), max_k).ranks == oracle_betti(cx, max_k)) ++agreed;
  };

  std::set<std::set<Mask>> seen;
  for (std::uint32_t pick = 0; pick < (1u << 15); ++pick) {
    std::vector<Mask> gens;
    for (Mask m = 1; m < 16; ++m)
      if (pick >> (m - 1) & 1) gens.push_back(m);
    std::set<Mask> cx = close_masks(gens);
    if (!cx.empty() && seen.insert(cx).second) compare(cx, 3);
  }
  const std::size_t exhaustive = total;

  Rng rng(0);
  for (std::size_t done = 0; done < 500;) {
    const auto verts = 5 + static_cast<std::uint32_t>(rng.below(8));
    std::vector<Mask> gens;
    const std::size_t count = 1 + rng.below(14);
    for (std::size_t g = 0; g < count; ++g) {
      Mask m = 0;
      const std::size_t size = 1 + rng.below(5);
      while (static_cast<std::size_t>(std::popcount(m)) < size) m |= Mask{1} << rng.below(verts);
      gens.push_back(m);
    }
    const std::set<Mask> cx = close_masks(gens);
    if (cx.size() > 200) continue;
    compare(cx, 4);
    ++done;
  }

  std::size_t rips_agreed = 0, rips_total = 0;
  for (std::size_t done = 0; done < 300;) {
    const PointCloud c = uniform_cloud(rng, 2 + rng.below(2), 4 + rng.below(14));
    const double r = 0.1 + 0.5 * rng.uniform();
    const SimplicialComplex rc = rips_complex(c, r, 3);
    if (rc.total_count() > 200) continue;
    ++rips_total;
    if (betti_numbers(c, r, 2).ranks == oracle_betti(to_masks(rc), 2)) ++rips_agreed;
    ++done;
  }
  o.require(agreed == total, std::to_string(total - agreed) + " abstract complexes disagree");
  o.require(rips_agreed == rips_total, std::to_string(rips_total - rips_agreed) + " Rips complexes disagree");

  PointCloud ring(2);
  for (std::size_t i = 0; i < 64; ++i) {
    const double t = 2 * std::numbers::pi * static_cast<double>(i) / 64.0;
    ring.push_back(std::vector<double>{std::cos(t), std::sin(t)});
  }
  const Plateau p = stable_plateau(betti_curve(ring, default_scale_grid(ring), 1), 0.2, PlateauMetric::Log);
  const BettiVector b = betti_numbers(ring, std::sqrt(p.lo * p.hi), 1);
  o.require(b == BettiVector{{1, 1}}, "64-point circle does not read (1,1) on its plateau");
  if (o.pass)
    o.detail = std::to_string(exhaustive) + " complexes on <= 4 vertices + " + std::to_string(total - exhaustive) +
               " random + " + std::to_string(rips_total) +
               " Rips complexes agree; 64-point circle (1,1) on [" + std::to_string(p.lo) + "," +
               std::to_string(p.hi) + "]";
  return o;
}

// Criterion 5 -------------------------------------------------------------

double oracle_directed(const PointCloud& a, const PointCloud& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < b.size(); ++j) {
      double s = 0.0;
      for (std::size_t d = 0; d < a.dim(); ++d) s += (a[i][d] - b[j][d]) * (a[i][d] - b[j][d]);
      best = std::min(best, std::sqrt(s));
    }
    worst = std::max(worst, best);
  }
  return worst;
}

Outcome hausdorff_exactness() {
  Outcome o;
  Rng rng(0);
  double worst_rel = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t dim = 1 + rng.below(3);
    const PointCloud a = uniform_cloud(rng, dim, 1 + rng.below(200));
    const PointCloud b = uniform_cloud(rng, dim, 1 + rng.below(200));
    const PointCloud c = uniform_cloud(rng, dim, 1 + rng.below(200));
    const double expected = oracle_directed(a, b) + oracle_directed(b, a);
    const double got = hausdorff_distance(a, b);
    const double rel = std::abs(got - expected) / std::max(expected, 1e-300);
    worst_rel = std::max(worst_rel, rel);
    o.require(rel <= 4 * std::numeric_limits<double>::epsilon(), "mismatch against the pairwise oracle");
    o.require(got == hausdorff_distance(b, a), "not symmetric");
    o.require(hausdorff_distance(a, c) <= got + hausdorff_distance(b, c) + 1e-12, "triangle inequality fails");
  }
  if (o.pass) o.detail = "100 pairs, worst relative error " + sci(worst_rel);
  return o;
}

// Criterion 6 -------------------------------------------------------------

bool monotone(std::size_t arity, std::uint64_t lo, std::uint64_t hi,
              const std::function<mpz_class(const std::vector<std::uint64_t>&)>& f) {
  std::vector<std::uint64_t> a(arity, lo);
  for (;;) {
    const mpz_class here = f(a);
    for (std::size_t i = 0; i < arity; ++i) {
      if (a[i] == hi) continue;
      auto up = a;
      ++up[i];
      if (f(up) < here) return false;
    }
    std::size_t pos = arity;
    while (pos > 0 && a[pos - 1] == hi) a[--pos] = lo;
    if (pos == 0) return true;
    ++a[pos - 1];
  }
}

Outcome bound_calculators() {
  Outcome o;
  o.require(khovanskii_bound(2, 1, {2}).value == 36, "khovanskii (2,1,[2]) != 36");
  o.require(fewnomial_bound(2, 2).value == 18, "fewnomial (2,2) != 18");
  o.require(diagonal_format_alg({2, 3, 4}, 1) == AlgFormat{4, 3, 9}, "diagonal format (2,3,4),p=1 != (4,3,9)");
  o.require(hausdorff_limit_bound_alg(2, 1, 2, 3).value == 373248, "algebraic limit bound != 373248");

  using A = std::vector<std::uint64_t>;
  const auto pf = [](const A& a) { return PfaffFormat{a[0], a[1], a[2], a[3], a[4]}; };
  o.require(monotone(2, 0, 5, [](const A& a) { return fewnomial_bound(a[0], a[1]).value; }), "fewnomial");
  o.require(monotone(4, 1, 5, [](const A& a) { return khovanskii_bound(a[0] - 1, a[1] - 1, {a[2], a[3]}).value; }),
            "khovanskii");
  o.require(monotone(5, 0, 5, [](const A& a) { return khovanskii_domain_bound(a[0], a[1], a[2], a[3], a[4] + 1).value; }),
            "khovanskii domain");
  o.require(monotone(4, 0, 5, [](const A& a) { return basu_bound(a[0], a[1], a[2], a[3] + 1).value; }), "basu");
  o.require(monotone(4, 0, 5, [](const A& a) { return gv_bound(a[0], a[1], a[2], a[3] + 1).value; }), "gv");
  o.require(monotone(5, 0, 5, [&](const A& a) { return pclosed_pfaffian_bound(pf(a)).value; }), "pclosed");
  o.require(monotone(5, 0, 5, [&](const A& a) { return qf_pfaffian_bound(pf(a)).value; }), "qf");
  o.require(monotone(5, 0, 5, [](const A& a) { return hausdorff_limit_bound_alg(a[0], a[1], a[2], a[3], a[4] + 1).value; }),
            "algebraic limit");
  o.require(monotone(6, 0, 5, [&](const A& a) { return relative_closure_bound(a[5], pf(a)).value; }),
            "relative closure");
  o.require(monotone(6, 0, 5, [&](const A& a) { return relative_closure_assembled(a[5], pf(a)).value; }),
            "assembled");

  const std::uint64_t m = 50;
  const PfaffFormat big{m, m, m, m, m};
  std::size_t digits = 0;
  for (const BoundValue& v :
       {khovanskii_bound(m, m, std::vector<std::uint64_t>(m, m)), fewnomial_bound(m, m),
        khovanskii_domain_bound(m, m, m, m, m), basu_bound(m, m, m, m), gv_bound(m, m, m, m),
        pclosed_pfaffian_bound(big, m), qf_pfaffian_bound(big, m), hausdorff_limit_bound_alg(m, m, m, m, m),
        relative_closure_bound(m, big, m), relative_closure_assembled(m, big, m)}) {
    const std::string s = v.decimal();
    o.require(v.value > 0 && mpz_class(s) == v.value, "value at 50 does not round-trip");
    digits = std::max(digits, s.size());
  }
  if (o.pass) o.detail = "spot values exact, 11 monotonicity sweeps, largest value at 50 has " +
                         std::to_string(digits) + " digits";
  return o;
}

// Criterion 7 -------------------------------------------------------------

Outcome determinism() {
  Outcome o;
  const Family fam = load_family("fixtures/circle.json");
  VerifyOptions opt;
  const std::string first = without_timings(verify_limit(fam, opt).report).dump();
  const std::string second = without_timings(verify_limit(fam, opt).report).dump();
  o.require(first == second, "reports differ");
  if (o.pass) o.detail = std::to_string(first.size()) + " identical bytes";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, Outcome (*)()>> criteria{
      {"limit inequalities", limit_inequalities},
      {"segment with two points regression", segment_points_regression},
      {"simplicial invariants", simplicial_invariants},
      {"homology oracle", homology_oracle},
      {"hausdorff exactness", hausdorff_exactness},
      {"bound calculators", bound_calculators},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
