#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hlimit/bounds.hpp"
#include "hlimit/homology.hpp"
#include "hlimit/invariants.hpp"
#include "hlimit/verify.hpp"

namespace {

using nlohmann::json;
using namespace hlimit;

struct Globals {
  std::uint64_t seed = 0;
  std::optional<double> tol;
  std::string out;
  std::string format = "json";
};

// Writes to --out when given, else stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw InputError("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

void emit_json(const Globals& g, const json& j) {
  Output out(g.out);
  out.stream() << j.dump(2) << '\n';
}

json betti_json(const BettiVector& b) { return json(b.ranks); }

std::pair<std::size_t, double> parse_delta(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw InputError("--delta expects p=value, got " + text);
  try {
    return {std::stoul(text.substr(0, eq)), std::stod(text.substr(eq + 1))};
  } catch (const std::exception&) {
    throw InputError("--delta expects p=value, got " + text);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Betti numbers of Hausdorff limits: sampling, expanded diagonals, Rips homology and bounds"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Seed for every random choice")->capture_default_str();
  app.add_option("--tol", g.tol, "Tolerance for sampling sign conditions (default: twice the grid spacing)");
  app.add_option("--out", g.out, "Write the result to this file instead of stdout");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

  // verify-limit
  auto* verify = app.add_subcommand("verify-limit", "Check b_k(L) <= sum_{p+q=k} b_q(D^p(delta)) on a family");
  std::string family_path;
  VerifyOptions vopt;
  std::vector<std::string> deltas;
  bool no_subsample = false;
  verify->add_option("family", family_path, "Family JSON file")->required();
  verify->add_option("--lambda-limit", vopt.lambda_limit, "Parameter of the limit proxy (default lambda_fiber/50)");
  verify->add_option("--lambda-fiber", vopt.lambda_fiber, "Parameter of the fiber A (default: top of lambda_range)");
  verify->add_option("--k-max", vopt.k_max, "Largest degree k")->capture_default_str();
  verify->add_option("--resolution", vopt.resolution, "Grid points per axis (default: family's, else 64)");
  verify->add_option("--delta", deltas, "Fixed delta for one p, as p=value (repeatable); others use plateaus");
  verify->add_option("--radius", vopt.radius, "Fixed Rips radius instead of the plateau choice");
  verify->add_option("--cap", vopt.cap, "Maximum tuples per expanded diagonal")->capture_default_str();
  verify->add_flag("--no-subsample", no_subsample, "Fail instead of subsampling above the cap");
  verify->add_option("--min-width", vopt.min_width_fraction, "Plateau width threshold, fraction of the grid span")
      ->capture_default_str();
  verify->add_option("--grid-steps", vopt.grid_steps, "Scale grid size")->capture_default_str();

  // hausdorff
  auto* hausdorff = app.add_subcommand("hausdorff", "Hausdorff distance (sum of directed terms) of two CSV clouds");
  std::string cloud_a, cloud_b;
  hausdorff->add_option("a", cloud_a, "First cloud")->required();
  hausdorff->add_option("b", cloud_b, "Second cloud")->required();

  // betti
  auto* betti = app.add_subcommand("betti", "Rips Betti numbers of a CSV cloud");
  std::string betti_cloud, betti_radius = "auto", curve_path;
  std::size_t betti_k = 1;
  double betti_width = 0.2;
  betti->add_option("cloud", betti_cloud, "Point cloud CSV")->required();
  betti->add_option("--radius", betti_radius, "Rips radius, or auto for the plateau choice")->capture_default_str();
  betti->add_option("--k-max", betti_k, "Largest degree")->capture_default_str();
  betti->add_option("--curve", curve_path, "Also write the Betti curve CSV here");
  betti->add_option("--min-width", betti_width, "Plateau width threshold")->capture_default_str();

  // diagonal
  auto* diag = app.add_subcommand("diagonal", "Expanded p-th diagonal of a CSV cloud");
  std::string diag_cloud;
  std::size_t diag_p = 1, diag_cap = 20000;
  double diag_delta = 0.0;
  diag->add_option("cloud", diag_cloud, "Point cloud CSV")->required();
  diag->add_option("--p", diag_p, "Tuple size minus one")->capture_default_str();
  diag->add_option("--delta", diag_delta, "Threshold on rho_p")->required();
  diag->add_option("--cap", diag_cap, "Maximum tuples kept")->capture_default_str();

  // retract-demo
  auto* demo = app.add_subcommand("retract-demo", "Run the retraction invariant suite on a complex");
  std::string complex_path;
  InvariantOptions iopt;
  bool strict = false;
  demo->add_option("complex", complex_path, "Complex JSON file")->required();
  demo->add_option("--lambdas", iopt.lambdas, "Parameter values in (0, lambda_0)");
  demo->add_option("--p", iopt.p_values, "Values of p for the rho_p inclusions");
  demo->add_option("--epsilons", iopt.epsilons, "Thresholds for the rho_p inclusions");
  demo->add_option("--samples", iopt.samples_per_simplex, "Samples per simplex")->capture_default_str();
  demo->add_flag("--strict-complex", strict, "Also check that simplices meet in common faces");

  // bounds
  auto* bounds = app.add_subcommand("bounds", "Evaluate a Betti number bound exactly");
  std::string bound_name;
  std::uint64_t k = 1, n = 1, d = 1, s = 1, ell = 0, alpha = 0, beta = 1, c = 1, p = 0;
  std::vector<std::uint64_t> betas;
  bool p_closed = false;
  bounds
      ->add_option("formula", bound_name, "Bound to evaluate")
      ->required()
      ->check(CLI::IsMember({"khovanskii", "fewnomial", "khovanskii-domain", "basu", "gv", "pclosed-pfaffian",
                             "qf-pfaffian", "hausdorff-limit-alg", "relative-closure", "diagonal-format-alg",
                             "diagonal-format-pfaff"}));
  bounds->add_option("--k", k)->capture_default_str();
  bounds->add_option("--n", n)->capture_default_str();
  bounds->add_option("--d", d)->capture_default_str();
  bounds->add_option("--s", s)->capture_default_str();
  bounds->add_option("--ell", ell)->capture_default_str();
  bounds->add_option("--alpha", alpha)->capture_default_str();
  bounds->add_option("--beta", beta)->capture_default_str();
  bounds->add_option("--betas", betas, "Degrees for the khovanskii bound");
  bounds->add_option("--p", p, "Diagonal index for the format rules")->capture_default_str();
  bounds->add_option("--c", c, "Constant substituted for every O(.)")->capture_default_str();
  bounds->add_flag("--p-closed", p_closed, "Use the P-closed improvement where available");

  // sample
  auto* sample = app.add_subcommand("sample", "Grid sample of one fiber of a family, as CSV");
  std::string sample_family;
  double sample_lambda = 0.0;
  std::optional<std::size_t> sample_res;
  sample->add_option("family", sample_family, "Family JSON file")->required();
  sample->add_option("--lambda", sample_lambda, "Parameter value")->required();
  sample->add_option("--resolution", sample_res, "Grid points per axis (default: family's, else 64)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*verify) {
      vopt.seed = g.seed;
      vopt.tol = g.tol;
      vopt.allow_subsample = !no_subsample;
      for (const auto& text : deltas) {
        const auto [pp, value] = parse_delta(text);
        vopt.delta[pp] = value;
      }
      const Family family = load_family(family_path);
      const VerifyOutcome outcome = verify_limit(family, vopt);
      if (g.format == "csv") {
        Output out(g.out);
        out.stream() << "k,lhs,rhs,holds\n";
        for (const auto& row : outcome.report["inequalities"])
          out.stream() << row["k"] << ',' << row["lhs"] << ',' << row["rhs"] << ',' << row["holds"] << '\n';
      } else {
        emit_json(g, outcome.report);
      }
      return outcome.exit_code;
    }
    if (*hausdorff) {
      const PointCloud a = read_point_cloud_csv(cloud_a);
      const PointCloud b = read_point_cloud_csv(cloud_b);
      const double value = hausdorff_distance(a, b);
      if (g.format == "csv") {
        Output out(g.out);
        out.stream() << std::setprecision(17) << value << '\n';
      } else {
        emit_json(g, {{"hausdorff", value},
                      {"directed_ab", directed_hausdorff(a, b)},
                      {"directed_ba", directed_hausdorff(b, a)}});
      }
      return 0;
    }
    if (*betti) {
      const PointCloud cloud = read_point_cloud_csv(betti_cloud);
      json result;
      result["points"] = cloud.size();
      std::optional<BettiCurve> curve;
      if (betti_radius == "auto" || !curve_path.empty()) curve = betti_curve(cloud, default_scale_grid(cloud), betti_k);
      if (betti_radius == "auto") {
        const Plateau pl = stable_plateau(*curve, betti_width, PlateauMetric::Log);
        const double r = std::sqrt(pl.lo * pl.hi);
        result["radius"] = r;
        result["plateau"] = {{"lo", pl.lo}, {"hi", pl.hi}};
        result["betti"] = betti_json(pl.betti);
      } else {
        double r = 0.0;
        try {
          r = std::stod(betti_radius);
        } catch (const std::exception&) {
          throw InputError("--radius expects a number or auto");
        }
        result["radius"] = r;
        result["betti"] = betti_json(betti_numbers(cloud, r, betti_k));
      }
      if (!curve_path.empty()) {
        std::ofstream os(curve_path);
        if (!os) throw InputError("cannot write " + curve_path);
        write_curve_csv(os, *curve);
      }
      if (g.format == "csv") {
        Output out(g.out);
        write_curve_csv(out.stream(), curve ? *curve : BettiCurve{});
      } else {
        emit_json(g, result);
      }
      return 0;
    }
    if (*diag) {
      const PointCloud cloud = read_point_cloud_csv(diag_cloud);
      const TupleCloud tuples = expanded_diagonal(cloud, diag_p, diag_delta, diag_cap, g.seed);
      Output out(g.out);
      if (g.format == "json") {
        std::cerr << "tuples=" << tuples.size() << " total=" << tuples.total
                  << " subsampled=" << (tuples.subsampled ? "true" : "false") << '\n';
      }
      write_csv(out.stream(), tuples);
      return 0;
    }
    if (*demo) {
      const LambdaComplex complex = LambdaComplex::load(complex_path, strict);
      iopt.seed = g.seed;
      const auto results = run_invariant_suite(complex, iopt);
      json rows = json::array();
      bool ok = true;
      for (const auto& r : results) {
        rows.push_back(
            {{"invariant", r.name}, {"passed", r.passed}, {"worst_residual", r.worst_residual}, {"checks", r.checks}});
        ok = ok && r.passed;
      }
      if (g.format == "csv") {
        Output out(g.out);
        out.stream() << "invariant,passed,worst_residual,checks\n";
        for (const auto& r : results)
          out.stream() << '"' << r.name << "\"," << (r.passed ? "true" : "false") << ',' << r.worst_residual << ','
                       << r.checks << '\n';
      } else {
        emit_json(g, {{"lambda_0", lambda_min(complex)}, {"invariants", rows}, {"passed", ok}});
      }
      return ok ? 0 : 1;
    }
    if (*bounds) {
      json result;
      result["formula"] = bound_name;
      const PfaffFormat pf{n, ell, alpha, beta, s};
      if (bound_name == "diagonal-format-alg") {
        const AlgFormat f = diagonal_format_alg(AlgFormat{n, d, s}, p);
        result["inputs"] = {{"n", n}, {"d", d}, {"s", s}, {"p", p}};
        result["format"] = {{"n", f.n}, {"d", f.d}, {"s", f.s}};
        emit_json(g, result);
        return 0;
      }
      if (bound_name == "diagonal-format-pfaff") {
        const PfaffFormat f = diagonal_format_pfaff(pf, p);
        result["inputs"] = {{"n", n}, {"ell", ell}, {"alpha", alpha}, {"beta", beta}, {"s", s}, {"p", p}};
        result["format"] = {{"n", f.n}, {"ell", f.ell}, {"alpha", f.alpha}, {"beta", f.beta}, {"s", f.s}};
        emit_json(g, result);
        return 0;
      }
      BoundValue v;
      if (bound_name == "khovanskii") {
        if (betas.empty()) throw InputError("khovanskii needs --betas");
        v = khovanskii_bound(ell, alpha, betas);
        result["inputs"] = {{"ell", ell}, {"alpha", alpha}, {"betas", betas}};
      } else if (bound_name == "fewnomial") {
        v = fewnomial_bound(n, ell);
        result["inputs"] = {{"n", n}, {"ell", ell}};
      } else if (bound_name == "khovanskii-domain") {
        v = khovanskii_domain_bound(n, ell, alpha, beta, c);
        result["inputs"] = {{"n", n}, {"ell", ell}, {"alpha", alpha}, {"beta", beta}};
      } else if (bound_name == "basu" || bound_name == "gv") {
        v = bound_name == "basu" ? basu_bound(n, d, s, c) : gv_bound(n, d, s, c);
        result["inputs"] = {{"n", n}, {"d", d}, {"s", s}};
      } else if (bound_name == "pclosed-pfaffian" || bound_name == "qf-pfaffian") {
        v = bound_name == "qf-pfaffian" ? qf_pfaffian_bound(pf, c) : pclosed_pfaffian_bound(pf, c);
        result["inputs"] = {{"n", n}, {"ell", ell}, {"alpha", alpha}, {"beta", beta}, {"s", s}};
      } else if (bound_name == "hausdorff-limit-alg") {
        v = hausdorff_limit_bound_alg(k, n, d, s, c, p_closed);
        result["inputs"] = {{"k", k}, {"n", n}, {"d", d}, {"s", s}, {"p_closed", p_closed}};
      } else {
        v = relative_closure_bound(k, pf, c, p_closed);
        result["inputs"] = {{"k", k},         {"n", n}, {"ell", ell}, {"alpha", alpha},
                            {"beta", beta},   {"s", s}, {"p_closed", p_closed}};
      }
      result["constant_assumed"] = v.constant_assumed;
      result["note"] = "up to the unspecified constant: every O(x) evaluated as c*x";
      result["flags"] = v.flags;
      result["value"] = v.decimal();
      emit_json(g, result);
      return 0;
    }
    if (*sample) {
      const Family family = load_family(sample_family);
      const std::vector<std::size_t> res{sample_res.value_or(family.resolution.value_or(64))};
      const double tol = g.tol.value_or(2.0 * grid_spacing(family.box, res));
      PointCloud cloud = sample_fiber(family.formula, sample_lambda, family.box, res, tol);
      Output out(g.out);
      write_csv(out.stream(), cloud);
      return 0;
    }
  } catch (const NoPlateau& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
