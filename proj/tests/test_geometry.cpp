#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "hlimit/formula.hpp"
#include "hlimit/geometry.hpp"
#include "hlimit/rng.hpp"

using namespace hlimit;

namespace {

PointCloud random_cloud(Rng& rng, std::size_t dim, std::size_t count, double scale) {
  PointCloud c(dim);
  std::vector<double> p(dim);
  for (std::size_t i = 0; i < count; ++i) {
    for (auto& v : p) v = scale * (2.0 * rng.uniform() - 1.0);
    c.push_back(p);
  }
  return c;
}

// Exhaustive max-min, written independently of the library's loop.
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

}  // namespace

TEST_CASE("sample_fiber") {
  const std::vector<std::size_t> res401{401};
  SUBCASE("circle band") {
    const Formula f = parse_formula("x1^2 + x2^2 - 1 = 0");
    const Box box{{{-2, 2}, {-2, 2}}};
    const PointCloud c = sample_fiber(f, 0.0, box, res401, 0.02);
    REQUIRE(!c.empty());
    for (std::size_t i = 0; i < c.size(); ++i) CHECK(std::abs(c[i][0] * c[i][0] + c[i][1] * c[i][1] - 1.0) <= 0.02);
  }
  SUBCASE("unsatisfiable") {
    const Formula f = parse_formula("1 = 0");
    const Box box{{{-1, 1}}};
    CHECK(sample_fiber(f, 0.0, box, res401, 1e-9).empty());
  }
  SUBCASE("single grid point") {
    const Formula f = parse_formula("x1 >= 0 && x1 <= 0");
    const Box box{{{-1, 1}}};
    const std::vector<std::size_t> res{3};
    const PointCloud c = sample_fiber(f, 0.0, box, res, 0.0);
    REQUIRE(c.size() == 1);
    CHECK(c[0][0] == 0.0);
  }
}

TEST_CASE("hausdorff spot values") {
  const auto cloud = [](std::vector<std::vector<double>> pts) { return PointCloud::from_points(pts); };
  CHECK(hausdorff_distance(cloud({{0, 0}}), cloud({{0, 0}})) == 0.0);
  CHECK(hausdorff_distance(cloud({{0}}), cloud({{0}, {1}})) == 1.0);
  CHECK(hausdorff_distance(cloud({{0}, {2}}), cloud({{1}})) == 2.0);
}

TEST_CASE("hausdorff matches the pairwise oracle") {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t dim = 1 + rng.below(3);
    const PointCloud a = random_cloud(rng, dim, 1 + rng.below(200), 1.0);
    const PointCloud b = random_cloud(rng, dim, 1 + rng.below(200), 1.5);
    const double expected = oracle_directed(a, b) + oracle_directed(b, a);
    CHECK(hausdorff_distance(a, b) == doctest::Approx(expected).epsilon(1e-15));
  }
}

TEST_CASE("hausdorff is symmetric and satisfies the triangle inequality") {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t dim = 1 + rng.below(3);
    const PointCloud a = random_cloud(rng, dim, 1 + rng.below(60), 1.0);
    const PointCloud b = random_cloud(rng, dim, 1 + rng.below(60), 2.0);
    const PointCloud c = random_cloud(rng, dim, 1 + rng.below(60), 0.5);
    CHECK(hausdorff_distance(a, b) == hausdorff_distance(b, a));
    CHECK(hausdorff_distance(a, c) <= hausdorff_distance(a, b) + hausdorff_distance(b, c) + 1e-12);
    CHECK(hausdorff_distance(a, a) == 0.0);
  }
}

TEST_CASE("rho_p") {
  CHECK(rho_p({{0, 0}, {3, 4}}) == 25.0);
  CHECK(rho_p({{1, 2}, {1, 2}, {1, 2}}) == 0.0);
  CHECK(rho_p({{0, 0}, {1, 0}, {0, 1}}) == 4.0);
  const std::vector<double> flat{0, 0, 1, 0, 0, 1};
  CHECK(rho_p(flat, 2) == 4.0);
}

TEST_CASE("expanded_diagonal spot values") {
  const PointCloud one = PointCloud::from_points({{0.5, -1}});
  for (std::size_t p = 0; p <= 3; ++p) {
    const TupleCloud t = expanded_diagonal(one, p, 0.0, 100, 0);
    REQUIRE(t.size() == 1);
    for (std::size_t i = 0; i <= p; ++i) CHECK(t.block(0, i)[0] == 0.5);
  }
  const PointCloud two = PointCloud::from_points({{0}, {10}});
  const TupleCloud near = expanded_diagonal(two, 1, 1.0, 100, 0);
  REQUIRE(near.size() == 2);
  CHECK(near.tuples[0][0] == 0.0);
  CHECK(near.tuples[0][1] == 0.0);
  CHECK(near.tuples[1][0] == 10.0);
  CHECK(near.tuples[1][1] == 10.0);
  CHECK(expanded_diagonal(two, 1, 100.0, 100, 0).size() == 4);
}

TEST_CASE("expanded_diagonal matches brute-force enumeration") {
  Rng rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t dim = 1 + rng.below(2);
    const std::size_t p = rng.below(3);
    const PointCloud c = random_cloud(rng, dim, 1 + rng.below(9), 1.0);
    const double delta = 2.0 * rng.uniform();
    std::vector<std::vector<std::uint32_t>> expected;
    const std::size_t m = c.size();
    std::vector<std::uint32_t> idx(p + 1, 0);
    for (;;) {
      std::vector<std::vector<double>> pts;
      for (auto i : idx) pts.emplace_back(c[i].begin(), c[i].end());
      if (rho_p(pts) <= delta) expected.push_back(idx);
      std::size_t pos = p + 1;
      while (pos > 0 && ++idx[pos - 1] == m) idx[--pos] = 0;
      if (pos == 0) break;
    }
    const IndexTuples got = diagonal_index_tuples(c, p, delta, 1u << 20, 0);
    CHECK(got.tuples == expected);
    CHECK(got.total == expected.size());
    CHECK_FALSE(got.subsampled);
  }
}

TEST_CASE("expanded_diagonal grows with delta and subsamples deterministically") {
  Rng rng(5);
  const PointCloud c = random_cloud(rng, 2, 30, 1.0);
  std::uint64_t prev = 0;
  for (double delta : {0.0, 0.05, 0.2, 0.8, 3.0, 20.0}) {
    const IndexTuples t = diagonal_index_tuples(c, 2, delta, 1u << 20, 0);
    CHECK(t.total >= prev);
    prev = t.total;
  }
  const IndexTuples a = diagonal_index_tuples(c, 2, 1.0, 500, 9);
  const IndexTuples b = diagonal_index_tuples(c, 2, 1.0, 500, 9);
  CHECK(a.subsampled);
  CHECK(a.tuples.size() == 500);
  CHECK(a.tuples == b.tuples);
  CHECK(std::is_sorted(a.tuples.begin(), a.tuples.end()));
}

TEST_CASE("extent measures") {
  CHECK(bounding_radius(PointCloud::from_points({{3, 4}})) == 5.0);
  CHECK(bounding_radius(PointCloud::from_points({{0, 0}, {1, 0}})) == 1.0);
  const Formula f = parse_formula("x1^2 + x2^2 - 1 = 0");
  const Box box{{{-2, 2}, {-2, 2}}};
  const std::vector<std::size_t> res{401};
  const double r = bounding_radius(sample_fiber(f, 0.0, box, res, 0.02));
  CHECK(r >= 0.98);
  CHECK(r <= 1.02);
}

TEST_CASE("neighbor_edges agrees with the pairwise table") {
  Rng rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t dim = 1 + rng.below(5);
    const PointCloud c = random_cloud(rng, dim, 2 + rng.below(150), 1.0);
    const double radius = 0.05 + rng.uniform();
    std::size_t expected = 0;
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = i + 1; j < c.size(); ++j) expected += distance(c[i], c[j]) <= radius;
    const auto edges = neighbor_edges(c, radius);
    CHECK(edges.size() == expected);
    for (const Edge& e : edges) CHECK(e.length <= radius);
  }
}

TEST_CASE("csv round trip") {
  Rng rng(17);
  const PointCloud c = random_cloud(rng, 3, 25, 4.0);
  std::stringstream ss;
  write_csv(ss, c);
  CHECK(read_point_cloud_csv(ss) == c);
}
