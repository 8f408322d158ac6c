#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "oracles.hpp"
#include "sparse_rom/errors.hpp"
#include "sparse_rom/interp.hpp"

using namespace sparse_rom;

namespace {

TensorGrid leja_grid(std::size_t d, std::size_t n, int res = 10001) {
  return TensorGrid(d, make_point_rule(PointRuleKind::Leja, n, {.grid_resolution = res}));
}

// Smooth vector-valued map with D = 3 outputs.
oracle::FunctionMap smooth_map(std::size_t d) {
  return oracle::FunctionMap(d, 3, [](std::span<const double> y) {
    double s = 0.0, q = 0.0;
    for (std::size_t j = 0; j < y.size(); ++j) {
      s += y[j] / static_cast<double>(j + 2);
      q += y[j] * y[j];
    }
    Eigen::VectorXd v(3);
    v << std::exp(s), std::cos(1.0 + s), 1.0 / (2.0 + q);
    return v;
  });
}

std::vector<double> random_point(std::size_t d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> y(d);
  for (double& v : y) v = u(rng);
  return y;
}

}  // namespace

TEST_CASE("hierarchical polynomial examples") {
  const auto rule = make_point_rule(PointRuleKind::Leja, 4, {.grid_resolution = 1001});
  CHECK(hierarchical_poly(0, 0.37, rule) == 1.0);
  CHECK(hierarchical_poly(2, rule[0], rule) == 0.0);
  for (std::size_t k = 0; k < 4; ++k) CHECK(hierarchical_poly(k, rule[k], rule) == doctest::Approx(1.0).epsilon(1e-15));
  UnivariatePointRule two;
  two.points = {0.0, 1.0};
  CHECK(hierarchical_poly(1, 0.5, two) == 0.5);
  CHECK_THROWS_AS(hierarchical_poly(4, 0.0, rule), OutOfRangeError);
}

TEST_CASE("tensor hierarchical examples") {
  const auto grid = leja_grid(2, 3, 1001);
  CHECK(tensor_hierarchical({0, 0}, std::vector<double>{0.3, -0.7}, grid) == 1.0);
  CHECK(tensor_hierarchical({1, 1}, tensor_point({1, 1}, grid), grid) == doctest::Approx(1.0));
  CHECK(tensor_hierarchical({1, 0}, std::vector<double>{grid[0][0], 0.4}, grid) == 0.0);
  CHECK_THROWS_AS(tensor_hierarchical({3, 0}, std::vector<double>{0.0, 0.0}, grid), OutOfRangeError);
}

TEST_CASE("collocation matrix is unit lower triangular") {
  std::mt19937_64 rng(21);
  for (std::size_t d = 1; d <= 3; ++d) {
    const auto set = oracle::random_closed_set(d, 25, rng);
    const auto grid = leja_grid(d, 26, 2001);
    for (std::size_t r = 0; r < set.size(); ++r) {
      const auto z = tensor_point(set[r], grid);
      for (std::size_t c = 0; c < set.size(); ++c) {
        const double h = tensor_hierarchical(set[c], z, grid);
        if (c == r) {
          CHECK(std::abs(h - 1.0) <= 1e-12);
        } else if (!set[c].dominated_by(set[r])) {
          CHECK(h == 0.0);
        }
        if (c > r) CHECK(h == 0.0);
      }
    }
  }
}

TEST_CASE("interpolation conditions on random downward-closed sets") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t d = 1 + static_cast<std::size_t>(trial) % 3;
    const auto set = oracle::random_closed_set(d, 40, rng);
    const auto grid = leja_grid(d, 41, 2001);
    auto map = smooth_map(d);
    const auto I = SparseInterpolant::build(DownwardClosedSet(set), grid, map);
    CHECK(map.calls == set.size());
    CHECK(I.snapshot_count() == set.size());
    for (const auto& nu : set) {
      const auto z = tensor_point(nu, grid);
      CHECK(oracle::rel_diff(I.evaluate(z), map.evaluate(z)) <= 1e-12);
    }
  }
}

TEST_CASE("univariate interpolant equals the Lagrange form") {
  const auto rule = make_point_rule(PointRuleKind::Leja, 15);
  oracle::FunctionMap runge(1, 1, [](std::span<const double> y) {
    return Eigen::VectorXd::Constant(1, 1.0 / (1.0 + 25.0 * y[0] * y[0]));
  });
  const auto I = SparseInterpolant::build(DownwardClosedSet(canonical_sequence(1, 15)), {rule}, runge);
  std::vector<double> f;
  for (double z : rule.points) f.push_back(1.0 / (1.0 + 25.0 * z * z));
  for (double y = -1.0; y <= 1.0; y += 0.01)
    CHECK(I.evaluate(std::vector<double>{y})[0] == doctest::Approx(oracle::lagrange(rule.points, f, y)).epsilon(1e-11));
}

TEST_CASE("quadratic reproduced exactly in 1d") {
  oracle::FunctionMap sq(1, 1, [](std::span<const double> y) { return Eigen::VectorXd::Constant(1, y[0] * y[0]); });
  const auto I = SparseInterpolant::build(DownwardClosedSet({{0}, {1}, {2}}), leja_grid(1, 3), sq);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) {
    const auto y = random_point(1, rng);
    CHECK(std::abs(I.evaluate(y)[0] - y[0] * y[0]) <= 1e-12);
  }
}

TEST_CASE("polynomial reproduction for exponent support inside the set") {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> coef(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t d = 1 + static_cast<std::size_t>(trial) % 3;
    const auto set = oracle::random_closed_set(d, 30, rng, 6);
    std::vector<double> c(set.size());
    for (double& v : c) v = coef(rng);
    auto poly = [&](std::span<const double> y) {
      double s = 0.0;
      for (std::size_t i = 0; i < set.size(); ++i) {
        double m = c[i];
        for (std::size_t j = 0; j < d; ++j) m *= std::pow(y[j], set[i][j]);
        s += m;
      }
      return s;
    };
    oracle::FunctionMap map(d, 1, [&](std::span<const double> y) { return Eigen::VectorXd::Constant(1, poly(y)); });
    const auto I = SparseInterpolant::build(DownwardClosedSet(set), leja_grid(d, 7), map);
    double scale = 0.0;
    for (double v : c) scale += std::abs(v);
    for (int i = 0; i < 100; ++i) {
      const auto y = random_point(d, rng);
      CHECK(std::abs(I.evaluate(y)[0] - poly(y)) <= 1e-10 * scale);
    }
  }
}

TEST_CASE("constant map and singleton set") {
  oracle::FunctionMap c(2, 2, [](std::span<const double>) { return Eigen::Vector2d(3.0, -1.5); });
  const auto I = SparseInterpolant::build(DownwardClosedSet({{0, 0}}), leja_grid(2, 1), c);
  CHECK(I.evaluate(std::vector<double>{0.7, -0.2}) == Eigen::Vector2d(3.0, -1.5));
  const auto J = SparseInterpolant::build(DownwardClosedSet(canonical_sequence(2, 10)), leja_grid(2, 4), c);
  CHECK(oracle::rel_diff(J.evaluate(std::vector<double>{-0.4, 0.9}), Eigen::Vector2d(3.0, -1.5)) <= 1e-14);
}

TEST_CASE("order independence across linear extensions") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = 1 + static_cast<std::size_t>(trial) % 3;
    const auto set = oracle::random_closed_set(d, 35, rng);
    auto graded = set;
    std::stable_sort(graded.begin(), graded.end(),
                     [](const MultiIndex& a, const MultiIndex& b) { return a.total_degree() < b.total_degree(); });
    auto lex = set;
    std::sort(lex.begin(), lex.end());  // lexicographic order is a linear extension too
    const auto grid = leja_grid(d, 36, 2001);
    auto map = smooth_map(d);
    const auto A = SparseInterpolant::build(DownwardClosedSet(set), grid, map);
    const auto B = SparseInterpolant::build(DownwardClosedSet(graded), grid, map);
    const auto C = SparseInterpolant::build(DownwardClosedSet(lex), grid, map);
    for (int i = 0; i < 100; ++i) {
      const auto y = random_point(d, rng);
      const auto a = A.evaluate(y);
      CHECK(oracle::rel_diff(B.evaluate(y), a) <= 1e-12);
      CHECK(oracle::rel_diff(C.evaluate(y), a) <= 1e-12);
    }
  }
}

TEST_CASE("enrichment reuses coefficients and equals a fresh build") {
  const auto seq = canonical_sequence(2, 15);
  const auto grid = leja_grid(2, 6);
  auto map = smooth_map(2);
  const auto small = SparseInterpolant::build(DownwardClosedSet({seq.begin(), seq.begin() + 6}), grid, map);
  const auto before = small.coefficients();
  map.calls = 0;
  const std::vector<MultiIndex> extra(seq.begin() + 6, seq.end());
  const auto big = small.enrich(extra, map);
  CHECK(map.calls == extra.size());
  CHECK(big.snapshot_count() == small.snapshot_count() + extra.size());
  for (std::size_t i = 0; i < before.size(); ++i) CHECK(big.coefficients()[i] == before[i]);
  CHECK(small.coefficients() == before);

  const auto fresh = SparseInterpolant::build(DownwardClosedSet(seq), grid, map);
  REQUIRE(fresh.coefficients().size() == big.coefficients().size());
  for (std::size_t i = 0; i < seq.size(); ++i)
    CHECK(oracle::rel_diff(big.coefficients()[i], fresh.coefficients()[i]) <= 1e-14);

  map.calls = 0;
  const auto same = small.enrich({}, map);
  CHECK(map.calls == 0);
  CHECK(same.coefficients() == small.coefficients());
  CHECK(same.index_set().indices() == small.index_set().indices());
}

TEST_CASE("enrichment rejects invalid unions before evaluating") {
  auto map = smooth_map(2);
  const auto grid = leja_grid(2, 6);
  const auto I = SparseInterpolant::build(DownwardClosedSet({{0, 0}, {1, 0}}), grid, map);
  map.calls = 0;
  CHECK_THROWS_AS(I.enrich(std::vector<MultiIndex>{{0, 1}, {2, 2}}, map), InvalidSetError);
  CHECK_THROWS_AS(I.enrich(std::vector<MultiIndex>{{1, 0}}, map), InvalidSetError);
  CHECK_THROWS_AS(I.enrich(std::vector<MultiIndex>{{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}, {0, 6}}, map), OutOfRangeError);
  CHECK(map.calls == 0);
  // Unordered but valid unions are accepted.
  const auto J = I.enrich(std::vector<MultiIndex>{{1, 1}, {0, 1}}, map);
  CHECK(J.index_set().size() == 4);
}

TEST_CASE("dimension errors") {
  auto map = smooth_map(2);
  CHECK_THROWS_AS(SparseInterpolant::build(DownwardClosedSet(std::vector<MultiIndex>{MultiIndex{0}}), leja_grid(1, 2), map), DimensionError);
  CHECK_THROWS_AS(SparseInterpolant::build(DownwardClosedSet({{0, 0}, {1, 0}}), leja_grid(2, 1), map), OutOfRangeError);
  const auto I = SparseInterpolant::build(DownwardClosedSet({{0, 0}}), leja_grid(2, 2), map);
  CHECK_THROWS_AS(I.evaluate(std::vector<double>{0.0}), DimensionError);
}

TEST_CASE("save and load round trip") {
  auto map = smooth_map(3);
  const auto I = SparseInterpolant::build(DownwardClosedSet(canonical_sequence(3, 12)),
                                          {make_point_rule(PointRuleKind::Leja, 4),
                                           make_point_rule(PointRuleKind::SymmetrizedLeja, 4),
                                           make_point_rule(PointRuleKind::EquidistantLejaOrdered, 4, {.master_size = 7})},
                                          map);
  const auto dir = std::filesystem::temp_directory_path() / "sparse_rom_interp_roundtrip";
  std::filesystem::remove_all(dir);
  I.save(dir);
  CHECK(std::filesystem::exists(dir / "coef_1_0_1.bin") == I.index_set().contains({1, 0, 1}));
  const auto J = SparseInterpolant::load(dir);
  CHECK(J.index_set().indices() == I.index_set().indices());
  CHECK(J.coefficients() == I.coefficients());
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(J.grid()[j].points == I.grid()[j].points);
    CHECK(J.grid()[j].kind == I.grid()[j].kind);
  }
  const std::vector<double> y{0.1, -0.2, 0.3};
  CHECK(J.evaluate(y) == I.evaluate(y));
  std::filesystem::remove_all(dir);
}

TEST_CASE("Runge function: Leja converges, natural equidistant does not") {
  auto runge = [](double y) { return 1.0 / (1.0 + 25.0 * y * y); };
  oracle::FunctionMap map(1, 1, [&](std::span<const double> y) { return Eigen::VectorXd::Constant(1, runge(y[0])); });
  std::mt19937_64 rng(99);
  std::vector<double> test(1000);
  for (double& t : test) t = random_point(1, rng)[0];
  auto mean_error = [&](PointRuleKind kind, std::size_t n) {
    const auto I = SparseInterpolant::build(DownwardClosedSet(canonical_sequence(1, n)), {make_point_rule(kind, n)}, map);
    double s = 0.0;
    for (double t : test) s += std::abs(I.evaluate(std::vector<double>{t})[0] - runge(t)) / runge(t);
    return s / static_cast<double>(test.size());
  };
  double prev = INFINITY;
  for (std::size_t n : {5, 10, 20, 30, 40}) {
    const double e = mean_error(PointRuleKind::Leja, n);
    CHECK(e < prev);
    prev = e;
  }
  prev = mean_error(PointRuleKind::EquidistantNatural, 11);
  for (std::size_t n : {15, 19, 23}) {
    const double e = mean_error(PointRuleKind::EquidistantNatural, n);
    CHECK(e > prev);
    prev = e;
  }
}
