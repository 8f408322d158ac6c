// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Usage: acceptance [--cache DIR] [--only N[,M...]]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "oracles.hpp"
#include "sparse_rom/errors.hpp"
#include "sparse_rom/fom.hpp"
#include "sparse_rom/harness.hpp"
#include "sparse_rom/interp.hpp"
#include "sparse_rom/points.hpp"

using namespace sparse_rom;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<double> random_point(std::size_t d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> y(d);
  for (double& v : y) v = u(rng);
  return y;
}

// Random smooth vector-valued map with 3 outputs.
oracle::FunctionMap random_smooth_map(std::size_t d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> a(d), b(d), c(d);
  for (std::size_t j = 0; j < d; ++j) {
    a[j] = u(rng);
    b[j] = 2.0 * u(rng);
    c[j] = u(rng);
  }
  const double phase = u(rng), s = 0.5 + 0.5 * (u(rng) + 1.0);
  return oracle::FunctionMap(d, 3, [=](std::span<const double> y) {
    double ay = 0.0, by = phase, r2 = 0.0;
    for (std::size_t j = 0; j < y.size(); ++j) {
      ay += a[j] * y[j];
      by += b[j] * y[j];
      r2 += (y[j] - c[j]) * (y[j] - c[j]);
    }
    Eigen::VectorXd v(3);
    v << std::exp(ay), std::sin(by), 1.0 / (1.0 + s * r2);
    return v;
  });
}

TensorGrid leja_grid(std::size_t d, std::size_t n) {
  static std::map<std::size_t, UnivariatePointRule> rules;
  auto it = rules.find(n);
  if (it == rules.end()) it = rules.emplace(n, make_point_rule(PointRuleKind::Leja, n)).first;
  return TensorGrid(d, it->second);
}

Outcome criterion1() {
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  int sets = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t d = 1 + static_cast<std::size_t>(trial) % 3;
    const std::size_t size = 1 + static_cast<std::size_t>(rng() % 40);
    const auto set = oracle::random_closed_set(d, size, rng);
    auto map = random_smooth_map(d, rng);
    const auto I = SparseInterpolant::build(DownwardClosedSet(set), leja_grid(d, 41), map);
    for (const auto& nu : set) {
      const auto z = tensor_point(nu, I.grid());
      worst = std::max(worst, oracle::rel_diff(I.evaluate(z), map.evaluate(z)));
    }
    ++sets;
  }
  return {worst <= 1e-12, std::to_string(sets) + " random sets, worst relative mismatch " + fmt("%.2e", worst) + " (limit 1e-12)"};
}

Outcome criterion2() {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> coef(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 45; ++trial) {
    const std::size_t d = 1 + static_cast<std::size_t>(trial) % 3;
    const auto set = oracle::random_closed_set(d, 1 + rng() % 40, rng, 6);
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
    double scale = 0.0;
    for (double v : c) scale += std::abs(v);
    oracle::FunctionMap map(d, 1, [&](std::span<const double> y) { return Eigen::VectorXd::Constant(1, poly(y)); });
    const auto I = SparseInterpolant::build(DownwardClosedSet(set), leja_grid(d, 7), map);
    for (int i = 0; i < 100; ++i) {
      const auto y = random_point(d, rng);
      worst = std::max(worst, std::abs(I.evaluate(y)[0] - poly(y)) / scale);
    }
  }
  return {worst <= 1e-10, "45 polynomials x 100 points, worst relative error " + fmt("%.2e", worst) + " (limit 1e-10)"};
}

Outcome criterion3() {
  std::mt19937_64 rng(31);
  double worst_order = 0.0, worst_enrich = 0.0;
  bool counts_ok = true;
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t d = 1 + static_cast<std::size_t>(trial) % 3;
    const auto set = oracle::random_closed_set(d, 40, rng);
    auto other = set;
    std::stable_sort(other.begin(), other.end(),
                     [](const MultiIndex& a, const MultiIndex& b) { return a.total_degree() < b.total_degree(); });
    auto map = random_smooth_map(d, rng);
    const auto grid = leja_grid(d, 41);
    const auto A = SparseInterpolant::build(DownwardClosedSet(set), grid, map);
    const auto B = SparseInterpolant::build(DownwardClosedSet(other), grid, map);
    const std::size_t split = set.size() / 2;
    const auto head = SparseInterpolant::build(DownwardClosedSet({set.begin(), set.begin() + static_cast<long>(split)}), grid, map);
    map.calls = 0;
    const auto E = head.enrich(std::vector<MultiIndex>(set.begin() + static_cast<long>(split), set.end()), map);
    counts_ok = counts_ok && map.calls == set.size() - split && E.snapshot_count() == set.size();
    for (std::size_t i = 0; i < split; ++i) counts_ok = counts_ok && E.coefficients()[i] == head.coefficients()[i];
    for (int i = 0; i < 100; ++i) {
      const auto y = random_point(d, rng);
      const auto a = A.evaluate(y);
      worst_order = std::max(worst_order, oracle::rel_diff(B.evaluate(y), a));
      worst_enrich = std::max(worst_enrich, oracle::rel_diff(E.evaluate(y), a));
    }
  }
  const bool pass = worst_order <= 1e-12 && worst_enrich <= 1e-12 && counts_ok;
  return {pass, "order mismatch " + fmt("%.2e", worst_order) + ", build-vs-enrich " + fmt("%.2e", worst_enrich) +
                    " (limit 1e-12), one evaluation per new index: " + (counts_ok ? "yes" : "no")};
}

Outcome criterion4() {
  const int res = kDefaultGridResolution;
  const std::size_t n = 20;
  bool ok = true;
  std::string why;
  const auto sym = symmetrized_leja(n, res);
  if (!(sym[0] == 0.0 && sym[1] == 1.0 && sym[2] == -1.0)) ok = false, why += " prefix";
  for (std::size_t N = 3; N <= n; N += 2)
    if (sym[N - 1] != -sym[N - 2]) ok = false, why += " mirror";

  // Brute-force scans of every maximization.
  const auto leja = leja_sequence(n, 0.0, res);
  if (leja != oracle::leja_brute(n, 0.0, res)) ok = false, why += " leja-scan";
  const double R = res - 1;
  for (std::size_t k = 3; k < n; k += 2) {  // even 1-based positions of the symmetrized rule
    const std::span<const double> chosen(sym.data(), k);
    double best = -INFINITY;
    for (int i = 0; i < res; ++i) best = std::max(best, oracle::leja_objective((2.0 * i - R) / R, chosen));
    if (oracle::leja_objective(sym[k], chosen) < best - 1e-13) ok = false, why += " sym-scan";
  }
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    std::vector<double> pts(30);
    for (double& p : pts) p = u(rng);
    const auto ord = leja_order(pts);
    if (!std::is_permutation(ord.begin(), ord.end(), pts.begin())) ok = false, why += " permutation";
  }
  const auto eq = make_point_rule(PointRuleKind::EquidistantLejaOrdered, 21);
  const auto base = equidistant(21);
  if (!std::is_permutation(eq.points.begin(), eq.points.end(), base.begin())) ok = false, why += " equidistant";
  return {ok, ok ? "prefix [0,1,-1], mirror, brute-force scans at resolution 100001 and permutations all hold"
                 : "violations:" + why};
}

Outcome criterion5() {
  const auto mesh = build_mesh(GeometrySpec::straight(), 48, 24);
  FlowConfig cfg;
  const Field exact = Field::interpolate(mesh, [](double, double y) { return Vec2{y * (3.0 - y), 0.0}; });
  const auto w = lumped_velocity_mass(*mesh);
  const auto cold = oseen_solve(*mesh, cfg, Field::zero(mesh));
  const double err = weighted_relative_difference(cold.field.velocity, exact.velocity, w);
  const auto warm = oseen_solve(*mesh, cfg, exact);
  const bool pass = err <= 1e-8 && warm.iterations <= 2;
  return {pass, "relative L2 error " + fmt("%.2e", err) + " (limit 1e-8), " + std::to_string(warm.iterations) +
                    " iteration(s) from the analytic field (limit 2)"};
}

Outcome criterion6() {
  const auto mesh = build_mesh(GeometrySpec::narrowing(1.0), 48, 24);
  FlowConfig cfg;
  cfg.nu_visc = 1.0;
  const auto r = oseen_solve(*mesh, cfg, Field::zero(mesh));
  const auto& t = r.trace;
  if (t.size() < 6) return {false, "only " + std::to_string(t.size()) + " iterations"};
  double lo = INFINITY, hi = 0.0;
  std::string ratios;
  for (std::size_t k = t.size() - 5; k < t.size(); ++k) {
    const double q = t[k] / t[k - 1];
    lo = std::min(lo, q);
    hi = std::max(hi, q);
    ratios += fmt(" %.4f", q);
  }
  return {hi / lo < 2.0, std::to_string(r.iterations) + " iterations, final ratios" + ratios + ", spread " +
                             fmt("%.3f", hi / lo) + " (limit 2)"};
}

double slope_log(const std::vector<ErrorRow>& rows, std::size_t n_max) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double m = 0;
  for (const auto& r : rows) {
    if (r.N > n_max) break;
    const double x = static_cast<double>(r.N), y = std::log10(r.mean_rel_l2);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    m += 1;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

Outcome criterion7(const std::filesystem::path& cache, bool& cold) {
  StudyConfig cfg;
  cfg.model = StudyModel::Narrowing;
  cfg.n_max = 25;
  cfg.cache_root = cache;
  cfg.output = cache / "model1_leja.csv";
  const auto r = run_study(cfg);
  cold = r.total_solves() > 0;
  const double e3 = r.rows[2].mean_rel_l2, e25 = r.rows[24].mean_rel_l2;
  const double drop = std::log10(e3 / e25);
  const double slope = slope_log(r.rows, 25);
  return {drop >= 3.0 && slope < 0.0, "mean error N=3 " + fmt("%.3e", e3) + ", N=25 " + fmt("%.3e", e25) + " (" +
                                          fmt("%.2f", drop) + " orders, need 3), log-linear slope " + fmt("%.3f", slope) +
                                          " per N, " + std::to_string(r.total_solves()) + " FOM solves"};
}

Outcome criterion8(const std::filesystem::path& cache, bool& cold) {
  StudyConfig cfg;
  cfg.model = StudyModel::Curved;
  cfg.n_max = 41;
  cfg.cache_root = cache;
  cfg.output = cache / "model2_leja.csv";
  const auto r = run_study(cfg);
  cold = r.total_solves() > 0;
  // First N from which the error stays below the threshold up to N = 41.
  auto settle = [&](auto member) {
    std::size_t n = 0;
    for (auto it = r.rows.rbegin(); it != r.rows.rend() && (*it).*member < 1e-2; ++it) n = it->N;
    return n;
  };
  const std::size_t n_max_ok = settle(&ErrorRow::max_rel_l2);
  const std::size_t n_mean_ok = settle(&ErrorRow::mean_rel_l2);
  const bool pass = n_max_ok != 0 && n_max_ok <= 25 && n_mean_ok != 0 && n_mean_ok <= 15;
  auto show = [](std::size_t n) { return n == 0 ? std::string("never") : "N=" + std::to_string(n); };
  return {pass, "max error stays < 1e-2 from " + show(n_max_ok) + " (need <= 25), mean from " + show(n_mean_ok) +
                    " (need <= 15); final mean " + fmt("%.2e", r.rows.back().mean_rel_l2) + ", max " +
                    fmt("%.2e", r.rows.back().max_rel_l2) + ", " + std::to_string(r.total_solves()) + " FOM solves"};
}

Outcome criterion9() {
  StudyConfig cfg;
  cfg.model = StudyModel::Analytic;
  cfg.analytic = AnalyticKind::Runge;
  cfg.n_max = 20;
  const std::vector<PointRuleKind> rules{PointRuleKind::EquidistantNatural, PointRuleKind::Leja};
  const auto r = compare_point_rules(cfg, rules);
  double eq_min = INFINITY;
  for (const auto& row : r[0].rows)
    if (row.N >= 15) eq_min = std::min(eq_min, row.mean_rel_l2);
  double leja_best = INFINITY;
  for (const auto& row : r[1].rows) leja_best = std::min(leja_best, row.mean_rel_l2);
  const bool pass = eq_min > 0.5 && leja_best < 1e-2;
  return {pass, "equidistant-natural smallest mean error for N in [15,20] " + fmt("%.3g", eq_min) +
                    " (need > 0.5); Leja best mean error up to N=20 " + fmt("%.3g", leja_best) + " (need < 1e-2)"};
}

Outcome criterion10(double& warm_seconds) {
  const auto dir = std::filesystem::temp_directory_path() / ("sparse_rom_acceptance_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  StudyConfig cfg;
  cfg.model = StudyModel::Narrowing;
  cfg.nx = 24;
  cfg.ny = 12;
  cfg.n_max = 8;
  cfg.test_grid = "midpoint:6";
  cfg.cache_root = dir / "cache";
  cfg.output = dir / "study.csv";
  const auto cold = run_study(cfg);
  std::ifstream a(cfg.output, std::ios::binary);
  const std::string first{std::istreambuf_iterator<char>(a), std::istreambuf_iterator<char>()};
  const auto t0 = std::chrono::steady_clock::now();
  const auto warm = run_study(cfg);
  warm_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ifstream b(cfg.output, std::ios::binary);
  const std::string second{std::istreambuf_iterator<char>(b), std::istreambuf_iterator<char>()};
  std::filesystem::remove_all(dir);
  const bool pass = cold.total_solves() == 8 + 6 && warm.total_solves() == 0 && first == second && !first.empty();
  return {pass, "cold run " + std::to_string(cold.total_solves()) + " FOM solves (expected 14), warm run " +
                    std::to_string(warm.total_solves()) + ", CSV identical: " + (first == second ? "yes" : "no")};
}

}  // namespace

int main(int argc, char** argv) {
  std::filesystem::path cache = std::filesystem::current_path() / "acceptance_cache";
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--cache") && i + 1 < argc) {
      cache = argv[++i];
    } else if (!std::strcmp(argv[i], "--only") && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      std::string tok;
      while (std::getline(ss, tok, ',')) only.insert(std::stoi(tok));
    } else {
      std::fprintf(stderr, "usage: %s [--cache DIR] [--only N[,M...]]\n", argv[0]);
      return 2;
    }
  }
  std::filesystem::create_directories(cache);

  int failures = 0;
  auto run = [&](int id, double limit_seconds, const std::function<Outcome(double&)>& body) {
    if (!only.empty() && !only.count(id)) return;
    double limit = limit_seconds;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = body(limit);
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= limit;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::printf("CRITERION %d: %s - %s; %.1f s (limit %.0f s)%s\n", id, pass ? "PASS" : "FAIL", o.detail.c_str(), secs,
                limit, in_time ? "" : " TOO SLOW");
    std::fflush(stdout);
  };

  run(1, 5, [](double&) { return criterion1(); });
  run(2, 5, [](double&) { return criterion2(); });
  run(3, 5, [](double&) { return criterion3(); });
  run(4, 10, [](double&) { return criterion4(); });
  run(5, 30, [](double&) { return criterion5(); });
  run(6, 120, [](double&) { return criterion6(); });
  run(7, 30 * 60, [&](double& limit) {
    bool cold = false;
    Outcome o = criterion7(cache, cold);
    o.detail += cold ? " (cold cache)" : " (warm cache)";
    (void)limit;
    return o;
  });
  run(8, 90 * 60, [&](double& limit) {
    bool cold = false;
    Outcome o = criterion8(cache, cold);
    if (!cold) limit = 5 * 60;
    o.detail += cold ? " (cold cache)" : " (warm cache)";
    return o;
  });
  run(9, 5, [](double&) { return criterion9(); });
  run(10, 60, [](double& limit) {
    double warm = 0.0;
    Outcome o = criterion10(warm);
    // The time limit applies to the warm rerun.
    o.detail += fmt(", warm rerun %.2f s", warm);
    if (warm > 60.0) o.pass = false;
    limit = INFINITY;
    return o;
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
