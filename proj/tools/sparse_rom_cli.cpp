#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "sparse_rom/errors.hpp"
#include "sparse_rom/fom.hpp"
#include "sparse_rom/harness.hpp"
#include "sparse_rom/points.hpp"
#include "sparse_rom/providers.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

using namespace sparse_rom;

void print_rows(const StudyResult& r) {
  std::printf("# rule %s: %zu snapshot solves, %zu reference solves\n", std::string(to_string(r.rule)).c_str(),
              r.snapshot_solves, r.reference_solves);
  write_error_csv_header(std::cout);
  for (const auto& row : r.rows) write_error_csv_row(std::cout, row);
}

int run_points(const std::string& rule, std::size_t n, const PointRuleOptions& opt) {
  const auto r = make_point_rule(parse_point_rule_kind(rule), n, opt);
  for (double z : r.points) std::printf("%.17g\n", z);
  return 0;
}

int run_fom(const std::string& model_name, const std::vector<double>& params, int nx, int ny, double nu, double tol,
            const std::string& out, const std::string& mesh_out) {
  const GeometryModel model = parse_geometry_model(model_name);
  FomProblem p;
  if (model == GeometryModel::NarrowingWidth) {
    p = FomProblem::narrowing();
    if (params.size() != 1) throw ConfigError("narrowing expects --param <mu>");
    if (nu > 0.0) p.flow.nu_visc = nu;
  } else if (model == GeometryModel::CurvedWalls) {
    p = FomProblem::curved();
    if (params.size() != 2) throw ConfigError("curved expects --param <nu_visc>,<curvature>");
    if (nu > 0.0) throw ConfigError("--nu is the first --param value for the curved model");
  } else {
    throw ConfigError("fom supports the narrowing and curved models");
  }
  if (nx > 0) p.nx = nx;
  if (ny > 0) p.ny = ny;
  if (tol > 0.0) p.flow.oseen_tol = tol;

  const FomSnapshotMap map(p);
  const auto y = p.parameters.to_reference(params);
  const OseenResult r = map.solve(y);
  const auto [spec, cfg] = p.instantiate(params);

  std::printf("iterations %d\nfinal_difference %.3e\nreynolds %.6g\ndivergence_residual %.3e\nvelocity_dofs %zu\n",
              r.iterations, r.trace.empty() ? 0.0 : r.trace.back(),
              reynolds(cfg.characteristic_velocity, cfg.characteristic_length, cfg.nu_visc),
              divergence_residual(*r.field.mesh, r.field.velocity), r.field.mesh->velocity_dofs());
  if (!out.empty()) {
    std::ofstream os(out);
    if (!os) throw ConfigError("cannot write " + out);
    write_field_csv(os, r.field);
  }
  if (!mesh_out.empty()) {
    std::ofstream nodes(mesh_out + "_nodes.csv");
    std::ofstream cells(mesh_out + "_cells.csv");
    if (!nodes || !cells) throw ConfigError("cannot write mesh files with prefix " + mesh_out);
    r.field.mesh->write_nodes_csv(nodes);
    r.field.mesh->write_cells_csv(cells);
  }
  return 0;
}

int run_study_cmd(const std::string& config, const std::string& out) {
  StudyConfig cfg = load_study_config(config);
  if (!out.empty()) cfg.output = out;
  print_rows(run_study(cfg));
  return 0;
}

int run_compare_cmd(const std::string& config, const std::string& out) {
  StudyConfig cfg = load_study_config(config);
  if (!out.empty()) cfg.output = out;
  for (const auto& r : compare_point_rules(cfg, cfg.compare_rules)) {
    print_rows(r);
    if (!r.csv.empty()) std::printf("# wrote %s\n", r.csv.string().c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse polynomial interpolation of parametrized channel flows"};
  app.require_subcommand(1);

  std::string rule = "leja";
  std::size_t n = 10;
  PointRuleOptions opt;
  auto* points = app.add_subcommand("points", "Print the first n nodes of a point rule");
  points->add_option("--rule", rule, "leja, symmetrized_leja, equidistant_leja, equidistant_natural");
  points->add_option("--n", n, "Number of points")->check(CLI::PositiveNumber);
  points->add_option("--resolution", opt.grid_resolution, "Candidate grid size for Leja maximization");
  points->add_option("--x1", opt.x1, "First Leja point");
  points->add_option("--master", opt.master_size, "Equidistant master set size (0: same as n)");

  std::string model = "narrowing";
  std::vector<double> params;
  int nx = 0, ny = 0;
  double nu = 0.0, tol = 0.0;
  std::string field_out, mesh_out;
  auto* fom = app.add_subcommand("fom", "Solve one parameter point");
  fom->add_option("--model", model, "narrowing or curved");
  fom->add_option("--param", params, "Physical parameters: mu, or nu_visc,curvature")->delimiter(',')->required();
  fom->add_option("--nx", nx, "Cells along the channel");
  fom->add_option("--ny", ny, "Cells across the channel");
  fom->add_option("--nu", nu, "Viscosity for the narrowing model");
  fom->add_option("--tol", tol, "Oseen stopping tolerance");
  fom->add_option("--out", field_out, "Field CSV (x,y,u_x,u_y,p)");
  fom->add_option("--mesh-out", mesh_out, "Prefix for <prefix>_nodes.csv and <prefix>_cells.csv");

  std::string config, out;
  auto* study = app.add_subcommand("study", "Run a convergence study");
  study->add_option("--config", config, "Study configuration file")->required();
  study->add_option("--out", out, "CSV output (overrides the config)");
  auto* compare = app.add_subcommand("compare", "Run one study per point rule");
  compare->add_option("--config", config, "Study configuration file")->required();
  compare->add_option("--out", out, "CSV stem; writes <stem>_<rule>.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (points->parsed()) return run_points(rule, n, opt);
    if (fom->parsed()) return run_fom(model, params, nx, ny, nu, tol, field_out, mesh_out);
    if (study->parsed()) return run_study_cmd(config, out);
    if (compare->parsed()) return run_compare_cmd(config, out);
  } catch (const SolverError& e) {
    std::fprintf(stderr, "solver failure: %s (residual %.3e)\n", e.what(), e.residual());
    return kExitSolver;
  } catch (const DivergenceError& e) {
    std::fprintf(stderr, "solver failure: %s after %zu iterations\n", e.what(), e.trace().size());
    return kExitSolver;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
