#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>
#include <ostream>
#include <sstream>

#include "fe_q2.hpp"
#include "sparse_rom/errors.hpp"
#include "sparse_rom/fom.hpp"

namespace sparse_rom {

namespace {

using SpMat = Eigen::SparseMatrix<double>;

constexpr double kLinearResidualLimit = 1e-9;

struct QuadData {
  double jxw = 0.0;
  Vec2 x{};
  std::array<std::array<double, 2>, 9> grad{};
};

using CellQuad = std::array<QuadData, fe::kQuadPoints>;

std::vector<CellQuad> cell_geometry(const Mesh& mesh) {
  const auto& ref = fe::reference();
  std::vector<CellQuad> out(mesh.cell_count());
  for (std::size_t c = 0; c < mesh.cell_count(); ++c) {
    const auto ids = mesh.cell_nodes(c);
    for (std::size_t q = 0; q < fe::kQuadPoints; ++q) {
      double j00 = 0, j01 = 0, j10 = 0, j11 = 0, px = 0, py = 0;
      for (std::size_t a = 0; a < 9; ++a) {
        const Vec2& p = mesh.nodes()[static_cast<std::size_t>(ids[a])];
        const auto& g = ref.q2_grad[q][a];
        j00 += p.x * g[0];
        j01 += p.x * g[1];
        j10 += p.y * g[0];
        j11 += p.y * g[1];
        px += p.x * ref.q2[q][a];
        py += p.y * ref.q2[q][a];
      }
      const double det = j00 * j11 - j01 * j10;
      auto& d = out[c][q];
      d.jxw = det * ref.weight[q];
      d.x = {px, py};
      // grad_phys = J^{-T} grad_ref
      for (std::size_t a = 0; a < 9; ++a) {
        const auto& g = ref.q2_grad[q][a];
        d.grad[a][0] = (j11 * g[0] - j10 * g[1]) / det;
        d.grad[a][1] = (-j01 * g[0] + j00 * g[1]) / det;
      }
    }
  }
  return out;
}

double default_inflow(double y, double H) { return y * (H - y); }

// Linear Oseen system on a fixed mesh; reuses geometry and the symbolic
// factorization across steps.
class OseenSystem {
 public:
  OseenSystem(const Mesh& mesh, const FlowConfig& cfg)
      : mesh_(mesh), cfg_(cfg), geom_(cell_geometry(mesh)) {
    const std::size_t nn = mesh.node_count();
    nv_ = 2 * nn;
    np_ = mesh.pressure_dofs();
    dirichlet_.assign(nv_, false);
    dirichlet_values_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nv_));
    const int lw = mesh.lattice_width();
    const int lh = mesh.lattice_height();
    const double H = mesh.spec().channel_height;
    auto inflow = [&](double y) { return cfg.inflow ? cfg.inflow(y) : default_inflow(y, H); };
    for (int j = 0; j < lh; ++j) {
      for (int i = 0; i < lw; ++i) {
        const auto n = static_cast<std::size_t>(mesh.node_id(i, j));
        const bool wall = j == 0 || j == lh - 1;
        const bool inlet = i == 0;
        const bool outlet = i == lw - 1 && !cfg.stress_free_outlet;
        if (!(wall || inlet || outlet)) continue;
        dirichlet_[n] = dirichlet_[nn + n] = true;
        if (!wall) dirichlet_values_[static_cast<Eigen::Index>(n)] = inflow(mesh.nodes()[n].y);
      }
    }
    pin_pressure_ = !cfg.stress_free_outlet;
  }

  std::size_t velocity_dofs() const { return nv_; }

  const Eigen::VectorXd& dirichlet_values() const { return dirichlet_values_; }
  const std::vector<bool>& dirichlet_mask() const { return dirichlet_; }

  Field step(const Field& u_k, Vec2 extra_force) {
    if (static_cast<std::size_t>(u_k.velocity.size()) != nv_)
      throw DimensionError("advecting field has " + std::to_string(u_k.velocity.size()) + " velocity dofs, mesh has " +
                           std::to_string(nv_));
    assemble(u_k.velocity, extra_force);
    if (!analyzed_) {
      solver_.analyzePattern(matrix_);
      analyzed_ = true;
    }
    solver_.factorize(matrix_);
    if (solver_.info() != Eigen::Success) throw SolverError("LU factorization of the Oseen system failed: " + solver_.lastErrorMessage(), NAN);
    Eigen::VectorXd sol = solver_.solve(rhs_);
    const double bnorm = rhs_.norm();
    const double res = (matrix_ * sol - rhs_).norm() / (bnorm > 0.0 ? bnorm : 1.0);
    if (solver_.info() != Eigen::Success || !std::isfinite(res) || res > kLinearResidualLimit) {
      std::ostringstream os;
      os << "Oseen linear solve failed, relative residual " << res;
      throw SolverError(os.str(), res);
    }
    Field out;
    out.mesh = u_k.mesh;
    out.velocity = sol.head(static_cast<Eigen::Index>(nv_));
    out.pressure = sol.tail(static_cast<Eigen::Index>(np_));
    return out;
  }

 private:
  void assemble(const Eigen::VectorXd& w, Vec2 extra_force) {
    const auto& ref = fe::reference();
    const std::size_t nn = mesh_.node_count();
    const std::size_t n = nv_ + np_;
    const double nu = cfg_.nu_visc;
    triplets_.clear();
    triplets_.reserve(mesh_.cell_count() * (2 * 81 + 4 * 4 * 9) + n);
    rhs_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));

    for (std::size_t c = 0; c < mesh_.cell_count(); ++c) {
      const auto ids = mesh_.cell_nodes(c);
      const auto pids = mesh_.cell_pressure(c);
      double A[9][9] = {};
      double Bx[4][9] = {};
      double By[4][9] = {};
      double Fx[9] = {};
      double Fy[9] = {};
      for (std::size_t q = 0; q < fe::kQuadPoints; ++q) {
        const auto& d = geom_[c][q];
        const auto& phi = ref.q2[q];
        double wx = 0.0, wy = 0.0;
        for (std::size_t a = 0; a < 9; ++a) {
          wx += phi[a] * w[ids[a]];
          wy += phi[a] * w[static_cast<Eigen::Index>(nn) + ids[a]];
        }
        Vec2 f = extra_force;
        if (cfg_.body_force) {
          const Vec2 fb = cfg_.body_force(d.x.x, d.x.y);
          f.x += fb.x;
          f.y += fb.y;
        }
        for (std::size_t b = 0; b < 9; ++b) {
          const double gbx = d.grad[b][0], gby = d.grad[b][1];
          const double adv = wx * gbx + wy * gby;
          for (std::size_t a = 0; a < 9; ++a)
            A[a][b] += d.jxw * (nu * (d.grad[a][0] * gbx + d.grad[a][1] * gby) + adv * phi[a]);
          for (std::size_t p = 0; p < 4; ++p) {
            Bx[p][b] -= d.jxw * ref.q1[q][p] * gbx;
            By[p][b] -= d.jxw * ref.q1[q][p] * gby;
          }
          Fx[b] += d.jxw * f.x * phi[b];
          Fy[b] += d.jxw * f.y * phi[b];
        }
      }
      for (std::size_t a = 0; a < 9; ++a) {
        const auto rx = static_cast<std::size_t>(ids[a]);
        const std::size_t ry = nn + rx;
        if (!dirichlet_[rx]) {
          for (std::size_t b = 0; b < 9; ++b) add(rx, static_cast<std::size_t>(ids[b]), A[a][b]);
          for (std::size_t p = 0; p < 4; ++p) add(rx, nv_ + static_cast<std::size_t>(pids[p]), Bx[p][a]);
          rhs_[static_cast<Eigen::Index>(rx)] += Fx[a];
        }
        if (!dirichlet_[ry]) {
          for (std::size_t b = 0; b < 9; ++b) add(ry, nn + static_cast<std::size_t>(ids[b]), A[a][b]);
          for (std::size_t p = 0; p < 4; ++p) add(ry, nv_ + static_cast<std::size_t>(pids[p]), By[p][a]);
          rhs_[static_cast<Eigen::Index>(ry)] += Fy[a];
        }
      }
      for (std::size_t p = 0; p < 4; ++p) {
        const std::size_t row = nv_ + static_cast<std::size_t>(pids[p]);
        if (pin_pressure_ && pids[p] == 0) continue;
        for (std::size_t b = 0; b < 9; ++b) {
          add(row, static_cast<std::size_t>(ids[b]), Bx[p][b]);
          add(row, nn + static_cast<std::size_t>(ids[b]), By[p][b]);
        }
      }
    }
    for (std::size_t i = 0; i < nv_; ++i) {
      if (!dirichlet_[i]) continue;
      add(i, i, 1.0);
      rhs_[static_cast<Eigen::Index>(i)] = dirichlet_values_[static_cast<Eigen::Index>(i)];
    }
    if (pin_pressure_) add(nv_, nv_, 1.0);
    matrix_.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    matrix_.setFromTriplets(triplets_.begin(), triplets_.end());
  }

  void add(std::size_t r, std::size_t c, double v) {
    triplets_.emplace_back(static_cast<int>(r), static_cast<int>(c), v);
  }

  const Mesh& mesh_;
  const FlowConfig& cfg_;
  std::vector<CellQuad> geom_;
  std::size_t nv_ = 0;
  std::size_t np_ = 0;
  std::vector<bool> dirichlet_;
  Eigen::VectorXd dirichlet_values_;
  bool pin_pressure_ = false;

  std::vector<Eigen::Triplet<double>> triplets_;
  SpMat matrix_;
  Eigen::VectorXd rhs_;
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> solver_;
  bool analyzed_ = false;
};

}  // namespace

void FlowConfig::validate() const {
  if (!(nu_visc > 0.0)) throw DomainError("viscosity must be positive");
  if (!(oseen_tol > 0.0)) throw DomainError("Oseen tolerance must be positive");
  if (oseen_max_iter < 1) throw DomainError("Oseen iteration cap must be >= 1");
  if (!(relaxation > 0.0 && relaxation <= 1.0)) throw DomainError("relaxation must lie in (0, 1]");
  if (!(fallback_relaxation > 0.0 && fallback_relaxation <= 1.0))
    throw DomainError("fallback relaxation must lie in (0, 1]");
  if (bias_iterations < 0) throw DomainError("bias_iterations must be >= 0");
}

Field Field::zero(std::shared_ptr<const Mesh> mesh) {
  Field f;
  f.velocity = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh->velocity_dofs()));
  f.pressure = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh->pressure_dofs()));
  f.mesh = std::move(mesh);
  return f;
}

Field Field::interpolate(std::shared_ptr<const Mesh> mesh, const std::function<Vec2(double, double)>& u) {
  Field f = zero(mesh);
  const auto nn = static_cast<Eigen::Index>(mesh->node_count());
  for (Eigen::Index n = 0; n < nn; ++n) {
    const Vec2& p = mesh->nodes()[static_cast<std::size_t>(n)];
    const Vec2 v = u(p.x, p.y);
    f.velocity[n] = v.x;
    f.velocity[nn + n] = v.y;
  }
  return f;
}

Field oseen_step(const Mesh& mesh, const FlowConfig& cfg, const Field& u_k) {
  cfg.validate();
  OseenSystem sys(mesh, cfg);
  return sys.step(u_k, {});
}

double weighted_relative_difference(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& w) {
  if (a.size() != b.size() || a.size() != w.size()) throw DimensionError("weighted difference: length mismatch");
  const double num = (w.array() * (a - b).array().square()).sum();
  const double den = (w.array() * b.array().square()).sum();
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

OseenResult oseen_solve(const Mesh& mesh, const FlowConfig& cfg, const Field& u_init) {
  cfg.validate();
  OseenSystem sys(mesh, cfg);
  if (static_cast<std::size_t>(u_init.velocity.size()) != sys.velocity_dofs())
    throw DimensionError("initial field does not match the mesh");
  const Eigen::VectorXd weights = lumped_velocity_mass(mesh);

  Field u = u_init;
  for (std::size_t i = 0; i < sys.velocity_dofs(); ++i)
    if (sys.dirichlet_mask()[i]) u.velocity[static_cast<Eigen::Index>(i)] = sys.dirichlet_values()[static_cast<Eigen::Index>(i)];

  OseenResult result;
  double omega = cfg.relaxation;
  bool fell_back = false;
  std::size_t free_steps = 0;
  for (int k = 0; k < cfg.oseen_max_iter; ++k) {
    const bool biased = k < cfg.bias_iterations;
    Vec2 bias{};
    if (biased) {
      const double ramp = 1.0 - static_cast<double>(k) / cfg.bias_iterations;
      bias = {cfg.bias_force.x * ramp, cfg.bias_force.y * ramp};
    }
    Field next = sys.step(u, bias);
    if (omega < 1.0) next.velocity = (1.0 - omega) * u.velocity + omega * next.velocity;
    const double delta = weighted_relative_difference(next.velocity, u.velocity, weights);
    result.trace.push_back(delta);
    u = std::move(next);
    if (biased) continue;
    ++free_steps;
    if (delta < cfg.oseen_tol) {
      result.field = std::move(u);
      result.iterations = k + 1;
      return result;
    }
    if (!std::isfinite(delta)) break;
    if (cfg.adaptive_relaxation && !fell_back && free_steps >= 3 &&
        delta >= result.trace[result.trace.size() - 2]) {
      omega = std::min(omega, cfg.fallback_relaxation);
      fell_back = true;
    }
  }
  std::ostringstream os;
  os << "Oseen iteration did not reach tol " << cfg.oseen_tol << " in " << cfg.oseen_max_iter
     << " iterations (last difference " << (result.trace.empty() ? NAN : result.trace.back()) << ")";
  throw DivergenceError(os.str(), result.trace);
}

Eigen::VectorXd pullback(const Field& field) {
  if (!field.mesh) throw DimensionError("field without a mesh");
  return pullback(field, field.mesh->velocity_dofs());
}

Eigen::VectorXd pullback(const Field& field, std::size_t reference_dofs) {
  if (static_cast<std::size_t>(field.velocity.size()) != reference_dofs)
    throw DimensionError("field has " + std::to_string(field.velocity.size()) + " velocity dofs, reference has " +
                         std::to_string(reference_dofs));
  return field.velocity;
}

double reynolds(double U, double L, double nu) {
  if (!(U > 0.0) || !(L > 0.0) || !(nu > 0.0)) throw DomainError("Reynolds number needs positive U, L and nu");
  return U * L / nu;
}

Eigen::VectorXd lumped_velocity_mass(const Mesh& mesh) {
  const auto& ref = fe::reference();
  const auto geom = cell_geometry(mesh);
  const auto nn = static_cast<Eigen::Index>(mesh.node_count());
  Eigen::VectorXd w = Eigen::VectorXd::Zero(2 * nn);
  for (std::size_t c = 0; c < mesh.cell_count(); ++c) {
    const auto ids = mesh.cell_nodes(c);
    for (std::size_t q = 0; q < fe::kQuadPoints; ++q)
      for (std::size_t a = 0; a < 9; ++a) w[ids[a]] += geom[c][q].jxw * ref.q2[q][a];
  }
  w.tail(nn) = w.head(nn);
  return w;
}

double divergence_residual(const Mesh& mesh, const Eigen::VectorXd& velocity) {
  if (static_cast<std::size_t>(velocity.size()) != mesh.velocity_dofs())
    throw DimensionError("velocity length does not match the mesh");
  const auto& ref = fe::reference();
  const auto geom = cell_geometry(mesh);
  const auto nn = static_cast<Eigen::Index>(mesh.node_count());
  Eigen::VectorXd div = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.pressure_dofs()));
  Eigen::VectorXd mag = div;
  for (std::size_t c = 0; c < mesh.cell_count(); ++c) {
    const auto ids = mesh.cell_nodes(c);
    const auto pids = mesh.cell_pressure(c);
    for (std::size_t q = 0; q < fe::kQuadPoints; ++q) {
      const auto& d = geom[c][q];
      for (std::size_t b = 0; b < 9; ++b) {
        const double tx = d.grad[b][0] * velocity[ids[b]];
        const double ty = d.grad[b][1] * velocity[nn + ids[b]];
        for (std::size_t p = 0; p < 4; ++p) {
          const double s = d.jxw * ref.q1[q][p];
          div[pids[p]] += s * (tx + ty);
          mag[pids[p]] += std::abs(s * tx) + std::abs(s * ty);
        }
      }
    }
  }
  const double scale = mag.norm();
  return scale > 0.0 ? div.norm() / scale : div.norm();
}

Eigen::VectorXd pressure_at_nodes(const Mesh& mesh, const Eigen::VectorXd& pressure) {
  if (static_cast<std::size_t>(pressure.size()) != mesh.pressure_dofs())
    throw DimensionError("pressure length does not match the mesh");
  const int lw = mesh.lattice_width();
  const int lh = mesh.lattice_height();
  const int pw = mesh.nx() + 1;
  Eigen::VectorXd out(static_cast<Eigen::Index>(mesh.node_count()));
  for (int j = 0; j < lh; ++j)
    for (int i = 0; i < lw; ++i) {
      const int i0 = i / 2, j0 = j / 2;
      const int i1 = i0 + (i % 2), j1 = j0 + (j % 2);
      out[mesh.node_id(i, j)] = 0.25 * (pressure[j0 * pw + i0] + pressure[j0 * pw + i1] + pressure[j1 * pw + i0] +
                                        pressure[j1 * pw + i1]);
    }
  return out;
}

void write_field_csv(std::ostream& os, const Field& field) {
  const Mesh& mesh = *field.mesh;
  const auto p = pressure_at_nodes(mesh, field.pressure);
  const auto nn = static_cast<Eigen::Index>(mesh.node_count());
  const auto old = os.precision(17);
  os << "x,y,u_x,u_y,p\n";
  for (Eigen::Index n = 0; n < nn; ++n) {
    const Vec2& x = mesh.nodes()[static_cast<std::size_t>(n)];
    os << x.x << ',' << x.y << ',' << field.velocity[n] << ',' << field.velocity[nn + n] << ',' << p[n] << '\n';
  }
  os.precision(old);
}

}  // namespace sparse_rom
