#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "sparse_rom/errors.hpp"
#include "sparse_rom/providers.hpp"
#include "text_util.hpp"

namespace sparse_rom {

namespace {

constexpr double kBoxSlack = 1e-12;

}  // namespace

AffineParameterMap::AffineParameterMap(std::vector<std::pair<double, double>> intervals)
    : intervals_(std::move(intervals)) {
  for (const auto& [a, b] : intervals_)
    if (!(a < b)) throw InvalidInputError("parameter interval [" + detail::fmt_g17(a) + ", " + detail::fmt_g17(b) + "] is empty");
}

std::vector<double> AffineParameterMap::to_physical(std::span<const double> y) const {
  if (y.size() != intervals_.size())
    throw DimensionError("expected " + std::to_string(intervals_.size()) + " parameters, got " + std::to_string(y.size()));
  std::vector<double> p(y.size());
  for (std::size_t j = 0; j < y.size(); ++j) {
    if (!(std::abs(y[j]) <= 1.0 + kBoxSlack))
      throw DomainError("parameter y_" + std::to_string(j + 1) + "=" + detail::fmt_g17(y[j]) + " outside [-1, 1]");
    const double t = std::clamp(y[j], -1.0, 1.0);
    const auto [a, b] = intervals_[j];
    p[j] = a + (t + 1.0) * (b - a) / 2.0;
  }
  return p;
}

std::vector<double> AffineParameterMap::to_reference(std::span<const double> p) const {
  if (p.size() != intervals_.size())
    throw DimensionError("expected " + std::to_string(intervals_.size()) + " parameters, got " + std::to_string(p.size()));
  std::vector<double> y(p.size());
  for (std::size_t j = 0; j < p.size(); ++j) {
    const auto [a, b] = intervals_[j];
    const double t = 2.0 * (p[j] - a) / (b - a) - 1.0;
    if (!(std::abs(t) <= 1.0 + kBoxSlack))
      throw DomainError("parameter " + detail::fmt_g17(p[j]) + " outside [" + detail::fmt_g17(a) + ", " + detail::fmt_g17(b) + "]");
    y[j] = std::clamp(t, -1.0, 1.0);
  }
  return y;
}

std::vector<double> map_to_physical(std::span<const double> y, const AffineParameterMap& map) {
  return map.to_physical(y);
}

std::string_view to_string(AnalyticKind kind) {
  switch (kind) {
    case AnalyticKind::Runge: return "runge";
    case AnalyticKind::TensorExp: return "tensor_exp";
    case AnalyticKind::SineField: return "sine";
  }
  return "unknown";
}

AnalyticKind parse_analytic_kind(std::string_view name) {
  for (auto k : {AnalyticKind::Runge, AnalyticKind::TensorExp, AnalyticKind::SineField})
    if (to_string(k) == name) return k;
  throw InvalidInputError("unknown analytic map '" + std::string(name) + "'");
}

AnalyticMap::AnalyticMap(AnalyticKind kind, std::size_t dimension, std::size_t output_size, double wave_number)
    : kind_(kind), dimension_(dimension), output_size_(output_size), wave_number_(wave_number) {
  if (dimension_ == 0) throw DimensionError("analytic map needs at least one parameter");
  switch (kind_) {
    case AnalyticKind::Runge:
      if (dimension_ != 1) throw DimensionError("the Runge map is univariate");
      [[fallthrough]];
    case AnalyticKind::TensorExp:
      if (output_size_ != 1) throw DimensionError("scalar analytic maps have output size 1");
      break;
    case AnalyticKind::SineField:
      if (output_size_ < 2) throw DimensionError("the sine field needs at least 2 sample points");
      break;
  }
}

Eigen::VectorXd AnalyticMap::evaluate(std::span<const double> y) const {
  if (y.size() != dimension_)
    throw DimensionError("expected " + std::to_string(dimension_) + " parameters, got " + std::to_string(y.size()));
  for (double v : y)
    if (!(std::abs(v) <= 1.0 + kBoxSlack)) throw DomainError("parameter " + detail::fmt_g17(v) + " outside [-1, 1]");
  ++evaluations_;
  Eigen::VectorXd out(static_cast<Eigen::Index>(output_size_));
  double sum = 0.0;
  for (double v : y) sum += v;
  switch (kind_) {
    case AnalyticKind::Runge: out[0] = 1.0 / (1.0 + 25.0 * y[0] * y[0]); break;
    case AnalyticKind::TensorExp: out[0] = std::exp(0.5 * sum); break;
    case AnalyticKind::SineField: {
      const double shift = sum / static_cast<double>(dimension_);
      for (Eigen::Index i = 0; i < out.size(); ++i) {
        const double x = static_cast<double>(i) / static_cast<double>(out.size() - 1);
        out[i] = std::sin(wave_number_ * std::numbers::pi * (x + shift));
      }
      break;
    }
  }
  return out;
}

Eigen::VectorXd analytic_snapshot(AnalyticKind kind, std::span<const double> y, std::size_t output_size) {
  return AnalyticMap(kind, y.size(), output_size).evaluate(y);
}

FomProblem FomProblem::narrowing(int nx, int ny) {
  FomProblem p;
  p.model = GeometryModel::NarrowingWidth;
  p.nx = nx;
  p.ny = ny;
  p.flow.nu_visc = 1.0;
  p.parameters = AffineParameterMap({{0.1, 2.9}});
  return p;
}

FomProblem FomProblem::curved(int nx, int ny) {
  FomProblem p;
  p.model = GeometryModel::CurvedWalls;
  p.nx = nx;
  p.ny = ny;
  p.parameters = AffineParameterMap({{0.15, 0.2}, {0.0, 1.0}});
  // Downward push during the first iterations, ramped to zero.
  p.flow.bias_force = {0.0, -0.05};
  p.flow.bias_iterations = 10;
  return p;
}

void FomProblem::validate() const {
  const std::size_t expected = model == GeometryModel::CurvedWalls ? 2 : 1;
  if (model == GeometryModel::StraightChannel) throw InvalidInputError("the straight channel has no parameters");
  if (parameters.dimension() != expected)
    throw DimensionError("model " + std::string(to_string(model)) + " has " + std::to_string(expected) + " parameters");
  flow.validate();
}

std::pair<GeometrySpec, FlowConfig> FomProblem::instantiate(std::span<const double> physical) const {
  FlowConfig cfg = flow;
  GeometrySpec spec;
  if (model == GeometryModel::CurvedWalls) {
    spec = GeometrySpec::curved(physical[1]);
    cfg.nu_visc = physical[0];
  } else {
    spec = GeometrySpec::narrowing(physical[0]);
  }
  return {spec, cfg};
}

GeometrySpec FomProblem::reference_geometry() const {
  const std::vector<double> centre(parameters.dimension(), 0.0);
  return instantiate(parameters.to_physical(centre)).first;
}

std::string FomProblem::identity() const {
  std::ostringstream os;
  os << "model=" << to_string(model) << " nx=" << nx << " ny=" << ny << " box=";
  for (const auto& [a, b] : parameters.intervals()) os << '[' << detail::fmt_g17(a) << ',' << detail::fmt_g17(b) << ']';
  return os.str();
}

std::string FomProblem::settings() const {
  std::ostringstream os;
  os << "nu=" << (model == GeometryModel::CurvedWalls ? std::string("param") : detail::fmt_g17(flow.nu_visc))
     << " tol=" << detail::fmt_g17(flow.oseen_tol) << " max_iter=" << flow.oseen_max_iter
     << " relax=" << detail::fmt_g17(flow.relaxation) << " adaptive=" << flow.adaptive_relaxation
     << " fallback=" << detail::fmt_g17(flow.fallback_relaxation) << " bias=" << detail::fmt_g17(flow.bias_force.x)
     << ',' << detail::fmt_g17(flow.bias_force.y) << " bias_iter=" << flow.bias_iterations
     << " outlet=" << (flow.stress_free_outlet ? "free" : "dirichlet") << " inflow=" << (flow.inflow ? "custom" : "parabolic")
     << " force=" << (flow.body_force ? "custom" : "zero") << " warm=" << warm_start;
  return os.str();
}

FomSnapshotMap::FomSnapshotMap(FomProblem problem) : problem_(std::move(problem)) {
  problem_.validate();
  reference_mesh_ = build_mesh(problem_.reference_geometry(), problem_.nx, problem_.ny);
  mass_ = lumped_velocity_mass(*reference_mesh_);
  dofs_ = reference_mesh_->velocity_dofs();
}

OseenResult FomSnapshotMap::solve(std::span<const double> y) const {
  const std::vector<double> physical = problem_.parameters.to_physical(y);
  std::string where = " (parameter";
  for (double p : physical) where += " " + detail::fmt_g17(p);
  where += ")";
  try {
    const auto [spec, cfg] = problem_.instantiate(physical);
    auto mesh = build_mesh(spec, problem_.nx, problem_.ny);
    Field init = Field::zero(mesh);
    if (problem_.warm_start) {
      std::lock_guard lock(warm_mutex_);
      double best = std::numeric_limits<double>::infinity();
      for (const auto& [yy, v] : solved_) {
        double dist = 0.0;
        for (std::size_t j = 0; j < y.size(); ++j) dist += (yy[j] - y[j]) * (yy[j] - y[j]);
        if (dist < best) {
          best = dist;
          init.velocity = v;
        }
      }
    }
    OseenResult r = oseen_solve(*mesh, cfg, init);
    ++solves_;
    iterations_ += static_cast<std::size_t>(r.iterations);
    if (problem_.warm_start) {
      std::lock_guard lock(warm_mutex_);
      solved_.emplace_back(std::vector<double>(y.begin(), y.end()), r.field.velocity);
    }
    return r;
  } catch (const DivergenceError& e) {
    throw DivergenceError(e.what() + where, e.trace());
  } catch (const SolverError& e) {
    throw SolverError(e.what() + where, e.residual());
  } catch (const GeometryError& e) {
    throw GeometryError(e.what() + where);
  }
}

Eigen::VectorXd FomSnapshotMap::evaluate(std::span<const double> y) const {
  return pullback(solve(y).field, dofs_);
}

}  // namespace sparse_rom
