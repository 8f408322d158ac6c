#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <ostream>
#include <string>

#include "fe_q2.hpp"
#include "sparse_rom/errors.hpp"
#include "sparse_rom/fom.hpp"

namespace sparse_rom {

std::string_view to_string(GeometryModel model) {
  switch (model) {
    case GeometryModel::NarrowingWidth: return "narrowing";
    case GeometryModel::CurvedWalls: return "curved";
    case GeometryModel::StraightChannel: return "straight";
  }
  return "unknown";
}

GeometryModel parse_geometry_model(std::string_view name) {
  for (auto m : {GeometryModel::NarrowingWidth, GeometryModel::CurvedWalls, GeometryModel::StraightChannel})
    if (to_string(m) == name) return m;
  throw InvalidInputError("unknown geometry model '" + std::string(name) + "'");
}

GeometrySpec GeometrySpec::narrowing(double mu) {
  GeometrySpec s;
  s.model = GeometryModel::NarrowingWidth;
  s.mu = mu;
  s.channel_length = 9.0;
  return s;
}

GeometrySpec GeometrySpec::curved(double curvature) {
  GeometrySpec s;
  s.model = GeometryModel::CurvedWalls;
  s.curvature = curvature;
  s.channel_length = 18.0;
  return s;
}

GeometrySpec GeometrySpec::straight(double length) {
  GeometrySpec s;
  s.model = GeometryModel::StraightChannel;
  s.channel_length = length;
  return s;
}

namespace {

constexpr double kRangeSlack = 1e-12;

// Narrowing model: wedges centred at x = 4.5 with streamwise extent 1.5.
constexpr double kWedgeCenter = 4.5;
constexpr double kWedgeHalfExtent = 0.75;

// Curved model: junction with the wall, tip, foot of the downstream face.
constexpr double kCurvedJunctionX = 1.5;
constexpr double kCurvedTipX = 4.5;
constexpr double kCurvedFootX = 5.0;
constexpr double kCurvedGap = 1.0;
constexpr double kCurvedDisplacement = 0.6;
constexpr double kWakeGrading = 1.5;

}  // namespace

void GeometrySpec::validate() const {
  if (!(channel_height > 0.0) || !(channel_length > 0.0)) throw GeometryError("channel dimensions must be positive");
  switch (model) {
    case GeometryModel::NarrowingWidth:
      if (!(mu >= 0.1 - kRangeSlack && mu <= 2.9 + kRangeSlack))
        throw GeometryError("narrowing gap mu=" + std::to_string(mu) + " outside [0.1, 2.9]");
      if (channel_length < kWedgeCenter + kWedgeHalfExtent + 0.5)
        throw GeometryError("channel too short for the narrowing");
      break;
    case GeometryModel::CurvedWalls:
      if (!(curvature >= -kRangeSlack && curvature <= 1.0 + kRangeSlack))
        throw GeometryError("curvature=" + std::to_string(curvature) + " outside [0, 1]");
      if (channel_length < kCurvedFootX + 1.0) throw GeometryError("channel too short for the curved narrowing");
      if (channel_height <= kCurvedGap) throw GeometryError("channel lower than the tip gap");
      break;
    case GeometryModel::StraightChannel:
      break;
  }
}

Mesh::Mesh(GeometrySpec spec, int nx, int ny, std::vector<Vec2> nodes)
    : spec_(spec), nx_(nx), ny_(ny), nodes_(std::move(nodes)) {}

std::array<int, 9> Mesh::cell_nodes(std::size_t c) const {
  const int ci = static_cast<int>(c % static_cast<std::size_t>(nx_));
  const int cj = static_cast<int>(c / static_cast<std::size_t>(nx_));
  std::array<int, 9> out{};
  for (int b = 0; b < 3; ++b)
    for (int a = 0; a < 3; ++a) out[static_cast<std::size_t>(b * 3 + a)] = node_id(2 * ci + a, 2 * cj + b);
  return out;
}

std::array<int, 4> Mesh::cell_pressure(std::size_t c) const {
  const int ci = static_cast<int>(c % static_cast<std::size_t>(nx_));
  const int cj = static_cast<int>(c / static_cast<std::size_t>(nx_));
  const int w = nx_ + 1;
  return {cj * w + ci, cj * w + ci + 1, (cj + 1) * w + ci, (cj + 1) * w + ci + 1};
}

std::vector<std::array<int, 9>> Mesh::connectivity() const {
  std::vector<std::array<int, 9>> out(cell_count());
  for (std::size_t c = 0; c < out.size(); ++c) out[c] = cell_nodes(c);
  return out;
}

void Mesh::write_nodes_csv(std::ostream& os) const {
  const auto old = os.precision(17);
  os << "id,x,y\n";
  for (std::size_t n = 0; n < nodes_.size(); ++n) os << n << ',' << nodes_[n].x << ',' << nodes_[n].y << '\n';
  os.precision(old);
}

void Mesh::write_cells_csv(std::ostream& os) const {
  os << "cell,n0,n1,n2,n3,n4,n5,n6,n7,n8\n";
  for (std::size_t c = 0; c < cell_count(); ++c) {
    os << c;
    for (int n : cell_nodes(c)) os << ',' << n;
    os << '\n';
  }
}

namespace {

// Bottom boundary point (x, b) as a function of a local parameter t in [0,1].
struct Segment {
  int cells;
  std::function<Vec2(double)> bottom;
};

std::vector<Segment> straight_segments(const GeometrySpec& s, int nx) {
  const double L = s.channel_length;
  return {{nx, [L](double t) { return Vec2{L * t, 0.0}; }}};
}

std::vector<Segment> narrowing_segments(const GeometrySpec& s, int nx) {
  const double L = s.channel_length;
  const double h = 0.5 * (s.channel_height - s.mu);
  const double x0 = kWedgeCenter - kWedgeHalfExtent;
  const double x1 = kWedgeCenter + kWedgeHalfExtent;
  const int n_wedge = std::max(2, nx / 8);
  const int n_in = (nx - 2 * n_wedge) / 2;
  const int n_out = nx - 2 * n_wedge - n_in;
  return {
      {n_in, [x0](double t) { return Vec2{x0 * t, 0.0}; }},
      {n_wedge, [=](double t) { return Vec2{x0 + kWedgeHalfExtent * t, h * t}; }},
      {n_wedge, [=](double t) { return Vec2{kWedgeCenter + kWedgeHalfExtent * t, h * (1.0 - t)}; }},
      {n_out, [=](double t) { return Vec2{x1 + (L - x1) * t, 0.0}; }},
  };
}

std::vector<Segment> curved_segments(const GeometrySpec& s, int nx) {
  const double L = s.channel_length;
  const double tip = 0.5 * (s.channel_height - kCurvedGap);
  // Quadratic x(t) through the junction, the displaced intermediate point
  // and the tip; the face height is tip * t.
  const double xa = kCurvedJunctionX;
  const double xb = kCurvedTipX;
  const double xm = 0.5 * (xa + xb) - kCurvedDisplacement * s.curvature;
  const double c1 = 4.0 * xm - 3.0 * xa - xb;
  const double c2 = 2.0 * xa + 2.0 * xb - 4.0 * xm;
  const int n_in = std::max(2, nx / 16);
  const int n_face = std::max(2, nx / 6);
  const int n_down = std::max(2, nx / 16);
  const int n_wake = nx - n_in - n_face - n_down;
  const double wake = L - kCurvedFootX;
  const double grow = std::expm1(kWakeGrading);
  return {
      {n_in, [xa](double t) { return Vec2{xa * t, 0.0}; }},
      {n_face, [=](double t) { return Vec2{xa + c1 * t + c2 * t * t, tip * t}; }},
      {n_down, [=](double t) { return Vec2{xb + (kCurvedFootX - xb) * t, tip * (1.0 - t)}; }},
      {n_wake, [=](double t) { return Vec2{kCurvedFootX + wake * std::expm1(kWakeGrading * t) / grow, 0.0}; }},
  };
}

}  // namespace

std::shared_ptr<const Mesh> build_mesh(const GeometrySpec& spec, int nx, int ny) {
  if (nx < 4 || ny < 4) throw GeometryError("mesh needs at least 4 x 4 cells");
  spec.validate();
  std::vector<Segment> segments;
  switch (spec.model) {
    case GeometryModel::NarrowingWidth: segments = narrowing_segments(spec, nx); break;
    case GeometryModel::CurvedWalls:
      if (nx < 16) throw GeometryError("curved-wall mesh needs nx >= 16");
      segments = curved_segments(spec, nx);
      break;
    case GeometryModel::StraightChannel: segments = straight_segments(spec, nx); break;
  }
  for (const auto& seg : segments)
    if (seg.cells < 1) throw GeometryError("mesh too coarse for the geometry segments");

  // Bottom boundary per lattice column.
  std::vector<Vec2> column;
  column.reserve(static_cast<std::size_t>(2 * nx + 1));
  for (std::size_t s = 0; s < segments.size(); ++s) {
    const int k_end = 2 * segments[s].cells;
    for (int k = (s == 0 ? 0 : 1); k <= k_end; ++k) column.push_back(segments[s].bottom(static_cast<double>(k) / k_end));
  }
  column.back().x = spec.channel_length;

  const double H = spec.channel_height;
  const int lw = 2 * nx + 1;
  const int lh = 2 * ny + 1;
  std::vector<Vec2> nodes(static_cast<std::size_t>(lw) * static_cast<std::size_t>(lh));
  for (int j = 0; j < lh; ++j) {
    const double eta = static_cast<double>(j) / (lh - 1);
    for (int i = 0; i < lw; ++i) {
      const Vec2 b = column[static_cast<std::size_t>(i)];
      if (!(H - 2.0 * b.y > 0.0)) throw GeometryError("channel gap closes at x=" + std::to_string(b.x));
      nodes[static_cast<std::size_t>(j * lw + i)] = {b.x, b.y + eta * (H - 2.0 * b.y)};
    }
  }
  auto mesh = std::make_shared<const Mesh>(spec, nx, ny, std::move(nodes));

  // Jacobians at quadrature points and cell corners.
  const auto& ref = fe::reference();
  std::array<std::array<double, 2>, 13> probes{};
  for (std::size_t q = 0; q < fe::kQuadPoints; ++q) probes[q] = {ref.qp[q][0], ref.qp[q][1]};
  probes[9] = {-1, -1};
  probes[10] = {1, -1};
  probes[11] = {-1, 1};
  probes[12] = {1, 1};
  for (std::size_t c = 0; c < mesh->cell_count(); ++c) {
    const auto ids = mesh->cell_nodes(c);
    for (const auto& p : probes) {
      const double det = fe::jacobian_det(*mesh, ids, p[0], p[1]);
      if (!(det > 0.0)) throw GeometryError("non-positive cell Jacobian in cell " + std::to_string(c));
    }
  }
  return mesh;
}

}  // namespace sparse_rom
