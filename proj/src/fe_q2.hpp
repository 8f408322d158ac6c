#pragma once

// Reference Q2 (velocity) / Q1 (pressure) element on [-1,1]^2 with 3x3 Gauss.

#include <array>
#include <cmath>
#include <cstddef>

#include "sparse_rom/fom.hpp"

namespace sparse_rom::fe {

inline constexpr std::size_t kQuadPoints = 9;

struct Reference {
  std::array<std::array<double, 2>, kQuadPoints> qp{};
  std::array<double, kQuadPoints> weight{};
  std::array<std::array<double, 9>, kQuadPoints> q2{};
  std::array<std::array<std::array<double, 2>, 9>, kQuadPoints> q2_grad{};
  std::array<std::array<double, 4>, kQuadPoints> q1{};
};

inline void quad_1d(double t, double v[3], double d[3]) {
  v[0] = 0.5 * t * (t - 1.0);
  v[1] = 1.0 - t * t;
  v[2] = 0.5 * t * (t + 1.0);
  d[0] = t - 0.5;
  d[1] = -2.0 * t;
  d[2] = t + 0.5;
}

inline void q2_shape(double xi, double eta, double (&val)[9], double (&grad)[9][2]) {
  double vx[3], dx[3], vy[3], dy[3];
  quad_1d(xi, vx, dx);
  quad_1d(eta, vy, dy);
  for (int b = 0; b < 3; ++b)
    for (int a = 0; a < 3; ++a) {
      val[b * 3 + a] = vx[a] * vy[b];
      grad[b * 3 + a][0] = dx[a] * vy[b];
      grad[b * 3 + a][1] = vx[a] * dy[b];
    }
}

inline void q1_shape(double xi, double eta, double (&val)[4]) {
  const double lx[2] = {0.5 * (1.0 - xi), 0.5 * (1.0 + xi)};
  const double ly[2] = {0.5 * (1.0 - eta), 0.5 * (1.0 + eta)};
  val[0] = lx[0] * ly[0];
  val[1] = lx[1] * ly[0];
  val[2] = lx[0] * ly[1];
  val[3] = lx[1] * ly[1];
}

inline const Reference& reference() {
  static const Reference ref = [] {
    Reference r;
    const double g[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
    const double w[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 3; ++i) {
        const std::size_t q = static_cast<std::size_t>(j * 3 + i);
        r.qp[q] = {g[i], g[j]};
        r.weight[q] = w[i] * w[j];
        double val[9], grad[9][2], pv[4];
        q2_shape(g[i], g[j], val, grad);
        q1_shape(g[i], g[j], pv);
        for (int a = 0; a < 9; ++a) {
          r.q2[q][static_cast<std::size_t>(a)] = val[a];
          r.q2_grad[q][static_cast<std::size_t>(a)] = {grad[a][0], grad[a][1]};
        }
        for (int a = 0; a < 4; ++a) r.q1[q][static_cast<std::size_t>(a)] = pv[a];
      }
    return r;
  }();
  return ref;
}

inline double jacobian_det(const Mesh& mesh, const std::array<int, 9>& ids, double xi, double eta) {
  double val[9], grad[9][2];
  q2_shape(xi, eta, val, grad);
  double j00 = 0, j01 = 0, j10 = 0, j11 = 0;
  for (int a = 0; a < 9; ++a) {
    const Vec2& p = mesh.nodes()[static_cast<std::size_t>(ids[static_cast<std::size_t>(a)])];
    j00 += p.x * grad[a][0];
    j01 += p.x * grad[a][1];
    j10 += p.y * grad[a][0];
    j11 += p.y * grad[a][1];
  }
  return j00 * j11 - j01 * j10;
}

}  // namespace sparse_rom::fe
