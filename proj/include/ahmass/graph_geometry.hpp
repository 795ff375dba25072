#pragma once

// Extrinsic geometry of a vertical graph t = u(x) over H^n inside
// H^{n+1} = H^n x_rho R with metric b + rho^2 dt^2. All tensors are in the
// orthonormal frame e_a of H^n; derivatives of u are covariant in b.

#include <cmath>
#include <string>

#include "ahmass/error.hpp"
#include "ahmass/linalg.hpp"
#include "ahmass/model_space.hpp"

namespace ahmass {

struct GraphJet {
  HyperPoint point;
  double u = 0.0;
  Vec u_alpha;
  Mat u_alphabeta;
  PotentialJet pot;

  int dim() const { return point.dim(); }
};

/// `pot` is the warping potential of the chart; it is rho itself unless the chart was
/// moved by an isometry of the slice, in which case it is rho o A^{-1}.
inline GraphJet make_jet(const HyperPoint& p, double u, Vec u_alpha, Mat u_alphabeta, PotentialJet pot) {
  GraphJet j{p, u, std::move(u_alpha), std::move(u_alphabeta), std::move(pot)};
  j.u_alphabeta = 0.5 * (j.u_alphabeta + j.u_alphabeta.transpose()).eval();
  return j;
}

inline GraphJet make_jet(const HyperPoint& p, double u, Vec u_alpha, Mat u_alphabeta) {
  return make_jet(p, u, std::move(u_alpha), std::move(u_alphabeta), potential_jets(p));
}

struct ExtrinsicData {
  double W = 1.0;
  Mat g;
  Mat g_inv;
  Mat S;  // second fundamental form S(Z_b, Z_c)
  Mat B;  // shape operator, B = g^{-1} S (row index raised)
  double S1 = 0.0;
  double S2 = 0.0;
  Vec GXT;  // Z-frame components of G X^T
  double Theta = 1.0;
  double dM_density = 1.0;  // dM = W dvol_b
};

/// G X^T from the closed form left after the rank-one cancellations:
/// (rho^3/W^3)(u_bb u_a - u_ab u_b) + (rho^2/W^3)(rho_b u_a u_b - rho_a u_b u_b).
inline Vec newton_killing(const GraphJet& j) {
  const double rho = j.pot.rho;
  const Vec& du = j.u_alpha;
  const Vec& drho = j.pot.rho_alpha;
  const double grad2 = du.squaredNorm();
  const double w = std::hypot(1.0, rho * std::sqrt(grad2));
  const double w3 = w * w * w;
  const double lap = j.u_alphabeta.trace();
  const Vec hess_du = j.u_alphabeta * du;
  return (rho * rho * rho / w3) * (lap * du - hess_du) +
         (rho * rho / w3) * (drho.dot(du) * du - grad2 * drho);
}

inline ExtrinsicData extrinsic_data(const GraphJet& j) {
  const int n = j.dim();
  const double rho = j.pot.rho;
  const Vec& du = j.u_alpha;
  const Vec& drho = j.pot.rho_alpha;
  ExtrinsicData e;
  const double slope = rho * du.norm();
  e.W = std::hypot(1.0, slope);
  const double k = drho.dot(du);
  Mat m = rho * j.u_alphabeta + drho * du.transpose() + du * drho.transpose() +
          (rho * rho * k) * (du * du.transpose());
  e.S = 0.5 * (m + m.transpose()) / e.W;
  e.g = identity(n) + (rho * rho) * (du * du.transpose());
  e.g_inv = identity(n) - (rho * rho / (e.W * e.W)) * (du * du.transpose());
  e.B = e.g_inv * e.S;
  e.S1 = e.B.trace();
  e.S2 = 0.5 * (e.S1 * e.S1 - (e.B * e.B).trace());
  e.GXT = newton_killing(j);
  e.Theta = rho / e.W;
  e.dM_density = e.W;
  return e;
}

/// X^T = (rho^2/W^2) u_a Z_a contracted with G = S1 I - B built from extrinsic_data.
inline Vec newton_killing_compositional(const GraphJet& j, const ExtrinsicData& e) {
  const int n = j.dim();
  const double rho = j.pot.rho;
  const Vec xt = (rho * rho / (e.W * e.W)) * j.u_alpha;
  const Mat g_newton = e.S1 * identity(n) - e.B;
  return g_newton * xt;
}

/// Scalar curvature of the graph through the Gauss equation in the Einstein ambient
/// (Ric = -n g): R_g = -n(n-1) + 2 S2. `excess` is R_g + n(n-1).
struct GaussCurvature {
  double R = 0.0;
  double excess = 0.0;
};

inline GaussCurvature scalar_curvature_gauss(const ExtrinsicData& e, int n) {
  return {-n * (n - 1.0) + 2.0 * e.S2, 2.0 * e.S2};
}

inline GaussCurvature scalar_curvature_gauss(const GraphJet& j) {
  return scalar_curvature_gauss(extrinsic_data(j), j.dim());
}

/// Unit normal (e0, e_1..e_n components) of the graph: (e0 - rho grad u)/W.
inline Vec graph_normal(double rho, const Vec& du) {
  const int n = static_cast<int>(du.size());
  Vec nrm(n + 1);
  const double w = std::hypot(1.0, rho * du.norm());
  nrm[0] = 1.0 / w;
  nrm.tail(n) = -rho * du / w;
  return nrm;
}

/// Boundary-integrand field J(phi)_a = phi (e_ab,b - e_bb,a) - e_ab phi_b + e_bb phi_a built
/// from the perturbation e_ab = rho^2 u_a u_b and its covariant derivative
/// e_ab,c = 2 rho rho_c u_a u_b + rho^2 (u_ac u_b + u_a u_bc).
inline Vec recipe_field(const GraphJet& j, double phi, const Vec& dphi) {
  const int n = j.dim();
  const double rho = j.pot.rho;
  const Vec& du = j.u_alpha;
  const Vec& drho = j.pot.rho_alpha;
  const Mat& hu = j.u_alphabeta;
  auto e = [&](int a, int b) { return rho * rho * du[a] * du[b]; };
  auto de = [&](int a, int b, int c) {
    return 2.0 * rho * drho[c] * du[a] * du[b] + rho * rho * (hu(a, c) * du[b] + du[a] * hu(b, c));
  };
  double trace_e = 0.0;
  for (int b = 0; b < n; ++b) trace_e += e(b, b);
  Vec out(n);
  for (int a = 0; a < n; ++a) {
    double div_e = 0.0, d_trace = 0.0, e_dphi = 0.0;
    for (int b = 0; b < n; ++b) {
      div_e += de(a, b, b);
      d_trace += de(b, b, a);
      e_dphi += e(a, b) * dphi[b];
    }
    out[a] = phi * (div_e - d_trace) - e_dphi + trace_e * dphi[a];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Boundary walls

enum class WallKind { Horosphere, GeodesicSlice, SigmaC };

/// Horosphere v = d + sign log rho, totally geodesic slice v = t0, or Sigma_c, v = c/rho.
struct WallSpec {
  WallKind kind = WallKind::GeodesicSlice;
  double d = 0.0;
  int sign = +1;
  double t0 = 0.0;
  double c = 0.0;

  static WallSpec horosphere(double d, int sign) { return {WallKind::Horosphere, d, sign, 0.0, 0.0}; }
  static WallSpec geodesic_slice(double t0) { return {WallKind::GeodesicSlice, 0.0, 1, t0, 0.0}; }
  static WallSpec sigma_c(double c) { return {WallKind::SigmaC, 0.0, 1, 0.0, c}; }

  void validate() const {
    if (!std::isfinite(d) || !std::isfinite(t0) || !std::isfinite(c) || (sign != 1 && sign != -1))
      throw Error(ErrorCode::BadParams, "wall parameters must be finite, sign +-1");
  }

  /// v(rho), dv/drho, d^2v/drho^2.
  std::array<double, 3> profile(double rho) const {
    switch (kind) {
      case WallKind::Horosphere:
        return {d + sign * std::log(rho), sign / rho, -sign / (rho * rho)};
      case WallKind::GeodesicSlice:
        return {t0, 0.0, 0.0};
      case WallKind::SigmaC:
        return {c / rho, -c / (rho * rho), 2.0 * c / (rho * rho * rho)};
    }
    return {0.0, 0.0, 0.0};
  }

  GraphJet jet(const HyperPoint& p) const {
    const auto [v, dv, d2v] = profile(p.rho());
    const Vec drho = p.grad_rho();
    return make_jet(p, v, dv * drho,
                    d2v * (drho * drho.transpose()) + (dv * p.rho()) * identity(p.dim()));
  }

  /// rho / W_wall with W_wall = sqrt(1 + rho^2 |grad v|^2).
  double weight(double rho) const {
    const double dv = profile(rho)[1];
    const double grad_v = std::abs(dv) * std::sqrt(std::max(rho * rho - 1.0, 0.0));
    return rho / std::hypot(1.0, rho * grad_v);
  }
};

inline std::string to_string(WallKind k) {
  switch (k) {
    case WallKind::Horosphere: return "horosphere";
    case WallKind::GeodesicSlice: return "geodesic_slice";
    case WallKind::SigmaC: return "sigma_c";
  }
  return "unknown";
}

/// Mean curvature, with respect to the unit normal along +grad h, of the level set
/// {h = const} in the metric b + (rho df)^2 on H^n (the graph metric of f).
inline double level_set_mean_curvature(double rho, const Vec& drho, const Vec& df, const Mat& d2f,
                                       const Vec& dh, const Mat& d2h) {
  const int n = static_cast<int>(df.size());
  const Vec w = rho * df;
  const Mat q = drho * df.transpose() + rho * d2f;  // q_ij = D_i w_j
  const Mat qs = 0.5 * (q + q.transpose());
  const Mat qa = 0.5 * (q - q.transpose());
  const Mat g_inv = identity(n) - (w * w.transpose()) / (1.0 + w.squaredNorm());
  const Vec y = g_inv * dh;  // grad_g h
  const double grad2 = dh.dot(y);
  if (!(grad2 > 0.0)) throw Error(ErrorCode::WallMismatch, "level set is degenerate here");
  const Vec ay = qa * y;
  const Mat hess = d2h - w.dot(y) * qs - ay * w.transpose() - w * ay.transpose();
  const double lap = (g_inv * hess).trace();
  const double grad = std::sqrt(grad2);
  return (lap - y.dot(hess * y) / grad2) / grad;
}

struct BoundaryFrameData {
  double S1_Gamma = 0.0;          // mean curvature of Gamma in the wall, outward conormal
  double weight = 0.0;            // rho / W_wall
  double mean_curv_in_M = 0.0;    // mean curvature of Gamma in the graph
  double orthogonality_defect = 0.0;  // |<N_graph, xi_wall>|
};

/// Boundary data at a point of Gamma = graph ∩ wall. `conormal_hint` = +1 when the
/// outward conormal of Gamma (away from the region it encloses) points along
/// grad(u - v), -1 otherwise.
inline BoundaryFrameData boundary_frame_data(const GraphJet& j, int conormal_hint,
                                             const WallSpec& wall) {
  wall.validate();
  const GraphJet wj = wall.jet(j.point);
  if (!(std::abs(j.u - wj.u) <= 1e-8))
    throw Error(ErrorCode::WallMismatch, "point is not on the declared wall");
  const double rho = j.pot.rho;
  const Vec& drho = j.pot.rho_alpha;
  const Vec dh = j.u_alpha - wj.u_alpha;
  const Mat d2h = j.u_alphabeta - wj.u_alphabeta;
  const double hint = conormal_hint >= 0 ? 1.0 : -1.0;

  BoundaryFrameData out;
  out.S1_Gamma = hint * level_set_mean_curvature(rho, drho, wj.u_alpha, wj.u_alphabeta, dh, d2h);
  out.mean_curv_in_M = hint * level_set_mean_curvature(rho, drho, j.u_alpha, j.u_alphabeta, dh, d2h);
  out.weight = wall.weight(rho);
  out.orthogonality_defect =
      std::abs(graph_normal(rho, j.u_alpha).dot(graph_normal(rho, wj.u_alpha)));
  return out;
}

}  // namespace ahmass
