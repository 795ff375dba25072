#pragma once

// Finite-difference checks on the induced metric in disk coordinates. Only the metric
// g_ij = Omega^2 delta_ij + rho^2 d_i u d_j u is differentiated here, never the graph
// function or its covariant Hessian.

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <vector>

#include "ahmass/error.hpp"
#include "ahmass/graph_geometry.hpp"
#include "ahmass/graph_library.hpp"
#include "ahmass/linalg.hpp"
#include "ahmass/model_space.hpp"

namespace ahmass {

enum class FDScheme { Central2, Central4 };

struct FDConfig {
  double step = 1e-3;
  FDScheme scheme = FDScheme::Central4;
  int richardson_levels = 1;

  void validate() const {
    if (!(step >= 1e-6 && step <= 1e-1)) throw Error(ErrorCode::BadParams, "FD step outside [1e-6, 1e-1]");
    if (richardson_levels < 0 || richardson_levels > 4)
      throw Error(ErrorCode::BadParams, "richardson_levels must be in 0..4");
  }
  int order() const { return scheme == FDScheme::Central2 ? 2 : 4; }
  int reach() const { return scheme == FDScheme::Central2 ? 1 : 2; }
};

struct IdentityResiduals {
  double flux = 0.0;
  Vec recipe;          // |J(rho) - W^3 G X^T| componentwise
  Vec recipe_literal;  // |J(rho) - W^{-3} G X^T| componentwise, informational
  double gauss = 0.0;
};

/// g_ij in disk coordinates; d_i u = u_a / lambda since e_a = lambda d/dx_a.
inline Mat coordinate_metric(const GraphFamily& family, const DiskPoint& x) {
  const GraphJet j = family.derivative_jets(HyperPoint::from_disk(x));
  const double lambda = x.frame_scale();
  const Vec du = j.u_alpha / lambda;
  const double rho = j.pot.rho;
  return identity(x.dim()) / (lambda * lambda) + (rho * rho) * (du * du.transpose());
}

namespace detail {

struct Stencil {
  std::vector<int> offsets;
  std::vector<double> first;   // times 1/h
  std::vector<double> second;  // times 1/h^2
};

inline const Stencil& stencil(FDScheme s) {
  static const Stencil c2{{-1, 0, 1}, {-0.5, 0.0, 0.5}, {1.0, -2.0, 1.0}};
  static const Stencil c4{{-2, -1, 0, 1, 2},
                          {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12},
                          {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12}};
  return s == FDScheme::Central2 ? c2 : c4;
}

inline void check_margin(const GraphFamily& family, const DiskPoint& x, const FDConfig& cfg) {
  const double margin = 4.0 * cfg.step;
  const double norm = x.x().norm();
  if (1.0 - norm < margin)
    throw Error(ErrorCode::StepTooLargeNearBoundary, "stencil too close to the disk boundary");
  const double r_in = family.asymptotic_radius();
  if (r_in > 0.0) {
    const double x_in = r_in / (1.0 + std::sqrt(1.0 + r_in * r_in));
    if (norm - x_in < margin)
      throw Error(ErrorCode::StepTooLargeNearBoundary, "stencil too close to the inner boundary");
  }
}

inline DiskPoint shifted(const DiskPoint& x, int k, double dk, int l = -1, double dl = 0.0) {
  Vec y = x.x();
  y[k] += dk;
  if (l >= 0) y[l] += dl;
  return DiskPoint(y);
}

// First and second partials of a matrix- or vector-valued function of the disk point.
template <class T>
struct Partials {
  T value;
  std::vector<T> d;
  std::vector<std::vector<T>> dd;
};

template <class T, class F>
Partials<T> fd_partials(const F& f, const DiskPoint& x, double h, FDScheme scheme, bool second) {
  const int n = x.dim();
  const Stencil& st = stencil(scheme);
  Partials<T> out;
  out.value = f(x);
  out.d.assign(n, T());
  if (second) out.dd.assign(n, std::vector<T>(n, T()));
  for (int k = 0; k < n; ++k) {
    std::vector<T> line(st.offsets.size());
    for (std::size_t a = 0; a < st.offsets.size(); ++a)
      line[a] = st.offsets[a] == 0 ? out.value : f(shifted(x, k, st.offsets[a] * h));
    T d1 = st.first[0] * line[0];
    T d2 = st.second[0] * line[0];
    for (std::size_t a = 1; a < line.size(); ++a) {
      d1 = d1 + st.first[a] * line[a];
      d2 = d2 + st.second[a] * line[a];
    }
    out.d[k] = d1 / h;
    if (second) out.dd[k][k] = d2 / (h * h);
  }
  if (!second) return out;
  for (int k = 0; k < n; ++k) {
    for (int l = k + 1; l < n; ++l) {
      T acc = 0.0 * out.value;
      for (std::size_t a = 0; a < st.offsets.size(); ++a) {
        if (st.first[a] == 0.0) continue;
        for (std::size_t b = 0; b < st.offsets.size(); ++b) {
          if (st.first[b] == 0.0) continue;
          acc = acc + (st.first[a] * st.first[b]) *
                          f(shifted(x, k, st.offsets[a] * h, l, st.offsets[b] * h));
        }
      }
      out.dd[k][l] = out.dd[l][k] = acc / (h * h);
    }
  }
  return out;
}

// Scalar curvature from g, dg_k, d2g_kl with Gamma_{l,ij} = (d_i g_jl + d_j g_il - d_l g_ij)/2.
inline double scalar_from_metric_jet(const Mat& g, const std::vector<Mat>& dg,
                                     const std::vector<std::vector<Mat>>& d2g) {
  const int n = static_cast<int>(g.rows());
  const Mat gi = g.inverse();
  // low[l](i,j) = Gamma_{l,ij}; d_low[m][l](i,j) = d_m Gamma_{l,ij}
  std::vector<Mat> low(n, Mat::Zero(n, n));
  std::vector<std::vector<Mat>> d_low(n, std::vector<Mat>(n, Mat::Zero(n, n)));
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        low[l](i, j) = 0.5 * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
        for (int m = 0; m < n; ++m)
          d_low[m][l](i, j) = 0.5 * (d2g[m][i](j, l) + d2g[m][j](i, l) - d2g[m][l](i, j));
      }
  // up[k](i,j) = Gamma^k_ij; d_up[m][k](i,j) = d_m Gamma^k_ij
  std::vector<Mat> up(n, Mat::Zero(n, n));
  std::vector<std::vector<Mat>> d_up(n, std::vector<Mat>(n, Mat::Zero(n, n)));
  std::vector<Mat> d_gi(n);
  for (int m = 0; m < n; ++m) d_gi[m] = -gi * dg[m] * gi;
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      up[k] += gi(k, l) * low[l];
      for (int m = 0; m < n; ++m) d_up[m][k] += d_gi[m](k, l) * low[l] + gi(k, l) * d_low[m][l];
    }
  // R_ij = d_k G^k_ij - d_j G^k_ik + G^k_kl G^l_ij - G^k_jl G^l_ik
  Mat ric = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) {
        s += d_up[k][k](i, j) - d_up[j][k](i, k);
        for (int l = 0; l < n; ++l) s += up[k](k, l) * up[l](i, j) - up[k](j, l) * up[l](i, k);
      }
      ric(i, j) = s;
    }
  return (gi.cwiseProduct(ric)).sum();
}

// Romberg table over steps h, h/2, ..., eliminating orders p, p+2, ...
inline double richardson(const std::function<double(double)>& f, double h, int order, int levels) {
  std::vector<double> row;
  for (int i = 0; i <= levels; ++i) row.push_back(f(h / std::pow(2.0, i)));
  for (int lvl = 1; lvl <= levels; ++lvl) {
    const double factor = std::pow(2.0, order + 2 * (lvl - 1));
    for (int i = levels; i >= lvl; --i) row[i] = (factor * row[i] - row[i - 1]) / (factor - 1.0);
  }
  return row.back();
}

}  // namespace detail

inline double scalar_curvature_fd(const GraphFamily& family, const DiskPoint& x, const FDConfig& cfg) {
  cfg.validate();
  if (x.dim() != family.dim()) throw Error(ErrorCode::DimensionMismatch, "point dimension");
  detail::check_margin(family, x, cfg);
  auto metric = [&](const DiskPoint& y) { return coordinate_metric(family, y); };
  auto at_step = [&](double h) {
    const auto p = detail::fd_partials<Mat>(metric, x, h, cfg.scheme, true);
    return detail::scalar_from_metric_jet(p.value, p.d, p.dd);
  };
  return detail::richardson(at_step, cfg.step, cfg.order(), cfg.richardson_levels);
}

/// Tangent field given by its coefficients in the graph frame Z_a = e_a + u_a d_t.
using TangentField = std::function<Vec(const GraphJet&)>;

/// div_g V = (det g)^{-1/2} d_i((det g)^{1/2} V^i), V^i = lambda V_a in disk coordinates.
inline double divergence_fd(const GraphFamily& family, const TangentField& field, const DiskPoint& x,
                            const FDConfig& cfg) {
  cfg.validate();
  if (x.dim() != family.dim()) throw Error(ErrorCode::DimensionMismatch, "point dimension");
  detail::check_margin(family, x, cfg);
  auto flux_density = [&](const DiskPoint& y) {
    const Vec v = field(family.derivative_jets(HyperPoint::from_disk(y)));
    const double vol = std::sqrt(coordinate_metric(family, y).determinant());
    return Vec(vol * y.frame_scale() * v);
  };
  const double vol = std::sqrt(coordinate_metric(family, x).determinant());
  auto at_step = [&](double h) {
    const auto p = detail::fd_partials<Vec>(flux_density, x, h, cfg.scheme, false);
    double s = 0.0;
    for (int i = 0; i < x.dim(); ++i) s += p.d[i][i];
    return s / vol;
  };
  return detail::richardson(at_step, cfg.step, cfg.order(), cfg.richardson_levels);
}

inline Vec newton_field(const GraphJet& j) { return newton_killing(j); }

inline IdentityResiduals residual_suite(const GraphFamily& family, const DiskPoint& x,
                                        const FDConfig& cfg) {
  const GraphJet j = family.derivative_jets(HyperPoint::from_disk(x));
  const ExtrinsicData e = extrinsic_data(j);
  IdentityResiduals out;
  out.flux = std::abs(divergence_fd(family, newton_field, x, cfg) - 2.0 * e.S2 * e.Theta);
  const Vec recipe = recipe_field(j, j.pot.rho, j.pot.rho_alpha);
  const double w3 = e.W * e.W * e.W;
  out.recipe = (recipe - w3 * e.GXT).cwiseAbs();
  out.recipe_literal = (recipe - e.GXT / w3).cwiseAbs();
  const int n = family.dim();
  out.gauss = std::abs(scalar_curvature_fd(family, x, cfg) - scalar_curvature_gauss(e, n).R);
  return out;
}

}  // namespace ahmass
