#pragma once

// Integral quantities: the boundary mass functional on coordinate spheres, its limit,
// the mass vector, the bulk integral of the scalar-curvature excess, inner boundary
// terms and the Penrose comparison.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "ahmass/error.hpp"
#include "ahmass/graph_geometry.hpp"
#include "ahmass/graph_library.hpp"
#include "ahmass/linalg.hpp"
#include "ahmass/model_space.hpp"
#include "ahmass/sphere_quadrature.hpp"
#include "ahmass/summation.hpp"

namespace ahmass {

enum class Extrapolation { None, Richardson, PowerLaw };

inline std::string to_string(Extrapolation e) {
  switch (e) {
    case Extrapolation::None: return "none";
    case Extrapolation::Richardson: return "richardson";
    case Extrapolation::PowerLaw: return "power-law-fit";
  }
  return "unknown";
}

struct QuadratureSpec {
  int sphere_order = 24;
  int radial_panels = 32;
  int radial_degree = 16;
  double r_min = 0.0;      // inner truncation for families without an inner boundary
  double r_outer = 200.0;  // beyond this the radial integral uses t = r_outer / r
  std::vector<double> r_values{20.0, 40.0, 80.0, 160.0};
  Extrapolation extrapolation = Extrapolation::PowerLaw;
  int threads = 1;

  void validate() const {
    if (sphere_order < 2) throw Error(ErrorCode::BadParams, "sphere_order must be >= 2");
    if (radial_panels < 1 || radial_degree < 3)
      throw Error(ErrorCode::BadParams, "radial rule needs >= 1 panel of degree >= 3");
    if (!(r_min >= 0.0) || !(r_outer > r_min)) throw Error(ErrorCode::BadParams, "need 0 <= r_min < r_outer");
    if (r_values.empty()) throw Error(ErrorCode::BadParams, "r_values must not be empty");
    for (std::size_t i = 1; i < r_values.size(); ++i)
      if (!(r_values[i] > r_values[i - 1]))
        throw Error(ErrorCode::BadParams, "r_values must be strictly increasing");
    if (extrapolation != Extrapolation::None && r_values.size() < 3)
      throw Error(ErrorCode::BadParams, "extrapolation needs at least 3 radii");
  }
};

struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

/// c_n = 1 / (2 (n-1) omega_{n-1}).
inline double mass_constant(int n) { return 1.0 / (2.0 * (n - 1) * sphere_area(n - 1)); }

namespace detail {

inline void check_radius(const GraphFamily& family, double r) {
  if (!(r > family.asymptotic_radius()))
    throw Error(ErrorCode::RadiusInsideCore, "radius " + std::to_string(r) + " inside the core");
}

inline HyperPoint sphere_point(double r, const Vec& theta) {
  return HyperPoint::from_polar(PolarPoint(r, theta));
}

}  // namespace detail

/// m(phi) at radius r: c_n sum_w J(phi).theta r^{n-1} w, with phi = sum_i c_i rho^(i).
inline double mass_functional_at_radius(const GraphFamily& family, const Vec& phi_coeffs, double r,
                                        const QuadratureSpec& q) {
  const int n = family.dim();
  if (phi_coeffs.size() != n + 1) throw Error(ErrorCode::DimensionMismatch, "phi needs n+1 coefficients");
  detail::check_radius(family, r);
  const auto nodes = sphere_quadrature(n - 1, q.sphere_order);
  const auto values = parallel_evaluate(nodes.size(), q.threads, [&](std::size_t i) {
    const HyperPoint p = detail::sphere_point(r, nodes[i].theta);
    const GraphJet j = family.derivative_jets(p);
    const PotentialValue phi = evaluate_potential(phi_coeffs, p);
    return recipe_field(j, phi.value, phi.gradient).dot(nodes[i].theta) * nodes[i].weight;
  });
  return mass_constant(n) * std::pow(r, n - 1) * pairwise_sum(values);
}

/// m(rho^(i)) at radius r for i = 0..n in one sweep.
inline std::vector<double> mass_components_at_radius(const GraphFamily& family, double r,
                                                     const QuadratureSpec& q) {
  const int n = family.dim();
  detail::check_radius(family, r);
  const auto nodes = sphere_quadrature(n - 1, q.sphere_order);
  const std::size_t width = static_cast<std::size_t>(n + 1);
  const auto rows = parallel_evaluate_rows(nodes.size(), width, q.threads,
                                           [&](std::size_t i, std::span<double> out) {
    const HyperPoint p = detail::sphere_point(r, nodes[i].theta);
    const GraphJet j = family.derivative_jets(p);
    const Mat e = p.frame();
    for (int k = 0; k <= n; ++k) {
      const Vec grad = e.row(k).transpose();
      out[k] = recipe_field(j, p.z()[k], grad).dot(nodes[i].theta) * nodes[i].weight;
    }
  });
  auto sums = column_sums(rows, width);
  const double scale = mass_constant(n) * std::pow(r, n - 1);
  for (double& s : sums) s *= scale;
  return sums;
}

/// Flux c_n int_{S_r} W (G X^T . theta) r^{n-1} domega of the Newton field through the
/// coordinate sphere; by the divergence theorem it equals the bulk integral inside.
inline double newton_flux_at_radius(const GraphFamily& family, double r, const QuadratureSpec& q) {
  const int n = family.dim();
  detail::check_radius(family, r);
  const auto nodes = sphere_quadrature(n - 1, q.sphere_order);
  const auto values = parallel_evaluate(nodes.size(), q.threads, [&](std::size_t i) {
    const GraphJet j = family.derivative_jets(detail::sphere_point(r, nodes[i].theta));
    const double w = std::hypot(1.0, j.pot.rho * j.u_alpha.norm());
    return w * newton_killing(j).dot(nodes[i].theta) * nodes[i].weight;
  });
  return mass_constant(n) * std::pow(r, n - 1) * pairwise_sum(values);
}

// ---------------------------------------------------------------------------
// Limits

struct SeriesFit {
  double limit = 0.0;
  double error_estimate = 0.0;
  double sigma = std::numeric_limits<double>::infinity();  // fitted decay exponent of the gap
};

namespace detail {

struct LinearFit {
  double m_inf = 0.0;
  double a = 0.0;
  double rss = 0.0;
};

inline LinearFit fit_for_sigma(const std::vector<double>& r, const std::vector<double>& m, double sigma) {
  double s0 = 0, s1 = 0, s11 = 0, y0 = 0, y1 = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double x = std::pow(r[i], -sigma);
    s0 += 1.0;
    s1 += x;
    s11 += x * x;
    y0 += m[i];
    y1 += x * m[i];
  }
  const double det = s0 * s11 - s1 * s1;
  LinearFit f;
  f.a = (s0 * y1 - s1 * y0) / det;
  f.m_inf = (y0 - f.a * s1) / s0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double res = m[i] - f.m_inf - f.a * std::pow(r[i], -sigma);
    f.rss += res * res;
  }
  return f;
}

inline double richardson_limit(double r1, double m1, double r2, double m2, double sigma) {
  return m2 + (m2 - m1) / (std::pow(r2 / r1, sigma) - 1.0);
}

}  // namespace detail

/// Extrapolates m(r) -> m_inf + a r^{-sigma}. Differences below `floor` count as
/// converged. Throws NonConvergentSeries when the gaps stop shrinking or sigma <= 0.
inline SeriesFit extrapolate_series(const std::vector<double>& r, const std::vector<double>& m,
                                    Extrapolation mode, double floor) {
  if (r.size() != m.size() || r.empty()) throw Error(ErrorCode::BadParams, "series size mismatch");
  for (double v : m)
    if (!std::isfinite(v)) throw Error(ErrorCode::NonConvergentSeries, "non-finite mass value");
  SeriesFit fit;
  fit.limit = m.back();
  if (m.size() == 1) return fit;
  std::vector<double> d;
  for (std::size_t i = 1; i < m.size(); ++i) d.push_back(m[i] - m[i - 1]);
  double largest = 0.0;
  for (double x : d) largest = std::max(largest, std::abs(x));
  if (largest <= floor) {
    fit.error_estimate = largest;
    return fit;
  }
  const std::size_t k = d.size();
  if (k >= 2 && std::abs(d[k - 1]) >= std::abs(d[k - 2]))
    throw Error(ErrorCode::NonConvergentSeries, "boundary series gaps do not shrink");
  if (mode == Extrapolation::None) {
    fit.error_estimate = std::abs(d.back());
    if (k >= 2) fit.sigma = std::log(std::abs(d[k - 2] / d[k - 1])) / std::log(r[k] / r[k - 1]);
    return fit;
  }
  const std::size_t N = r.size() - 1;
  // Exponent from the last three points, exact for geometric radii and a pure power law.
  const double sigma3 = std::log(std::abs(d[k - 2] / d[k - 1])) / std::log(r[N] / r[N - 1]);
  if (!(sigma3 > 0.0)) throw Error(ErrorCode::NonConvergentSeries, "fitted decay exponent <= 0");
  const double rich = detail::richardson_limit(r[N - 1], m[N - 1], r[N], m[N], sigma3);
  if (mode == Extrapolation::Richardson) {
    fit.limit = rich;
    fit.sigma = sigma3;
    fit.error_estimate = std::abs(rich - m[N]) * 1e-2;
    if (N >= 3) {
      const double s_prev = std::log(std::abs(d[k - 3] / d[k - 2])) / std::log(r[N - 1] / r[N - 2]);
      if (s_prev > 0.0)
        fit.error_estimate = std::abs(rich - detail::richardson_limit(r[N - 2], m[N - 2], r[N - 1], m[N - 1], s_prev));
    }
    return fit;
  }
  const auto rss = [&](double s) { return detail::fit_for_sigma(r, m, s).rss; };
  const auto [sigma, best] = boost::math::tools::brent_find_minima(rss, 1e-3, 16.0, 40);
  (void)best;
  const detail::LinearFit lf = detail::fit_for_sigma(r, m, sigma);
  if (!(sigma > 1e-3 * 1.01)) throw Error(ErrorCode::NonConvergentSeries, "fitted decay exponent <= 0");
  fit.limit = lf.m_inf;
  fit.sigma = sigma;
  const double rms = std::sqrt(lf.rss / static_cast<double>(r.size()));
  fit.error_estimate =
      std::max(std::abs(lf.m_inf - detail::richardson_limit(r[N - 1], m[N - 1], r[N], m[N], sigma)), rms);
  return fit;
}

struct SeriesPoint {
  double r = 0.0;
  double m_phi = 0.0;
  double gap_estimate = 0.0;
};

struct LimitResult {
  SeriesFit fit;
  std::vector<SeriesPoint> series;
};

/// lim_{r -> inf} m(phi) from the radii in q.
inline LimitResult mass_limit(const GraphFamily& family, const Vec& phi_coeffs, const QuadratureSpec& q) {
  q.validate();
  std::vector<double> m;
  for (double r : q.r_values) m.push_back(mass_functional_at_radius(family, phi_coeffs, r, q));
  double scale = 0.0;
  for (double v : m) scale = std::max(scale, std::abs(v));
  LimitResult out;
  out.fit = extrapolate_series(q.r_values, m, q.extrapolation, 1e-10 * std::max(1.0, scale));
  for (std::size_t i = 0; i < m.size(); ++i)
    out.series.push_back({q.r_values[i], m[i], std::abs(m[i] - out.fit.limit)});
  return out;
}

// ---------------------------------------------------------------------------
// Mass vector

struct MassVector {
  LorentzVector P;
  Vec P_error;
  std::vector<double> sigma;
  std::vector<std::vector<double>> raw;  // raw[k][i]: m(rho^(i)) at r_values[k]
  double m_squared = 0.0;
  CausalClass causal_class = CausalClass::Zero;
};

inline MassVector mass_vector(const GraphFamily& family, const QuadratureSpec& q) {
  q.validate();
  const int n = family.dim();
  MassVector mv;
  for (double r : q.r_values) mv.raw.push_back(mass_components_at_radius(family, r, q));
  double scale = 0.0;
  for (const auto& row : mv.raw)
    for (double v : row) scale = std::max(scale, std::abs(v));
  const double floor = 1e-10 * std::max(1.0, scale);
  mv.P = LorentzVector(Vec::Zero(n + 1));
  mv.P_error = Vec::Zero(n + 1);
  for (int i = 0; i <= n; ++i) {
    std::vector<double> m;
    for (const auto& row : mv.raw) m.push_back(row[i]);
    const SeriesFit f = extrapolate_series(q.r_values, m, q.extrapolation, floor);
    mv.P[i] = f.limit;
    mv.P_error[i] = f.error_estimate;
    mv.sigma.push_back(f.sigma);
  }
  mv.m_squared = std::abs(lorentz_inner(mv.P, mv.P));
  mv.causal_class = classify_causal(mv.P);
  return mv;
}

/// sqrt((P, P)) for timelike future P.
inline double balanced_mass(const LorentzVector& P) {
  if (classify_causal(P) != CausalClass::TimelikeFuture)
    throw Error(ErrorCode::NotTimelikeFuture, "balanced mass needs timelike future P");
  return std::sqrt(lorentz_inner(P, P));
}

/// min of m(phi) = c . P over `samples` random unit future c (c0^2 - |c'|^2 = 1).
inline double sampled_infimum(const LorentzVector& P, int samples, std::uint64_t seed) {
  const int n = P.size() - 1;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> rapidity(0.0, 3.0);
  double best = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    Vec dir(n);
    for (int i = 0; i < n; ++i) dir[i] = normal(rng);
    dir /= dir.norm();
    const double t = rapidity(rng);
    Vec c(n + 1);
    c[0] = std::cosh(t);
    c.tail(n) = std::sinh(t) * dir;
    best = std::min(best, c.dot(P.c));
  }
  return best;
}

// ---------------------------------------------------------------------------
// Bulk integral

struct RadialNode {
  double r;
  double weight;
};

/// Gauss-Legendre panels on [r_lo, r_outer] spaced geometrically in 1 + r - r_lo, with
/// r = r_lo + s^2 on the first panel when `sqrt_singular`, plus the tail t = r_outer / r.
inline std::vector<RadialNode> radial_rule(double r_lo, double r_outer, int panels, int degree,
                                           bool sqrt_singular) {
  std::vector<RadialNode> out;
  const GaussRule gl = gauss_legendre(degree, 0.0, 1.0);
  const double span = 1.0 + r_outer - r_lo;
  for (int p = 0; p < panels; ++p) {
    const double a = r_lo - 1.0 + std::pow(span, static_cast<double>(p) / panels);
    const double b = r_lo - 1.0 + std::pow(span, static_cast<double>(p + 1) / panels);
    for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
      if (p == 0 && sqrt_singular) {
        const double smax = std::sqrt(b - a);
        const double s = smax * gl.nodes[k];
        out.push_back({a + s * s, 2.0 * s * smax * gl.weights[k]});
      } else {
        out.push_back({a + (b - a) * gl.nodes[k], (b - a) * gl.weights[k]});
      }
    }
  }
  for (int p = 0; p < 2; ++p) {
    const double a = 0.5 * p, b = 0.5 * (p + 1);
    for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
      const double t = a + (b - a) * gl.nodes[k];
      out.push_back({r_outer / t, (b - a) * gl.weights[k] * r_outer / (t * t)});
    }
  }
  return out;
}

struct BulkResult {
  Estimate value;
  double min_scalar_excess = 0.0;   // min over nodes of R_g + n(n-1)
  double min_theta = 0.0;           // min over nodes of Theta
  double tail_exponent = -std::numeric_limits<double>::infinity();
  std::size_t evaluations = 0;
};

namespace detail {

struct BulkPass {
  double value;
  double min_excess;
  double min_theta;
  std::size_t evaluations;
};

inline BulkPass bulk_pass(const GraphFamily& family, const QuadratureSpec& q, double r_lo, bool singular,
                          int degree, int sphere_order) {
  const int n = family.dim();
  const auto radial = radial_rule(r_lo, q.r_outer, q.radial_panels, degree, singular);
  const auto nodes = sphere_quadrature(n - 1, sphere_order);
  const auto rows = parallel_evaluate_rows(radial.size(), 3, q.threads,
                                           [&](std::size_t i, std::span<double> out) {
    const double r = radial[i].r;
    std::vector<double> shell(nodes.size());
    double min_excess = std::numeric_limits<double>::infinity();
    double min_theta = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const GraphJet j = family.derivative_jets(sphere_point(r, nodes[k].theta));
      const ExtrinsicData e = extrinsic_data(j);
      shell[k] = 2.0 * e.S2 * (j.pot.rho / j.point.rho()) * nodes[k].weight;
      min_excess = std::min(min_excess, 2.0 * e.S2);
      min_theta = std::min(min_theta, e.Theta);
    }
    // Theta r dM = 2 S2 rho_chart dvol_b, dvol_b = r^{n-1} dr domega / rho
    out[0] = pairwise_sum(shell) * std::pow(r, n - 1) * radial[i].weight;
    out[1] = min_excess;
    out[2] = min_theta;
  });
  BulkPass pass{0.0, std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                radial.size() * nodes.size()};
  std::vector<double> col(radial.size());
  for (std::size_t i = 0; i < radial.size(); ++i) {
    col[i] = rows[3 * i];
    pass.min_excess = std::min(pass.min_excess, rows[3 * i + 1]);
    pass.min_theta = std::min(pass.min_theta, rows[3 * i + 2]);
  }
  pass.value = mass_constant(n) * pairwise_sum(col);
  return pass;
}

// Exponent p of max_theta r^{n-1} |R_g + n(n-1)| ~ r^p beyond r_outer; -inf when negligible.
inline double scalar_tail_exponent(const GraphFamily& family, double r0, double negligible) {
  const int n = family.dim();
  const auto nodes = sphere_quadrature(n - 1, 4);
  std::vector<double> lr, lg;
  bool all_small = true;
  for (int k = 0; k < 4; ++k) {
    const double r = r0 * std::pow(2.0, k);
    double g = 0.0;
    for (const auto& node : nodes) {
      const ExtrinsicData e = extrinsic_data(family.derivative_jets(sphere_point(r, node.theta)));
      g = std::max(g, std::pow(r, n - 1) * std::abs(2.0 * e.S2));
    }
    if (g * r > negligible) all_small = false;
    lr.push_back(std::log(r));
    lg.push_back(std::log(std::max(g, 1e-300)));
  }
  if (all_small) return -std::numeric_limits<double>::infinity();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lr.size(); ++i) {
    mx += lr[i] / lr.size();
    my += lg[i] / lg.size();
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lr.size(); ++i) {
    sxy += (lr[i] - mx) * (lg[i] - my);
    sxx += (lr[i] - mx) * (lr[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace detail

/// c_n int_M Theta (R_g + n(n-1)) dM over r >= r_lo, r_lo the inner boundary radius
/// (or q.r_min). The error estimate compares against a rule of two thirds the degree.
inline BulkResult bulk_mass(const GraphFamily& family, const QuadratureSpec& q) {
  q.validate();
  const auto& bd = family.boundary();
  const double r_lo = bd ? bd->radius : std::max(q.r_min, family.asymptotic_radius());
  const bool singular = bd && bd->sqrt_singular;
  BulkResult out;
  out.tail_exponent = detail::scalar_tail_exponent(family, q.r_outer, 1e-12);
  if (out.tail_exponent >= -1.0)
    throw Error(ErrorCode::NonIntegrableScalarCurvature,
                "scalar curvature tail decays like r^" + std::to_string(out.tail_exponent));
  const auto fine = detail::bulk_pass(family, q, r_lo, singular, q.radial_degree, q.sphere_order);
  const int coarse_degree = std::max(3, (2 * q.radial_degree) / 3);
  const int coarse_order = std::max(2, (2 * q.sphere_order) / 3);
  const auto coarse = detail::bulk_pass(family, q, r_lo, singular, coarse_degree, coarse_order);
  out.value = {fine.value, std::abs(fine.value - coarse.value)};
  out.min_scalar_excess = fine.min_excess;
  out.min_theta = fine.min_theta;
  out.evaluations = fine.evaluations + coarse.evaluations;
  return out;
}

// ---------------------------------------------------------------------------
// Inner boundary

struct HorizonResult {
  Estimate term;               // c_n int_Gamma weight S1(Gamma) dGamma
  double area = 0.0;           // |Gamma|
  double s1_integral = 0.0;    // int_Gamma S1(Gamma) dGamma
  double max_defect = 0.0;     // max |<N, xi>|
  double min_s1 = 0.0;
  double mean_curv_min = 0.0;  // of Gamma inside M
  double mean_curv_max = 0.0;
  bool orthogonal = false;
};

inline bool same_wall(const WallSpec& a, const WallSpec& b) {
  return a.kind == b.kind && a.d == b.d && a.sign == b.sign && a.t0 == b.t0 && a.c == b.c;
}

namespace detail {

inline HorizonResult horizon_pass(const GraphFamily& family, const WallSpec& wall, int order) {
  const int n = family.dim();
  const InnerBoundary& bd = *family.boundary();
  const double r = bd.radius;
  const double r_probe = bd.sqrt_singular ? r * (1.0 + 1e-10) : r;
  const auto nodes = sphere_quadrature(n - 1, order);
  std::vector<double> term(nodes.size()), s1(nodes.size()), area(nodes.size());
  HorizonResult out;
  out.min_s1 = out.mean_curv_min = std::numeric_limits<double>::infinity();
  out.mean_curv_max = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    GraphJet j = family.jets(sphere_point(r_probe, nodes[k].theta));
    // Gamma is the limit r -> radius; the probe sits on it up to the offset above.
    if (bd.sqrt_singular) j.u = wall.jet(j.point).u;
    const BoundaryFrameData f = boundary_frame_data(j, bd.conormal_hint, wall);
    const double da = std::pow(r, n - 1) * nodes[k].weight;
    term[k] = f.weight * f.S1_Gamma * da;
    s1[k] = f.S1_Gamma * da;
    area[k] = da;
    out.max_defect = std::max(out.max_defect, f.orthogonality_defect);
    out.min_s1 = std::min(out.min_s1, f.S1_Gamma);
    out.mean_curv_min = std::min(out.mean_curv_min, f.mean_curv_in_M);
    out.mean_curv_max = std::max(out.mean_curv_max, f.mean_curv_in_M);
  }
  out.term.value = mass_constant(n) * pairwise_sum(term);
  out.s1_integral = pairwise_sum(s1);
  out.area = pairwise_sum(area);
  out.orthogonal = out.max_defect <= 1e-4;
  return out;
}

}  // namespace detail

inline HorizonResult horizon_term(const GraphFamily& family, const WallSpec& wall, const QuadratureSpec& q) {
  if (!family.boundary()) throw Error(ErrorCode::WallMismatch, "family has no inner boundary");
  if (!same_wall(family.boundary()->wall, wall))
    throw Error(ErrorCode::WallMismatch, "wall differs from the family's inner boundary wall");
  HorizonResult fine = detail::horizon_pass(family, wall, q.sphere_order);
  const HorizonResult coarse = detail::horizon_pass(family, wall, std::max(2, (2 * q.sphere_order) / 3));
  fine.term.error = std::abs(fine.term.value - coarse.term.value);
  return fine;
}

// ---------------------------------------------------------------------------
// Reports

struct MassReport {
  MassVector vector;
  std::optional<double> balanced_mass;
  std::optional<double> sampled_infimum;
  std::vector<SeriesPoint> boundary_series;  // phi = rho
  std::optional<BulkResult> bulk;
  std::optional<HorizonResult> horizon;
  std::optional<double> consistency_gap;
  std::size_t evaluations = 0;
};

/// Mass vector, balanced mass, the phi = rho boundary series, and the bulk path
/// (bulk + inner boundary term) for rotationally symmetric or boundaryless families.
inline MassReport mass_report(const GraphFamily& family, const QuadratureSpec& q, std::uint64_t seed,
                              bool with_bulk = true) {
  const int n = family.dim();
  MassReport rep;
  rep.vector = mass_vector(family, q);
  const std::size_t sphere_nodes = sphere_quadrature(n - 1, q.sphere_order).size();
  rep.evaluations = q.r_values.size() * sphere_nodes;
  const SeriesFit f0{rep.vector.P[0], rep.vector.P_error[0], rep.vector.sigma[0]};
  for (std::size_t k = 0; k < q.r_values.size(); ++k) {
    const double m = rep.vector.raw[k][0];
    rep.boundary_series.push_back({q.r_values[k], m, std::abs(m - f0.limit)});
  }
  if (rep.vector.causal_class == CausalClass::TimelikeFuture) {
    rep.balanced_mass = balanced_mass(rep.vector.P);
    rep.sampled_infimum = sampled_infimum(rep.vector.P, 100, seed);
  }
  const bool bulk_applies = family.rotationally_symmetric() || family.asymptotic_radius() == 0.0;
  if (with_bulk && bulk_applies) {
    rep.bulk = bulk_mass(family, q);
    rep.evaluations += rep.bulk->evaluations;
    double total = rep.bulk->value.value;
    if (family.boundary()) {
      rep.horizon = horizon_term(family, family.boundary()->wall, q);
      total += rep.horizon->term.value;
    }
    rep.consistency_gap = std::abs(rep.vector.P[0] - total);
  }
  return rep;
}

struct PenroseFlags {
  bool orthogonal = false;
  bool mean_convex = false;
  bool dominant_energy = false;
  bool timelike_future = false;
  bool balanced = false;             // informational: P spatial part negligible
  bool alexandrov_fenchel_applies = false;  // horosphere wall: Gamma lies in a flat space
  bool hypotheses_met() const { return orthogonal && mean_convex && dominant_energy && timelike_future; }
};

struct PenroseReport {
  double area = 0.0;
  double mass = 0.0;
  double mass_error = 0.0;
  double rhs_chi = 0.0;        // (1/2)(A/omega)^{(n-2)/(n-1)}
  double rhs_hyperbolic = 0.0; // (1/2)[(A/omega)^{(n-2)/(n-1)} + (A/omega)^{n/(n-1)}]
  double margin_chi = 0.0;
  double margin_hyperbolic = 0.0;
  double af_bound = 0.0;       // (n-1) omega^{1/(n-1)} A^{(n-2)/(n-1)}
  double s1_integral = 0.0;
  double af_margin = 0.0;
  double min_scalar_excess = 0.0;
  MassReport mass_report;
  PenroseFlags flags;
};

inline PenroseReport penrose_report(const GraphFamily& family, const WallSpec& wall, const QuadratureSpec& q,
                                    std::uint64_t seed) {
  if (!family.boundary()) throw Error(ErrorCode::WallMismatch, "family has no inner boundary");
  const int n = family.dim();
  PenroseReport rep;
  rep.mass_report = mass_report(family, q, seed, true);
  const MassReport& mr = rep.mass_report;
  const HorizonResult& hz = mr.horizon ? *mr.horizon : horizon_term(family, wall, q);
  if (!same_wall(family.boundary()->wall, wall))
    throw Error(ErrorCode::WallMismatch, "wall differs from the family's inner boundary wall");
  const double omega = sphere_area(n - 1);
  rep.area = hz.area;
  const double ratio = rep.area / omega;
  rep.rhs_chi = 0.5 * std::pow(ratio, (n - 2.0) / (n - 1.0));
  rep.rhs_hyperbolic = rep.rhs_chi + 0.5 * std::pow(ratio, n / (n - 1.0));
  rep.flags.timelike_future = mr.vector.causal_class == CausalClass::TimelikeFuture;
  rep.mass = mr.balanced_mass.value_or(mr.vector.P[0]);
  rep.mass_error = mr.vector.P_error.norm();
  rep.margin_chi = rep.mass - rep.rhs_chi;
  rep.margin_hyperbolic = rep.mass - rep.rhs_hyperbolic;
  rep.af_bound = (n - 1.0) * std::pow(omega, 1.0 / (n - 1.0)) * std::pow(rep.area, (n - 2.0) / (n - 1.0));
  rep.s1_integral = hz.s1_integral;
  rep.af_margin = rep.s1_integral - rep.af_bound;
  rep.min_scalar_excess = mr.bulk ? mr.bulk->min_scalar_excess : 0.0;
  rep.flags.orthogonal = hz.orthogonal;
  rep.flags.mean_convex = hz.min_s1 >= 0.0;
  rep.flags.dominant_energy = rep.min_scalar_excess >= -1e-8;
  rep.flags.balanced = rep.flags.timelike_future &&
                       mr.vector.P.c.tail(n).norm() <= 1e-8 * std::abs(mr.vector.P[0]);
  rep.flags.alexandrov_fenchel_applies = wall.kind == WallKind::Horosphere;
  return rep;
}

// ---------------------------------------------------------------------------
// Decay

struct DecayEstimate {
  double tau_hat = 0.0;
  bool admissible = false;
  double scalar_tail_exponent = 0.0;
};

/// Log-log fit over a decade of max_theta (sum |rho u_a| + sum |rho_b u_a + rho u_ab|) ~ r^{-tau/2}
/// and of the scalar-curvature integrand tail.
inline DecayEstimate decay_estimate(const GraphFamily& family, const QuadratureSpec& q, double r_start = 100.0) {
  const int n = family.dim();
  const double r0 = std::max(r_start, 10.0 * family.asymptotic_radius());
  const auto nodes = sphere_quadrature(n - 1, std::min(q.sphere_order, 8));
  std::vector<double> lr, ld;
  bool vanishes = true;
  for (int k = 0; k <= 8; ++k) {
    const double r = r0 * std::pow(10.0, k / 8.0);
    double worst = 0.0;
    for (const auto& node : nodes) {
      const GraphJet j = family.derivative_jets(detail::sphere_point(r, node.theta));
      const double rho = j.pot.rho;
      const Mat t = j.u_alpha * j.pot.rho_alpha.transpose() + rho * j.u_alphabeta;
      worst = std::max(worst, (rho * j.u_alpha).cwiseAbs().sum() + t.cwiseAbs().sum());
    }
    if (worst > 1e-200) vanishes = false;
    lr.push_back(std::log(r));
    ld.push_back(std::log(std::max(worst, 1e-300)));
  }
  DecayEstimate out;
  if (vanishes) {
    out.tau_hat = std::numeric_limits<double>::infinity();
  } else {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lr.size(); ++i) {
      mx += lr[i] / lr.size();
      my += ld[i] / ld.size();
    }
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < lr.size(); ++i) {
      sxy += (lr[i] - mx) * (ld[i] - my);
      sxx += (lr[i] - mx) * (lr[i] - mx);
    }
    out.tau_hat = -2.0 * sxy / sxx;
  }
  out.scalar_tail_exponent = detail::scalar_tail_exponent(family, r0, 1e-12);
  out.admissible = out.tau_hat > 0.5 * n + 0.05 && out.scalar_tail_exponent < -1.0;
  return out;
}

}  // namespace ahmass
