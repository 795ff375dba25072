#pragma once

// Built-in graph families. Radial profiles u = f(rho) get their jets from the chain
// rule with Hess rho = rho b; non-radial families are restrictions of ambient
// functions F(z) to the hyperboloid.

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/differentiation/autodiff.hpp>
#include <boost/math/tools/roots.hpp>
#include <unsupported/Eigen/Splines>

#include "ahmass/error.hpp"
#include "ahmass/graph_geometry.hpp"
#include "ahmass/linalg.hpp"
#include "ahmass/model_space.hpp"
#include "ahmass/sphere_quadrature.hpp"

namespace ahmass {

/// f, df/drho, d^2f/drho^2.
struct RadialJet {
  double f = 0.0;
  double df = 0.0;
  double d2f = 0.0;
};

namespace detail {

class FamilyImpl {
 public:
  virtual ~FamilyImpl() = default;
  /// With `with_value` false the height u may be left as NaN (it is never needed by
  /// the curvature formulas, only by wall checks and self-tests).
  virtual GraphJet jets(const HyperPoint& p, bool with_value) const = 0;
};

inline GraphJet radial_jet(const HyperPoint& p, const RadialJet& f) {
  const Vec drho = p.grad_rho();
  return make_jet(p, f.f, f.df * drho,
                  f.d2f * (drho * drho.transpose()) + (f.df * p.rho()) * identity(p.dim()));
}

// rho^2 = 1 + r^2, so d/drho = (rho/r) d/dr.
inline RadialJet from_r_derivatives(double u, double r, double ur, double urr) {
  const double rho2 = 1.0 + r * r;
  return {u, ur * std::sqrt(rho2) / r, urr * rho2 / (r * r) - ur / (r * r * r)};
}

template <class F>
RadialJet autodiff_radial(const F& f, double rho) {
  using boost::math::differentiation::make_fvar;
  const auto y = f(make_fvar<double, 2>(rho));
  return {static_cast<double>(y.derivative(0)), static_cast<double>(y.derivative(1)),
          static_cast<double>(y.derivative(2))};
}

/// Value and first derivative of g at r.
template <class F>
std::pair<double, double> autodiff_first(const F& g, double r) {
  using boost::math::differentiation::make_fvar;
  const auto y = g(make_fvar<double, 1>(r));
  return {static_cast<double>(y.derivative(0)), static_cast<double>(y.derivative(1))};
}

/// Jets of the restriction of an ambient function with gradient dF and Hessian d2F.
inline GraphJet ambient_jet(const HyperPoint& p, double value, const Vec& dF, const Mat& d2F) {
  const Mat e = p.frame();
  return make_jet(p, value, e.transpose() * dF,
                  e.transpose() * d2F * e + p.z().dot(dF) * identity(p.dim()));
}

template <class F>
class AnalyticRadial final : public FamilyImpl {
 public:
  explicit AnalyticRadial(F f) : f_(std::move(f)) {}
  GraphJet jets(const HyperPoint& p, bool) const override {
    return radial_jet(p, autodiff_radial(f_, p.rho()));
  }

 private:
  F f_;
};

template <class F>
std::shared_ptr<const FamilyImpl> analytic_radial(F f) {
  return std::make_shared<AnalyticRadial<F>>(std::move(f));
}

/// u(r) = u0 + int_{r0}^r u_r on geometric panels with Gauss-Legendre nodes. With
/// `sqrt_singular` the first panel uses r = r0 + s^2, which absorbs u_r ~ (r-r0)^{-1/2}.
class RadialHeight {
 public:
  RadialHeight(std::function<double(double)> ur, double r0, double u0, bool sqrt_singular)
      : ur_(std::move(ur)), r0_(r0), u0_(u0), singular_(sqrt_singular), rule_(gauss_legendre(24)) {
    double r = r0_;
    double acc = u0_;
    knots_.push_back(r);
    cumulative_.push_back(acc);
    const double r_end = 1e9 * std::max(1.0, r0_);
    while (r < r_end) {
      const double next = std::max(1.5 * r, r + 0.25);
      acc += panel(r, next);
      r = next;
      knots_.push_back(r);
      cumulative_.push_back(acc);
    }
  }

  double operator()(double r) const {
    if (r < r0_) throw Error(ErrorCode::RadiusInsideCore, "height queried inside the inner radius");
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), r);
    const std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - knots_.begin() - 1, 0));
    if (i + 1 >= knots_.size()) throw Error(ErrorCode::BadParams, "radius beyond the height table");
    return cumulative_[i] + panel(knots_[i], r);
  }

 private:
  double panel(double a, double b) const {
    if (b <= a) return 0.0;
    double s = 0.0;
    if (singular_ && a == r0_) {
      const double smax = std::sqrt(b - a);
      for (std::size_t k = 0; k < rule_.nodes.size(); ++k) {
        const double t = 0.5 * smax * (rule_.nodes[k] + 1.0);
        // 2 t ur(a + t^2) taken at the representable offset, finite as t -> 0
        double r = a + t * t;
        if (r == a) r = std::nextafter(a, std::numeric_limits<double>::infinity());
        s += rule_.weights[k] * 2.0 * std::sqrt(r - a) * ur_(r);
      }
      return 0.5 * smax * s;
    }
    for (std::size_t k = 0; k < rule_.nodes.size(); ++k)
      s += rule_.weights[k] * ur_(a + 0.5 * (b - a) * (rule_.nodes[k] + 1.0));
    return 0.5 * (b - a) * s;
  }

  std::function<double(double)> ur_;
  double r0_;
  double u0_;
  bool singular_;
  GaussRule rule_;
  std::vector<double> knots_;
  std::vector<double> cumulative_;
};

/// Radial profile given through u_r(r) (templated for autodiff) and an integrated height.
template <class Ur>
class IntegratedRadial final : public FamilyImpl {
 public:
  IntegratedRadial(Ur ur, double r0, double u0, bool singular)
      : ur_(std::move(ur)),
        r0_(r0),
        singular_(singular),
        height_([ur = ur_](double r) { return ur(r); }, r0, u0, singular) {}

  GraphJet jets(const HyperPoint& p, bool with_value) const override {
    // points placed on r0 may come back a few ulps inside it
    const double r = (p.r() < r0_ && p.r() >= r0_ * (1.0 - 16.0 * std::numeric_limits<double>::epsilon())) ? r0_ : p.r();
    if (r < r0_ || (singular_ && r == r0_))
      throw Error(ErrorCode::RadiusInsideCore, "point inside the inner radius");
    const auto [ur, urr] = autodiff_first(ur_, r);
    const double u = with_value ? height_(r) : std::nan("");
    return radial_jet(p, from_r_derivatives(u, r, ur, urr));
  }

  double ur(double r) const { return ur_(r); }

 private:
  Ur ur_;
  double r0_;
  bool singular_;
  RadialHeight height_;
};

class DecayImpl final : public FamilyImpl {
 public:
  DecayImpl(std::shared_ptr<const FamilyImpl> base, double eps, double tau, double mode)
      : base_(std::move(base)), eps_(eps), k_(0.5 * tau + 1.0), mode_(mode) {}

  // F = eps (z0^{-k} + mode z1 z0^{-k-1}), i.e. eps rho^{-k} (1 + mode rho^(1)/rho).
  GraphJet jets(const HyperPoint& p, bool with_value) const override {
    GraphJet base = base_->jets(p, with_value);
    const int n = p.dim();
    const double z0 = p.z()[0], z1 = p.z()[1], k = k_, a = mode_;
    const double pk = std::pow(z0, -k);
    Vec dF = Vec::Zero(n + 1);
    Mat d2F = Mat::Zero(n + 1, n + 1);
    const double value = eps_ * (pk + a * z1 * pk / z0);
    dF[0] = eps_ * (-k * pk / z0 - (k + 1.0) * a * z1 * pk / (z0 * z0));
    dF[1] = eps_ * a * pk / z0;
    d2F(0, 0) = eps_ * (k * (k + 1.0) * pk / (z0 * z0) +
                        (k + 1.0) * (k + 2.0) * a * z1 * pk / (z0 * z0 * z0));
    d2F(0, 1) = d2F(1, 0) = -eps_ * (k + 1.0) * a * pk / (z0 * z0);
    const GraphJet pert = ambient_jet(p, value, dF, d2F);
    return make_jet(p, base.u + pert.u, base.u_alpha + pert.u_alpha,
                    base.u_alphabeta + pert.u_alphabeta);
  }

 private:
  std::shared_ptr<const FamilyImpl> base_;
  double eps_;
  double k_;
  double mode_;
};

/// Chart moved by an isometry A of the slice: the pushed-forward metric is
/// b + (rho o A^{-1})^2 d(u o A^{-1})^2, so the height and the warping potential are both
/// pulled back and the frame is rotated.
class TransformedImpl final : public FamilyImpl {
 public:
  TransformedImpl(std::shared_ptr<const FamilyImpl> base, Isometry a)
      : base_(std::move(base)), a_(std::move(a)), a_inv_(a_.inverse()) {}

  GraphJet jets(const HyperPoint& p, bool with_value) const override {
    const HyperPoint q = a_inv_.apply(p);
    const GraphJet jq = base_->jets(q, with_value);
    const Mat eta = minkowski_metric(p.dim() + 1);
    // Components of A^{-1} e_a(p) in the frame at q (spacelike frame vectors have norm -1).
    const Mat rot = -q.frame().transpose() * eta * a_inv_.matrix() * p.frame();
    PotentialJet pot{jq.pot.rho, rot.transpose() * jq.pot.rho_alpha, jq.pot.hess_rho};
    return make_jet(p, jq.u, rot.transpose() * jq.u_alpha, rot.transpose() * jq.u_alphabeta * rot,
                    std::move(pot));
  }

 private:
  std::shared_ptr<const FamilyImpl> base_;
  Isometry a_;
  Isometry a_inv_;
};

}  // namespace detail

/// Interpolating cubic spline through (rho_i, f_i); C^2 and exact on cubics.
class SplineProfile {
 public:
  explicit SplineProfile(const std::vector<std::array<double, 2>>& table) {
    if (table.size() < 4) throw Error(ErrorCode::BadParams, "spline table needs at least 4 rows");
    for (std::size_t i = 0; i < table.size(); ++i) {
      if (!std::isfinite(table[i][0]) || !std::isfinite(table[i][1]))
        throw Error(ErrorCode::BadParams, "spline table entries must be finite");
      if (i > 0 && !(table[i][0] > table[i - 1][0]))
        throw Error(ErrorCode::NonMonotone, "spline rho column must be strictly increasing");
    }
    if (table.front()[0] < 1.0) throw Error(ErrorCode::SplineDomain, "rho values must be >= 1");
    lo_ = table.front()[0];
    hi_ = table.back()[0];
    const auto count = static_cast<Eigen::Index>(table.size());
    Eigen::RowVectorXd values(count), params(count);
    for (Eigen::Index i = 0; i < count; ++i) {
      params[i] = (table[i][0] - lo_) / (hi_ - lo_);
      values[i] = table[i][1];
    }
    spline_ = Eigen::SplineFitting<Spline>::Interpolate(values, 3, params);
  }

  double lo() const { return lo_; }
  double hi() const { return hi_; }

  RadialJet operator()(double rho) const {
    if (!(rho >= lo_ && rho <= hi_))
      throw Error(ErrorCode::SplineDomain, "rho = " + std::to_string(rho) + " outside the table");
    const double t = std::clamp((rho - lo_) / (hi_ - lo_), 0.0, 1.0);
    const auto d = spline_.derivatives(t, 2);
    const double scale = 1.0 / (hi_ - lo_);
    return {d(0, 0), d(0, 1) * scale, d(0, 2) * scale * scale};
  }

 private:
  using Spline = Eigen::Spline<double, 1, 3>;
  Spline spline_;
  double lo_ = 1.0;
  double hi_ = 1.0;
};

inline SplineProfile spline_profile(const std::vector<std::array<double, 2>>& table) {
  return SplineProfile(table);
}

/// Inner boundary Gamma = {r = radius} lying on `wall`. `conormal_hint` is +1 when
/// grad(u - v) points away from the enclosed region r < radius. With `sqrt_singular`
/// du/dr blows up like (r - radius)^{-1/2} at Gamma, so jets exist only for r > radius.
struct InnerBoundary {
  WallSpec wall;
  double radius = 0.0;
  int conormal_hint = +1;
  bool sqrt_singular = false;
};

class GraphFamily {
 public:
  GraphFamily(std::string name, int n, std::map<std::string, double> params,
              std::shared_ptr<const detail::FamilyImpl> impl,
              std::optional<InnerBoundary> boundary = std::nullopt,
              std::optional<double> declared_tau = std::nullopt, bool rotational = false,
              std::optional<double> asymptotic_radius = std::nullopt)
      : name_(std::move(name)),
        n_(n),
        params_(std::move(params)),
        impl_(std::move(impl)),
        boundary_(std::move(boundary)),
        declared_tau_(declared_tau),
        rotational_(rotational),
        core_radius_(asymptotic_radius.value_or(boundary_ ? boundary_->radius : 0.0)) {
    detail::check_dim(n_);
  }

  const std::string& name() const { return name_; }
  int dim() const { return n_; }
  const std::map<std::string, double>& params() const { return params_; }
  const std::optional<InnerBoundary>& boundary() const { return boundary_; }
  std::optional<double> declared_tau() const { return declared_tau_; }
  bool rotationally_symmetric() const { return rotational_; }
  /// Radius inside which the family may be undefined (0 when it is global).
  double asymptotic_radius() const { return core_radius_; }

  GraphJet jets(const HyperPoint& p) const { return impl_->jets(check(p), true); }
  GraphJet jets(const DiskPoint& x) const { return jets(HyperPoint::from_disk(x)); }
  /// Jets without the height value (u is NaN); cheaper for integral profiles.
  GraphJet derivative_jets(const HyperPoint& p) const { return impl_->jets(check(p), false); }

  std::shared_ptr<const detail::FamilyImpl> impl() const { return impl_; }

 private:
  const HyperPoint& check(const HyperPoint& p) const {
    if (p.dim() != n_) throw Error(ErrorCode::DimensionMismatch, "point dimension differs from family");
    return p;
  }

  std::string name_;
  int n_;
  std::map<std::string, double> params_;
  std::shared_ptr<const detail::FamilyImpl> impl_;
  std::optional<InnerBoundary> boundary_;
  std::optional<double> declared_tau_;
  bool rotational_;
  double core_radius_;
};

// ---------------------------------------------------------------------------
// Constructors

inline GraphFamily zero_family(int n) {
  return GraphFamily("zero", n, {}, detail::analytic_radial([](auto rho) { return 0.0 * rho; }),
                     std::nullopt, std::nullopt, true);
}

inline GraphFamily constant_family(int n, double t0) {
  return GraphFamily("constant", n, {{"t0", t0}},
                     detail::analytic_radial([t0](auto rho) { return 0.0 * rho + t0; }),
                     std::nullopt, std::nullopt, true);
}

inline GraphFamily horosphere_family(int n, double d, int sign) {
  WallSpec::horosphere(d, sign).validate();
  const double s = sign;
  return GraphFamily("horosphere", n, {{"d", d}, {"sign", s}},
                     detail::analytic_radial([d, s](auto rho) {
                       using std::log;
                       return d + s * log(rho);
                     }),
                     std::nullopt, std::nullopt, true);
}

inline GraphFamily sigma_c_family(int n, double c) {
  if (!std::isfinite(c)) throw Error(ErrorCode::BadParams, "c must be finite");
  return GraphFamily("sigma_c", n, {{"c", c}},
                     detail::analytic_radial([c](auto rho) { return c / rho; }), std::nullopt,
                     std::nullopt, true);
}

/// u = arcsinh(c~/rho): the points at signed distance s = arcsinh(c~) from the slice.
inline GraphFamily true_equidistant_family(int n, double c_tilde) {
  if (!std::isfinite(c_tilde)) throw Error(ErrorCode::BadParams, "c_tilde must be finite");
  return GraphFamily("true_equidistant", n, {{"c_tilde", c_tilde}},
                     detail::analytic_radial([c_tilde](auto rho) {
                       using std::asinh;
                       return asinh(c_tilde / rho);
                     }),
                     std::nullopt, std::nullopt, true);
}

inline GraphFamily radial_power_family(int n, double a, double p) {
  if (!std::isfinite(a) || !std::isfinite(p)) throw Error(ErrorCode::BadParams, "a, p must be finite");
  return GraphFamily("radial_power", n, {{"a", a}, {"p", p}},
                     detail::analytic_radial([a, p](auto rho) {
                       using std::pow;
                       return a * pow(rho, p);
                     }),
                     std::nullopt, std::nullopt, true);
}

namespace detail {

class SplineRadial final : public FamilyImpl {
 public:
  explicit SplineRadial(SplineProfile s) : s_(std::move(s)) {}
  GraphJet jets(const HyperPoint& p, bool) const override { return radial_jet(p, s_(p.rho())); }

 private:
  SplineProfile s_;
};

}  // namespace detail

inline GraphFamily radial_spline_family(int n, const std::vector<std::array<double, 2>>& table) {
  return GraphFamily("radial_spline", n, {{"rows", static_cast<double>(table.size())}},
                     std::make_shared<detail::SplineRadial>(SplineProfile(table)), std::nullopt,
                     std::nullopt, true);
}

/// Radius where V(r) = 1 + r^2 - 2 mu r^{2-n} vanishes.
inline double horizon_radius(int n, double mu) {
  detail::check_dim(n);
  if (!(mu > 0.0) || (n == 2 && !(mu > 0.5)))
    throw Error(ErrorCode::BadParams, "mass parameter admits no horizon");
  auto v = [n, mu](double r) { return 1.0 + r * r - 2.0 * mu * std::pow(r, 2 - n); };
  double lo = 1.0, hi = 1.0;
  while (v(lo) >= 0.0) lo *= 0.5;
  while (v(hi) <= 0.0) hi *= 2.0;
  if (v(1.0) == 0.0) return 1.0;
  std::uintmax_t iters = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(
      v, lo, hi, boost::math::tools::eps_tolerance<double>(53), iters);
  return 0.5 * (a + b);
}

/// Upper branch of the graph inducing the AdS-Schwarzschild slice dr^2/V + r^2 domega^2,
/// with u(r_h) = t0; Gamma = {r = r_h} lies on the totally geodesic slice {t = t0}.
inline GraphFamily ads_schwarzschild_family(int n, double m, double t0 = 0.0) {
  const double rh = horizon_radius(n, m);
  auto ur = [n, m](auto r) {
    using std::pow;
    using std::sqrt;
    const auto q = 2.0 * m * pow(r, 2 - n);
    return sqrt(q) / ((1.0 + r * r) * sqrt(1.0 + r * r - q));
  };
  auto impl = std::make_shared<detail::IntegratedRadial<decltype(ur)>>(ur, rh, t0, true);
  return GraphFamily("ads_schwarzschild", n, {{"m", m}, {"t0", t0}, {"r_h", rh}}, impl,
                     InnerBoundary{WallSpec::geodesic_slice(t0), rh, +1, true}, std::nullopt, true);
}

namespace detail {

struct CapProfile {
  int n;
  double r_gamma, mu_gamma, a, width;

  template <class T>
  T mu(T r) const {
    using std::exp;
    const T x = (r - r_gamma) / width;
    return mu_gamma + a * (1.0 - exp(-x * x));
  }
  // Downward branch with g_rr = 1/V, V = 1 + r^2 - 2 mu(r) r^{2-n}.
  template <class T>
  T operator()(T r) const {
    using std::pow;
    using std::sqrt;
    const T q = 2.0 * mu(r) * pow(r, 2 - n);
    return -sqrt(q / (1.0 + r * r - q)) / (1.0 + r * r);
  }
};

inline double signed_wall_cosine(const GraphJet& j, const WallSpec& wall) {
  const GraphJet wj = wall.jet(j.point);
  return graph_normal(j.pot.rho, j.u_alpha).dot(graph_normal(j.pot.rho, wj.u_alpha));
}

}  // namespace detail

/// Rotationally symmetric graph over r >= r_gamma meeting the horosphere u = d + log rho
/// along r = r_gamma. The mass aspect mu(r) = mu_G + a(1 - exp(-((r - r_G)/w)^2)) is
/// nondecreasing for a >= 0; mu_G is fixed by shooting on the slope at the wall so the
/// meeting is orthogonal.
inline GraphFamily horosphere_cap_family(int n, double r_gamma, double d, double a, double width) {
  detail::check_dim(n);
  if (n < 2 || !(r_gamma > 0.0) || !std::isfinite(d) || !std::isfinite(a) || !(width > 0.0))
    throw Error(ErrorCode::BadParams, "horosphere cap needs r_gamma > 0, width > 0");
  const WallSpec wall = WallSpec::horosphere(d, +1);
  const double rho_g = std::sqrt(1.0 + r_gamma * r_gamma);
  Vec theta = Vec::Zero(n);
  theta[0] = 1.0;
  const HyperPoint probe = HyperPoint::from_polar(PolarPoint(r_gamma, theta));

  // Slope s = du/dr at the wall determines mu_G: V = rho^2/(1 + s^2 rho^4).
  auto mu_from_slope = [&](double s) {
    const double v = rho_g * rho_g / (1.0 + s * s * std::pow(rho_g, 4));
    return 0.5 * (rho_g * rho_g - v) * std::pow(r_gamma, n - 2);
  };
  auto defect = [&](double s) {
    const double ur = s;
    const double urr = 0.0;  // first-order data only
    const GraphJet j = detail::radial_jet(
        probe, detail::from_r_derivatives(wall.profile(rho_g)[0], r_gamma, ur, urr));
    return detail::signed_wall_cosine(j, wall);
  };
  auto tol = [](double lo, double hi) { return std::abs(hi - lo) <= 1e-10; };
  const auto [s_lo, s_hi] = boost::math::tools::bisect(defect, -10.0, -1e-12, tol);
  const double mu_gamma = mu_from_slope(0.5 * (s_lo + s_hi));

  if (mu_gamma + a < 0.0) throw Error(ErrorCode::BadParams, "mass aspect becomes negative");
  const detail::CapProfile profile{n, r_gamma, mu_gamma, a, width};
  for (double r = r_gamma; r < 1e6; r *= 1.05) {
    const double v = 1.0 + r * r - 2.0 * profile.mu(r) * std::pow(r, 2 - n);
    if (!(v > 0.0)) throw Error(ErrorCode::BadParams, "cap profile develops a horizon");
  }
  auto impl = std::make_shared<detail::IntegratedRadial<detail::CapProfile>>(
      profile, r_gamma, wall.profile(rho_g)[0], false);
  return GraphFamily("horosphere_cap", n,
                     {{"r_gamma", r_gamma}, {"d", d}, {"a", a}, {"width", width}, {"mu_gamma", mu_gamma}},
                     impl, InnerBoundary{wall, r_gamma, -1, false}, std::nullopt, true);
}

/// base + eps rho^{-(tau/2+1)} (1 + mode rho^(1)/rho); the frame jets then decay like
/// r^{-tau/2} in the sense of the admissibility condition.
inline GraphFamily decay_perturbation_family(const GraphFamily& base, double eps, double tau,
                                             double mode) {
  if (!std::isfinite(eps) || !(tau > 0.0) || !std::isfinite(mode))
    throw Error(ErrorCode::BadParams, "decay perturbation needs finite eps, mode and tau > 0");
  auto params = base.params();
  params["epsilon"] = eps;
  params["tau"] = tau;
  params["mode"] = mode;
  return GraphFamily("decay_perturbation(" + base.name() + ")", base.dim(), params,
                     std::make_shared<detail::DecayImpl>(base.impl(), eps, tau, mode),
                     base.boundary(), tau, base.rotationally_symmetric() && mode == 0.0);
}

/// The family seen through the chart A o Psi. An inner boundary survives only when A
/// fixes the origin; otherwise it is dropped and the core radius grows to cover the
/// displaced core.
inline GraphFamily transformed_family(const GraphFamily& base, const Isometry& a) {
  if (a.dim() != base.dim()) throw Error(ErrorCode::DimensionMismatch, "isometry dimension");
  const double shift = std::acosh(std::max(1.0, a.matrix()(0, 0)));
  const bool fixes_origin = shift < 1e-12;
  const double core =
      base.asymptotic_radius() > 0.0 ? std::sinh(std::asinh(base.asymptotic_radius()) + shift) : 0.0;
  return GraphFamily("transformed(" + base.name() + ")", base.dim(), base.params(),
                     std::make_shared<detail::TransformedImpl>(base.impl(), a),
                     fixes_origin ? base.boundary() : std::nullopt, base.declared_tau(),
                     base.rotationally_symmetric() && fixes_origin, core);
}

// ---------------------------------------------------------------------------
// Config-driven construction

struct FamilySpec {
  std::string kind = "zero";
  int n = 3;
  std::map<std::string, double> params;
  std::vector<std::array<double, 2>> table;
  std::string base = "zero";
};

namespace detail {

inline double take(std::map<std::string, double>& p, const std::string& key, double fallback) {
  const auto it = p.find(key);
  if (it == p.end()) return fallback;
  const double v = it->second;
  p.erase(it);
  return v;
}

inline void ensure_consumed(const std::map<std::string, double>& p, const std::string& kind) {
  if (!p.empty())
    throw Error(ErrorCode::BadParams, "unknown parameter '" + p.begin()->first + "' for " + kind);
}

inline int as_int(double v, const std::string& what) {
  if (v != std::floor(v)) throw Error(ErrorCode::BadParams, what + " must be an integer");
  return static_cast<int>(v);
}

}  // namespace detail

inline GraphFamily make_family(const FamilySpec& spec) {
  using detail::take;
  std::map<std::string, double> p = spec.params;
  std::map<std::string, double> base_params;
  for (auto it = p.begin(); it != p.end();) {
    if (it->first.rfind("base_", 0) == 0) {
      base_params[it->first.substr(5)] = it->second;
      it = p.erase(it);
    } else {
      ++it;
    }
  }
  const int n = spec.n;
  detail::check_dim(n);
  const std::string& k = spec.kind;
  std::optional<GraphFamily> fam;
  if (k == "zero") {
    fam = zero_family(n);
  } else if (k == "constant") {
    fam = constant_family(n, take(p, "t0", 0.0));
  } else if (k == "horosphere") {
    const double d = take(p, "d", 0.0);
    fam = horosphere_family(n, d, detail::as_int(take(p, "sign", 1.0), "sign"));
  } else if (k == "sigma_c") {
    fam = sigma_c_family(n, take(p, "c", 0.5));
  } else if (k == "true_equidistant") {
    fam = true_equidistant_family(n, take(p, "c_tilde", 1.0));
  } else if (k == "radial_power") {
    const double a = take(p, "a", 1.0);
    fam = radial_power_family(n, a, take(p, "p", -1.0));
  } else if (k == "radial_spline") {
    fam = radial_spline_family(n, spec.table);
  } else if (k == "ads_schwarzschild") {
    const double m = take(p, "m", 1.0);
    fam = ads_schwarzschild_family(n, m, take(p, "t0", 0.0));
  } else if (k == "horosphere_cap") {
    const double r_gamma = take(p, "r_gamma", 2.0);
    const double d = take(p, "d", 0.0);
    const double a = take(p, "a", 0.2);
    fam = horosphere_cap_family(n, r_gamma, d, a, take(p, "width", 1.0));
  } else if (k == "decay_perturbation" || k == "transformed") {
    if (spec.base == "decay_perturbation" || spec.base == "transformed" || spec.base == "radial_spline")
      throw Error(ErrorCode::BadParams, "unsupported base family '" + spec.base + "'");
    FamilySpec base_spec{spec.base, n, base_params, {}, "zero"};
    base_params.clear();
    const GraphFamily base = make_family(base_spec);
    if (k == "decay_perturbation") {
      const double eps = take(p, "epsilon", 0.1);
      const double tau = take(p, "tau", 2.5);
      fam = decay_perturbation_family(base, eps, tau, take(p, "mode", 0.5));
    } else {
      const int axis = detail::as_int(take(p, "boost_axis", 1.0), "boost_axis");
      const double rapidity = take(p, "rapidity", 0.0);
      const int ri = detail::as_int(take(p, "rot_i", 1.0), "rot_i");
      const int rj = detail::as_int(take(p, "rot_j", 2.0), "rot_j");
      const double angle = take(p, "angle", 0.0);
      Isometry a = Isometry::identity_map(n);
      if (rapidity != 0.0) a = Isometry::boost(n, axis, rapidity);
      if (angle != 0.0) a = a * Isometry::rotation(n, ri, rj, angle);
      fam = transformed_family(base, a);
    }
  } else {
    throw Error(ErrorCode::BadParams, "unknown family kind '" + k + "'");
  }
  detail::ensure_consumed(p, k);
  detail::ensure_consumed(base_params, k + " (base_ prefix)");
  return *fam;
}

// ---------------------------------------------------------------------------
// Jet self-test

struct JetSelfTest {
  double gradient_error = 0.0;
  double hessian_error = 0.0;
};

/// Compares the analytic jets with central differences of u along geodesics
/// gamma(t) = cosh t z + sinh t v through p. Both errors are O(h^2).
inline JetSelfTest jet_self_test(const GraphFamily& family, const HyperPoint& p, double h = 1e-3) {
  const int n = p.dim();
  const GraphJet j = family.jets(p);
  const Mat e = p.frame();
  auto along = [&](const Vec& c, double t) {
    const Vec v = e * c;
    return family.jets(HyperPoint::from_ambient(Vec(std::cosh(t) * p.z() + std::sinh(t) * v))).u;
  };
  auto second = [&](const Vec& c) { return (along(c, h) - 2.0 * j.u + along(c, -h)) / (h * h); };
  JetSelfTest out;
  for (int a = 0; a < n; ++a) {
    Vec c = Vec::Zero(n);
    c[a] = 1.0;
    const double d1 = (along(c, h) - along(c, -h)) / (2.0 * h);
    out.gradient_error = std::max(out.gradient_error, std::abs(d1 - j.u_alpha[a]));
    out.hessian_error = std::max(out.hessian_error, std::abs(second(c) - j.u_alphabeta(a, a)));
    for (int b = a + 1; b < n; ++b) {
      Vec cp = Vec::Zero(n), cm = Vec::Zero(n);
      cp[a] = cm[a] = std::sqrt(0.5);
      cp[b] = std::sqrt(0.5);
      cm[b] = -std::sqrt(0.5);
      const double mixed = 0.5 * (second(cp) - second(cm));
      out.hessian_error = std::max(out.hessian_error, std::abs(mixed - j.u_alphabeta(a, b)));
    }
  }
  return out;
}

}  // namespace ahmass
