#pragma once

// Hyperbolic space H^n in the Poincare disk, realised internally on the hyperboloid
// {z in R^{n+1} : z0^2 - |z'|^2 = 1, z0 > 0}. The static potentials rho, rho^(a) are
// the coordinate functions z0, z_a, so the O+(n,1) action on potentials is linear.

#include <cmath>
#include <string>

#include "ahmass/error.hpp"
#include "ahmass/linalg.hpp"

namespace ahmass {

namespace detail {

// 1 - |x|^2 with compensated products and sums; the cancellation near the disk
// boundary is the dominant error source otherwise.
inline double one_minus_norm2(const Vec& x) {
  double hi = 1.0;
  double lo = 0.0;
  for (int i = 0; i < x.size(); ++i) {
    const double p = x[i] * x[i];
    const double p_err = std::fma(x[i], x[i], -p);
    // TwoSum(hi, -p)
    const double s = hi - p;
    const double bb = s - hi;
    const double s_err = (hi - (s - bb)) + (-p - bb);
    hi = s;
    lo += s_err - p_err;
  }
  return hi + lo;
}

inline void check_dim(int n) {
  if (n < 1 || n > kMaxDim)
    throw Error(ErrorCode::UnsupportedDimension, "dimension " + std::to_string(n));
}

}  // namespace detail

/// Point of the Poincare disk, |x| < 1 - 1e-12.
class DiskPoint {
 public:
  explicit DiskPoint(Vec x) : x_(std::move(x)) {
    detail::check_dim(static_cast<int>(x_.size()));
    if (!x_.allFinite() || x_.norm() >= 1.0 - 1e-12)
      throw Error(ErrorCode::InvalidPoint, "disk point outside |x| < 1 - 1e-12");
  }

  const Vec& x() const { return x_; }
  int dim() const { return static_cast<int>(x_.size()); }
  /// Frame scale lambda = (1 - |x|^2)/2, so e_a = lambda d/dx_a is b-orthonormal.
  double frame_scale() const { return 0.5 * detail::one_minus_norm2(x_); }

 private:
  Vec x_;
};

/// Geodesic polar coordinates: r = sinh(distance to origin), theta on S^{n-1}.
class PolarPoint {
 public:
  PolarPoint(double r, Vec theta) : r_(r), theta_(std::move(theta)) {
    detail::check_dim(static_cast<int>(theta_.size()));
    const double norm = theta_.norm();
    if (!(r_ >= 0.0) || !std::isfinite(r_) || std::abs(norm - 1.0) > 1e-10)
      throw Error(ErrorCode::InvalidPoint, "polar point needs r >= 0 and |theta| = 1");
    theta_ /= norm;
  }

  double r() const { return r_; }
  const Vec& theta() const { return theta_; }
  int dim() const { return static_cast<int>(theta_.size()); }
  double rho() const { return std::sqrt(r_ * r_ + 1.0); }

 private:
  double r_;
  Vec theta_;
};

/// Point on the hyperboloid model; z = (rho, rho^(1), ..., rho^(n)).
class HyperPoint {
 public:
  static HyperPoint from_ambient(Vec z) {
    HyperPoint p;
    p.z_ = std::move(z);
    return p;
  }

  static HyperPoint from_disk(const DiskPoint& p) {
    const double denom = detail::one_minus_norm2(p.x());
    Vec z(p.dim() + 1);
    z[0] = (2.0 - denom) / denom;
    z.tail(p.dim()) = 2.0 * p.x() / denom;
    return from_ambient(std::move(z));
  }

  static HyperPoint from_polar(const PolarPoint& p) {
    Vec z(p.dim() + 1);
    z[0] = p.rho();
    z.tail(p.dim()) = p.r() * p.theta();
    return from_ambient(std::move(z));
  }

  int dim() const { return static_cast<int>(z_.size()) - 1; }
  const Vec& z() const { return z_; }
  double rho() const { return z_[0]; }
  Vec grad_rho() const { return z_.tail(dim()); }
  double r() const { return z_.tail(dim()).norm(); }

  DiskPoint to_disk() const { return DiskPoint(Vec(z_.tail(dim()) / (1.0 + z_[0]))); }

  PolarPoint to_polar() const {
    const double rr = r();
    Vec theta = Vec::Zero(dim());
    if (rr > 0.0)
      theta = z_.tail(dim()) / rr;
    else
      theta[0] = 1.0;
    return PolarPoint(rr, theta);
  }

  /// Columns are the ambient components of the orthonormal frame e_a = lambda d/dx_a,
  /// i.e. the pure boost carrying (1,0,...,0) to z restricted to the spatial axes.
  Mat frame() const {
    const int n = dim();
    Mat e(n + 1, n);
    const Vec zs = z_.tail(n);
    e.row(0) = zs.transpose();
    e.bottomRows(n) = identity(n) + zs * zs.transpose() / (1.0 + z_[0]);
    return e;
  }

 private:
  Vec z_;
};

/// Static potential rho with its frame gradient and covariant Hessian.
struct PotentialJet {
  double rho = 1.0;
  Vec rho_alpha;
  Mat hess_rho;
};

inline PotentialJet potential_jets(const HyperPoint& p) {
  PotentialJet j;
  j.rho = p.rho();
  j.rho_alpha = p.grad_rho();
  j.hess_rho = j.rho * identity(p.dim());
  return j;
}

inline PotentialJet potential_jets(const DiskPoint& p) {
  return potential_jets(HyperPoint::from_disk(p));
}

/// Value and frame gradient of the potential phi = sum_i c_i rho^(i).
struct PotentialValue {
  double value = 0.0;
  Vec gradient;
};

inline PotentialValue evaluate_potential(const Vec& coeffs, const HyperPoint& p) {
  if (coeffs.size() != p.dim() + 1)
    throw Error(ErrorCode::DimensionMismatch, "potential coefficients need n+1 entries");
  return {coeffs.dot(p.z()), p.frame().transpose() * coeffs};
}

/// Frame covariant Hessian Hess_b(e_a, e_b) of a scalar from its coordinate jets in the
/// disk. The conformal Christoffel symbols are those of b = Omega^2 delta, Omega = 1/lambda.
inline Mat covariant_hessian_frame(double /*coord_value*/, const Vec& coord_grad,
                                   const Mat& coord_hess, const DiskPoint& p) {
  const int n = p.dim();
  if (coord_grad.size() != n || coord_hess.rows() != n || coord_hess.cols() != n)
    throw Error(ErrorCode::DimensionMismatch, "coordinate jets do not match the point");
  const double lambda = p.frame_scale();
  const Vec dlog_omega = p.x() / lambda;  // d_i log Omega = 2 x_i / (1 - |x|^2)
  const double a_dot_grad = dlog_omega.dot(coord_grad);
  Mat h = coord_hess - dlog_omega * coord_grad.transpose() -
          coord_grad * dlog_omega.transpose() + a_dot_grad * identity(n);
  h = 0.5 * (h + h.transpose()).eval();
  return lambda * lambda * h;
}

// ---------------------------------------------------------------------------
// Lorentz layer

struct LorentzVector {
  Vec c;

  LorentzVector() = default;
  explicit LorentzVector(Vec components) : c(std::move(components)) {}

  int size() const { return static_cast<int>(c.size()); }
  double operator[](int i) const { return c[i]; }
  double& operator[](int i) { return c[i]; }
};

/// (z, w) = z0 w0 - sum_a z_a w_a.
inline double lorentz_inner(const LorentzVector& z, const LorentzVector& w) {
  if (z.size() != w.size() || z.size() < 2)
    throw Error(ErrorCode::DimensionMismatch, "Lorentz vectors of different dimension");
  return z[0] * w[0] - z.c.tail(z.size() - 1).dot(w.c.tail(w.size() - 1));
}

inline Mat minkowski_metric(int size) {
  Mat eta = identity(size);
  eta.diagonal().tail(size - 1).setConstant(-1.0);
  return eta;
}

enum class CausalClass { TimelikeFuture, TimelikePast, NullFuture, NullPast, Spacelike, Zero };

constexpr const char* to_string(CausalClass c) {
  switch (c) {
    case CausalClass::TimelikeFuture: return "timelike-future";
    case CausalClass::TimelikePast: return "timelike-past";
    case CausalClass::NullFuture: return "null-future";
    case CausalClass::NullPast: return "null-past";
    case CausalClass::Spacelike: return "spacelike";
    case CausalClass::Zero: return "zero";
  }
  return "unknown";
}

inline CausalClass classify_causal(const LorentzVector& p) {
  const double norm2 = p.c.squaredNorm();
  if (norm2 <= 1e-24) return CausalClass::Zero;
  const double q = lorentz_inner(p, p);
  const double tol = 1e-10 * norm2;
  if (q > tol) return p[0] > 0 ? CausalClass::TimelikeFuture : CausalClass::TimelikePast;
  if (q >= -tol) return p[0] > 0 ? CausalClass::NullFuture : CausalClass::NullPast;
  return CausalClass::Spacelike;
}

enum class IsometryKind { Identity, Rotation, Boost, Composite };

/// Element of O+(n,1) acting on ambient/potential coordinates z -> A z.
class Isometry {
 public:
  static Isometry identity_map(int n) { return Isometry(identity(n + 1), IsometryKind::Identity); }

  /// Rotation by `angle` in the (i, j) spatial plane, 1 <= i, j <= n; carries e_i toward e_j.
  static Isometry rotation(int n, int i, int j, double angle) {
    detail::check_dim(n);
    if (i < 1 || j < 1 || i > n || j > n || i == j)
      throw Error(ErrorCode::BadParams, "rotation plane indices must be distinct in 1..n");
    Mat a = identity(n + 1);
    const double c = std::cos(angle), s = std::sin(angle);
    a(i, i) = c;
    a(j, j) = c;
    a(j, i) = s;
    a(i, j) = -s;
    return Isometry(a, IsometryKind::Rotation);
  }

  /// Boost along spatial axis `axis` with the given rapidity; carries e0 to
  /// (cosh s, ..., sinh s at axis, ...).
  static Isometry boost(int n, int axis, double rapidity) {
    detail::check_dim(n);
    if (axis < 1 || axis > n) throw Error(ErrorCode::BadParams, "boost axis must be in 1..n");
    Mat a = identity(n + 1);
    a(0, 0) = a(axis, axis) = std::cosh(rapidity);
    a(0, axis) = a(axis, 0) = std::sinh(rapidity);
    return Isometry(a, IsometryKind::Boost);
  }

  /// Pure boost carrying e0 to the unit future timelike vector u.
  static Isometry boost_to(const Vec& u) {
    const int n = static_cast<int>(u.size()) - 1;
    detail::check_dim(n);
    const Vec us = u.tail(n);
    Mat a(n + 1, n + 1);
    a(0, 0) = u[0];
    a.block(0, 1, 1, n) = us.transpose();
    a.block(1, 0, n, 1) = us;
    a.bottomRightCorner(n, n) = identity(n) + us * us.transpose() / (1.0 + u[0]);
    return Isometry(a, IsometryKind::Boost);
  }

  static Isometry from_matrix(const Mat& a) {
    Isometry iso(a, IsometryKind::Composite);
    iso.validate();
    return iso;
  }

  const Mat& matrix() const { return a_; }
  IsometryKind kind() const { return kind_; }
  int dim() const { return static_cast<int>(a_.rows()) - 1; }

  Isometry inverse() const {
    const Mat eta = minkowski_metric(static_cast<int>(a_.rows()));
    return Isometry(eta * a_.transpose() * eta, kind_);
  }

  Isometry operator*(const Isometry& rhs) const {
    const IsometryKind k = (kind_ == IsometryKind::Identity) ? rhs.kind_
                           : (rhs.kind_ == IsometryKind::Identity || rhs.kind_ == kind_)
                               ? kind_
                               : IsometryKind::Composite;
    return Isometry(a_ * rhs.a_, k);
  }

  LorentzVector apply(const LorentzVector& v) const { return LorentzVector(Vec(a_ * v.c)); }
  HyperPoint apply(const HyperPoint& p) const { return HyperPoint::from_ambient(Vec(a_ * p.z())); }

  /// Max deviation of A^T eta A from eta.
  double metric_defect() const {
    const Mat eta = minkowski_metric(static_cast<int>(a_.rows()));
    return (a_.transpose() * eta * a_ - eta).cwiseAbs().maxCoeff();
  }

 private:
  Isometry(Mat a, IsometryKind kind) : a_(std::move(a)), kind_(kind) {}

  void validate() const {
    if (a_.rows() != a_.cols() || metric_defect() > 1e-10 || a_(0, 0) < 1.0 - 1e-12)
      throw Error(ErrorCode::BadParams, "matrix is not in O+(n,1)");
  }

  Mat a_;
  IsometryKind kind_;
};

/// Boost A with A P = (sqrt((P,P)), 0, ..., 0).
inline Isometry rest_boost(const LorentzVector& p) {
  if (classify_causal(p) != CausalClass::TimelikeFuture)
    throw Error(ErrorCode::NotTimelikeFuture, "rest frame needs a timelike future vector");
  const double m = std::sqrt(lorentz_inner(p, p));
  Vec u = p.c / m;
  u.tail(u.size() - 1) *= -1.0;
  return Isometry::boost_to(u);
}

/// phi -> phi o A^{-1} on coefficient vectors in the basis {rho^(i)}: c -> A^{-T} c.
/// Convention: Isometry::rotation(n,1,2,pi/2) sends rho^(1) to rho^(2).
inline Vec isometry_action_on_potentials(const Isometry& a, const Vec& coeffs) {
  if (coeffs.size() != a.matrix().rows())
    throw Error(ErrorCode::DimensionMismatch, "coefficient vector has wrong size");
  const Mat eta = minkowski_metric(static_cast<int>(coeffs.size()));
  return eta * a.matrix() * eta * coeffs;
}

/// Isometry of H^n x_rho R onto the upper half-space:
/// (x, s) -> e^s (2x/(1+|x|^2), (1-|x|^2)/(1+|x|^2)) = e^s (z'/z0, 1/z0).
inline Vec half_space_map(const HyperPoint& p, double s) {
  const int n = p.dim();
  Vec y(n + 1);
  const double scale = std::exp(s) / p.rho();
  y.head(n) = scale * p.z().tail(n);
  y[n] = scale;
  return y;
}

inline Vec half_space_map(const DiskPoint& p, double s) {
  return half_space_map(HyperPoint::from_disk(p), s);
}

}  // namespace ahmass
