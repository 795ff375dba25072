#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/legendre.hpp>

#include "ahmass/error.hpp"
#include "ahmass/linalg.hpp"

namespace ahmass {

struct SphereNode {
  Vec theta;  // unit vector in R^{dim+1}
  double weight;
};

/// Area of the unit k-sphere, omega_k = 2 pi^{(k+1)/2} / Gamma((k+1)/2).
inline double sphere_area(int k) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * (k + 1)) / boost::math::tgamma(0.5 * (k + 1));
}

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule with `count` points on [a, b].
inline GaussRule gauss_legendre(int count, double a = -1.0, double b = 1.0) {
  if (count < 1) throw Error(ErrorCode::BadParams, "Gauss-Legendre needs at least one node");
  const auto positive = boost::math::legendre_p_zeros<double>(count);
  std::vector<double> t;
  for (auto it = positive.rbegin(); it != positive.rend(); ++it)
    if (*it != 0.0) t.push_back(-*it);
  for (double x : positive) t.push_back(x);
  GaussRule rule;
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  for (double x : t) {
    const double dp = boost::math::legendre_p_prime(count, x);
    rule.nodes.push_back(mid + half * x);
    rule.weights.push_back(half * 2.0 / ((1.0 - x * x) * dp * dp));
  }
  return rule;
}

/// Product rule on S^dim, dim in {1,2,3}. With `order` = k the rule is exact for all
/// polynomials of degree <= 2k - 1 restricted to the sphere:
///   S^1: trapezoid with 2k angles;
///   S^2: k-point Gauss-Legendre in cos(polar) x 2k-point trapezoid;
///   S^3: coordinates (sqrt(1-t) e^{i a}, sqrt(t) e^{i b}) with dA = dt da db / 2,
///        k-point Gauss-Legendre in t x (2k x 2k) trapezoid.
inline std::vector<SphereNode> sphere_quadrature(int dim, int order) {
  if (dim < 1 || dim > 3)
    throw Error(ErrorCode::UnsupportedDimension, "sphere quadrature supports S^1..S^3");
  if (order < 2) throw Error(ErrorCode::BadParams, "sphere quadrature order must be >= 2");
  const int m = 2 * order;
  const double dphi = 2.0 * std::numbers::pi / m;
  std::vector<SphereNode> out;
  if (dim == 1) {
    for (int i = 0; i < m; ++i) {
      Vec t(2);
      t << std::cos((i + 0.5) * dphi), std::sin((i + 0.5) * dphi);
      out.push_back({t, dphi});
    }
    return out;
  }
  if (dim == 2) {
    const GaussRule gl = gauss_legendre(order);
    for (std::size_t a = 0; a < gl.nodes.size(); ++a) {
      const double c = gl.nodes[a], s = std::sqrt(1.0 - c * c);
      for (int i = 0; i < m; ++i) {
        const double phi = (i + 0.5) * dphi;
        Vec t(3);
        t << s * std::cos(phi), s * std::sin(phi), c;
        out.push_back({t, gl.weights[a] * dphi});
      }
    }
    return out;
  }
  const GaussRule gl = gauss_legendre(order, 0.0, 1.0);
  for (std::size_t a = 0; a < gl.nodes.size(); ++a) {
    const double t = gl.nodes[a], c1 = std::sqrt(1.0 - t), c2 = std::sqrt(t);
    for (int i = 0; i < m; ++i) {
      const double p1 = (i + 0.5) * dphi;
      for (int j = 0; j < m; ++j) {
        const double p2 = (j + 0.5) * dphi;
        Vec th(4);
        th << c1 * std::cos(p1), c1 * std::sin(p1), c2 * std::cos(p2), c2 * std::sin(p2);
        out.push_back({th, 0.5 * gl.weights[a] * dphi * dphi});
      }
    }
  }
  return out;
}

/// Smallest order whose node count reaches `min_nodes` on S^dim.
inline int sphere_order_for_nodes(int dim, std::size_t min_nodes) {
  for (int k = 2;; ++k) {
    const std::size_t m = 2 * static_cast<std::size_t>(k);
    const std::size_t count = dim == 1 ? m : dim == 2 ? k * m : k * m * m;
    if (count >= min_nodes) return k;
  }
}

}  // namespace ahmass
