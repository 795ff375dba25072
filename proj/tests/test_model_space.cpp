#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "ahmass/model_space.hpp"
#include "ahmass/sphere_quadrature.hpp"
#include "ahmass/summation.hpp"

using namespace ahmass;
using Catch::Approx;

namespace {

Vec random_disk(std::mt19937_64& rng, int n, double max_norm) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  Vec x(n);
  for (int i = 0; i < n; ++i) x[i] = normal(rng);
  return x / x.norm() * max_norm * std::pow(uni(rng), 1.0 / n);
}

double rho_of_disk(const Vec& x) { return (1.0 + x.squaredNorm()) / (1.0 - x.squaredNorm()); }

}  // namespace

TEST_CASE("disk points map onto the hyperboloid and back", "[model]") {
  std::mt19937_64 rng(1);
  for (int n = 1; n <= 4; ++n) {
    for (int k = 0; k < 200; ++k) {
      const Vec x = random_disk(rng, n, 0.95);
      const HyperPoint p = HyperPoint::from_disk(DiskPoint(x));
      CHECK(p.z()[0] * p.z()[0] - p.z().tail(n).squaredNorm() == Approx(1.0).epsilon(1e-12));
      CHECK((p.to_disk().x() - x).norm() <= 1e-14);
      // distance to the origin is 2 artanh |x|
      CHECK(p.r() == Approx(std::sinh(2.0 * std::atanh(x.norm()))).epsilon(1e-12));
      CHECK(p.rho() == Approx(rho_of_disk(x)).epsilon(1e-13));
    }
  }
}

TEST_CASE("invalid points are rejected", "[model]") {
  CHECK_THROWS_AS(DiskPoint(Vec::Constant(2, 0.8)), Error);
  CHECK_THROWS_AS(DiskPoint(Vec::Zero(5)), Error);
  Vec bad(2);
  bad << 1.0, 0.0;
  CHECK_THROWS_AS(DiskPoint(bad), Error);
  CHECK_THROWS_AS(PolarPoint(-1.0, Vec::Unit(2, 0)), Error);
  CHECK_THROWS_AS(PolarPoint(1.0, Vec::Constant(2, 1.0)), Error);
}

TEST_CASE("frame is Lorentz-orthonormal and tangent", "[model]") {
  std::mt19937_64 rng(2);
  for (int n = 2; n <= 4; ++n) {
    const Mat eta = minkowski_metric(n + 1);
    for (int k = 0; k < 50; ++k) {
      const HyperPoint p = HyperPoint::from_disk(DiskPoint(random_disk(rng, n, 0.9)));
      const Mat e = p.frame();
      CHECK((e.transpose() * eta * e + identity(n)).cwiseAbs().maxCoeff() <= 1e-9 * p.rho() * p.rho());
      CHECK((e.transpose() * eta * p.z()).cwiseAbs().maxCoeff() <= 1e-9 * p.rho() * p.rho());
    }
  }
}

TEST_CASE("potential jets agree with finite differences in the disk", "[model]") {
  std::mt19937_64 rng(3);
  const double h = 1e-5;
  for (int n = 2; n <= 4; ++n) {
    for (int k = 0; k < 20; ++k) {
      const Vec x = random_disk(rng, n, 0.8);
      const DiskPoint p(x);
      const PotentialJet pj = potential_jets(p);
      const double lambda = p.frame_scale();
      Vec grad(n);
      Mat hess(n, n);
      for (int a = 0; a < n; ++a) {
        Vec xp = x, xm = x;
        xp[a] += h;
        xm[a] -= h;
        grad[a] = (rho_of_disk(xp) - rho_of_disk(xm)) / (2 * h);
        for (int b = 0; b < n; ++b) {
          Vec pp = x, pm = x, mp = x, mm = x;
          pp[a] += h, pp[b] += h;
          pm[a] += h, pm[b] -= h;
          mp[a] -= h, mp[b] += h;
          mm[a] -= h, mm[b] -= h;
          hess(a, b) = (rho_of_disk(pp) - rho_of_disk(pm) - rho_of_disk(mp) + rho_of_disk(mm)) / (4 * h * h);
        }
      }
      CHECK((pj.rho_alpha - lambda * grad).norm() <= 1e-7 * pj.rho);
      // Hess rho = rho b
      const Mat cov = covariant_hessian_frame(pj.rho, grad, hess, p);
      CHECK((cov - pj.rho * identity(n)).cwiseAbs().maxCoeff() <= 1e-5 * pj.rho);
    }
  }
}

TEST_CASE("Lorentz inner product and causal classes", "[lorentz]") {
  Vec a(3), b(3);
  a << 2, 1, 0;
  b << 1, 0, 3;
  CHECK(lorentz_inner(LorentzVector(a), LorentzVector(b)) == 2.0);
  CHECK(classify_causal(LorentzVector(a)) == CausalClass::TimelikeFuture);
  CHECK(classify_causal(LorentzVector(Vec(-a))) == CausalClass::TimelikePast);
  CHECK(classify_causal(LorentzVector(b)) == CausalClass::Spacelike);
  Vec null(3);
  null << 1, 0, 1;
  CHECK(classify_causal(LorentzVector(null)) == CausalClass::NullFuture);
  CHECK(classify_causal(LorentzVector(Vec::Zero(3))) == CausalClass::Zero);
  CHECK_THROWS_AS(lorentz_inner(LorentzVector(a), LorentzVector(Vec::Zero(4))), Error);
}

TEST_CASE("rest boost brings timelike vectors to rest", "[lorentz]") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uni(0.1, 3.0);
  for (int k = 0; k < 1000; ++k) {
    const int n = 2 + k % 3;
    Vec dir(n);
    for (int i = 0; i < n; ++i) dir[i] = normal(rng);
    dir /= dir.norm();
    const double m = uni(rng), s = uni(rng);
    Vec p(n + 1);
    p[0] = m * std::cosh(s);
    p.tail(n) = m * std::sinh(s) * dir;
    const LorentzVector P(p);
    const Isometry a = rest_boost(P);
    const LorentzVector q = a.apply(P);
    CHECK(std::abs(q[0] - m) <= 1e-12 * std::cosh(s) * m * 10);
    CHECK(q.c.tail(n).norm() <= 1e-12 * std::cosh(s) * m * 10);
    CHECK(a.metric_defect() <= 1e-12 * std::cosh(2 * s) * 10);
  }
  CHECK_THROWS_AS(rest_boost(LorentzVector(Vec::Unit(3, 1))), Error);
}

TEST_CASE("isometries compose, invert and act on potentials", "[lorentz]") {
  const int n = 3;
  const Isometry a = Isometry::boost(n, 2, 0.7) * Isometry::rotation(n, 1, 3, 0.4);
  CHECK(a.metric_defect() <= 1e-13);
  CHECK(((a * a.inverse()).matrix() - identity(n + 1)).cwiseAbs().maxCoeff() <= 1e-13);
  CHECK_THROWS_AS(Isometry::from_matrix(2.0 * identity(n + 1)), Error);
  // rotating by pi/2 in the (1,2) plane sends rho^(1) to rho^(2)
  const Vec moved = isometry_action_on_potentials(Isometry::rotation(n, 1, 2, std::numbers::pi / 2), Vec::Unit(4, 1));
  CHECK((moved - Vec::Unit(4, 2)).norm() <= 1e-15);
  // (phi o A^{-1})(p) from the coefficient action equals phi evaluated at A^{-1} p
  std::mt19937_64 rng(5);
  Vec c(4);
  c << 0.3, -1.2, 0.5, 2.0;
  const Vec ca = isometry_action_on_potentials(a, c);
  for (int k = 0; k < 20; ++k) {
    const HyperPoint p = HyperPoint::from_disk(DiskPoint(random_disk(rng, n, 0.8)));
    const double lhs = evaluate_potential(ca, p).value;
    const double rhs = evaluate_potential(c, a.inverse().apply(p)).value;
    CHECK(lhs == Approx(rhs).epsilon(1e-12).margin(1e-12));
  }
}

TEST_CASE("half-space map is an isometry on slices", "[model]") {
  std::mt19937_64 rng(6);
  for (int n = 2; n <= 3; ++n) {
    for (int k = 0; k < 50; ++k) {
      const HyperPoint p = HyperPoint::from_disk(DiskPoint(random_disk(rng, n, 0.9)));
      const HyperPoint q = HyperPoint::from_disk(DiskPoint(random_disk(rng, n, 0.9)));
      const double s = 0.37;
      const Vec y = half_space_map(p, s), w = half_space_map(q, s);
      REQUIRE(y[n] > 0.0);
      // a slice is totally geodesic, so both distances agree
      const double cosh_half = 1.0 + (y - w).squaredNorm() / (2.0 * y[n] * w[n]);
      const double cosh_model = p.z()[0] * q.z()[0] - p.z().tail(n).dot(q.z().tail(n));
      CHECK(cosh_half == Approx(cosh_model).epsilon(1e-10));
    }
  }
}

TEST_CASE("sphere quadrature integrates polynomials exactly", "[quadrature]") {
  CHECK(sphere_area(1) == Approx(2 * std::numbers::pi));
  CHECK(sphere_area(2) == Approx(4 * std::numbers::pi));
  CHECK(sphere_area(3) == Approx(2 * std::numbers::pi * std::numbers::pi));
  for (int k = 1; k <= 3; ++k) {
    const auto nodes = sphere_quadrature(k, 6);
    double area = 0, x2 = 0, x4 = 0, x1x2sq = 0, odd = 0;
    for (const auto& node : nodes) {
      const Vec& t = node.theta;
      CHECK(t.norm() == Approx(1.0).epsilon(1e-14));
      area += node.weight;
      x2 += node.weight * t[0] * t[0];
      x4 += node.weight * std::pow(t[k], 4);
      x1x2sq += node.weight * t[0] * t[0] * t[1] * t[1];
      odd += node.weight * t[0] * t[1] * t[1];
    }
    const double w = sphere_area(k), d = k + 1.0;
    CHECK(area == Approx(w).epsilon(1e-14));
    CHECK(x2 == Approx(w / d).epsilon(1e-14));
    CHECK(x4 == Approx(3 * w / (d * (d + 2))).epsilon(1e-13));
    CHECK(x1x2sq == Approx(w / (d * (d + 2))).epsilon(1e-13));
    CHECK(std::abs(odd) <= 1e-15);
  }
  CHECK(sphere_order_for_nodes(2, 10000) == 71);
  CHECK(sphere_quadrature(2, 71).size() >= 10000);
  CHECK_THROWS_AS(sphere_quadrature(4, 4), Error);
}

TEST_CASE("Gauss-Legendre rule", "[quadrature]") {
  const GaussRule g = gauss_legendre(7, 0.0, 2.0);
  double s = 0;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) s += g.weights[i] * std::pow(g.nodes[i], 13);
  CHECK(s == Approx(std::pow(2.0, 14) / 14).epsilon(1e-13));
}

TEST_CASE("reductions do not depend on the worker count", "[summation]") {
  auto fn = [](std::size_t i) { return std::sin(0.001 * static_cast<double>(i)) * 1e-3 + 1.0 / (1.0 + i); };
  const auto one = parallel_evaluate(100000, 1, fn);
  const auto four = parallel_evaluate(100000, 4, fn);
  REQUIRE(one == four);
  CHECK(pairwise_sum(one) == pairwise_sum(four));
  CompensatedSum c;
  for (int i = 0; i < 1000000; ++i) c.add(0.1);
  CHECK(std::abs(c.value() - 100000.0) <= 1e-9);
  const auto rows = parallel_evaluate_rows(10, 2, 3, [](std::size_t i, std::span<double> s) {
    s[0] = static_cast<double>(i);
    s[1] = 1.0;
  });
  const auto sums = column_sums(rows, 2);
  CHECK(sums[0] == 45.0);
  CHECK(sums[1] == 10.0);
}
