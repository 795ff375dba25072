#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "ahmass/graph_geometry.hpp"
#include "ahmass/graph_library.hpp"

using namespace ahmass;
using Catch::Approx;

namespace {

HyperPoint polar(double r, Vec theta) { return HyperPoint::from_polar(PolarPoint(r, theta / theta.norm())); }

Vec random_dir(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> normal;
  Vec t(n);
  for (int i = 0; i < n; ++i) t[i] = normal(rng);
  return t / t.norm();
}

// Generic non-radial jet with random derivative data.
GraphJet random_jet(std::mt19937_64& rng, int n, double r) {
  std::normal_distribution<double> normal;
  const HyperPoint p = polar(r, random_dir(rng, n));
  Vec du(n);
  Mat hu(n, n);
  for (int a = 0; a < n; ++a) {
    du[a] = 0.3 * normal(rng) / p.rho();
    for (int b = 0; b < n; ++b) hu(a, b) = 0.3 * normal(rng);
  }
  return make_jet(p, 0.1, du, hu);
}

}  // namespace

TEST_CASE("make_jet symmetrizes the Hessian", "[geometry]") {
  Mat h(2, 2);
  h << 1, 2, 4, 3;
  const GraphJet j = make_jet(polar(1.0, Vec::Unit(2, 0)), 0.0, Vec::Zero(2), h);
  CHECK(j.u_alphabeta(0, 1) == 3.0);
  CHECK(j.u_alphabeta(1, 0) == 3.0);
}

TEST_CASE("slices are totally geodesic", "[geometry]") {
  const GraphJet j = constant_family(3, 2.0).jets(polar(2.0, Vec::Unit(3, 1)));
  const ExtrinsicData e = extrinsic_data(j);
  CHECK(e.W == 1.0);
  CHECK(e.S.cwiseAbs().maxCoeff() == 0.0);
  CHECK(e.Theta == Approx(j.pot.rho));
  CHECK(scalar_curvature_gauss(e, 3).R == -6.0);
}

TEST_CASE("induced metric and inverse", "[geometry]") {
  std::mt19937_64 rng(7);
  for (int n = 2; n <= 4; ++n) {
    const GraphJet j = random_jet(rng, n, 2.5);
    const ExtrinsicData e = extrinsic_data(j);
    CHECK((e.g * e.g_inv - identity(n)).cwiseAbs().maxCoeff() <= 1e-13);
    CHECK(e.W * e.W == Approx(e.g.determinant()).epsilon(1e-12));
  }
}

TEST_CASE("S2 is the second symmetric function of the principal curvatures", "[geometry]") {
  std::mt19937_64 rng(8);
  for (int n = 2; n <= 4; ++n) {
    for (int k = 0; k < 20; ++k) {
      const ExtrinsicData e = extrinsic_data(random_jet(rng, n, 1.0 + k));
      // B is g-self-adjoint: its eigenvalues are real
      Eigen::EigenSolver<Mat> es(e.B);
      const Vec kappa = es.eigenvalues().real();
      CHECK(es.eigenvalues().imag().cwiseAbs().maxCoeff() <= 1e-10);
      double s2 = 0.0;
      for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) s2 += kappa[a] * kappa[b];
      CHECK(e.S1 == Approx(kappa.sum()).epsilon(1e-10).margin(1e-12));
      CHECK(e.S2 == Approx(s2).epsilon(1e-9).margin(1e-11));
    }
  }
}

TEST_CASE("Newton tensor on the Killing field: closed form equals composition", "[geometry]") {
  std::mt19937_64 rng(9);
  for (int n = 2; n <= 4; ++n) {
    for (int k = 0; k < 50; ++k) {
      const GraphJet j = random_jet(rng, n, 0.5 + 0.2 * k);
      const ExtrinsicData e = extrinsic_data(j);
      const Vec comp = newton_killing_compositional(j, e);
      CHECK((comp - e.GXT).norm() <= 1e-12 * std::max(1.0, comp.norm()));
    }
  }
}

TEST_CASE("boundary integrand field equals W^3 times the Newton-Killing field", "[geometry]") {
  std::mt19937_64 rng(10);
  for (int n = 2; n <= 4; ++n) {
    for (int k = 0; k < 50; ++k) {
      const GraphJet j = random_jet(rng, n, 0.5 + 0.2 * k);
      const ExtrinsicData e = extrinsic_data(j);
      const Vec rec = recipe_field(j, j.pot.rho, j.pot.rho_alpha);
      const Vec w3 = e.W * e.W * e.W * e.GXT;
      CHECK((rec - w3).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, w3.cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("boundary integrand field is linear in the potential", "[geometry]") {
  std::mt19937_64 rng(11);
  const GraphJet j = random_jet(rng, 3, 3.0);
  Vec c1(4), c2(4);
  c1 << 1, 0.5, -2, 0.1;
  c2 << 0, 1, 1, 3;
  auto field = [&](const Vec& c) {
    const PotentialValue v = evaluate_potential(c, j.point);
    return recipe_field(j, v.value, v.gradient);
  };
  const Vec lhs = field(2.0 * c1 - 3.0 * c2);
  const Vec rhs = 2.0 * field(c1) - 3.0 * field(c2);
  CHECK((lhs - rhs).norm() <= 1e-12 * std::max(1.0, rhs.norm()));
}

TEST_CASE("graph normal is unit and normal to the graph frame", "[geometry]") {
  std::mt19937_64 rng(12);
  const GraphJet j = random_jet(rng, 3, 2.0);
  const Vec nrm = graph_normal(j.pot.rho, j.u_alpha);
  CHECK(nrm.norm() == Approx(1.0).epsilon(1e-14));
  for (int a = 0; a < 3; ++a) {
    // Z_a = e_a + u_a d_t = e_a + rho u_a e0
    Vec z = Vec::Zero(4);
    z[0] = j.pot.rho * j.u_alpha[a];
    z[a + 1] = 1.0;
    CHECK(std::abs(z.dot(nrm)) <= 1e-14);
  }
}

TEST_CASE("wall profiles, jets and weights", "[walls]") {
  const double rho = 2.5, h = 1e-5;
  for (const WallSpec& w : {WallSpec::horosphere(0.3, 1), WallSpec::horosphere(-0.2, -1), WallSpec::sigma_c(0.7),
                            WallSpec::geodesic_slice(1.5)}) {
    const auto p0 = w.profile(rho), pp = w.profile(rho + h), pm = w.profile(rho - h);
    CHECK(p0[1] == Approx((pp[0] - pm[0]) / (2 * h)).epsilon(1e-8).margin(1e-12));
    CHECK(p0[2] == Approx((pp[1] - pm[1]) / (2 * h)).epsilon(1e-8).margin(1e-12));
  }
  CHECK(WallSpec::geodesic_slice(0.0).weight(3.0) == 3.0);
  CHECK(WallSpec::sigma_c(0.0).weight(3.0) == 3.0);
  CHECK(WallSpec::horosphere(0.0, 1).weight(3.0) == Approx(1.0).epsilon(1e-15));
  const HyperPoint p = polar(1.7, Vec::Unit(3, 2));
  const GraphJet wj = WallSpec::horosphere(0.0, 1).jet(p);
  const GraphJet fj = horosphere_family(3, 0.0, 1).jets(p);
  CHECK((wj.u_alphabeta - fj.u_alphabeta).norm() <= 1e-14);
  CHECK(wj.u == Approx(fj.u));
  WallSpec bad = WallSpec::horosphere(0.0, 1);
  bad.sign = 2;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("level sets of rho in the slice are round spheres", "[walls]") {
  // geodesic sphere of radius d in H^n: mean curvature (n-1) coth d = (n-1) rho / r
  for (int n = 2; n <= 4; ++n) {
    const HyperPoint p = polar(1.3, Vec::Unit(n, 0));
    const PotentialJet pj = potential_jets(p);
    const double h = level_set_mean_curvature(pj.rho, pj.rho_alpha, Vec::Zero(n), Mat::Zero(n, n), pj.rho_alpha,
                                              pj.hess_rho);
    CHECK(h == Approx((n - 1) * pj.rho / p.r()).epsilon(1e-13));
  }
}

TEST_CASE("boundary data on a slice wall", "[walls]") {
  const WallSpec wall = WallSpec::geodesic_slice(0.0);
  const HyperPoint p = polar(2.0, Vec::Unit(3, 0));
  // graph through the wall at p with radial slope
  const GraphJet j = radial_power_family(3, 1.0, 1.0).jets(p);
  CHECK_THROWS_AS(boundary_frame_data(j, 1, wall), Error);
  GraphJet on = j;
  on.u = 0.0;
  const BoundaryFrameData f = boundary_frame_data(on, 1, wall);
  CHECK(f.weight == Approx(p.rho()));
  // Gamma is the round sphere r = 2 inside the slice
  CHECK(f.S1_Gamma == Approx(2.0 * p.rho() / p.r()).epsilon(1e-12));
  const double w = std::hypot(1.0, p.rho() * on.u_alpha.norm());
  CHECK(f.orthogonality_defect == Approx(1.0 / w).epsilon(1e-12));
}
