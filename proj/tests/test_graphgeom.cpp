#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <random>

#include "hcflow/graphgeom.hpp"

using namespace hcf;

namespace {

DomainDescriptor ball_domain(int nodes, int n = 2, double R = 1.0) {
  DomainDescriptor d;
  d.kind = DomainKind::RadialBall;
  d.n = n;
  d.extent = R;
  d.node_count = nodes;
  return d;
}

DomainDescriptor interval_domain(int nodes, double L = 1.0) {
  DomainDescriptor d;
  d.kind = DomainKind::Interval1D;
  d.n = 1;
  d.extent = L;
  d.node_count = nodes;
  return d;
}

GraphState sample_cap(const DomainDescriptor& dom, const CapProfile& cap, double lift) {
  GraphState s;
  s.epsilon = lift;
  s.u.resize(dom.node_count);
  for (int j = 0; j < dom.node_count; ++j)
    s.u[j] = cap.value(std::abs(dom.coord(j))) + lift;
  return s;
}

}  // namespace

TEST_CASE("derivative stencils: constants and quadratics are exact") {
  const DomainDescriptor dom = interval_domain(32, 2.0);
  GraphState s;
  s.epsilon = 1.0;
  s.u.assign(32, 1.0);
  const DerivativeField fc = discrete_derivatives(s, dom);
  for (int j = 0; j < 32; ++j) {
    CHECK(fc.du[j] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(fc.d2u[j] == doctest::Approx(0.0).epsilon(1e-14));
  }

  for (int j = 0; j < 32; ++j) {
    const double x = dom.coord(j);
    s.u[j] = 0.7 * x * x + 5.0;
  }
  s.epsilon = s.u[0];
  const DerivativeField fq = discrete_derivatives(s, dom);
  for (int j = 0; j < 32; ++j) {
    CHECK(fq.du[j] == doctest::Approx(1.4 * dom.coord(j)).epsilon(1e-11));
    CHECK(fq.d2u[j] == doctest::Approx(1.4).epsilon(1e-11));
  }
}

TEST_CASE("derivative stencils converge at second order on the cap") {
  const CapProfile cap = CapProfile::tangent(1.0, 0.6);
  std::vector<double> errs;
  for (int nodes : {100, 200, 400}) {
    const DomainDescriptor dom = ball_domain(nodes);
    const GraphState s = sample_cap(dom, cap, 0.0);
    const DerivativeField f = discrete_derivatives(s, dom);
    double err = 0.0;
    for (int j = 0; j <= dom.last_interior(); ++j)
      err = std::max(err, std::abs(f.d2u[j] - cap.d2(dom.coord(j))));
    errs.push_back(err);
  }
  const double order1 = std::log2(errs[0] / errs[1]);
  const double order2 = std::log2(errs[1] / errs[2]);
  CHECK(order1 >= 1.9);
  CHECK(order2 >= 1.9);
}

TEST_CASE("gamma matrix") {
  const std::vector<double> zero{0.0, 0.0, 0.0};
  const SymMatrix g0 = gamma_matrix(zero);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(g0.at(i, j) == doctest::Approx(i == j ? 1.0 : 0.0));

  // One dimension: gamma = 1/w.
  const std::vector<double> slope{0.75};
  const SymMatrix g1 = gamma_matrix(slope);
  CHECK(g1.at(0, 0) == doctest::Approx(0.8).epsilon(1e-14));

  // gamma (I + Du Du^T) gamma = I.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> Du(3);
    for (double& d : Du) d = dist(rng);
    const SymMatrix g = gamma_matrix(Du);
    SymMatrix metric = SymMatrix::identity(3);
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) metric.set_sym(i, j, metric.at(i, j) + Du[i] * Du[j]);
    const SymMatrix prod = sym_product(sym_product(g, metric), g);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        CHECK(prod.at(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
  }
}

TEST_CASE("hyperbolic shape matrix") {
  // Horosphere slice: constant height is umbilic with kappa = 1.
  {
    const std::vector<double> Du{0.0, 0.0};
    const SymMatrix D2u(2);
    const PointGeometry g = hyperbolic_shape(0.37, Du, D2u);
    CHECK(g.w == doctest::Approx(1.0));
    CHECK(g.nu_upper == doctest::Approx(1.0));
    for (double k : g.kappa) CHECK(k == doctest::Approx(1.0).epsilon(1e-14));
  }

  // Meridian of the cap at the axis: u = 0.5, u' = 0, u'' = -0.8.
  {
    const std::vector<double> Du{0.0};
    SymMatrix D2u(1);
    D2u.at(0, 0) = -0.8;
    const PointGeometry g = hyperbolic_shape(0.5, Du, D2u);
    CHECK(g.kappa[0] == doctest::Approx(0.6).epsilon(1e-14));
    CHECK(g.conv_min_eig == doctest::Approx(0.6).epsilon(1e-14));
  }

  // kappa_i = u * kappa~_i + 1/w at the matrix level.
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> dist(-1.5, 1.5);
  std::uniform_real_distribution<double> updist(0.1, 2.0);
  for (int rep = 0; rep < 100; ++rep) {
    const double u = updist(rng);
    std::vector<double> Du(3);
    for (double& d : Du) d = dist(rng);
    SymMatrix D2u(3);
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) D2u.set_sym(i, j, dist(rng));
    const PointGeometry g = hyperbolic_shape(u, Du, D2u);
    const EigenSys tilde = sym_eigen(g.A_tilde);
    for (int k = 0; k < 3; ++k)
      CHECK(g.kappa[k] ==
            doctest::Approx(u * tilde.values[k] + g.nu_upper).epsilon(1e-12));

    // Entrywise A = (1/w) I + u A~.
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        CHECK(g.A.at(i, j) ==
              doctest::Approx((i == j ? g.nu_upper : 0.0) + u * g.A_tilde.at(i, j))
                  .epsilon(1e-14));

    // Convexity matrix sign matches the curvature sign.
    const double kmin = g.kappa.back();
    if (std::abs(g.conv_min_eig) > 1e-10 && std::abs(kmin) > 1e-10)
      CHECK((g.conv_min_eig > 0.0) == (kmin > 0.0));
  }
}

TEST_CASE("radial curvatures on the cap are constant") {
  const CapProfile cap = CapProfile::tangent(1.0, 0.6);
  for (double r : {0.1, 0.3, 0.5, 0.9, 0.999}) {
    const RadialCurvatures rc =
        radial_curvatures(cap.value(r), cap.d1(r), cap.d2(r), r, 2);
    CHECK(rc.k_rad == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(rc.k_ang == doctest::Approx(0.6).epsilon(1e-12));

    // Cross-check against the meridian shape matrix.
    const std::vector<double> Du{cap.d1(r)};
    SymMatrix D2u(1);
    D2u.at(0, 0) = cap.d2(r);
    const PointGeometry g = hyperbolic_shape(cap.value(r), Du, D2u);
    CHECK(g.kappa[0] == doctest::Approx(rc.k_rad).epsilon(1e-12));
  }

  // Horosphere: both curvatures are 1.
  const RadialCurvatures hc = radial_curvatures(0.7, 0.0, 0.0, 0.4, 2);
  CHECK(hc.k_rad == doctest::Approx(1.0));
  CHECK(hc.k_ang == doctest::Approx(1.0));

  // Axis limit.
  const RadialCurvatures ax = radial_curvatures(cap.value(0), cap.d1(0), cap.d2(0), 0.0, 2);
  CHECK(std::abs(ax.k_rad - ax.k_ang) <= 1e-10);

  CHECK_THROWS_AS((void)radial_curvatures(0.5, 0.0, 0.0, -0.1, 2), std::invalid_argument);
}

TEST_CASE("convexity matrix") {
  {
    const std::vector<double> Du{0.0};
    SymMatrix D2u(1);
    D2u.at(0, 0) = -0.8;
    const auto [M, min_eig] = convexity_matrix(0.5, Du, D2u);
    CHECK(min_eig == doctest::Approx(0.6).epsilon(1e-14));
  }
  {
    const std::vector<double> Du{0.0, 0.0};
    const SymMatrix D2u(2);
    const auto [M, min_eig] = convexity_matrix(0.9, Du, D2u);
    CHECK(min_eig == doctest::Approx(1.0).epsilon(1e-14));
  }
  {
    // Concave paraboloid u = 1 - 2|x|^2 at the origin.
    const std::vector<double> Du{0.0, 0.0};
    SymMatrix D2u(2);
    D2u.set_sym(0, 0, -4.0);
    D2u.set_sym(1, 1, -4.0);
    const auto [M, min_eig] = convexity_matrix(1.0, Du, D2u);
    CHECK(min_eig == doctest::Approx(-3.0).epsilon(1e-14));
  }
}

TEST_CASE("cap profile closed form") {
  CHECK(cap_profile(1.0, 0.6, 0.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(cap_profile(1.0, 0.6, 1.0) == 0.0);
  CHECK(cap_profile(1.0, 0.6, -1.0) == 0.0);
  CHECK_THROWS_AS((void)cap_profile(1.0, 1.2, 0.0), std::invalid_argument);
  CHECK_THROWS_AS((void)cap_profile(1.0, 0.6, 1.5), std::invalid_argument);

  // Boundary angle: w -> 1/sigma at the rim.
  const CapProfile cap = CapProfile::tangent(1.0, 0.6);
  CHECK(cap.slope_w(1.0) == doctest::Approx(1.0 / 0.6).epsilon(1e-12));
  const double w_rim = std::sqrt(1.0 + cap.d1(1.0 - 1e-9) * cap.d1(1.0 - 1e-9));
  CHECK(w_rim == doctest::Approx(1.0 / 0.6).epsilon(1e-6));
}

TEST_CASE("lifted cap passes through the boundary lift and stays umbilic") {
  const double eps = 1e-3;
  const CapProfile cap = CapProfile::lifted(1.0, 0.6, eps);
  CHECK(cap.value(1.0) == doctest::Approx(eps).epsilon(1e-10));
  for (double r : {0.0, 0.4, 0.8, 1.0}) {
    const RadialCurvatures rc =
        radial_curvatures(cap.value(r), cap.d1(r), cap.d2(r), r, 2);
    CHECK(rc.k_rad == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(rc.k_ang == doctest::Approx(0.6).epsilon(1e-12));
  }
  // Vanishing lift recovers the tangent cap.
  const CapProfile c0 = CapProfile::lifted(1.0, 0.6, 0.0);
  CHECK(c0.radius == doctest::Approx(1.25).epsilon(1e-14));
}

TEST_CASE("graph state validation") {
  const DomainDescriptor dom = ball_domain(16);
  GraphState s = sample_cap(dom, CapProfile::tangent(1.0, 0.8), 1e-3);
  s.u[dom.node_count - 1] = 1e-3;
  CHECK_NOTHROW(s.validate(dom));

  GraphState bad = s;
  bad.u[3] = -0.1;
  CHECK_THROWS_AS(bad.validate(dom), std::invalid_argument);

  GraphState off = s;
  off.u[dom.node_count - 1] = 2e-3;
  CHECK_THROWS_AS(off.validate(dom), std::invalid_argument);
}
