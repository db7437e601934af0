#include "hcflow/graphgeom.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hcf {

void DomainDescriptor::validate() const {
  if (node_count < 16) throw std::invalid_argument("domain: node_count must be >= 16");
  if (!(extent > 0.0)) throw std::invalid_argument("domain: extent must be > 0");
  if (kind == DomainKind::Interval1D && n != 1)
    throw std::invalid_argument("domain: interval grids are one-dimensional (n = 1)");
  if (n < 1) throw std::invalid_argument("domain: n must be >= 1");
}

void GraphState::validate(const DomainDescriptor& domain) const {
  if (static_cast<int>(u.size()) != domain.node_count)
    throw std::invalid_argument("graph state: node count mismatch");
  for (int j = 0; j < domain.node_count; ++j) {
    if (!(u[j] > 0.0)) {
      std::ostringstream os;
      os << "graph state: u must be positive, u[" << j << "] = " << u[j];
      throw std::invalid_argument(os.str());
    }
    if (domain.is_boundary(j) && std::abs(u[j] - epsilon) > 1e-14) {
      std::ostringstream os;
      os << "graph state: boundary node " << j << " carries " << u[j]
         << " instead of the boundary lift " << epsilon;
      throw std::invalid_argument(os.str());
    }
  }
}

DerivativeField discrete_derivatives(const GraphState& state, const DomainDescriptor& domain) {
  const int N = domain.node_count;
  if (N < 4) throw std::invalid_argument("discrete_derivatives: need at least 4 nodes");
  const double h = domain.h();
  const auto& u = state.u;
  DerivativeField f;
  f.du.assign(N, 0.0);
  f.d2u.assign(N, 0.0);

  for (int j = 1; j < N - 1; ++j) {
    f.du[j] = (u[j + 1] - u[j - 1]) / (2.0 * h);
    f.d2u[j] = (u[j + 1] - 2.0 * u[j] + u[j - 1]) / (h * h);
  }

  if (domain.kind == DomainKind::RadialBall) {
    // Axis: even reflection.
    f.du[0] = 0.0;
    f.d2u[0] = 2.0 * (u[1] - u[0]) / (h * h);
  } else {
    f.du[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h);
    f.d2u[0] = (2.0 * u[0] - 5.0 * u[1] + 4.0 * u[2] - u[3]) / (h * h);
  }
  f.du[N - 1] = (3.0 * u[N - 1] - 4.0 * u[N - 2] + u[N - 3]) / (2.0 * h);
  f.d2u[N - 1] = (2.0 * u[N - 1] - 5.0 * u[N - 2] + 4.0 * u[N - 3] - u[N - 4]) / (h * h);
  return f;
}

SymMatrix gamma_matrix(std::span<const double> Du) {
  const int n = static_cast<int>(Du.size());
  double g2 = 0.0;
  for (double d : Du) g2 += d * d;
  const double w = std::sqrt(1.0 + g2);
  SymMatrix g = SymMatrix::identity(n);
  const double c = 1.0 / (w * (1.0 + w));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) g.set_sym(i, j, g.at(i, j) - c * Du[i] * Du[j]);
  return g;
}

PointGeometry hyperbolic_shape(double u, std::span<const double> Du, const SymMatrix& D2u) {
  if (!(u > 0.0)) throw std::invalid_argument("hyperbolic_shape: u must be positive");
  const int n = D2u.n;
  if (static_cast<int>(Du.size()) != n)
    throw std::invalid_argument("hyperbolic_shape: gradient/hessian size mismatch");

  PointGeometry g;
  g.Du.assign(Du.begin(), Du.end());
  double g2 = 0.0;
  for (double d : Du) g2 += d * d;
  g.w = std::sqrt(1.0 + g2);
  g.nu_upper = 1.0 / g.w;

  const SymMatrix gamma = gamma_matrix(Du);
  SymMatrix conj = sym_product(sym_product(gamma, D2u), gamma);
  g.A_tilde = SymMatrix(n);
  g.A = SymMatrix(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const double at = conj.at(i, j) / g.w;
      g.A_tilde.set_sym(i, j, at);
      g.A.set_sym(i, j, (i == j ? g.nu_upper : 0.0) + u * at);
    }
  g.kappa = sym_eigen(g.A).values;

  auto [M, min_eig] = convexity_matrix(u, Du, D2u);
  g.conv_min_eig = min_eig;
  return g;
}

RadialCurvatures radial_curvatures(double u, double du, double d2u, double r, int n) {
  if (r < 0.0) throw std::invalid_argument("radial_curvatures: r must be >= 0");
  if (n < 1) throw std::invalid_argument("radial_curvatures: n must be >= 1");
  RadialCurvatures rc;
  const double w2 = 1.0 + du * du;
  rc.w = std::sqrt(w2);
  rc.nu_upper = 1.0 / rc.w;
  rc.k_rad = (1.0 + u * d2u / w2) * rc.nu_upper;
  const double slope_over_r = (r == 0.0) ? d2u : du / r;
  rc.k_ang = (1.0 + u * slope_over_r) * rc.nu_upper;
  return rc;
}

std::pair<SymMatrix, double> convexity_matrix(double u, std::span<const double> Du,
                                              const SymMatrix& D2u) {
  const int n = D2u.n;
  SymMatrix M = SymMatrix::identity(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      M.set_sym(i, j, M.at(i, j) + Du[i] * Du[j] + u * D2u.at(i, j));
  return {M, sym_min_eigenvalue(M)};
}

CapProfile CapProfile::tangent(double R, double sigma) {
  if (!(sigma > 0.0 && sigma < 1.0))
    throw std::invalid_argument("cap: sigma must lie in (0,1)");
  if (!(R > 0.0)) throw std::invalid_argument("cap: R must be > 0");
  CapProfile c;
  c.R = R;
  c.sigma = sigma;
  c.radius = R / std::sqrt(1.0 - sigma * sigma);
  return c;
}

CapProfile CapProfile::lifted(double R, double sigma, double eps) {
  if (!(sigma > 0.0 && sigma < 1.0))
    throw std::invalid_argument("cap: sigma must lie in (0,1)");
  if (!(R > 0.0)) throw std::invalid_argument("cap: R must be > 0");
  if (eps < 0.0) throw std::invalid_argument("cap: eps must be >= 0");
  // radius solves radius^2 = R^2 + (sigma*radius + eps)^2.
  const double one_m = 1.0 - sigma * sigma;
  CapProfile c;
  c.R = R;
  c.sigma = sigma;
  c.radius = (sigma * eps + std::sqrt(sigma * sigma * eps * eps + one_m * (R * R + eps * eps))) /
             one_m;
  return c;
}

double CapProfile::value(double r) const {
  return std::sqrt(radius * radius - r * r) - sigma * radius;
}

double CapProfile::d1(double r) const { return -r / std::sqrt(radius * radius - r * r); }

double CapProfile::d2(double r) const {
  const double s2 = radius * radius - r * r;
  return -radius * radius / (s2 * std::sqrt(s2));
}

double CapProfile::slope_w(double r) const { return radius / (value(r) + sigma * radius); }

double cap_profile(double R, double sigma, double x) {
  const CapProfile c = CapProfile::tangent(R, sigma);
  if (std::abs(x) > R * (1.0 + 1e-12))
    throw std::invalid_argument("cap_profile: |x| must not exceed R");
  const double r = std::min(std::abs(x), R);
  // Evaluate so that u(R) is exactly zero.
  if (r == R) return 0.0;
  return c.value(r);
}

}  // namespace hcf
