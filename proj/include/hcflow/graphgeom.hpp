// Discrete differential geometry of vertical graphs over the half-space
// model: metric factors, Euclidean and hyperbolic shape matrices,
// principal curvatures, the local convexity matrix, the radial
// specialization, and the closed-form umbilic cap references.
#pragma once

#include <span>
#include <utility>
#include <vector>

#include "hcflow/linalg.hpp"

namespace hcf {

enum class DomainKind { Interval1D, RadialBall };

// Uniform grid over the domain.  Interval1D covers [-extent, extent]
// with both end nodes on the boundary; RadialBall covers r in [0, extent]
// with the single boundary node at r = extent (the axis r = 0 is an
// interior node handled by symmetry).
struct DomainDescriptor {
  DomainKind kind = DomainKind::RadialBall;
  int n = 2;          // graph dimension (1 for Interval1D)
  double extent = 1.0;
  int node_count = 400;

  void validate() const;
  bool operator==(const DomainDescriptor&) const = default;

  double h() const {
    return kind == DomainKind::Interval1D ? 2.0 * extent / (node_count - 1)
                                          : extent / (node_count - 1);
  }
  double coord(int j) const {
    return kind == DomainKind::Interval1D ? -extent + j * h() : j * h();
  }
  bool is_boundary(int j) const {
    return kind == DomainKind::Interval1D ? (j == 0 || j == node_count - 1)
                                          : (j == node_count - 1);
  }
  int first_interior() const { return kind == DomainKind::Interval1D ? 1 : 0; }
  int last_interior() const { return node_count - 2; }
};

// Discrete height function on a DomainDescriptor grid.
struct GraphState {
  std::vector<double> u;
  double t = 0.0;
  double epsilon = 0.0;  // boundary lift; u equals epsilon on boundary nodes

  void validate(const DomainDescriptor& domain) const;
};

struct DerivativeField {
  std::vector<double> du;
  std::vector<double> d2u;
};

// Second-order stencils on the full grid: central differences at interior
// nodes (reaching into the Dirichlet values next to the boundary),
// one-sided second-order stencils on the boundary nodes themselves, and
// the symmetry rule u'(0) = 0 at the radial axis.
DerivativeField discrete_derivatives(const GraphState& state, const DomainDescriptor& domain);

// gamma^{ij} = delta_ij - u_i u_j / (w(1+w)), the inverse square root of
// the graph metric delta_ij + u_i u_j.
SymMatrix gamma_matrix(std::span<const double> Du);

// Pointwise geometry of the graph of u at one location.
struct PointGeometry {
  std::vector<double> Du;
  double w = 1.0;
  double nu_upper = 1.0;          // vertical normal component 1/w
  SymMatrix A_tilde;              // Euclidean shape matrix
  SymMatrix A;                    // hyperbolic shape matrix (1/w) I + u A_tilde
  std::vector<double> kappa;      // eigenvalues of A, descending
  double conv_min_eig = 0.0;      // smallest eigenvalue of the convexity matrix
};

PointGeometry hyperbolic_shape(double u, std::span<const double> Du, const SymMatrix& D2u);

struct RadialCurvatures {
  double k_rad = 0.0;
  double k_ang = 0.0;  // multiplicity n-1
  double nu_upper = 1.0;
  double w = 1.0;
};

// Principal curvatures of a radially symmetric graph at radius r; the
// axis r = 0 replaces u'/r by u''(0).  The angular curvature carries the
// upward-graph orientation, (1 + u u'/r)/w.
RadialCurvatures radial_curvatures(double u, double du, double d2u, double r, int n);

// M = delta_ij + u_i u_j + u u_ij and its smallest eigenvalue; the graph
// is locally strictly convex exactly when the eigenvalue is positive.
std::pair<SymMatrix, double> convexity_matrix(double u, std::span<const double> Du,
                                              const SymMatrix& D2u);

// Umbilic spherical cap over a ball of radius R: the graph of
// u(r) = sqrt(radius^2 - r^2) - sigma * radius, all of whose hyperbolic
// principal curvatures equal sigma.  `tangent` touches the asymptotic
// boundary (u(R) = 0); `lifted` passes through height eps at r = R and is
// the exact steady state of the lifted Dirichlet problem.
struct CapProfile {
  double R = 1.0;
  double sigma = 0.5;
  double radius = 0.0;  // Euclidean sphere radius

  static CapProfile tangent(double R, double sigma);
  static CapProfile lifted(double R, double sigma, double eps);

  double value(double r) const;
  double d1(double r) const;
  double d2(double r) const;
  double slope_w(double r) const;  // w along the cap: radius / (u + sigma*radius)
};

// Height of the tangent cap; errors if sigma is outside (0,1) or |x| > R.
double cap_profile(double R, double sigma, double x);

}  // namespace hcf
