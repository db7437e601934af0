// Symmetric curvature functions f(lambda) on the positive cone, their
// first derivatives, the induced matrix functional F(A) with its
// derivative matrix F^{ij}, and a sampling certifier for the structure
// conditions the flow analysis relies on.
//
// Supported family: H_1, H_n^{1/n} and the quotients (H_n/H_l)^{1/(n-l)},
// where H_l is the normalized l-th elementary symmetric polynomial.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hcflow/linalg.hpp"

namespace hcf {

enum class CurvatureFamily { MeanH1, GaussRoot, HessianQuotient };

struct CurvatureFunctionSpec {
  CurvatureFamily family = CurvatureFamily::GaussRoot;
  int n = 2;  // number of principal curvatures
  int l = 0;  // HessianQuotient only: f = (H_n/H_l)^{1/(n-l)}, 0 <= l < n

  void validate() const;  // throws std::invalid_argument
  std::string name() const;
  bool operator==(const CurvatureFunctionSpec&) const = default;
};

// Ordered tuple of principal curvatures.  Admissible = strictly inside
// the positive cone.
struct PrincipalCurvatures {
  std::vector<double> values;

  bool admissible() const;
  // Index of the first non-finite entry, else of the smallest entry.
  int worst_component() const;
};

// Normalized elementary symmetric polynomial e_l(lambda)/C(n,l), e_0 = 1.
double eval_Hl(std::span<const double> lambda, int l);

double eval_f(const CurvatureFunctionSpec& spec, std::span<const double> lambda);
double eval_f(const CurvatureFunctionSpec& spec, const PrincipalCurvatures& kappa);

// Writes df/dlambda_i into grad (size n) and returns f.
double eval_f_grad(const CurvatureFunctionSpec& spec, std::span<const double> lambda,
                   std::span<double> grad);
std::vector<double> grad_f(const CurvatureFunctionSpec& spec, std::span<const double> lambda);

// F(A) = f(eigenvalues of A) and its derivative matrix dF/da_ij.
double F_value(const CurvatureFunctionSpec& spec, const SymMatrix& A);
SymMatrix F_matrix_derivative(const CurvatureFunctionSpec& spec, const SymMatrix& A);

// Sampling plan for the structure certifier.  Components are drawn
// log-uniformly from [lambda_min, lambda_max]; the large-argument probe
// evaluates f(l_1,...,l_{n-1}, l_n + R_big) over points in the ball of
// radius delta0 around (1,...,1) and accepts f >= 1 + eps0/2.
struct ConeSampleSpec {
  int samples = 10000;
  std::uint64_t seed = 12345;
  double lambda_min = 1e-2;
  double lambda_max = 1e2;
  double delta0 = 0.1;
  double eps0 = 0.05;
  double R_big = 1e6;
  double boundary_lambda = 1e-8;  // near-boundary probe component
  double boundary_tol = 1e-3;     // f must fall below this on the boundary probe
};

struct ConditionResult {
  std::string id;     // wire id of the condition, e.g. "Int5"
  bool pass = false;
  bool tight = false; // inequality held with equality everywhere
  bool has_witness = false;
  std::vector<double> witness;  // offending lambda (when !pass)
  double lhs = 0.0;
  double rhs = 0.0;
  std::string note;
};

struct StructureReport {
  CurvatureFunctionSpec spec;
  int samples = 0;
  std::uint64_t seed = 0;
  std::vector<ConditionResult> conditions;

  bool all_pass() const;
  const ConditionResult& find(const std::string& id) const;
};

// Certifies the structure conditions by sampling.  Condition ids in the
// report, in order: Int5 (monotonicity), Int6 (concavity), Int7
// (positivity / vanishing on the cone boundary), Int9 (normalization),
// Int10 (1-homogeneity), Int11 (large-argument limit), Int12 (arithmetic
// mean bound), Int13 (sum of derivatives >= 1), Int20 (sum f_i >
// sum lambda_i^2 f_i on {0 < f < 1}).
StructureReport check_structure(const CurvatureFunctionSpec& spec, const ConeSampleSpec& sampler);

}  // namespace hcf
