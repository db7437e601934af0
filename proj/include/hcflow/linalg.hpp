// Small dense symmetric matrices and a Jacobi eigensolver.  Everything in
// this project works on n x n matrices with n of order 1..10, so plain
// full storage and cyclic Jacobi sweeps are both adequate and fully
// deterministic.
#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hcf {

struct SymMatrix {
  int n = 0;
  std::vector<double> a;  // row-major, full storage

  SymMatrix() = default;
  explicit SymMatrix(int dim) : n(dim), a(static_cast<std::size_t>(dim) * dim, 0.0) {}

  static SymMatrix identity(int dim) {
    SymMatrix m(dim);
    for (int i = 0; i < dim; ++i) m.at(i, i) = 1.0;
    return m;
  }

  double& at(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  double at(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
  void set_sym(int i, int j, double v) {
    at(i, j) = v;
    if (i != j) at(j, i) = v;
  }
};

// Eigen-decomposition of a symmetric matrix.  values are sorted in
// descending order; column k of `vectors` (entries vec(i,k)) is the unit
// eigenvector belonging to values[k].
struct EigenSys {
  int n = 0;
  std::vector<double> values;
  std::vector<double> vectors;  // row-major: vectors[i*n + k]

  double vec(int i, int k) const { return vectors[static_cast<std::size_t>(i) * n + k]; }
};

EigenSys sym_eigen(const SymMatrix& m);
double sym_min_eigenvalue(const SymMatrix& m);

// C = A * B for symmetric operands (result need not be symmetric in
// general; callers use it where A and B commute).
SymMatrix sym_product(const SymMatrix& A, const SymMatrix& B);

std::vector<double> mat_vec(const SymMatrix& A, std::span<const double> x);

double dot(std::span<const double> x, std::span<const double> y);

}  // namespace hcf
