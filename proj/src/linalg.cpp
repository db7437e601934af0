#include "hcflow/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace hcf {

// Cyclic Jacobi with the classic stable rotation formulas.  Converges
// quadratically; 30 sweeps is far beyond what n <= 32 ever needs.
EigenSys sym_eigen(const SymMatrix& m) {
  const int n = m.n;
  if (n <= 0) throw std::invalid_argument("sym_eigen: empty matrix");

  std::vector<double> A = m.a;
  std::vector<double> V(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) V[static_cast<std::size_t>(i) * n + i] = 1.0;

  auto a = [&](int i, int j) -> double& { return A[static_cast<std::size_t>(i) * n + j]; };
  auto v = [&](int i, int j) -> double& { return V[static_cast<std::size_t>(i) * n + j]; };

  for (int sweep = 0; sweep < 50; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-300) break;

    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double scale = std::abs(a(p, p)) + std::abs(a(q, q));
        if (scale + 100.0 * std::abs(apq) == scale) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        const double app = a(p, p), aqq = a(q, q);
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = a(q, p) = 0.0;
        for (int r = 0; r < n; ++r) {
          if (r != p && r != q) {
            const double arp = a(r, p), arq = a(r, q);
            a(r, p) = a(p, r) = arp - s * (arq + tau * arp);
            a(r, q) = a(q, r) = arq + s * (arp - tau * arq);
          }
          const double vrp = v(r, p), vrq = v(r, q);
          v(r, p) = vrp - s * (vrq + tau * vrp);
          v(r, q) = vrq + s * (vrp - tau * vrq);
        }
      }
    }
  }

  EigenSys out;
  out.n = n;
  out.values.resize(n);
  for (int i = 0; i < n; ++i) out.values[i] = a(i, i);

  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int i, int j) { return out.values[i] > out.values[j]; });

  std::vector<double> sorted_vals(n);
  out.vectors.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int k = 0; k < n; ++k) {
    sorted_vals[k] = out.values[idx[k]];
    for (int i = 0; i < n; ++i)
      out.vectors[static_cast<std::size_t>(i) * n + k] = v(i, idx[k]);
  }
  out.values = std::move(sorted_vals);
  return out;
}

double sym_min_eigenvalue(const SymMatrix& m) {
  if (m.n == 1) return m.at(0, 0);
  if (m.n == 2) {
    const double tr = m.at(0, 0) + m.at(1, 1);
    const double diff = m.at(0, 0) - m.at(1, 1);
    const double disc = std::sqrt(diff * diff + 4.0 * m.at(0, 1) * m.at(0, 1));
    return 0.5 * (tr - disc);
  }
  return sym_eigen(m).values.back();
}

SymMatrix sym_product(const SymMatrix& A, const SymMatrix& B) {
  const int n = A.n;
  SymMatrix C(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += A.at(i, k) * B.at(k, j);
      C.at(i, j) = s;
    }
  return C;
}

std::vector<double> mat_vec(const SymMatrix& A, std::span<const double> x) {
  const int n = A.n;
  std::vector<double> y(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int k = 0; k < n; ++k) s += A.at(i, k) * x[k];
    y[i] = s;
  }
  return y;
}

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

}  // namespace hcf
