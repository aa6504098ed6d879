#pragma once

// Small dense complex linear algebra used as an independent oracle in tests.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

using C = std::complex<double>;

struct Dense {
  int n;
  std::vector<C> a;
  explicit Dense(int n_) : n(n_), a(static_cast<std::size_t>(n_ * n_)) {}
  C& operator()(int i, int j) { return a[static_cast<std::size_t>(i * n + j)]; }
  C operator()(int i, int j) const { return a[static_cast<std::size_t>(i * n + j)]; }
};

inline std::vector<C> multiply(const Dense& m, const std::vector<C>& x) {
  std::vector<C> y(static_cast<std::size_t>(m.n));
  for (int i = 0; i < m.n; ++i) {
    for (int j = 0; j < m.n; ++j) y[i] += m(i, j) * x[j];
  }
  return y;
}

// Gaussian elimination with full row pivoting.
inline std::vector<C> solve(Dense m, std::vector<C> b) {
  const int n = m.n;
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i) {
      if (std::abs(m(i, k)) > std::abs(m(piv, k))) piv = i;
    }
    if (std::abs(m(piv, k)) == 0.0) throw std::runtime_error("oracle: singular");
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
      std::swap(b[k], b[piv]);
    }
    for (int i = k + 1; i < n; ++i) {
      const C f = m(i, k) / m(k, k);
      for (int j = k; j < n; ++j) m(i, j) -= f * m(k, j);
      b[i] -= f * b[k];
    }
  }
  std::vector<C> x(static_cast<std::size_t>(n));
  for (int i = n - 1; i >= 0; --i) {
    C s = b[i];
    for (int j = i + 1; j < n; ++j) s -= m(i, j) * x[j];
    x[i] = s / m(i, i);
  }
  return x;
}

}  // namespace oracle
