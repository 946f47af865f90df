#pragma once

// Reference computations used only by the tests. They deliberately avoid the
// library's own routines (no Eigen decompositions, no tvimpc::Poly).

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

namespace oracle {

using Mat = std::vector<std::vector<double>>;
using Vec = std::vector<double>;

// Gaussian elimination with full row scan; returns empty on singularity.
inline Vec gauss_solve(Mat a, Vec b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    if (std::abs(a[piv][c]) < 1e-300) return {};
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  Vec x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return x;
}

// Ascending convolution.
inline Vec convolve(const Vec& a, const Vec& b) {
  Vec out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

// Determinant by cofactor expansion (small matrices only).
inline double det(const Mat& m) {
  const std::size_t n = m.size();
  if (n == 1) return m[0][0];
  if (n == 2) return m[0][0] * m[1][1] - m[0][1] * m[1][0];
  double s = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    Mat minor;
    for (std::size_t r = 1; r < n; ++r) {
      Vec row;
      for (std::size_t k = 0; k < n; ++k)
        if (k != c) row.push_back(m[r][k]);
      minor.push_back(row);
    }
    s += ((c % 2) ? -1.0 : 1.0) * m[0][c] * det(minor);
  }
  return s;
}

// Ascending coefficients of det(zI - M) by interpolation at n+1 points.
inline Vec char_poly(const Mat& m) {
  const std::size_t n = m.size();
  Mat v(n + 1, Vec(n + 1));
  Vec rhs(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double z = static_cast<double>(i) - static_cast<double>(n) / 2.0;
    Mat zm = m;
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) zm[r][c] = (r == c ? z : 0.0) - m[r][c];
    rhs[i] = det(zm);
    double p = 1.0;
    for (std::size_t k = 0; k <= n; ++k) {
      v[i][k] = p;
      p *= z;
    }
  }
  return gauss_solve(v, rhs);
}

inline double eval(const Vec& asc, double z) {
  double s = 0.0;
  for (std::size_t i = asc.size(); i-- > 0;) s = s * z + asc[i];
  return s;
}

// Real root of a monic-leading odd-degree polynomial by bisection.
inline double bisect_root(const Vec& asc, double lo, double hi) {
  double flo = eval(asc, lo);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = eval(asc, mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Roots of a monic cubic (ascending [c0, c1, c2, 1]): bisection for a real
// root, deflation, then the quadratic formula.
inline std::vector<std::complex<double>> cubic_roots(const Vec& asc) {
  double bound = 1.0;
  for (std::size_t i = 0; i < 3; ++i) bound = std::max(bound, 1.0 + std::abs(asc[i]));
  const double r = bisect_root(asc, -bound, bound);
  // z^3 + c2 z^2 + c1 z + c0 = (z - r)(z^2 + b1 z + b0)
  const double b1 = asc[2] + r;
  const double b0 = asc[1] + r * b1;
  const std::complex<double> disc = std::sqrt(std::complex<double>(b1 * b1 - 4.0 * b0, 0.0));
  return {r, (-b1 + disc) / 2.0, (-b1 - disc) / 2.0};
}

// Power series of num/den (ascending in z^-1 after dividing by the leading
// terms): first `count` coefficients of num(z)/den(z) expanded at infinity.
// `num_desc`, `den_desc` are highest power first, den monic, deg num <= deg den.
inline Vec series_at_infinity(Vec num_desc, const Vec& den_desc, std::size_t count) {
  const std::size_t d = den_desc.size() - 1;
  while (num_desc.size() < d + 1) num_desc.insert(num_desc.begin(), 0.0);
  Vec out;
  Vec rem = num_desc;
  for (std::size_t k = 0; k < count; ++k) {
    const double h = rem[0];
    out.push_back(h);
    for (std::size_t i = 0; i <= d; ++i) rem[i] -= h * den_desc[i];
    rem.erase(rem.begin());
    rem.push_back(0.0);
  }
  return out;
}

inline double max_eig_sym(Mat a) {
  // Jacobi rotations.
  const std::size_t n = a.size();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
    }
  }
  double m = a[0][0];
  for (std::size_t i = 1; i < n; ++i) m = std::max(m, a[i][i]);
  return m;
}

}  // namespace oracle
