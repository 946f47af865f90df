#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include <Eigen/Dense>

namespace tvimpc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

// Real polynomial with coefficients in ascending powers: coeffs[i] multiplies
// z^i. Trailing zero coefficients are stripped on construction, so the
// highest stored coefficient is nonzero unless the polynomial is zero.
class Poly {
 public:
  Poly() : coeffs_{0.0} {}
  Poly(std::initializer_list<double> coeffs);
  explicit Poly(std::vector<double> coeffs);

  // z^d + alpha[d-1] z^(d-1) + ... + alpha[0]
  static Poly monic(const Vector& alpha);
  // Product of (z - root); the roots must be closed under conjugation.
  static Poly from_roots(const std::vector<std::complex<double>>& roots);

  std::size_t degree() const { return coeffs_.size() - 1; }
  bool is_zero() const { return coeffs_.size() == 1 && coeffs_[0] == 0.0; }
  bool is_monic() const { return coeffs_.back() == 1.0; }

  double operator[](std::size_t i) const {
    return i < coeffs_.size() ? coeffs_[i] : 0.0;
  }
  const std::vector<double>& coeffs() const { return coeffs_; }

  // Non-leading coefficients of a monic polynomial, ascending.
  Vector tail() const;
  // All coefficients, highest power first.
  Vector descending() const;

  double operator()(double z) const;
  std::complex<double> operator()(std::complex<double> z) const;

 private:
  void normalize();
  std::vector<double> coeffs_;
};

Poly poly_mul(const Poly& a, const Poly& b);

struct PolyDivMod {
  Poly quotient;
  Poly remainder;
};

// Polynomial long division by a monic denominator.
PolyDivMod poly_divmod(const Poly& num, const Poly& den);

// Solves A x = b by LU with partial pivoting. Throws SingularMatrix when a
// pivot falls below 1e-12 times the largest absolute entry of A.
Vector solve_linear(const Matrix& a, const Vector& b);

std::vector<std::complex<double>> eigenvalues(const Matrix& a);

// max |lambda_i|; throws NonConvergence if the eigen iteration fails.
double spectral_radius(const Matrix& a);

// Extreme eigenvalues of a symmetric matrix.
double max_eigenvalue_symmetric(const Matrix& a);
double min_eigenvalue_symmetric(const Matrix& a);

// det(zI - A) via the Faddeev-LeVerrier recursion; exact enough for the
// dimensions used here (<= 8).
Poly characteristic_polynomial(const Matrix& a);

// Companion with ones on the superdiagonal and -alpha in the last row.
Matrix controllable_companion(const Poly& monic);
// Companion with ones on the superdiagonal and -alpha (highest power first)
// in the first column.
Matrix observer_companion(const Poly& monic);

// p(A) by Horner's scheme.
Matrix poly_eval(const Poly& p, const Matrix& a);

// Induced infinity norm (maximum absolute row sum).
double inf_norm(const Matrix& a);

}  // namespace tvimpc
