#include "tvimpc/mathcore.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tvimpc/errors.hpp"

namespace tvimpc {

Poly::Poly(std::initializer_list<double> coeffs) : coeffs_(coeffs) {
  normalize();
}

Poly::Poly(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  normalize();
}

void Poly::normalize() {
  while (coeffs_.size() > 1 && coeffs_.back() == 0.0) coeffs_.pop_back();
  if (coeffs_.empty()) coeffs_.push_back(0.0);
}

Poly Poly::monic(const Vector& alpha) {
  std::vector<double> c(alpha.data(), alpha.data() + alpha.size());
  c.push_back(1.0);
  return Poly(std::move(c));
}

Poly Poly::from_roots(const std::vector<std::complex<double>>& roots) {
  std::vector<std::complex<double>> c{1.0};
  for (const auto& r : roots) {
    std::vector<std::complex<double>> next(c.size() + 1, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
      next[i + 1] += c[i];
      next[i] -= r * c[i];
    }
    c = std::move(next);
  }
  std::vector<double> real(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) real[i] = c[i].real();
  return Poly(std::move(real));
}

Vector Poly::tail() const {
  Vector t(static_cast<Eigen::Index>(degree()));
  for (std::size_t i = 0; i < degree(); ++i) t(static_cast<Eigen::Index>(i)) = coeffs_[i];
  return t;
}

Vector Poly::descending() const {
  Vector d(static_cast<Eigen::Index>(coeffs_.size()));
  for (std::size_t i = 0; i < coeffs_.size(); ++i)
    d(static_cast<Eigen::Index>(i)) = coeffs_[coeffs_.size() - 1 - i];
  return d;
}

double Poly::operator()(double z) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

std::complex<double> Poly::operator()(std::complex<double> z) const {
  std::complex<double> acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

Poly poly_mul(const Poly& a, const Poly& b) {
  std::vector<double> c(a.degree() + b.degree() + 1, 0.0);
  for (std::size_t i = 0; i <= a.degree(); ++i)
    for (std::size_t j = 0; j <= b.degree(); ++j) c[i + j] += a[i] * b[j];
  return Poly(std::move(c));
}

PolyDivMod poly_divmod(const Poly& num, const Poly& den) {
  if (!den.is_monic()) throw DimensionError("poly_divmod: denominator must be monic");
  const std::size_t dd = den.degree();
  if (num.degree() < dd || num.is_zero()) return {Poly{0.0}, num};

  std::vector<double> rem = num.coeffs();
  std::vector<double> quot(num.degree() - dd + 1, 0.0);
  for (std::size_t k = quot.size(); k-- > 0;) {
    const double lead = rem[k + dd];
    quot[k] = lead;
    for (std::size_t j = 0; j <= dd; ++j) rem[k + j] -= lead * den[j];
  }
  rem.resize(std::max<std::size_t>(dd, 1));
  if (dd == 0) rem.assign(1, 0.0);
  return {Poly(std::move(quot)), Poly(std::move(rem))};
}

Vector solve_linear(const Matrix& a, const Vector& b) {
  if (a.rows() != a.cols() || a.rows() != b.size())
    throw DimensionError("solve_linear: expected square A matching b");
  const Eigen::Index n = a.rows();
  if (n == 0) return Vector(0);
  const double scale = a.cwiseAbs().maxCoeff();
  if (!(scale > 0.0) || !std::isfinite(scale)) throw SingularMatrix("solve_linear: zero or non-finite matrix");

  Eigen::PartialPivLU<Matrix> lu(a);
  const Matrix& packed = lu.matrixLU();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(packed(i, i)) < 1e-12 * scale)
      throw SingularMatrix("solve_linear: pivot " + std::to_string(i) + " below threshold");
  }
  return lu.solve(b);
}

std::vector<std::complex<double>> eigenvalues(const Matrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("eigenvalues: matrix not square");
  Eigen::EigenSolver<Matrix> es(a, false);
  if (es.info() != Eigen::Success) throw NonConvergence("eigenvalues: QR iteration did not converge");
  const auto& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

double spectral_radius(const Matrix& a) {
  double r = 0.0;
  for (const auto& l : eigenvalues(a)) r = std::max(r, std::abs(l));
  return r;
}

double max_eigenvalue_symmetric(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NonConvergence("symmetric eigen solver failed");
  return es.eigenvalues().maxCoeff();
}

double min_eigenvalue_symmetric(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NonConvergence("symmetric eigen solver failed");
  return es.eigenvalues().minCoeff();
}

Poly characteristic_polynomial(const Matrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("characteristic_polynomial: matrix not square");
  const Eigen::Index n = a.rows();
  std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
  c[static_cast<std::size_t>(n)] = 1.0;
  Matrix m = Matrix::Zero(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    m = a * m + c[static_cast<std::size_t>(n - k + 1)] * Matrix::Identity(n, n);
    c[static_cast<std::size_t>(n - k)] = -(a * m).trace() / static_cast<double>(k);
  }
  return Poly(std::move(c));
}

Matrix controllable_companion(const Poly& monic) {
  const auto n = static_cast<Eigen::Index>(monic.degree());
  Matrix c = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) c(i, i + 1) = 1.0;
  for (Eigen::Index j = 0; j < n; ++j) c(n - 1, j) = -monic[static_cast<std::size_t>(j)];
  return c;
}

Matrix observer_companion(const Poly& monic) {
  const auto n = static_cast<Eigen::Index>(monic.degree());
  Matrix c = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) c(i, i + 1) = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) c(i, 0) = -monic[static_cast<std::size_t>(n - 1 - i)];
  return c;
}

Matrix poly_eval(const Poly& p, const Matrix& a) {
  const Eigen::Index n = a.rows();
  Matrix acc = Matrix::Zero(n, n);
  const auto& c = p.coeffs();
  for (auto it = c.rbegin(); it != c.rend(); ++it)
    acc = acc * a + *it * Matrix::Identity(n, n);
  return acc;
}

double inf_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().rowwise().sum().maxCoeff();
}

}  // namespace tvimpc
