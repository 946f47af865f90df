#include "tvimpc/stabilizer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tvimpc/errors.hpp"

namespace tvimpc {

Matrix ReducedSystem::f_of(const CoeffVector& alpha) { return observer_companion(Poly::monic(alpha)); }

Vector reduced_input_vector(const PlantModel& plant) { return plant.numerator().reverse(); }

ReducedSystem build_reduced(std::vector<CoeffVector> alphas, const Vector& g, std::size_t plant_order) {
  if (alphas.empty()) throw DimensionError("build_reduced: empty coefficient sequence");
  const auto rho = static_cast<std::size_t>(alphas.front().size());
  if (rho != plant_order) throw DimensionError("build_reduced: requires plant order == exosystem order");
  if (static_cast<std::size_t>(g.size()) != rho) throw DimensionError("build_reduced: input vector size mismatch");
  for (const auto& a : alphas)
    if (static_cast<std::size_t>(a.size()) != rho) throw DimensionError("build_reduced: ragged coefficient sequence");
  ReducedSystem sys;
  sys.alphas = std::move(alphas);
  sys.g = g;
  sys.c_o = RowVector::Zero(static_cast<Eigen::Index>(rho));
  sys.c_o(0) = 1.0;
  return sys;
}

std::vector<double> PolytopeModel::weights(const CoeffVector& alpha) const {
  if (static_cast<std::size_t>(alpha.size()) != bounds.size()) throw DimensionError("PolytopeModel::weights: size");
  constexpr double kSlack = 1e-14;
  for (std::size_t j = 0; j < bounds.size(); ++j) {
    const double v = alpha(static_cast<Eigen::Index>(j));
    const auto& iv = bounds[j];
    const double tol = kSlack * std::max(1.0, std::abs(v));
    if (v < iv.lo - tol || v > iv.hi + tol)
      throw BoundsViolated("coefficient " + std::to_string(j) + " = " + std::to_string(v) + " outside [" +
                           std::to_string(iv.lo) + ", " + std::to_string(iv.hi) + "]");
  }
  std::vector<double> sigma(vertices.size(), 1.0);
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    for (std::size_t a = 0; a < active.size(); ++a) {
      const auto& iv = bounds[active[a]];
      const double t =
          std::clamp((alpha(static_cast<Eigen::Index>(active[a])) - iv.lo) / (iv.hi - iv.lo), 0.0, 1.0);
      sigma[i] *= ((i >> a) & 1U) ? t : 1.0 - t;
    }
  }
  return sigma;
}

Matrix PolytopeModel::interpolate(const std::vector<double>& sigma) const {
  if (sigma.size() != vertices.size()) throw DimensionError("PolytopeModel::interpolate: weight count");
  Matrix f = Matrix::Zero(vertices.front().rows(), vertices.front().cols());
  for (std::size_t i = 0; i < sigma.size(); ++i) f += sigma[i] * vertices[i];
  return f;
}

PolytopeModel build_polytope(const std::vector<CoeffInterval>& bounds, const std::vector<CoeffVector>& alphas) {
  if (bounds.empty()) throw DimensionError("build_polytope: no coefficient bounds");
  PolytopeModel poly;
  poly.bounds = bounds;
  for (std::size_t j = 0; j < bounds.size(); ++j) {
    if (bounds[j].hi < bounds[j].lo) throw ValidationError("build_polytope: inverted interval");
    if (!bounds[j].degenerate()) poly.active.push_back(j);
  }
  const std::size_t n_vertices = std::size_t{1} << poly.active.size();
  for (std::size_t i = 0; i < n_vertices; ++i) {
    CoeffVector corner(static_cast<Eigen::Index>(bounds.size()));
    for (std::size_t j = 0; j < bounds.size(); ++j) corner(static_cast<Eigen::Index>(j)) = bounds[j].lo;
    for (std::size_t a = 0; a < poly.active.size(); ++a)
      if ((i >> a) & 1U) corner(static_cast<Eigen::Index>(poly.active[a])) = bounds[poly.active[a]].hi;
    poly.vertices.push_back(ReducedSystem::f_of(corner));
  }
  for (const auto& a : alphas) (void)poly.weights(a);
  return poly;
}

ReducedObserver::ReducedObserver(const Vector& h, const Vector& g) : h_(h), z_hat_(Vector::Zero(h.size())) {
  const Eigen::Index m = h.size();
  if (g.size() != m + 1) throw DimensionError("ReducedObserver: gain and input vector sizes disagree");
  // F12 and F22 do not depend on the exosystem coefficients.
  const Matrix f = ReducedSystem::f_of(Vector::Zero(m + 1));
  const RowVector f12 = f.block(0, 1, 1, m);
  const Matrix f22 = f.block(1, 1, m, m);
  f22_minus_hf12_ = f22 - h_ * f12;
  g1_ = g(0);
  g2_ = g.tail(m);
  g2_minus_hg1_ = g2_ - h_ * g1_;
}

Vector ReducedObserver::step(const Matrix& f, double y2, double u_st) {
  const Eigen::Index m = h_.size();
  const Vector x_b_hat = estimate(y2);
  const double f11 = f(0, 0);
  const Vector f21 = f.block(1, 0, m, 1);
  z_hat_ = f22_minus_hf12_ * z_hat_ + g2_minus_hg1_ * u_st + (f22_minus_hf12_ * h_ + f21 - h_ * f11) * y2;
  return x_b_hat;
}

double stabilizer_output(const RowVector& k, double e, const Vector& x_b_hat) {
  if (k.size() != x_b_hat.size() + 1) throw DimensionError("stabilizer_output: gain size mismatch");
  return k(0) * e + k.tail(x_b_hat.size()).dot(x_b_hat);
}

}  // namespace tvimpc
