#pragma once

#include <cstddef>
#include <vector>

#include "tvimpc/mathcore.hpp"
#include "tvimpc/model.hpp"

namespace tvimpc {

// Reduced pair x_o(k+1) = F(k) x_o(k) + G u_st(k), y = C_o x_o, where F(k)
// is the observer companion of the exosystem coefficients at step k.
struct ReducedSystem {
  std::vector<CoeffVector> alphas;
  Vector g;
  RowVector c_o;

  std::size_t order() const { return static_cast<std::size_t>(g.size()); }
  Matrix f(std::size_t k) const { return f_of(alphas.at(k)); }
  static Matrix f_of(const CoeffVector& alpha);
};

// Input vector of the reduced pair: the plant numerator, highest power first
// (input vector of the observer-canonical realization of b(z) / a_exo(z)).
Vector reduced_input_vector(const PlantModel& plant);

ReducedSystem build_reduced(std::vector<CoeffVector> alphas, const Vector& g, std::size_t plant_order);

// F(k) = sum_i sigma_i(k) F_i over the corners of per-coefficient intervals.
struct PolytopeModel {
  std::vector<Matrix> vertices;
  std::vector<CoeffInterval> bounds;
  std::vector<std::size_t> active;  // non-degenerate coefficient indices

  std::size_t size() const { return vertices.size(); }
  // Multilinear (product of barycentric) weights; throws BoundsViolated.
  std::vector<double> weights(const CoeffVector& alpha) const;
  Matrix interpolate(const std::vector<double>& sigma) const;
};

PolytopeModel build_polytope(const std::vector<CoeffInterval>& bounds, const std::vector<CoeffVector>& alphas);

// Reduced-order observer for the unmeasured part x_b of x_o = [x_o1; x_b].
class ReducedObserver {
 public:
  ReducedObserver() = default;
  ReducedObserver(const Vector& h, const Vector& g);

  const Vector& h() const { return h_; }
  const Vector& z_hat() const { return z_hat_; }
  void reset() { z_hat_.setZero(); }

  // Estimate x_b from the pre-update state; no side effects.
  Vector estimate(double y2) const { return z_hat_ + h_ * y2; }

  // Returns the pre-update estimate, then advances z_hat with F(k).
  Vector step(const Matrix& f, double y2, double u_st);

 private:
  Vector h_;
  Vector z_hat_;
  Matrix f22_minus_hf12_;
  Vector g2_minus_hg1_;
  double g1_ = 0.0;
  Vector g2_;
};

// u_st = K_1 e + K_2 x_b_hat
double stabilizer_output(const RowVector& k, double e, const Vector& x_b_hat);

}  // namespace tvimpc
