#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tvimpc/mathcore.hpp"

namespace tvimpc {

// Ascending coefficients alpha[0..rho-1] of z^rho + alpha[rho-1] z^(rho-1) + ... + alpha[0].
using CoeffVector = Vector;

// Single-input single-output plant in controllable canonical form:
//   x(k+1) = A x(k) + B u(k) + E d_l(k),  y(k) = C x(k)
// with B = e_n and E = e_n / b.
struct PlantModel {
  Matrix a;
  Vector b_vec;
  Vector e;
  RowVector c;
  double input_gain = 1.0;

  // `last_row` is the free last row of A (a_0 .. a_{n-1}); `output_row` is C.
  static PlantModel canonical(const Vector& last_row, const RowVector& output_row, double input_gain);

  std::size_t order() const { return static_cast<std::size_t>(a.rows()); }
  // Ascending non-leading coefficients of det(zI - A).
  CoeffVector denominator() const { return -a.row(a.rows() - 1).transpose(); }
  // Ascending numerator coefficients of C (zI - A)^-1 B.
  Vector numerator() const { return c.transpose(); }

  void validate() const;
};

struct PlantStep {
  Vector x_next;
  double y;
};

PlantStep plant_step(const PlantModel& plant, const Vector& x, double u, double d_l);

// LTV exosystem w(k+1) = S(k) w(k), r(k) = Q(k) w(k). S and Q must be defined
// for every integer k (negative indices are used when shifting coefficients).
struct Exosystem {
  std::function<Matrix(std::int64_t)> s;
  std::function<RowVector(std::int64_t)> q;
  std::size_t rho = 0;
  double sample_time = 1e-3;
  double lambda = 1.0;
  std::string kind = "custom";

  // Reference generator used in the simulation study:
  //   S(k) = [[1, Ts (1 + 0.5 sin(2 pi t))], [Ts (-1 + 0.5 sin(5 t)), 1]], t = k Ts
  //   Q = [lambda, 0]
  static Exosystem paper(double lambda = 1.0, double sample_time = 1e-3);
  static Exosystem constant(const Matrix& s, const RowVector& q, double sample_time = 1e-3);
};

struct ExoStep {
  Vector w_next;
  double r;
};

ExoStep exo_step(const Exosystem& exo, const Vector& w, std::int64_t k);

// d_l(k) = k1(t) sin(k2 x1^2 x2) + n(t), k1(t) = A1 sin(w1 t), n(t) = An sq(wn t)
// where sq(.) = sign(sin(.)) with sign(0) = +1.
struct DisturbanceModel {
  double k1_amplitude = 1e3;
  double k1_frequency = 2.0 * 3.14159265358979323846;
  double k2 = 1e-4;
  double noise_amplitude = 1e-2;
  double noise_frequency = 4.0 * 3.14159265358979323846;
  bool enabled = true;
};

double disturbance_eval(const DisturbanceModel& model, std::int64_t k, const Vector& x, double sample_time);

// Ascending coefficients of det(zI - M) with the leading 1 dropped.
CoeffVector frozen_alpha(const Matrix& m);

enum class CoeffStrategy { kFrozen, kLyapunov };

std::string to_string(CoeffStrategy s);
CoeffStrategy coeff_strategy_from_string(const std::string& s);

// Annihilator of the output sequence at time k:
//   r(k+rho) + beta[rho-1](k) r(k+rho-1) + ... + beta[0](k) r(k) = 0.
// Throws TransformSingular when the observability stack at k loses rank.
CoeffVector output_annihilator(const Exosystem& exo, std::int64_t k);

// Coefficients of the observer-canonical exosystem at step k. With the
// lyapunov strategy these satisfy T(k+1) S(k) T(k)^-1 = observer_companion(alpha(k))
// exactly; with the frozen strategy they are the characteristic coefficients of S(k).
CoeffVector observer_coeffs(const Exosystem& exo, std::int64_t k, CoeffStrategy strategy);

std::vector<CoeffVector> ltv_observer_coeffs(const Exosystem& exo, std::size_t horizon, CoeffStrategy strategy);

// Time-varying state transform w_o = T(k) w for the lyapunov strategy.
Matrix observer_transform(const Exosystem& exo, std::int64_t k);

struct CoeffInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool degenerate() const { return hi <= lo; }
};

// Analytic per-coefficient bounds for Exosystem::paper over every k.
std::vector<CoeffInterval> paper_exosystem_bounds(double sample_time, CoeffStrategy strategy);

// Smallest intervals containing every sample; non-degenerate ones are widened
// by `pad` on each side.
std::vector<CoeffInterval> sampled_bounds(const std::vector<CoeffVector>& alphas, double pad);

// Plant of the simulation study (A_c, C_c, E_c as printed; b = 1 / 4.96e-5).
PlantModel paper_plant();

}  // namespace tvimpc
