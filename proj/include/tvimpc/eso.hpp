#pragma once

#include <complex>
#include <string>
#include <vector>

#include "tvimpc/mathcore.hpp"
#include "tvimpc/model.hpp"

namespace tvimpc {

// Gray-box uses the known (A_c, E_c); black-box replaces A_c with a chain of
// delayed integrators and routes the disturbance estimate through B_c.
enum class EsoMode { kGrayBox, kBlackBox };

std::string to_string(EsoMode m);
EsoMode eso_mode_from_string(const std::string& s);

struct EsoConfig {
  Vector l1;
  double l2 = 0.0;
  EsoMode mode = EsoMode::kGrayBox;
};

struct EsoState {
  Vector x_hat;
  double d_hat = 0.0;
};

// Error dynamics zeta(k+1) = A_a zeta(k) + B_a (d_l(k+1) - d_l(k)).
struct AugmentedErrorSystem {
  Matrix a;
  Vector b;
};

AugmentedErrorSystem augmented_error_system(const PlantModel& plant, const Vector& l1, double l2);

// Throws UnstableObserver unless spectral_radius(A_a) < 1 for the gray-box
// error system (gains are designed against the known plant in both modes).
void validate_eso(const EsoConfig& cfg, const PlantModel& plant);

EsoState eso_step(const EsoConfig& cfg, const EsoState& st, const PlantModel& plant, double u, double y);

// Estimate of d_l in its own units. The black-box observer routes its
// estimate through B_c, so it estimates d_l / b.
double disturbance_estimate(const EsoConfig& cfg, const EsoState& st, const PlantModel& plant);

// Input-channel compensation u_d with u = u0 - u_d.
double compensation(const EsoConfig& cfg, const EsoState& st, const PlantModel& plant);

struct EsoGains {
  Vector l1;
  double l2;
};

// Places the eigenvalues of A_a at `poles` (Ackermann on the augmented pair).
EsoGains design_eso_gains(const PlantModel& plant, const std::vector<std::complex<double>>& poles);

// delta * ||(I - A_a)^-1 B_a||_inf
double eso_error_bound(const AugmentedErrorSystem& sys, double delta);

// sup_d_err * |C_c (I - A_c)^-1 E_c|
double delta_bound(const PlantModel& plant, double sup_d_err);

}  // namespace tvimpc
