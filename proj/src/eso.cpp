#include "tvimpc/eso.hpp"

#include <cmath>

#include "tvimpc/errors.hpp"

namespace tvimpc {

std::string to_string(EsoMode m) { return m == EsoMode::kGrayBox ? "gray" : "black"; }

EsoMode eso_mode_from_string(const std::string& s) {
  if (s == "gray" || s == "gray-box" || s == "graybox") return EsoMode::kGrayBox;
  if (s == "black" || s == "black-box" || s == "blackbox") return EsoMode::kBlackBox;
  throw ValidationError("unknown ESO mode '" + s + "'");
}

AugmentedErrorSystem augmented_error_system(const PlantModel& plant, const Vector& l1, double l2) {
  const Eigen::Index n = plant.a.rows();
  if (l1.size() != n) throw DimensionError("augmented_error_system: L1 dimension mismatch");
  AugmentedErrorSystem sys;
  sys.a = Matrix::Zero(n + 1, n + 1);
  sys.a.topLeftCorner(n, n) = plant.a - l1 * plant.c;
  sys.a.topRightCorner(n, 1) = plant.e;
  sys.a.bottomLeftCorner(1, n) = -l2 * plant.c;
  sys.a(n, n) = 1.0;
  sys.b = Vector::Zero(n + 1);
  sys.b(n) = 1.0;
  return sys;
}

void validate_eso(const EsoConfig& cfg, const PlantModel& plant) {
  const double r = spectral_radius(augmented_error_system(plant, cfg.l1, cfg.l2).a);
  if (!(r < 1.0 - 1e-12)) throw UnstableObserver("ESO error dynamics not stable (spectral radius " + std::to_string(r) + ")");
}

EsoState eso_step(const EsoConfig& cfg, const EsoState& st, const PlantModel& plant, double u, double y) {
  const Eigen::Index n = plant.a.rows();
  if (st.x_hat.size() != n || cfg.l1.size() != n) throw DimensionError("eso_step: dimension mismatch");
  const double innovation = plant.c.dot(st.x_hat) - y;
  EsoState next;
  if (cfg.mode == EsoMode::kGrayBox) {
    next.x_hat = plant.a * st.x_hat + plant.b_vec * u + plant.e * st.d_hat - cfg.l1 * innovation;
  } else {
    Matrix integrators = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i + 1 < n; ++i) integrators(i, i + 1) = 1.0;
    next.x_hat = integrators * st.x_hat + plant.b_vec * (u + st.d_hat) - cfg.l1 * innovation;
  }
  next.d_hat = st.d_hat - cfg.l2 * innovation;
  return next;
}

double disturbance_estimate(const EsoConfig& cfg, const EsoState& st, const PlantModel& plant) {
  return cfg.mode == EsoMode::kGrayBox ? st.d_hat : st.d_hat * plant.input_gain;
}

double compensation(const EsoConfig& cfg, const EsoState& st, const PlantModel& plant) {
  return disturbance_estimate(cfg, st, plant) / plant.input_gain;
}

EsoGains design_eso_gains(const PlantModel& plant, const std::vector<std::complex<double>>& poles) {
  const Eigen::Index n = plant.a.rows();
  if (static_cast<Eigen::Index>(poles.size()) != n + 1)
    throw DimensionError("design_eso_gains: need n + 1 poles");
  for (const auto& p : poles) {
    if (!(std::abs(p) < 1.0)) throw UnstablePoleRequest("design_eso_gains: pole outside the unit disc");
    if (std::abs(p.imag()) > 0.0) {
      bool paired = false;
      for (const auto& q : poles) paired = paired || std::abs(q - std::conj(p)) <= 1e-12 * (1.0 + std::abs(p));
      if (!paired) throw ValidationError("design_eso_gains: poles not closed under conjugation");
    }
  }

  Matrix aa = Matrix::Zero(n + 1, n + 1);
  aa.topLeftCorner(n, n) = plant.a;
  aa.topRightCorner(n, 1) = plant.e;
  aa(n, n) = 1.0;
  RowVector ca = RowVector::Zero(n + 1);
  ca.head(n) = plant.c;

  Matrix obs(n + 1, n + 1);
  RowVector row = ca;
  for (Eigen::Index i = 0; i <= n; ++i) {
    obs.row(i) = row;
    row = row * aa;
  }
  Vector last = Vector::Zero(n + 1);
  last(n) = 1.0;
  Vector v;
  try {
    v = solve_linear(obs, last);
  } catch (const SingularMatrix&) {
    throw UnobservablePair("design_eso_gains: augmented pair not observable");
  }
  const Vector l = poly_eval(Poly::from_roots(poles), aa) * v;
  return {l.head(n), l(n)};
}

double eso_error_bound(const AugmentedErrorSystem& sys, double delta) {
  const Eigen::Index m = sys.a.rows();
  Vector g;
  try {
    g = solve_linear(Matrix::Identity(m, m) - sys.a, sys.b);
  } catch (const SingularMatrix&) {
    throw SingularResolvent("eso_error_bound: I - A_a singular");
  }
  return delta * g.cwiseAbs().maxCoeff();
}

double delta_bound(const PlantModel& plant, double sup_d_err) {
  const Eigen::Index n = plant.a.rows();
  Vector g;
  try {
    g = solve_linear(Matrix::Identity(n, n) - plant.a, plant.e);
  } catch (const SingularMatrix&) {
    throw SingularResolvent("delta_bound: I - A_c singular");
  }
  return sup_d_err * std::abs(plant.c.dot(g));
}

}  // namespace tvimpc
