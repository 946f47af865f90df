#include "tvimpc/internal_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tvimpc/errors.hpp"

namespace tvimpc {

Matrix build_shift_operator(const CoeffVector& alpha) {
  const Eigen::Index rho = alpha.size();
  if (rho < 2) throw DimensionError("build_shift_operator: rho must be at least 2");
  Matrix op = Matrix::Zero(2 * rho - 1, rho);
  for (Eigen::Index j = 0; j < rho; ++j) {
    if (j >= 1) op(j - 1, j) = 1.0;
    for (Eigen::Index i = 0; i < rho; ++i) op(j + i, j) = alpha(rho - 1 - i);
  }
  return op;
}

Matrix build_input_operator(const Vector& psi, std::size_t rho_u) {
  const auto rho = static_cast<Eigen::Index>(rho_u);
  if (rho < 2) throw DimensionError("build_input_operator: rho must be at least 2");
  if (psi.size() != rho) throw DimensionError("build_input_operator: plant order must equal exosystem order");
  Matrix op = Matrix::Zero(2 * rho - 1, rho);
  for (Eigen::Index j = 0; j < rho; ++j)
    for (Eigen::Index i = 0; i < rho; ++i) op(j + i, j) = psi(rho - 1 - i);
  return op;
}

Poly DiophantineSolution::p_poly() const {
  return Poly(std::vector<double>(p.data(), p.data() + p.size()));
}

DiophantineSolution solve_sylvester_step(const CoeffVector& plant_den, const Vector& plant_num,
                                         const CoeffVector& exo_alpha) {
  const Eigen::Index rho = exo_alpha.size();
  if (plant_den.size() != rho || plant_num.size() != rho)
    throw DimensionError("solve_sylvester_step: plant order must equal exosystem order");

  DiophantineSolution sol;
  const CoeffVector diff = plant_den - exo_alpha;
  const double scale = std::max({1.0, plant_den.cwiseAbs().maxCoeff(), exo_alpha.cwiseAbs().maxCoeff()});
  if (diff.cwiseAbs().maxCoeff() <= 4.0 * std::numeric_limits<double>::epsilon() * scale) {
    sol.q = Vector::Zero(rho - 1);
    sol.p = Vector::Zero(rho);
    sol.degenerate = true;
    return sol;
  }

  const Matrix delta = build_shift_operator(plant_den) - build_shift_operator(exo_alpha);
  Matrix system(2 * rho - 1, 2 * rho - 1);
  system << delta.rightCols(rho - 1), build_input_operator(plant_num, static_cast<std::size_t>(rho));
  Vector unknowns;
  try {
    unknowns = solve_linear(system, -delta.col(0));
  } catch (const SingularMatrix&) {
    throw SingularSystem("solve_sylvester_step: plant numerator and exosystem are not coprime");
  }
  sol.q = unknowns.head(rho - 1).reverse();
  sol.p = unknowns.tail(rho).reverse();
  return sol;
}

double diophantine_residual(const CoeffVector& plant_den, const Vector& plant_num, const CoeffVector& exo_alpha,
                            const DiophantineSolution& sol) {
  const Vector diff = plant_den - exo_alpha;
  const Poly d(std::vector<double>(diff.data(), diff.data() + diff.size()));
  const Poly b(std::vector<double>(plant_num.data(), plant_num.data() + plant_num.size()));
  const Poly lhs = poly_mul(d, sol.degenerate ? Poly{0.0} : sol.q_poly());
  const Poly rhs = poly_mul(b, sol.p_poly());
  double worst = 0.0;
  for (std::size_t i = 0; i <= std::max(lhs.degree(), rhs.degree()); ++i)
    worst = std::max(worst, std::abs(lhs[i] + rhs[i]));
  return worst;
}

std::string to_string(Realization r) { return r == Realization::kObserver ? "observer" : "controller"; }

Realization realization_from_string(const std::string& s) {
  if (s == "observer") return Realization::kObserver;
  if (s == "controller") return Realization::kController;
  throw ValidationError("unknown realization '" + s + "'");
}

void ImController::retune(const DiophantineSolution& sol) {
  const auto n = sol.q.size();
  const Poly qt = sol.q_poly();
  const PolyDivMod dm = poly_divmod(sol.p_poly(), qt);
  d2 = dm.quotient[0];
  Vector rem_asc(n);
  for (Eigen::Index i = 0; i < n; ++i) rem_asc(i) = dm.remainder[static_cast<std::size_t>(i)];

  if (form == Realization::kObserver) {
    phi2 = observer_companion(qt);
    psi2 = rem_asc.reverse();
    gamma2 = RowVector::Zero(n);
    if (n > 0) gamma2(0) = 1.0;
  } else {
    phi2 = controllable_companion(qt);
    psi2 = Vector::Zero(n);
    if (n > 0) psi2(n - 1) = 1.0;
    gamma2 = rem_asc.transpose();
  }
  if (xi2.size() != n) xi2 = Vector::Zero(n);
}

void ImController::reset(std::size_t plant_order) {
  xi1 = Vector::Zero(static_cast<Eigen::Index>(plant_order));
  xi2 = Vector::Zero(phi2.rows());
}

double ImController::output(const PlantModel& plant) const {
  const double u_r = embedded_input(plant);
  return gamma2.dot(xi2) + d2 * (-u_r);
}

void ImController::advance(const PlantModel& plant, double u0) {
  const double u_r = embedded_input(plant);
  xi2 = phi2 * xi2 + psi2 * (-u_r);
  xi1 = plant.a * xi1 + plant.b_vec * u0;
}

ImController assemble_im_controller(const DiophantineSolution& sol, Realization form) {
  ImController c;
  c.form = form;
  c.retune(sol);
  return c;
}

ImStep im_step(ImController& ctrl, const PlantModel& plant, double u0) {
  if (ctrl.xi1.size() != plant.a.rows()) ctrl.xi1 = Vector::Zero(plant.a.rows());
  const ImStep out{ctrl.output(plant), ctrl.embedded_input(plant)};
  ctrl.advance(plant, u0);
  return out;
}

std::vector<double> markov_parameters(const ImController& ctrl, std::size_t count) {
  std::vector<double> h;
  h.reserve(count);
  if (count == 0) return h;
  h.push_back(ctrl.d2);
  Vector v = ctrl.psi2;
  for (std::size_t i = 1; i < count; ++i) {
    h.push_back(ctrl.gamma2.dot(v));
    v = ctrl.phi2 * v;
  }
  return h;
}

}  // namespace tvimpc
