#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tvimpc/mathcore.hpp"
#include "tvimpc/model.hpp"

namespace tvimpc {

// (2 rho - 1) x rho operator O with O [1; q_desc] equal to the non-leading
// coefficients (highest power first) of (z^rho + alpha...)(z^(rho-1) + q...).
Matrix build_shift_operator(const CoeffVector& alpha);

// (2 rho - 1) x rho operator C with C p_desc equal to the coefficients
// (highest power first) of b(z) p(z); `psi` holds b(z) ascending.
Matrix build_input_operator(const Vector& psi, std::size_t rho);

// Solution of (a_plant - a_exo)(z) q~(z) + b(z) p(z) = 0 with q~ monic.
struct DiophantineSolution {
  Vector q;  // ascending, leading 1 of q~ omitted, size rho - 1
  Vector p;  // ascending, size rho
  bool degenerate = false;

  Poly q_poly() const { return Poly::monic(q); }
  Poly p_poly() const;
};

DiophantineSolution solve_sylvester_step(const CoeffVector& plant_den, const Vector& plant_num,
                                         const CoeffVector& exo_alpha);

// Largest |coefficient| of (a_plant - a_exo) q~ + b p.
double diophantine_residual(const CoeffVector& plant_den, const Vector& plant_num, const CoeffVector& exo_alpha,
                            const DiophantineSolution& sol);

// Observer form places the time variation of p(k) on the input side, which is
// what makes the per-step solution exact for time-varying exosystems.
enum class Realization { kObserver, kController };

std::string to_string(Realization r);
Realization realization_from_string(const std::string& s);

// The two cascaded internal-model controllers. Controller 1 is the nominal
// plant copy (A_c, B_c, C_c) driven by u0; controller 2 realizes p(z)/q~(z)
// driven by -u_r.
struct ImController {
  Realization form = Realization::kObserver;
  Matrix phi2;
  Vector psi2;
  RowVector gamma2;
  double d2 = 0.0;
  Vector xi1;
  Vector xi2;

  // Replace (Phi2, Psi2, Gamma2, D2) keeping the states.
  void retune(const DiophantineSolution& sol);
  void reset(std::size_t plant_order);

  double embedded_input(const PlantModel& plant) const { return plant.c.dot(xi1); }
  double output(const PlantModel& plant) const;
  void advance(const PlantModel& plant, double u0);
};

ImController assemble_im_controller(const DiophantineSolution& sol, Realization form = Realization::kObserver);

struct ImStep {
  double u_im;
  double u_r;
};

// Output from the pre-update states, then advance both controllers with u0.
ImStep im_step(ImController& ctrl, const PlantModel& plant, double u0);

// D2, Gamma2 Psi2, Gamma2 Phi2 Psi2, ...
std::vector<double> markov_parameters(const ImController& ctrl, std::size_t count);

}  // namespace tvimpc
