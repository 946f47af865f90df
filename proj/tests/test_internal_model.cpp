#include "tvimpc/internal_model.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "support.hpp"
#include "tvimpc/errors.hpp"

namespace tvimpc {
namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

// Non-leading coefficients, highest power first.
std::vector<double> non_leading_desc(const std::vector<double>& asc) {
  std::vector<double> out(asc.rbegin() + 1, asc.rend());
  return out;
}

TEST(ShiftOperator, Generic) {
  const double a0 = 0.3, a1 = -1.7;
  Matrix expected(3, 2);
  expected << a1, 1, a0, a1, 0, a0;
  EXPECT_EQ(build_shift_operator(vec({a0, a1})), expected);
  Matrix zero(3, 2);
  zero << 0, 1, 0, 0, 0, 0;
  EXPECT_EQ(build_shift_operator(vec({0, 0})), zero);
  EXPECT_THROW(build_shift_operator(vec({1})), DimensionError);
}

TEST(InputOperator, PlantNumerator) {
  Matrix expected(3, 2);
  expected << 0.0099, 0, 0.0098, 0.0099, 0, 0.0098;
  EXPECT_EQ(build_input_operator(vec({0.0098, 0.0099}), 2), expected);
  Matrix z(3, 2);
  z << 1, 0, 0, 1, 0, 0;
  EXPECT_EQ(build_input_operator(vec({0, 1}), 2), z);
  EXPECT_THROW(build_input_operator(vec({1, 2, 3}), 2), DimensionError);
}

TEST(Operators, MatchConvolutionRandom) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    const Eigen::Index rho = 2 + trial % 3;
    const Vector alpha = testing_support::random_vector(rng, rho, 2.0);
    const Vector q = testing_support::random_vector(rng, rho - 1, 2.0);
    // (z^rho + alpha) (z^(rho-1) + q)
    std::vector<double> a_asc = testing_support::to_vec(alpha);
    a_asc.push_back(1.0);
    std::vector<double> q_asc = testing_support::to_vec(q);
    q_asc.push_back(1.0);
    const auto prod = non_leading_desc(oracle::convolve(a_asc, q_asc));
    Vector one_q(rho);
    one_q(0) = 1.0;
    one_q.tail(rho - 1) = q.reverse();
    const Vector got = build_shift_operator(alpha) * one_q;
    for (std::size_t i = 0; i < prod.size(); ++i) ASSERT_NEAR(got(static_cast<Eigen::Index>(i)), prod[i], 1e-12);

    const Vector psi = testing_support::random_vector(rng, rho);
    const Vector p = testing_support::random_vector(rng, rho);
    auto bp = oracle::convolve(testing_support::to_vec(psi), testing_support::to_vec(p));
    std::vector<double> bp_desc(bp.rbegin(), bp.rend());
    const Vector got_bp = build_input_operator(psi, static_cast<std::size_t>(rho)) * p.reverse();
    for (std::size_t i = 0; i < bp_desc.size(); ++i) ASSERT_NEAR(got_bp(static_cast<Eigen::Index>(i)), bp_desc[i], 1e-12);
  }
}

TEST(Sylvester, ReferencePlantAtFirstStep) {
  const Vector a_plant = vec({0.9613, -1.9404});
  const Vector b = vec({0.0098, 0.0099});
  const Vector a_exo = vec({1.0 + 1e-6, -2.0});
  const DiophantineSolution sol = solve_sylvester_step(a_plant, b, a_exo);
  EXPECT_FALSE(sol.degenerate);
  // z^2 equation: 0.0596 + 0.0099 p1 = 0
  EXPECT_NEAR(sol.p(1), -0.0596 / 0.0099, 1e-10);
  EXPECT_NEAR(sol.p(1), -6.0202, 1e-4);

  // Independent 3x3 elimination in (q0, p1, p0):
  //   z^2: d1 + 0.0099 p1 = 0
  //   z^1: d0 + d1 q0 + 0.0098 p1 + 0.0099 p0 = 0
  //   z^0: d0 q0 + 0.0098 p0 = 0
  const double d0 = a_plant(0) - a_exo(0), d1 = a_plant(1) - a_exo(1);
  const auto ref = oracle::gauss_solve({{0, 0.0099, 0}, {d1, 0.0098, 0.0099}, {d0, 0, 0.0098}}, {-d1, -d0, 0});
  EXPECT_NEAR(sol.q(0), ref[0], 1e-10);
  EXPECT_NEAR(sol.p(1), ref[1], 1e-10);
  EXPECT_NEAR(sol.p(0), ref[2], 1e-10);
  EXPECT_LE(diophantine_residual(a_plant, b, a_exo, sol), 1e-8);
}

TEST(Sylvester, Degenerate) {
  const Vector a = vec({0.5, -1.0});
  const DiophantineSolution sol = solve_sylvester_step(a, vec({1.0, 2.0}), a);
  EXPECT_TRUE(sol.degenerate);
  EXPECT_EQ(sol.p, Vector::Zero(2));
  EXPECT_EQ(sol.q, Vector::Zero(1));
}

TEST(Sylvester, CommonFactorIsSingular) {
  // a_plant - a_exo = z - 1 shares its root with b(z) = z - 1.
  const Vector a_exo = vec({1.0, -2.0});
  const Vector a_plant = vec({0.0, -1.0});
  EXPECT_THROW(solve_sylvester_step(a_plant, vec({-1.0, 1.0}), a_exo), SingularSystem);
  EXPECT_THROW(solve_sylvester_step(vec({1, 2, 3}), vec({1, 2}), a_exo), DimensionError);
}

TEST(Sylvester, ResidualRandom) {
  std::mt19937_64 rng(37);
  int solved = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const Eigen::Index rho = 2 + trial % 3;
    const Vector a_plant = testing_support::random_vector(rng, rho, 2.0);
    const Vector a_exo = testing_support::random_vector(rng, rho, 2.0);
    const Vector b = testing_support::random_vector(rng, rho);
    try {
      const auto sol = solve_sylvester_step(a_plant, b, a_exo);
      const double scale = std::max(1.0, std::max(sol.p.cwiseAbs().maxCoeff(), sol.q.cwiseAbs().maxCoeff()));
      ASSERT_LE(diophantine_residual(a_plant, b, a_exo, sol), 1e-8 * scale);
      ++solved;
    } catch (const SingularSystem&) {
    }
  }
  EXPECT_GE(solved, 300);
}

TEST(Sylvester, ResidualAlongReferenceHorizon) {
  const PlantModel plant = paper_plant();
  for (auto strategy : {CoeffStrategy::kFrozen, CoeffStrategy::kLyapunov}) {
    const auto alphas = ltv_observer_coeffs(Exosystem::paper(), 10000, strategy);
    double worst = 0.0;
    for (const auto& a : alphas) {
      const auto sol = solve_sylvester_step(plant.denominator(), plant.numerator(), a);
      worst = std::max(worst, diophantine_residual(plant.denominator(), plant.numerator(), a, sol));
    }
    EXPECT_LE(worst, 1e-8) << to_string(strategy);
  }
}

TEST(Sylvester, ContinuityOnReferenceExosystem) {
  const PlantModel plant = paper_plant();
  const auto alphas = ltv_observer_coeffs(Exosystem::paper(), 10000, CoeffStrategy::kFrozen);
  DiophantineSolution prev = solve_sylvester_step(plant.denominator(), plant.numerator(), alphas[0]);
  double worst = 0.0;
  for (std::size_t k = 1; k < alphas.size(); ++k) {
    const auto sol = solve_sylvester_step(plant.denominator(), plant.numerator(), alphas[k]);
    worst = std::max({worst, (sol.p - prev.p).cwiseAbs().maxCoeff(), (sol.q - prev.q).cwiseAbs().maxCoeff()});
    prev = sol;
  }
  EXPECT_LE(worst, 1e-3);
}

TEST(ImController, ControllerFormRealization) {
  DiophantineSolution sol;
  sol.q = vec({0.4});
  sol.p = vec({1.5, -2.0});
  const ImController c = assemble_im_controller(sol, Realization::kController);
  EXPECT_NEAR(c.phi2(0, 0), -0.4, 1e-15);
  EXPECT_EQ(c.psi2(0), 1.0);
  EXPECT_EQ(c.d2, -2.0);
  EXPECT_NEAR(c.gamma2(0), 1.5 - (-2.0) * 0.4, 1e-15);
}

TEST(ImController, ObserverFormRealization) {
  DiophantineSolution sol;
  sol.q = vec({0.4});
  sol.p = vec({1.5, -2.0});
  const ImController c = assemble_im_controller(sol);
  EXPECT_NEAR(c.phi2(0, 0), -0.4, 1e-15);
  EXPECT_EQ(c.gamma2(0), 1.0);
  EXPECT_EQ(c.d2, -2.0);
  EXPECT_NEAR(c.psi2(0), 2.3, 1e-15);
}

TEST(ImController, ZeroNumerator) {
  DiophantineSolution sol;
  sol.q = vec({0.4});
  sol.p = vec({0.0, 0.0});
  for (auto form : {Realization::kController, Realization::kObserver}) {
    const ImController c = assemble_im_controller(sol, form);
    EXPECT_EQ(c.d2, 0.0);
    EXPECT_EQ(markov_parameters(c, 4), (std::vector<double>(4, 0.0)));
  }
}

TEST(ImController, MarkovParametersMatchSeries) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index rho = 2 + trial % 3;
    DiophantineSolution sol;
    sol.q = testing_support::random_vector(rng, rho - 1);
    sol.p = testing_support::random_vector(rng, rho);
    std::vector<double> q_desc{1.0};
    for (Eigen::Index i = rho - 2; i >= 0; --i) q_desc.push_back(sol.q(i));
    std::vector<double> p_desc;
    for (Eigen::Index i = rho - 1; i >= 0; --i) p_desc.push_back(sol.p(i));
    const auto series = oracle::series_at_infinity(p_desc, q_desc, 2 * static_cast<std::size_t>(rho));
    for (auto form : {Realization::kController, Realization::kObserver}) {
      const auto h = markov_parameters(assemble_im_controller(sol, form), series.size());
      for (std::size_t i = 0; i < series.size(); ++i) ASSERT_NEAR(h[i], series[i], 1e-10);
    }
  }
}

TEST(ImStep, ZeroStaysZero) {
  DiophantineSolution sol;
  sol.q = vec({0.4});
  sol.p = vec({1.5, -2.0});
  ImController c = assemble_im_controller(sol);
  c.reset(2);
  const auto out = im_step(c, paper_plant(), 0.0);
  EXPECT_EQ(out.u_im, 0.0);
  EXPECT_EQ(c.xi1, Vector::Zero(2));
  EXPECT_EQ(c.xi2, Vector::Zero(1));
}

TEST(ImStep, DirectSubstitution) {
  const PlantModel plant = paper_plant();
  DiophantineSolution sol;
  sol.q = vec({0.98});
  sol.p = vec({3.9, -6.02});
  for (auto form : {Realization::kController, Realization::kObserver}) {
    ImController c = assemble_im_controller(sol, form);
    c.reset(2);
    c.xi1 = vec({1.0, 0.0});
    const ImController before = c;
    const auto out = im_step(c, plant, 0.7);
    EXPECT_NEAR(out.u_r, 0.0098, 1e-15);
    EXPECT_NEAR(out.u_im, -before.d2 * 0.0098, 1e-15);
    EXPECT_LE((c.xi1 - (plant.a * before.xi1 + plant.b_vec * 0.7)).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LE((c.xi2 - (before.phi2 * before.xi2 - before.psi2 * 0.0098)).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(Realization, Names) {
  EXPECT_EQ(realization_from_string("observer"), Realization::kObserver);
  EXPECT_EQ(realization_from_string(to_string(Realization::kController)), Realization::kController);
  EXPECT_THROW(realization_from_string("x"), ValidationError);
}

}  // namespace
}  // namespace tvimpc
