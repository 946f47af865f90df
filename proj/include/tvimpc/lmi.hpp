#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tvimpc/mathcore.hpp"

namespace tvimpc {

enum class CouplingMode { kCommonGain, kVertexGains };

std::string to_string(CouplingMode m);
CouplingMode coupling_mode_from_string(const std::string& s);

// Block inequalities, for every vertex pair (i, j):
//   [ -M_i - M_i' + Q_i      *        *        *          ]
//   [ -(F_i M_i + G T_i)   -Q_j       *        *          ]  < 0
//   [  C_o                  0        -I        *          ]
//   [  C_o                  0         0   -(gamma^2 - 1) I ]
// with Q_i > 0.
struct LmiProblem {
  std::vector<Matrix> f;
  Vector g;
  RowVector c_o;
  double gamma = 2.0;
  CouplingMode mode = CouplingMode::kCommonGain;

  std::size_t vertices() const { return f.size(); }
  std::size_t order() const { return static_cast<std::size_t>(g.size()); }
  void validate() const;
};

struct LmiSolution {
  std::vector<Matrix> q;
  std::vector<Matrix> m;
  std::vector<Matrix> t;  // 1 x n rows
  double margin = 0.0;    // min over blocks of -lambda_max, and over Q_i of lambda_min
  double relative_margin = 0.0;
  std::size_t iterations = 0;
};

// Returned in (i, j) order: index i * N + j.
std::vector<Matrix> assemble_blocks(const LmiProblem& prob, const std::vector<Matrix>& q,
                                    const std::vector<Matrix>& m, const std::vector<Matrix>& t);

struct LmiOptions {
  double box = 1e4;  // |decision variable| bound keeping the barrier problem bounded
  double gap_tolerance = 1e-7;
  std::size_t max_newton = 200;
  std::size_t max_outer = 60;
};

// Minimum-eigenvalue-margin solution of the block inequalities for a fixed gamma.
// Throws Infeasible when the best achievable margin is below 1e-8 relative.
LmiSolution solve_feasibility(const LmiProblem& prob, const LmiOptions& opts = {});

// K = sum_i sigma_i T_i M_i^-1
RowVector extract_gain(const LmiSolution& sol, const std::vector<double>& sigma);

struct Certificate {
  bool certified = false;
  double margin = 0.0;
  double relative_margin = 0.0;
  double gamma = 0.0;
  std::size_t iterations = 0;
};

// Feasibility in (Q_i, M_i) with T_i = K_i M_i. One gain applies it to every
// vertex; otherwise one gain per vertex is required.
std::optional<Certificate> try_verify_certificate(const std::vector<RowVector>& gains, const LmiProblem& prob,
                                                  const LmiOptions& opts = {});
// Same, throwing NotCertified.
Certificate verify_certificate(const std::vector<RowVector>& gains, const LmiProblem& prob,
                               const LmiOptions& opts = {});

struct GammaSearch {
  double gamma = 0.0;
  std::size_t evaluations = 0;
};

// Smallest gamma in (lo, hi] to `tolerance` for which `feasible(gamma)` holds,
// assuming monotonicity. Throws Infeasible if even `hi` fails.
template <typename Pred>
GammaSearch bisect_gamma(Pred&& feasible, double lo = 1.0, double hi = 1e3, double tolerance = 1e-3);

// Bisection wrapper around solve_feasibility.
struct GammaSynthesis {
  LmiSolution solution;
  double gamma = 0.0;
  std::size_t evaluations = 0;
};
GammaSynthesis synthesize_min_gamma(LmiProblem prob, const LmiOptions& opts = {}, double lo = 1.0, double hi = 1e3,
                                    double tolerance = 1e-3);

}  // namespace tvimpc

#include "tvimpc/lmi_impl.hpp"
