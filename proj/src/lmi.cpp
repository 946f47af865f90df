#include "tvimpc/lmi.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "tvimpc/errors.hpp"

namespace tvimpc {

std::string to_string(CouplingMode m) { return m == CouplingMode::kCommonGain ? "common" : "vertex"; }

CouplingMode coupling_mode_from_string(const std::string& s) {
  if (s == "common" || s == "commonGain") return CouplingMode::kCommonGain;
  if (s == "vertex" || s == "vertexGains") return CouplingMode::kVertexGains;
  throw ValidationError("unknown coupling mode '" + s + "'");
}

void LmiProblem::validate() const {
  if (f.empty()) throw DimensionError("LmiProblem: no vertices");
  const Eigen::Index n = g.size();
  for (const auto& fi : f)
    if (fi.rows() != n || fi.cols() != n) throw DimensionError("LmiProblem: vertex dimension mismatch");
  if (c_o.size() != n) throw DimensionError("LmiProblem: output row dimension mismatch");
  if (!(gamma > 1.0)) throw ValidationError("LmiProblem: gamma must exceed 1");
}

std::vector<Matrix> assemble_blocks(const LmiProblem& prob, const std::vector<Matrix>& q, const std::vector<Matrix>& m,
                                    const std::vector<Matrix>& t) {
  prob.validate();
  const std::size_t nv = prob.vertices();
  const Eigen::Index n = prob.g.size();
  auto pick = [nv](const std::vector<Matrix>& v, std::size_t i) -> const Matrix& {
    if (v.size() == nv) return v[i];
    if (v.size() == 1) return v[0];
    throw DimensionError("assemble_blocks: expected 1 or N matrices");
  };
  if (q.size() != nv) throw DimensionError("assemble_blocks: need one Q per vertex");

  std::vector<Matrix> blocks;
  blocks.reserve(nv * nv);
  for (std::size_t i = 0; i < nv; ++i) {
    const Matrix& mi = pick(m, i);
    const Matrix& ti = pick(t, i);
    if (q[i].rows() != n || mi.rows() != n || mi.cols() != n || ti.rows() != 1 || ti.cols() != n)
      throw DimensionError("assemble_blocks: decision variable dimension mismatch");
    const Matrix lower = -(prob.f[i] * mi + prob.g * ti);
    for (std::size_t j = 0; j < nv; ++j) {
      Matrix b = Matrix::Zero(2 * n + 2, 2 * n + 2);
      b.topLeftCorner(n, n) = -mi - mi.transpose() + q[i];
      b.block(n, 0, n, n) = lower;
      b.block(0, n, n, n) = lower.transpose();
      b.block(n, n, n, n) = -q[j];
      b.block(2 * n, 0, 1, n) = prob.c_o;
      b.block(0, 2 * n, n, 1) = prob.c_o.transpose();
      b.block(2 * n + 1, 0, 1, n) = prob.c_o;
      b.block(0, 2 * n + 1, n, 1) = prob.c_o.transpose();
      b(2 * n, 2 * n) = -1.0;
      b(2 * n + 1, 2 * n + 1) = -(prob.gamma * prob.gamma - 1.0);
      blocks.push_back(std::move(b));
    }
  }
  return blocks;
}

namespace {

// Every constraint has the form C_c(y) = C_c0 + sum_k y_k C_ck < 0.
struct AffineFamily {
  std::vector<Matrix> c0;
  std::vector<std::vector<Matrix>> coef;
};

AffineFamily linearize(const std::function<std::vector<Matrix>(const Vector&)>& constraints, Eigen::Index nvars) {
  AffineFamily fam;
  const Vector zero = Vector::Zero(nvars);
  fam.c0 = constraints(zero);
  fam.coef.assign(fam.c0.size(), {});
  for (Eigen::Index k = 0; k < nvars; ++k) {
    Vector ek = zero;
    ek(k) = 1.0;
    const auto ck = constraints(ek);
    for (std::size_t c = 0; c < ck.size(); ++c) fam.coef[c].push_back(ck[c] - fam.c0[c]);
  }
  return fam;
}

struct BarrierOutcome {
  Vector y;
  double t = 0.0;
  std::size_t iterations = 0;
};

// Minimises t subject to C_c(y) <= t I and |y_k| <= box with a log-det barrier
// path-following Newton method.
BarrierOutcome minimize_max_eigenvalue(const AffineFamily& fam, const Vector& y0, const LmiOptions& opts) {
  const Eigen::Index nv = y0.size();
  const Eigen::Index nz = nv + 1;
  const double box = opts.box;

  auto constraint_at = [&](std::size_t c, const Vector& y) {
    Matrix v = fam.c0[c];
    for (Eigen::Index k = 0; k < nv; ++k)
      if (y(k) != 0.0) v += y(k) * fam.coef[c][static_cast<std::size_t>(k)];
    return v;
  };

  Vector z(nz);
  z.head(nv) = y0;
  double t0 = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < fam.c0.size(); ++c) t0 = std::max(t0, max_eigenvalue_symmetric(constraint_at(c, y0)));
  z(nv) = t0 + 1.0;

  double barrier_dim = 2.0 * static_cast<double>(nv);
  for (const auto& c : fam.c0) barrier_dim += static_cast<double>(c.rows());

  // Returns +inf outside the domain.
  auto objective = [&](const Vector& zz, double tau) {
    double f = tau * zz(nv);
    for (Eigen::Index k = 0; k < nv; ++k) {
      const double lo = box + zz(k);
      const double hi = box - zz(k);
      if (lo <= 0.0 || hi <= 0.0) return std::numeric_limits<double>::infinity();
      f -= std::log(lo) + std::log(hi);
    }
    const Vector y = zz.head(nv);
    for (std::size_t c = 0; c < fam.c0.size(); ++c) {
      const Matrix s = zz(nv) * Matrix::Identity(fam.c0[c].rows(), fam.c0[c].cols()) - constraint_at(c, y);
      Eigen::LLT<Matrix> llt(s);
      if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
      f -= 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    }
    return f;
  };

  double tau = 1.0;
  std::size_t iterations = 0;
  bool stalled = false;
  for (std::size_t outer = 0; outer < opts.max_outer && !stalled; ++outer) {
    for (std::size_t it = 0; it < opts.max_newton; ++it) {
      ++iterations;
      Vector grad = Vector::Zero(nz);
      Matrix hess = Matrix::Zero(nz, nz);
      grad(nv) = tau;
      for (Eigen::Index k = 0; k < nv; ++k) {
        const double lo = box + z(k);
        const double hi = box - z(k);
        grad(k) += -1.0 / lo + 1.0 / hi;
        hess(k, k) += 1.0 / (lo * lo) + 1.0 / (hi * hi);
      }
      const Vector y = z.head(nv);
      for (std::size_t c = 0; c < fam.c0.size(); ++c) {
        const Eigen::Index d = fam.c0[c].rows();
        const Matrix s = z(nv) * Matrix::Identity(d, d) - constraint_at(c, y);
        Eigen::LLT<Matrix> llt(s);
        if (llt.info() != Eigen::Success) throw NumericalBreakdown("LMI barrier left its domain");
        const Matrix s_inv = llt.solve(Matrix::Identity(d, d));
        // dS/dy_k = -C_ck, dS/dt = I
        std::vector<Matrix> w(static_cast<std::size_t>(nz));
        for (Eigen::Index k = 0; k < nv; ++k) {
          const Matrix& ck = fam.coef[c][static_cast<std::size_t>(k)];
          w[static_cast<std::size_t>(k)] = -s_inv * ck;
          grad(k) += (s_inv.cwiseProduct(ck)).sum();
        }
        w[static_cast<std::size_t>(nv)] = s_inv;
        grad(nv) -= s_inv.trace();
        for (Eigen::Index a = 0; a < nz; ++a) {
          for (Eigen::Index b = a; b < nz; ++b) {
            const double h = (w[static_cast<std::size_t>(a)].cwiseProduct(w[static_cast<std::size_t>(b)].transpose())).sum();
            hess(a, b) += h;
            if (a != b) hess(b, a) += h;
          }
        }
      }
      if (!grad.allFinite() || !hess.allFinite()) throw NumericalBreakdown("LMI barrier produced non-finite derivatives");
      // Equilibrate before factorising; the barrier Hessian spans many decades near the boundary.
      const Vector scale = hess.diagonal().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
      const Matrix scaled = scale.asDiagonal() * hess * scale.asDiagonal();
      Eigen::LDLT<Matrix> ldlt(scaled);
      if (ldlt.info() != Eigen::Success || !hess.diagonal().allFinite()) {
        // Past the first centring step the iterate is strictly feasible; the
        // Hessian has simply run out of precision.
        if (outer == 0) throw NumericalBreakdown("LMI barrier Hessian factorisation failed");
        stalled = true;
        break;
      }
      const Vector step = -(scale.asDiagonal() * ldlt.solve(scale.asDiagonal() * grad)).eval();
      if (!step.allFinite()) {
        stalled = true;
        break;
      }
      const double decrement = -grad.dot(step);
      if (!std::isfinite(decrement)) throw NumericalBreakdown("LMI barrier Newton step not finite");
      if (decrement < 1e-12) break;

      const double f0 = objective(z, tau);
      double alpha = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls) {
        const Vector trial = z + alpha * step;
        const double f1 = objective(trial, tau);
        if (f1 <= f0 - 0.25 * alpha * decrement) {
          z = trial;
          moved = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!moved) break;
    }
    if (stalled) break;
    if (barrier_dim / tau < opts.gap_tolerance * std::max(1.0, std::abs(z(nv)))) break;
    tau *= 8.0;
  }
  return {z.head(nv), z(nv), iterations};
}

Matrix symmetric_from(const Vector& y, Eigen::Index offset, Eigen::Index n) {
  Matrix s(n, n);
  Eigen::Index idx = offset;
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = r; c < n; ++c) {
      s(r, c) = y(idx);
      s(c, r) = y(idx);
      ++idx;
    }
  return s;
}

Matrix general_from(const Vector& y, Eigen::Index offset, Eigen::Index rows, Eigen::Index cols) {
  Matrix g(rows, cols);
  Eigen::Index idx = offset;
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) g(r, c) = y(idx++);
  return g;
}

void write_symmetric(Vector& y, Eigen::Index offset, const Matrix& s) {
  Eigen::Index idx = offset;
  for (Eigen::Index r = 0; r < s.rows(); ++r)
    for (Eigen::Index c = r; c < s.cols(); ++c) y(idx++) = s(r, c);
}

void write_general(Vector& y, Eigen::Index offset, const Matrix& g) {
  Eigen::Index idx = offset;
  for (Eigen::Index r = 0; r < g.rows(); ++r)
    for (Eigen::Index c = 0; c < g.cols(); ++c) y(idx++) = g(r, c);
}

struct Decoded {
  std::vector<Matrix> q, m, t;
};

struct Margins {
  double margin;
  double relative;
};

Margins evaluate_margins(const LmiProblem& prob, const Decoded& d) {
  const auto blocks = assemble_blocks(prob, d.q, d.m, d.t);
  double margin = std::numeric_limits<double>::infinity();
  double scale = 1.0;
  for (const auto& b : blocks) {
    margin = std::min(margin, -max_eigenvalue_symmetric(b));
    scale = std::max(scale, b.cwiseAbs().maxCoeff());
  }
  for (const auto& q : d.q) margin = std::min(margin, min_eigenvalue_symmetric(q));
  return {margin, margin / scale};
}

std::vector<Matrix> all_constraints(const LmiProblem& prob, const Decoded& d) {
  auto cons = assemble_blocks(prob, d.q, d.m, d.t);
  for (const auto& q : d.q) cons.push_back(-q);
  return cons;
}

constexpr double kRelativeMargin = 1e-8;

}  // namespace

LmiSolution solve_feasibility(const LmiProblem& prob, const LmiOptions& opts) {
  prob.validate();
  const auto nvx = static_cast<Eigen::Index>(prob.vertices());
  const Eigen::Index n = prob.g.size();
  const Eigen::Index nq = n * (n + 1) / 2;
  const Eigen::Index n_gain = prob.mode == CouplingMode::kCommonGain ? 1 : nvx;
  const Eigen::Index off_m = nvx * nq;
  const Eigen::Index off_t = off_m + n_gain * n * n;
  const Eigen::Index nvars = off_t + n_gain * n;

  auto decode = [&](const Vector& y) {
    Decoded d;
    for (Eigen::Index i = 0; i < nvx; ++i) d.q.push_back(symmetric_from(y, i * nq, n));
    for (Eigen::Index i = 0; i < n_gain; ++i) {
      d.m.push_back(general_from(y, off_m + i * n * n, n, n));
      d.t.push_back(general_from(y, off_t + i * n, 1, n));
    }
    return d;
  };

  const AffineFamily fam = linearize([&](const Vector& y) { return all_constraints(prob, decode(y)); }, nvars);
  Vector y0 = Vector::Zero(nvars);
  for (Eigen::Index i = 0; i < nvx; ++i) write_symmetric(y0, i * nq, Matrix::Identity(n, n));
  for (Eigen::Index i = 0; i < n_gain; ++i) write_general(y0, off_m + i * n * n, Matrix::Identity(n, n));

  const BarrierOutcome out = minimize_max_eigenvalue(fam, y0, opts);
  const Decoded d = decode(out.y);
  const Margins mg = evaluate_margins(prob, d);
  if (!(mg.relative >= kRelativeMargin))
    throw Infeasible("LMI infeasible at gamma = " + std::to_string(prob.gamma) +
                     ": best max eigenvalue " + std::to_string(out.t) + " after " +
                     std::to_string(out.iterations) + " Newton iterations");
  LmiSolution sol;
  sol.q = d.q;
  sol.m = d.m;
  sol.t = d.t;
  sol.margin = mg.margin;
  sol.relative_margin = mg.relative;
  sol.iterations = out.iterations;
  return sol;
}

RowVector extract_gain(const LmiSolution& sol, const std::vector<double>& sigma) {
  if (sol.m.empty() || sol.m.size() != sol.t.size()) throw DimensionError("extract_gain: malformed solution");
  auto vertex_gain = [&](std::size_t i) -> RowVector {
    const Matrix& mi = sol.m[i];
    Eigen::FullPivLU<Matrix> lu(mi);
    if (!lu.isInvertible()) throw SingularM("extract_gain: M_" + std::to_string(i) + " singular");
    return sol.t[i] * lu.inverse();
  };
  if (sol.m.size() == 1) return vertex_gain(0);
  if (sigma.size() != sol.m.size()) throw DimensionError("extract_gain: weight count mismatch");
  RowVector k = RowVector::Zero(sol.t.front().cols());
  for (std::size_t i = 0; i < sigma.size(); ++i) k += sigma[i] * vertex_gain(i);
  return k;
}

std::optional<Certificate> try_verify_certificate(const std::vector<RowVector>& gains, const LmiProblem& prob,
                                                  const LmiOptions& opts) {
  prob.validate();
  const auto nvx = static_cast<Eigen::Index>(prob.vertices());
  const Eigen::Index n = prob.g.size();
  if (gains.size() != 1 && static_cast<Eigen::Index>(gains.size()) != nvx)
    throw DimensionError("verify_certificate: need one gain or one per vertex");
  for (const auto& k : gains)
    if (k.size() != n) throw DimensionError("verify_certificate: gain dimension mismatch");
  const Eigen::Index nq = n * (n + 1) / 2;
  const Eigen::Index off_m = nvx * nq;
  const Eigen::Index nvars = off_m + nvx * n * n;

  auto decode = [&](const Vector& y) {
    Decoded d;
    for (Eigen::Index i = 0; i < nvx; ++i) d.q.push_back(symmetric_from(y, i * nq, n));
    for (Eigen::Index i = 0; i < nvx; ++i) {
      d.m.push_back(general_from(y, off_m + i * n * n, n, n));
      const RowVector& k = gains.size() == 1 ? gains[0] : gains[static_cast<std::size_t>(i)];
      d.t.push_back(k * d.m.back());
    }
    return d;
  };

  const AffineFamily fam = linearize([&](const Vector& y) { return all_constraints(prob, decode(y)); }, nvars);
  Vector y0 = Vector::Zero(nvars);
  for (Eigen::Index i = 0; i < nvx; ++i) {
    write_symmetric(y0, i * nq, Matrix::Identity(n, n));
    write_general(y0, off_m + i * n * n, Matrix::Identity(n, n));
  }
  const BarrierOutcome out = minimize_max_eigenvalue(fam, y0, opts);
  const Margins mg = evaluate_margins(prob, decode(out.y));
  Certificate cert;
  cert.margin = mg.margin;
  cert.relative_margin = mg.relative;
  cert.gamma = prob.gamma;
  cert.iterations = out.iterations;
  cert.certified = mg.relative >= kRelativeMargin;
  if (!cert.certified) return std::nullopt;
  return cert;
}

Certificate verify_certificate(const std::vector<RowVector>& gains, const LmiProblem& prob, const LmiOptions& opts) {
  auto cert = try_verify_certificate(gains, prob, opts);
  if (!cert) throw NotCertified("gain not certified at gamma = " + std::to_string(prob.gamma));
  return *cert;
}

GammaSynthesis synthesize_min_gamma(LmiProblem prob, const LmiOptions& opts, double lo, double hi, double tolerance) {
  GammaSynthesis out;
  std::optional<LmiSolution> best;
  double best_gamma = 0.0;
  const GammaSearch search = bisect_gamma(
      [&](double gamma) {
        prob.gamma = gamma;
        try {
          LmiSolution s = solve_feasibility(prob, opts);
          if (!best || gamma < best_gamma) {
            best = std::move(s);
            best_gamma = gamma;
          }
          return true;
        } catch (const Infeasible&) {
          return false;
        }
      },
      lo, hi, tolerance);
  out.solution = *best;
  out.gamma = search.gamma;
  out.evaluations = search.evaluations;
  return out;
}

}  // namespace tvimpc
