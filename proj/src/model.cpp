#include "tvimpc/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tvimpc/errors.hpp"

namespace tvimpc {

PlantModel PlantModel::canonical(const Vector& last_row, const RowVector& output_row, double input_gain) {
  const Eigen::Index n = last_row.size();
  PlantModel p;
  p.a = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) p.a(i, i + 1) = 1.0;
  p.a.row(n - 1) = last_row.transpose();
  p.b_vec = Vector::Zero(n);
  p.b_vec(n - 1) = 1.0;
  p.e = Vector::Zero(n);
  p.e(n - 1) = 1.0 / input_gain;
  p.c = output_row;
  p.input_gain = input_gain;
  p.validate();
  return p;
}

void PlantModel::validate() const {
  const Eigen::Index n = a.rows();
  if (n < 1 || a.cols() != n || b_vec.size() != n || e.size() != n || c.size() != n)
    throw DimensionError("PlantModel: inconsistent dimensions");
  if (!(input_gain > 0.0)) throw ValidationError("PlantModel: input gain b must be positive");
  if (!a.allFinite() || !c.allFinite()) throw ValidationError("PlantModel: non-finite entries");
}

PlantStep plant_step(const PlantModel& plant, const Vector& x, double u, double d_l) {
  if (x.size() != plant.a.rows()) throw DimensionError("plant_step: state dimension mismatch");
  return {plant.a * x + plant.b_vec * u + plant.e * d_l, plant.c.dot(x)};
}

Exosystem Exosystem::paper(double lambda, double sample_time) {
  Exosystem exo;
  exo.rho = 2;
  exo.sample_time = sample_time;
  exo.lambda = lambda;
  exo.kind = "paper";
  exo.s = [sample_time](std::int64_t k) {
    const double t = static_cast<double>(k) * sample_time;
    Matrix s(2, 2);
    s << 1.0, sample_time * (1.0 + 0.5 * std::sin(2.0 * std::numbers::pi * t)),
        sample_time * (-1.0 + 0.5 * std::sin(5.0 * t)), 1.0;
    return s;
  };
  exo.q = [lambda](std::int64_t) {
    RowVector q(2);
    q << lambda, 0.0;
    return q;
  };
  return exo;
}

Exosystem Exosystem::constant(const Matrix& s, const RowVector& q, double sample_time) {
  if (s.rows() != s.cols() || q.size() != s.rows())
    throw DimensionError("Exosystem::constant: inconsistent dimensions");
  Exosystem exo;
  exo.rho = static_cast<std::size_t>(s.rows());
  exo.sample_time = sample_time;
  exo.lambda = 1.0;
  exo.kind = "constant";
  exo.s = [s](std::int64_t) { return s; };
  exo.q = [q](std::int64_t) { return q; };
  return exo;
}

ExoStep exo_step(const Exosystem& exo, const Vector& w, std::int64_t k) {
  if (static_cast<std::size_t>(w.size()) != exo.rho) throw DimensionError("exo_step: state dimension mismatch");
  return {exo.s(k) * w, exo.q(k).dot(w)};
}

double disturbance_eval(const DisturbanceModel& model, std::int64_t k, const Vector& x, double sample_time) {
  if (!model.enabled) return 0.0;
  const double t = static_cast<double>(k) * sample_time;
  const double k1 = model.k1_amplitude * std::sin(model.k1_frequency * t);
  const double x1 = x.size() > 0 ? x(0) : 0.0;
  const double x2 = x.size() > 1 ? x(1) : 0.0;
  const double square = std::sin(model.noise_frequency * t) >= 0.0 ? 1.0 : -1.0;
  return k1 * std::sin(model.k2 * x1 * x1 * x2) + model.noise_amplitude * square;
}

CoeffVector frozen_alpha(const Matrix& m) {
  if (m.rows() != m.cols()) throw DimensionError("frozen_alpha: matrix not square");
  return characteristic_polynomial(m).tail();
}

std::string to_string(CoeffStrategy s) {
  return s == CoeffStrategy::kFrozen ? "frozen" : "lyapunov";
}

CoeffStrategy coeff_strategy_from_string(const std::string& s) {
  if (s == "frozen") return CoeffStrategy::kFrozen;
  if (s == "lyapunov") return CoeffStrategy::kLyapunov;
  throw ValidationError("unknown coefficient strategy '" + s + "'");
}

CoeffVector output_annihilator(const Exosystem& exo, std::int64_t k) {
  const auto rho = static_cast<Eigen::Index>(exo.rho);
  Matrix stack(rho, rho);
  Matrix transition = Matrix::Identity(rho, rho);
  for (Eigen::Index i = 0; i < rho; ++i) {
    stack.row(i) = exo.q(k + i) * transition;
    transition = exo.s(k + i) * transition;
  }
  const RowVector last = exo.q(k + rho) * transition;
  try {
    return solve_linear(stack.transpose(), -last.transpose());
  } catch (const SingularMatrix&) {
    throw TransformSingular("observability stack singular at k = " + std::to_string(k));
  }
}

CoeffVector observer_coeffs(const Exosystem& exo, std::int64_t k, CoeffStrategy strategy) {
  if (strategy == CoeffStrategy::kFrozen) return frozen_alpha(exo.s(k));
  const auto rho = static_cast<Eigen::Index>(exo.rho);
  CoeffVector alpha(rho);
  for (Eigen::Index m = 0; m < rho; ++m) alpha(m) = output_annihilator(exo, k - m)(m);
  return alpha;
}

std::vector<CoeffVector> ltv_observer_coeffs(const Exosystem& exo, std::size_t horizon, CoeffStrategy strategy) {
  if (horizon < exo.rho) throw ValidationError("ltv_observer_coeffs: horizon shorter than exosystem order");
  std::vector<CoeffVector> out;
  out.reserve(horizon);
  if (strategy == CoeffStrategy::kFrozen) {
    for (std::size_t k = 0; k < horizon; ++k) out.push_back(observer_coeffs(exo, static_cast<std::int64_t>(k), strategy));
    return out;
  }
  // Each annihilator is reused by rho consecutive steps; compute it once.
  const auto rho = static_cast<std::int64_t>(exo.rho);
  std::vector<CoeffVector> beta;
  beta.reserve(horizon + exo.rho);
  for (std::int64_t j = -(rho - 1); j < static_cast<std::int64_t>(horizon); ++j)
    beta.push_back(output_annihilator(exo, j));
  for (std::int64_t k = 0; k < static_cast<std::int64_t>(horizon); ++k) {
    CoeffVector alpha(rho);
    for (std::int64_t m = 0; m < rho; ++m) alpha(m) = beta[static_cast<std::size_t>(k - m + rho - 1)](m);
    out.push_back(std::move(alpha));
  }
  return out;
}

namespace {

// Row i (0-based) of T(j): row_0(j) = Q(j), row_i(j) = row_{i-1}(j+1) S(j) + alpha_{rho-i}(j) Q(j).
RowVector transform_row(const Exosystem& exo, std::size_t i, std::int64_t j) {
  if (i == 0) return exo.q(j);
  const CoeffVector alpha = observer_coeffs(exo, j, CoeffStrategy::kLyapunov);
  const auto idx = static_cast<Eigen::Index>(exo.rho - i);
  return transform_row(exo, i - 1, j + 1) * exo.s(j) + alpha(idx) * exo.q(j);
}

}  // namespace

Matrix observer_transform(const Exosystem& exo, std::int64_t k) {
  const auto rho = static_cast<Eigen::Index>(exo.rho);
  Matrix t(rho, rho);
  for (Eigen::Index i = 0; i < rho; ++i) t.row(i) = transform_row(exo, static_cast<std::size_t>(i), k);
  return t;
}

std::vector<CoeffInterval> paper_exosystem_bounds(double sample_time, CoeffStrategy strategy) {
  const double ts2 = sample_time * sample_time;
  // -s12 s21 ranges over Ts^2 [0.25, 2.25] since s12 in Ts[0.5,1.5], s21 in Ts[-1.5,-0.5].
  if (strategy == CoeffStrategy::kFrozen) {
    return {{1.0 + 0.25 * ts2, 1.0 + 2.25 * ts2}, {-2.0, -2.0}};
  }
  // s12(k+1)/s12(k) - 1 is bounded by pi Ts^2 / (0.5 Ts).
  const double drift = 2.0 * std::numbers::pi * sample_time;
  return {{1.0 - drift + 0.25 * ts2, 1.0 + drift + 2.25 * ts2}, {-2.0 - drift, -2.0 + drift}};
}

std::vector<CoeffInterval> sampled_bounds(const std::vector<CoeffVector>& alphas, double pad) {
  if (alphas.empty()) return {};
  std::vector<CoeffInterval> b(static_cast<std::size_t>(alphas.front().size()));
  for (std::size_t i = 0; i < b.size(); ++i) {
    b[i].lo = b[i].hi = alphas.front()(static_cast<Eigen::Index>(i));
  }
  for (const auto& a : alphas) {
    for (std::size_t i = 0; i < b.size(); ++i) {
      const double v = a(static_cast<Eigen::Index>(i));
      b[i].lo = std::min(b[i].lo, v);
      b[i].hi = std::max(b[i].hi, v);
    }
  }
  for (auto& iv : b) {
    if (!iv.degenerate()) {
      iv.lo -= pad;
      iv.hi += pad;
    }
  }
  return b;
}

PlantModel paper_plant() {
  Vector last(2);
  last << -0.9613, 1.9404;
  RowVector c(2);
  c << 0.0098, 0.0099;
  return PlantModel::canonical(last, c, 1.0 / 4.96e-5);
}

}  // namespace tvimpc
