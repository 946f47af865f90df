#include "tvimpc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <map>

#include "tvimpc/errors.hpp"
#include "tvimpc/stabilizer.hpp"

namespace tvimpc {

std::string to_string(GainSource s) { return s == GainSource::kExplicit ? "explicit" : "lmi"; }

GainSource gain_source_from_string(const std::string& s) {
  if (s == "explicit") return GainSource::kExplicit;
  if (s == "lmi" || s == "lmiSynthesized") return GainSource::kLmi;
  throw ValidationError("unknown gain source '" + s + "'");
}

void Scenario::validate() const {
  plant.validate();
  if (exo.rho == 0 || !exo.s || !exo.q) throw ValidationError(name + ": exosystem undefined");
  if (plant.order() != exo.rho) throw ValidationError(name + ": plant order must equal exosystem order");
  if (horizon < 2 * exo.rho) throw ValidationError(name + ": horizon shorter than twice the exosystem order");
  if (!(window_fraction > 0.0 && window_fraction < 1.0)) throw ValidationError(name + ": window fraction outside (0, 1)");
  if (static_cast<std::size_t>(w0.size()) != exo.rho) throw ValidationError(name + ": w0 dimension mismatch");
  if (static_cast<std::size_t>(x0.size()) != plant.order()) throw ValidationError(name + ": x0 dimension mismatch");
  const auto n = static_cast<Eigen::Index>(plant.order());
  if (stabilizer.h.size() != n - 1) throw ValidationError(name + ": observer gain H must have n - 1 entries");
  if (stabilizer.source == GainSource::kExplicit && stabilizer.k.size() != n)
    throw ValidationError(name + ": explicit K must have n entries");
  if (eso.enabled && eso.config.l1.size() != n) throw ValidationError(name + ": L1 must have n entries");
  if (!(saturation > 0.0)) throw ValidationError(name + ": saturation bound must be positive");
}

WindowRange steady_state_window(std::size_t horizon, double fraction) {
  const auto len = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(horizon)));
  return {horizon - std::min(len, horizon), horizon};
}

namespace {

std::vector<CoeffInterval> polytope_bounds(const Scenario& sc, const std::vector<CoeffVector>& alphas) {
  if (sc.exo.kind == "paper") return paper_exosystem_bounds(sc.exo.sample_time, sc.strategy);
  return sampled_bounds(alphas, 1e-9);
}

LmiProblem polytope_problem(const Scenario& sc, const PolytopeModel& poly) {
  LmiProblem prob;
  prob.f = poly.vertices;
  prob.g = reduced_input_vector(sc.plant);
  prob.c_o = RowVector::Zero(prob.g.size());
  prob.c_o(0) = 1.0;
  prob.mode = sc.stabilizer.mode;
  return prob;
}

}  // namespace

GainInfo resolve_gains(const Scenario& sc, const std::vector<CoeffVector>& alphas) {
  GainInfo info;
  info.source = sc.stabilizer.source;
  if (sc.stabilizer.source == GainSource::kExplicit) {
    info.gains = {sc.stabilizer.k};
    if (sc.stabilizer.certify_gamma > 0.0) {
      const PolytopeModel poly = build_polytope(polytope_bounds(sc, alphas), alphas);
      LmiProblem prob = polytope_problem(sc, poly);
      prob.gamma = sc.stabilizer.certify_gamma;
      info.certificate = try_verify_certificate(info.gains, prob);
    }
    return info;
  }
  const PolytopeModel poly = build_polytope(polytope_bounds(sc, alphas), alphas);
  const LmiProblem prob = polytope_problem(sc, poly);
  const GammaSynthesis syn =
      synthesize_min_gamma(prob, {}, 1.0, sc.stabilizer.gamma_max, sc.stabilizer.gamma_tolerance);
  if (sc.stabilizer.mode == CouplingMode::kCommonGain) {
    info.gains = {extract_gain(syn.solution, {1.0})};
  } else {
    for (std::size_t i = 0; i < poly.size(); ++i) {
      std::vector<double> unit(poly.size(), 0.0);
      unit[i] = 1.0;
      info.gains.push_back(extract_gain(syn.solution, unit));
    }
  }
  LmiProblem at = prob;
  at.gamma = syn.gamma;
  info.certificate = verify_certificate(info.gains, at);
  return info;
}

SimResult run_closed_loop(const Scenario& sc) {
  SimResult res;
  run_closed_loop_into(sc, res);
  return res;
}

void run_closed_loop_into(const Scenario& sc, SimResult& res) {
  sc.validate();
  const PlantModel& plant = sc.plant;
  const std::size_t n_steps = sc.horizon;
  const std::vector<CoeffVector> alphas = ltv_observer_coeffs(sc.exo, n_steps, sc.strategy);

  res = SimResult{};
  res.gain = resolve_gains(sc, alphas);
  std::optional<PolytopeModel> poly;
  if (res.gain.gains.size() > 1) poly = build_polytope(polytope_bounds(sc, alphas), alphas);

  const Vector g = reduced_input_vector(plant);
  ReducedObserver observer(sc.stabilizer.h, g);
  ImController im;
  im.form = sc.realization;
  const CoeffVector plant_den = plant.denominator();
  const Vector plant_num = plant.numerator();
  im.retune(solve_sylvester_step(plant_den, plant_num, alphas.front()));
  im.reset(plant.order());

  EsoState eso{Vector::Zero(plant.a.rows()), 0.0};
  if (sc.eso.enabled) validate_eso(sc.eso.config, plant);

  Vector x = sc.x0;
  Vector x_n = sc.x0;
  Vector w = sc.w0;

  auto reserve = [n_steps](std::vector<double>& v) { v.reserve(n_steps); };
  for (auto* v : {&res.t, &res.r, &res.y, &res.e, &res.u, &res.u0, &res.u_im, &res.u_st, &res.d_l, &res.d_hat,
                  &res.delta, &res.zeta_inf})
    reserve(*v);
  res.w.reserve(n_steps);
  res.x.reserve(n_steps);

  for (std::size_t step = 0; step < n_steps; ++step) {
    const auto k = static_cast<std::int64_t>(step);
    const double r = sc.exo.q(k).dot(w);
    const double y = plant.c.dot(x);
    if (!std::isfinite(y) || std::abs(y) > sc.saturation) throw DivergenceDetected(k, std::abs(y));
    const double e = y - r;

    const CoeffVector& alpha = alphas[step];
    im.retune(solve_sylvester_step(plant_den, plant_num, alpha));
    const double u_im = im.output(plant);

    RowVector gain = res.gain.gains.front();
    if (poly) {
      const std::vector<double> sigma = poly->weights(alpha);
      gain = RowVector::Zero(gain.size());
      for (std::size_t i = 0; i < sigma.size(); ++i) gain += sigma[i] * res.gain.gains[i];
    }
    const Matrix f = ReducedSystem::f_of(alpha);
    const Vector x_b_hat = observer.estimate(e);
    const double u_st = stabilizer_output(gain, e, x_b_hat);
    const double u0 = u_im + u_st;

    double d_hat = 0.0;
    double u = u0;
    if (sc.eso.enabled) {
      d_hat = disturbance_estimate(sc.eso.config, eso, plant);
      u = u0 - compensation(sc.eso.config, eso, plant);
    }
    const double d = sc.disturbance.enabled ? disturbance_eval(sc.disturbance, k, x, sc.exo.sample_time) : 0.0;
    const double y_n = plant.c.dot(x_n);

    res.t.push_back(static_cast<double>(k) * sc.exo.sample_time);
    res.r.push_back(r);
    res.y.push_back(y);
    res.e.push_back(e);
    res.u.push_back(u);
    res.u0.push_back(u0);
    res.u_im.push_back(u_im);
    res.u_st.push_back(u_st);
    res.d_l.push_back(d);
    res.d_hat.push_back(d_hat);
    res.delta.push_back(sc.nominal_copy ? y - y_n : 0.0);
    res.w.push_back(w);
    res.x.push_back(x);
    if (sc.eso.enabled) {
      double z = std::abs(d - d_hat);
      if (sc.eso.config.mode == EsoMode::kGrayBox) z = std::max(z, (x - eso.x_hat).cwiseAbs().maxCoeff());
      res.zeta_inf.push_back(z);
    }

    if (sc.eso.enabled) eso = eso_step(sc.eso.config, eso, plant, u, y);
    observer.step(f, e, u_st);
    im.advance(plant, u0);
    x = plant_step(plant, x, u, d).x_next;
    if (sc.nominal_copy) x_n = plant.a * x_n + plant.b_vec * u0;
    w = sc.exo.s(k) * w;
  }
}

Metrics compute_metrics(const SimResult& result, const WindowRange& window) {
  if (window.end > result.size() || window.begin >= window.end) throw EmptyWindow("compute_metrics: empty window");
  Metrics m;
  m.window_begin = window.begin;
  m.window_end = window.end;
  const auto count = static_cast<double>(window.end - window.begin);
  double se = 0.0, sr = 0.0, sd = 0.0, sdd = 0.0;
  for (std::size_t i = window.begin; i < window.end; ++i) {
    se += result.e[i] * result.e[i];
    sr += result.r[i] * result.r[i];
    m.eps_max = std::max(m.eps_max, std::abs(result.e[i]));
    const double diff = result.d_hat[i] - result.d_l[i];
    sd += result.d_l[i] * result.d_l[i];
    sdd += diff * diff;
  }
  m.eps_rms = std::sqrt(se / count);
  const double r_rms = std::sqrt(sr / count);
  m.delta_r = r_rms > 0.0 ? m.eps_rms / r_rms : 0.0;
  m.eso_rel_err = sd > 0.0 ? std::sqrt(sdd / sd) : 0.0;
  return m;
}

BoundCheck check_bounds(const Scenario& sc, const SimResult& result, const WindowRange& window) {
  if (window.end > result.size() || window.begin >= window.end) throw EmptyWindow("check_bounds: empty window");
  BoundCheck b;
  for (std::size_t i = window.begin; i < window.end; ++i) {
    if (i + 1 < result.size()) b.d_increment_sup = std::max(b.d_increment_sup, std::abs(result.d_l[i + 1] - result.d_l[i]));
    b.d_error_sup = std::max(b.d_error_sup, std::abs(result.d_l[i] - result.d_hat[i]));
    b.delta_sup = std::max(b.delta_sup, std::abs(result.delta[i]));
    if (!result.zeta_inf.empty()) b.zeta_sup = std::max(b.zeta_sup, result.zeta_inf[i]);
  }
  if (sc.eso.enabled)
    b.zeta_bound = eso_error_bound(augmented_error_system(sc.plant, sc.eso.config.l1, sc.eso.config.l2), b.d_increment_sup);
  b.delta_bound = delta_bound(sc.plant, b.d_error_sup);

  const std::size_t tail = std::max<std::size_t>(1, result.size() / 10);
  double r_max = 0.0;
  for (double r : result.r) r_max = std::max(r_max, std::abs(r));
  for (std::size_t i = result.size() - tail; i < result.size(); ++i)
    b.tracking_gap = std::max(b.tracking_gap, std::abs(result.e[i] - result.delta[i]));
  b.tracking_gap_tolerance = 1e-8 * std::max(1.0, r_max);
  return b;
}

double metric_value(const Metrics& m, const BoundCheck& b, const std::string& metric) {
  auto ratio = [](double num, double den) {
    if (den > 0.0) return num / den;
    return num > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  };
  if (metric == "eps_rms") return m.eps_rms;
  if (metric == "eps_max") return m.eps_max;
  if (metric == "delta_r") return m.delta_r;
  if (metric == "eso_rel_err") return m.eso_rel_err;
  if (metric == "tracking_gap_ratio") return ratio(b.tracking_gap, b.tracking_gap_tolerance);
  if (metric == "zeta_bound_ratio") return ratio(b.zeta_sup, b.zeta_bound);
  if (metric == "delta_bound_ratio") return ratio(b.delta_sup, b.delta_bound);
  throw ValidationError("unknown metric '" + metric + "'");
}

const ScenarioReport* SuiteReport::find(const std::string& scenario) const {
  for (const auto& s : scenarios)
    if (s.name == scenario) return &s;
  return nullptr;
}

namespace {

ScenarioReport run_one(const Scenario& sc, bool keep_series) {
  ScenarioReport rep;
  rep.name = sc.name;
  SimResult res;
  try {
    run_closed_loop_into(sc, res);
    const WindowRange win = steady_state_window(sc.horizon, sc.window_fraction);
    rep.metrics = compute_metrics(res, win);
    rep.bounds = check_bounds(sc, res, win);
    rep.completed = true;
    for (const auto& ex : sc.expectations) {
      const double v = metric_value(rep.metrics, rep.bounds, ex.metric);
      rep.outcomes.push_back({ex.metric, v, ex.lo, ex.hi, v >= ex.lo && v <= ex.hi});
    }
    if (keep_series) rep.result = std::move(res);
  } catch (const DivergenceDetected& err) {
    rep.diverged = true;
    rep.divergence_step = err.step();
    rep.error = err.what();
    if (keep_series) rep.result = std::move(res);
  } catch (const std::exception& err) {
    rep.error = err.what();
  }
  rep.pass = sc.expect_divergence ? rep.diverged : rep.completed;
  for (const auto& o : rep.outcomes) rep.pass = rep.pass && o.pass;
  if (sc.expect_divergence) rep.outcomes.push_back({"diverged", rep.diverged ? 1.0 : 0.0, 1.0, 1.0, rep.diverged});
  return rep;
}

}  // namespace

SuiteReport run_scenario_suite(const Suite& suite, bool keep_series) {
  SuiteReport report;
  report.name = suite.name;
  std::vector<std::future<ScenarioReport>> jobs;
  jobs.reserve(suite.scenarios.size());
  for (const auto& sc : suite.scenarios)
    jobs.push_back(std::async(std::launch::async, [&sc, keep_series] { return run_one(sc, keep_series); }));
  for (auto& j : jobs) report.scenarios.push_back(j.get());

  for (const auto& s : report.scenarios) report.pass = report.pass && s.pass;
  for (const auto& rx : suite.ratios) {
    const ScenarioReport* num = report.find(rx.numerator);
    const ScenarioReport* den = report.find(rx.denominator);
    ExpectationOutcome o;
    o.label = rx.metric + "(" + rx.numerator + ") / " + rx.metric + "(" + rx.denominator + ")";
    o.lo = rx.lo;
    o.hi = rx.hi;
    o.value = std::numeric_limits<double>::quiet_NaN();
    if (num && den && num->completed && den->completed) {
      const double a = metric_value(num->metrics, num->bounds, rx.metric);
      const double b = metric_value(den->metrics, den->bounds, rx.metric);
      o.value = a / b;
      o.pass = o.value >= rx.lo && o.value <= rx.hi;
    }
    report.pass = report.pass && o.pass;
    report.ratios.push_back(o);
  }
  return report;
}

namespace scenarios {

namespace {

Scenario paper_base(const std::string& name) {
  Scenario sc;
  sc.name = name;
  sc.plant = paper_plant();
  sc.exo = Exosystem::paper(1.0, 1e-3);
  sc.w0 = Vector::Zero(2);
  sc.w0(0) = 1.0;
  sc.x0 = Vector::Zero(2);
  sc.stabilizer.k = RowVector(2);
  sc.stabilizer.k << -107.11, -69.37;
  sc.stabilizer.h = Vector::Constant(1, 1e-4);
  sc.stabilizer.certify_gamma = 2.0;
  sc.eso.config.l1 = Vector(2);
  sc.eso.config.l1 << 96.71, 114.20;
  sc.eso.config.l2 = kPaperL2;
  return sc;
}

}  // namespace

Scenario paper_nominal() {
  Scenario sc = paper_base("paper-nominal");
  sc.disturbance.enabled = false;
  sc.expectations = {{"eps_rms", 0.0, 1e-9}, {"tracking_gap_ratio", 0.0, 1.0}};
  return sc;
}

Scenario paper_eso_on() {
  Scenario sc = paper_base("paper-eso-on");
  sc.expectations = {{"eps_rms", 2.3e-6, 2.1e-5},
                     {"eso_rel_err", 0.0, 0.05},
                     {"tracking_gap_ratio", 0.0, 1.0},
                     {"zeta_bound_ratio", 0.0, 1.0},
                     {"delta_bound_ratio", 0.0, 1.0}};
  return sc;
}

Scenario paper_eso_off() {
  Scenario sc = paper_base("paper-eso-off");
  sc.eso.enabled = false;
  sc.expectations = {{"eps_rms", 1.7e-5, 1.6e-4}, {"tracking_gap_ratio", 0.0, 1.0}};
  return sc;
}

Scenario paper_l2_sweep() {
  Scenario sc = paper_base("paper-l2-sweep");
  sc.eso.config.l1 << 100.52, 305.26;
  sc.eso.config.l2 = kSweepL2;
  sc.expectations = {{"eps_rms", 5.4e-7, 4.9e-6}, {"tracking_gap_ratio", 0.0, 1.0}};
  return sc;
}

Scenario paper_blackbox() {
  Scenario sc = paper_base("paper-blackbox");
  sc.eso.config.mode = EsoMode::kBlackBox;
  sc.expect_divergence = true;
  return sc;
}

Scenario zero() {
  Scenario sc = paper_base("zero");
  sc.w0.setZero();
  sc.disturbance.enabled = false;
  sc.horizon = 1000;
  sc.expectations = {{"eps_max", 0.0, 0.0}};
  return sc;
}

std::vector<std::string> names() {
  return {"paper-nominal", "paper-eso-on", "paper-eso-off", "paper-l2-sweep", "paper-blackbox", "zero"};
}

Scenario by_name(const std::string& name) {
  static const std::map<std::string, Scenario (*)()> table = {
      {"paper-nominal", &paper_nominal}, {"paper-eso-on", &paper_eso_on},     {"paper-eso-off", &paper_eso_off},
      {"paper-l2-sweep", &paper_l2_sweep}, {"paper-blackbox", &paper_blackbox}, {"zero", &zero}};
  const auto it = table.find(name);
  if (it == table.end()) throw ValidationError("unknown scenario '" + name + "'");
  return it->second();
}

Suite paper_suite() {
  Suite s;
  s.name = "paper-sim";
  s.scenarios = {paper_nominal(), paper_eso_on(), paper_eso_off(), paper_l2_sweep(), paper_blackbox()};
  s.ratios = {{"paper-eso-on", "paper-eso-off", "eps_rms", 0.0, 0.2},
              {"paper-l2-sweep", "paper-eso-on", "eps_rms", 0.0, 1.0}};
  return s;
}

std::vector<std::string> suite_names() { return {"paper-sim", "zero"}; }

Suite suite_by_name(const std::string& name) {
  if (name == "paper-sim") return paper_suite();
  if (name == "zero") return {"zero", {zero()}, {}};
  throw ValidationError("unknown suite '" + name + "'");
}

}  // namespace scenarios

}  // namespace tvimpc
