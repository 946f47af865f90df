#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "tvimpc/eso.hpp"
#include "tvimpc/internal_model.hpp"
#include "tvimpc/lmi.hpp"
#include "tvimpc/mathcore.hpp"
#include "tvimpc/model.hpp"

namespace tvimpc {

enum class GainSource { kExplicit, kLmi };

std::string to_string(GainSource s);
GainSource gain_source_from_string(const std::string& s);

struct StabilizerConfig {
  GainSource source = GainSource::kExplicit;
  RowVector k;  // explicit gain [K1, K2 ...]
  Vector h;     // reduced-order observer gain
  CouplingMode mode = CouplingMode::kCommonGain;
  // Explicit gains are checked against the block inequalities at this gamma
  // when positive; LMI gains search gamma in (1, gamma_max].
  double certify_gamma = 0.0;
  double gamma_max = 1e3;
  double gamma_tolerance = 1e-2;
};

struct EsoSettings {
  bool enabled = true;
  EsoConfig config;
};

// Bounds on a metric; either side may be open.
struct Expectation {
  std::string metric;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
};

struct Scenario {
  std::string name;
  PlantModel plant;
  Exosystem exo;
  DisturbanceModel disturbance;
  EsoSettings eso;
  StabilizerConfig stabilizer;
  std::size_t horizon = 10000;
  Vector w0;
  Vector x0;
  double window_fraction = 0.5;
  CoeffStrategy strategy = CoeffStrategy::kLyapunov;
  Realization realization = Realization::kObserver;
  double saturation = 1e6;
  bool nominal_copy = true;
  bool expect_divergence = false;
  std::vector<Expectation> expectations;

  void validate() const;
};

struct Metrics {
  double eps_rms = 0.0;
  double eps_max = 0.0;
  double delta_r = 0.0;
  double eso_rel_err = 0.0;
  std::size_t window_begin = 0;
  std::size_t window_end = 0;
};

// Steady-state quantities checked against the analytic ESO and Delta bounds,
// and the gap |e - Delta| over the final 10% of the run.
struct BoundCheck {
  double zeta_sup = 0.0;
  double zeta_bound = 0.0;
  double d_increment_sup = 0.0;
  double d_error_sup = 0.0;
  double delta_sup = 0.0;
  double delta_bound = 0.0;
  double tracking_gap = 0.0;
  double tracking_gap_tolerance = 0.0;
};

struct GainInfo {
  GainSource source = GainSource::kExplicit;
  std::vector<RowVector> gains;  // one, or one per polytope vertex
  std::optional<Certificate> certificate;
};

struct SimResult {
  std::vector<double> t, r, y, e, u, u0, u_im, u_st, d_l, d_hat, delta;
  std::vector<double> zeta_inf;  // ||[x - x_hat; d_l - d_hat]||_inf, empty without ESO
  std::vector<Vector> w, x;
  GainInfo gain;
  std::size_t size() const { return y.size(); }
};

struct WindowRange {
  std::size_t begin = 0;
  std::size_t end = 0;
};

WindowRange steady_state_window(std::size_t horizon, double fraction);

// Runs the full loop. Throws DivergenceDetected when |y| exceeds the
// saturation bound; synthesis errors propagate.
SimResult run_closed_loop(const Scenario& sc);
// Same, filling `out` step by step so that it keeps the series up to the
// failing step when an exception escapes.
void run_closed_loop_into(const Scenario& sc, SimResult& out);

Metrics compute_metrics(const SimResult& result, const WindowRange& window);
BoundCheck check_bounds(const Scenario& sc, const SimResult& result, const WindowRange& window);

// Stabilizer gains for a scenario, synthesized or verified as configured.
GainInfo resolve_gains(const Scenario& sc, const std::vector<CoeffVector>& alphas);

struct ExpectationOutcome {
  std::string label;
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool pass = false;
};

struct ScenarioReport {
  std::string name;
  bool completed = false;
  bool diverged = false;
  std::int64_t divergence_step = -1;
  std::string error;
  Metrics metrics;
  BoundCheck bounds;
  std::optional<SimResult> result;
  std::vector<ExpectationOutcome> outcomes;
  bool pass = false;
};

// metric(numerator) / metric(denominator) must lie in [lo, hi].
struct RatioExpectation {
  std::string numerator;
  std::string denominator;
  std::string metric = "eps_rms";
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
};

struct Suite {
  std::string name;
  std::vector<Scenario> scenarios;
  std::vector<RatioExpectation> ratios;
};

struct SuiteReport {
  std::string name;
  std::vector<ScenarioReport> scenarios;
  std::vector<ExpectationOutcome> ratios;
  bool pass = true;

  const ScenarioReport* find(const std::string& scenario) const;
};

// Scenarios run concurrently; failures are recorded per scenario.
SuiteReport run_scenario_suite(const Suite& suite, bool keep_series = true);

double metric_value(const Metrics& m, const BoundCheck& b, const std::string& metric);

namespace scenarios {

inline constexpr double kPaperL2 = 2.75e4;
inline constexpr double kSweepL2 = 1.02e6;

Scenario paper_nominal();
Scenario paper_eso_on();
Scenario paper_eso_off();
Scenario paper_l2_sweep();
Scenario paper_blackbox();
Scenario zero();

std::vector<std::string> names();
Scenario by_name(const std::string& name);

Suite paper_suite();
std::vector<std::string> suite_names();
Suite suite_by_name(const std::string& name);

}  // namespace scenarios

}  // namespace tvimpc
