#include "tvimpc/config.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "tvimpc/errors.hpp"

namespace tvimpc {

using nlohmann::json;

namespace {

json to_json_vec(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }
json to_json_row(const RowVector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json to_json_mat(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(to_json_row(m.row(r)));
  return rows;
}

// Infinite bounds are written as null.
json bound_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::size_t line_of(const std::string& text, std::size_t byte) {
  const auto end = text.begin() + static_cast<std::ptrdiff_t>(std::min(byte, text.size()));
  return 1 + static_cast<std::size_t>(std::count(text.begin(), end, '\n'));
}

// Reads one JSON object, recording unknown keys, type errors and applied defaults.
class Section {
 public:
  Section(const json* obj, std::string path, std::vector<std::string>& violations, std::vector<std::string>& notices)
      : obj_(obj), path_(std::move(path)), violations_(violations), notices_(notices) {
    if (obj_ && !obj_->is_object()) {
      violations_.push_back(path_ + ": expected an object");
      obj_ = nullptr;
    }
  }

  // Call after every known key has been read.
  void finish() {
    if (!obj_) return;
    for (const auto& [key, _] : obj_->items())
      if (!seen_.count(key)) violations_.push_back(path_ + ": unknown key '" + key + "'");
  }

  Section child(const std::string& key) {
    seen_.insert(key);
    const json* sub = obj_ && obj_->contains(key) ? &(*obj_)[key] : nullptr;
    if (!sub) notices_.push_back(path_ + "." + key + ": section absent, defaults used");
    return Section(sub, path_ + "." + key, violations_, notices_);
  }

  const json* raw(const std::string& key) {
    seen_.insert(key);
    return obj_ && obj_->contains(key) ? &(*obj_)[key] : nullptr;
  }

  void number(const std::string& key, double& dst) {
    read(key, dst, [](const json& j) { return j.is_number(); }, "a number", [](const json& j) { return j.get<double>(); });
  }
  void flag(const std::string& key, bool& dst) {
    read(key, dst, [](const json& j) { return j.is_boolean(); }, "a boolean", [](const json& j) { return j.get<bool>(); });
  }
  void text(const std::string& key, std::string& dst) {
    read(key, dst, [](const json& j) { return j.is_string(); }, "a string", [](const json& j) { return j.get<std::string>(); });
  }
  void count(const std::string& key, std::size_t& dst) {
    read(
        key, dst, [](const json& j) { return j.is_number_unsigned(); }, "a non-negative integer",
        [](const json& j) { return j.get<std::size_t>(); });
  }
  void integer(const std::string& key, int& dst) {
    read(key, dst, [](const json& j) { return j.is_number_integer(); }, "an integer", [](const json& j) { return j.get<int>(); });
  }
  void vec(const std::string& key, Vector& dst) {
    std::vector<double> tmp(dst.data(), dst.data() + dst.size());
    if (numbers(key, tmp)) dst = Eigen::Map<Vector>(tmp.data(), static_cast<Eigen::Index>(tmp.size()));
  }
  void row(const std::string& key, RowVector& dst) {
    std::vector<double> tmp(dst.data(), dst.data() + dst.size());
    if (numbers(key, tmp)) dst = Eigen::Map<RowVector>(tmp.data(), static_cast<Eigen::Index>(tmp.size()));
  }

  template <typename E>
  void choice(const std::string& key, E& dst, E (*parse)(const std::string&)) {
    std::string name;
    if (!present(key)) {
      seen_.insert(key);
      notices_.push_back(path_ + "." + key + ": defaulted to " + json(to_string(dst)).dump());
      return;
    }
    text(key, name);
    if (name.empty()) return;
    try {
      dst = parse(name);
    } catch (const ValidationError& err) {
      violations_.push_back(path_ + "." + key + ": " + err.what());
    }
  }

  bool present(const std::string& key) const { return obj_ && obj_->contains(key); }
  const std::string& path() const { return path_; }
  void violation(const std::string& msg) { violations_.push_back(path_ + ": " + msg); }

 private:
  template <typename T, typename Check, typename Get>
  void read(const std::string& key, T& dst, Check check, const char* what, Get get) {
    seen_.insert(key);
    if (!present(key)) {
      notices_.push_back(path_ + "." + key + ": defaulted to " + json(dst).dump());
      return;
    }
    const json& j = (*obj_)[key];
    if (!check(j)) {
      violations_.push_back(path_ + "." + key + ": expected " + std::string(what));
      return;
    }
    dst = get(j);
  }

  bool numbers(const std::string& key, std::vector<double>& dst) {
    seen_.insert(key);
    if (!present(key)) {
      notices_.push_back(path_ + "." + key + ": defaulted to " + json(dst).dump());
      return false;
    }
    const json& j = (*obj_)[key];
    if (!j.is_array() || !std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_number(); })) {
      violations_.push_back(path_ + "." + key + ": expected an array of numbers");
      return false;
    }
    dst = j.get<std::vector<double>>();
    return true;
  }

  const json* obj_;
  std::string path_;
  std::vector<std::string>& violations_;
  std::vector<std::string>& notices_;
  std::set<std::string> seen_;
};

bool matrix_from(const json& j, Matrix& out) {
  if (!j.is_array() || j.empty()) return false;
  const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
  if (cols == 0) return false;
  out.resize(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) return false;
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) return false;
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
    }
  }
  return true;
}

void read_plant(Section sec, PlantModel& plant) {
  Vector last_row = -plant.denominator();
  RowVector c = plant.c;
  double gain = plant.input_gain;
  sec.vec("last_row", last_row);
  sec.row("c", c);
  sec.number("input_gain", gain);
  sec.finish();
  if (last_row.size() != c.size()) {
    sec.violation("last_row and c must have the same length");
    return;
  }
  try {
    plant = PlantModel::canonical(last_row, c, gain);
    plant.validate();
  } catch (const Error& err) {
    sec.violation(err.what());
  }
}

void read_exosystem(Section sec, Exosystem& exo) {
  std::string kind = exo.kind;
  double lambda = exo.lambda;
  double ts = exo.sample_time;
  sec.text("kind", kind);
  sec.number("sample_time", ts);
  if (kind == "paper") {
    sec.number("lambda", lambda);
    sec.finish();
    exo = Exosystem::paper(lambda, ts);
    return;
  }
  if (kind == "constant") {
    Matrix s;
    RowVector q;
    if (exo.kind == "constant") {
      s = exo.s(0);
      q = exo.q(0);
    }
    if (const json* js = sec.raw("s")) {
      if (!matrix_from(*js, s)) sec.violation("s must be a rectangular array of number rows");
    } else if (s.size() == 0) {
      sec.violation("constant exosystem requires 's'");
    }
    sec.row("q", q);
    sec.finish();
    if (s.size() == 0) return;
    if (s.rows() != s.cols() || q.size() != s.rows()) {
      sec.violation("s must be square with q of matching length");
      return;
    }
    exo = Exosystem::constant(s, q, ts);
    return;
  }
  sec.finish();
  sec.violation("kind must be 'paper' or 'constant', got '" + kind + "'");
}

void read_disturbance(Section sec, DisturbanceModel& d) {
  sec.flag("enabled", d.enabled);
  sec.number("k1_amplitude", d.k1_amplitude);
  sec.number("k1_frequency", d.k1_frequency);
  sec.number("k2", d.k2);
  sec.number("noise_amplitude", d.noise_amplitude);
  sec.number("noise_frequency", d.noise_frequency);
  sec.finish();
}

void read_eso(Section sec, EsoSettings& eso, const PlantModel& plant) {
  sec.flag("enabled", eso.enabled);
  sec.choice("mode", eso.config.mode, &eso_mode_from_string);
  const bool has_gains = sec.present("l1") || sec.present("l2");
  if (const json* poles = sec.raw("poles")) {
    if (has_gains) sec.violation("give either poles or l1/l2, not both");
    std::vector<std::complex<double>> p;
    bool ok = poles->is_array();
    if (ok) {
      for (const auto& e : *poles) {
        if (e.is_number()) {
          p.emplace_back(e.get<double>(), 0.0);
        } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
          p.emplace_back(e[0].get<double>(), e[1].get<double>());
        } else {
          ok = false;
        }
      }
    }
    if (!ok) {
      sec.violation("poles must be numbers or [re, im] pairs");
    } else {
      try {
        const EsoGains g = design_eso_gains(plant, p);
        eso.config.l1 = g.l1;
        eso.config.l2 = g.l2;
      } catch (const Error& err) {
        sec.violation(std::string("poles: ") + err.what());
      }
    }
  }
  if (!sec.present("poles")) {
    sec.vec("l1", eso.config.l1);
    sec.number("l2", eso.config.l2);
  }
  sec.finish();
}

void read_stabilizer(Section sec, StabilizerConfig& st) {
  sec.choice("source", st.source, &gain_source_from_string);
  sec.row("k", st.k);
  sec.vec("h", st.h);
  sec.choice("mode", st.mode, &coupling_mode_from_string);
  sec.number("certify_gamma", st.certify_gamma);
  sec.number("gamma_max", st.gamma_max);
  sec.number("gamma_tolerance", st.gamma_tolerance);
  sec.finish();
}

void read_sim(Section sec, Scenario& sc) {
  sec.count("horizon", sc.horizon);
  sec.vec("w0", sc.w0);
  sec.vec("x0", sc.x0);
  sec.number("window_fraction", sc.window_fraction);
  sec.choice("strategy", sc.strategy, &coeff_strategy_from_string);
  sec.choice("realization", sc.realization, &realization_from_string);
  sec.number("saturation", sc.saturation);
  sec.flag("nominal_copy", sc.nominal_copy);
  sec.finish();
}

void read_expect(Section sec, Scenario& sc) {
  sec.flag("divergence", sc.expect_divergence);
  if (const json* bounds = sec.raw("bounds")) {
    if (!bounds->is_array()) {
      sec.violation("bounds must be an array");
    } else {
      sc.expectations.clear();
      for (std::size_t i = 0; i < bounds->size(); ++i) {
        std::vector<std::string> local_notices;
        std::vector<std::string> local_violations;
        Section b(&(*bounds)[i], sec.path() + ".bounds[" + std::to_string(i) + "]", local_violations, local_notices);
        Expectation ex;
        b.text("metric", ex.metric);
        for (const char* side : {"lo", "hi"}) {
          const json* v = b.raw(side);
          double& dst = std::string(side) == "lo" ? ex.lo : ex.hi;
          if (v && v->is_number()) {
            dst = v->get<double>();
          } else if (v && !v->is_null()) {
            local_violations.push_back(b.path() + "." + side + ": expected a number or null");
          }
        }
        b.finish();
        if (ex.metric.empty()) local_violations.push_back(b.path() + ": metric is required");
        try {
          (void)metric_value(Metrics{}, BoundCheck{}, ex.metric);
        } catch (const ValidationError& err) {
          if (!ex.metric.empty()) local_violations.push_back(b.path() + ": " + err.what());
        }
        for (auto& v : local_violations) sec.violation(v);
        sc.expectations.push_back(ex);
      }
    }
  }
  sec.finish();
}

Scenario default_scenario() {
  Scenario sc = scenarios::paper_nominal();
  sc.name.clear();
  sc.expectations.clear();
  return sc;
}

Scenario read_scenario(const json& j, const std::string& path, std::vector<std::string>& violations,
                       std::vector<std::string>& notices) {
  if (j.is_string()) {
    try {
      return scenarios::by_name(j.get<std::string>());
    } catch (const ValidationError& err) {
      violations.push_back(path + ": " + err.what());
      return default_scenario();
    }
  }
  Section sec(&j, path, violations, notices);
  Scenario sc = default_scenario();
  std::string base;
  const json* base_js = sec.present("base") ? sec.raw("base") : nullptr;
  if (base_js && base_js->is_null()) {
    // explicit null: paper-nominal parameters, no expectations
  } else if (base_js) {
    sec.text("base", base);
    try {
      sc = scenarios::by_name(base);
    } catch (const ValidationError& err) {
      sec.violation(err.what());
    }
  } else {
    (void)sec.raw("base");
    notices.push_back(path + ".base: absent, paper-nominal parameters used without expectations");
  }
  std::string name = sc.name;
  sec.text("name", name);
  sc.name = name;
  read_plant(sec.child("plant"), sc.plant);
  read_exosystem(sec.child("exosystem"), sc.exo);
  read_disturbance(sec.child("disturbance"), sc.disturbance);
  read_eso(sec.child("eso"), sc.eso, sc.plant);
  read_stabilizer(sec.child("stabilizer"), sc.stabilizer);
  read_sim(sec.child("sim"), sc);
  read_expect(sec.child("expect"), sc);
  sec.finish();
  if (sc.name.empty()) sec.violation("name is required when no base scenario is given");
  return sc;
}

RatioExpectation read_ratio(const json& j, const std::string& path, std::vector<std::string>& violations,
                            std::vector<std::string>& notices) {
  Section sec(&j, path, violations, notices);
  RatioExpectation rx;
  sec.text("numerator", rx.numerator);
  sec.text("denominator", rx.denominator);
  sec.text("metric", rx.metric);
  for (const char* side : {"lo", "hi"}) {
    const json* v = sec.raw(side);
    double& dst = std::string(side) == "lo" ? rx.lo : rx.hi;
    if (v && v->is_number()) {
      dst = v->get<double>();
    } else if (v && !v->is_null()) {
      sec.violation(std::string(side) + ": expected a number or null");
    }
  }
  sec.finish();
  if (rx.numerator.empty() || rx.denominator.empty()) sec.violation("numerator and denominator are required");
  return rx;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& err) {
    throw ParseError(std::string("config: ") + err.what(), line_of(text, err.byte == 0 ? 0 : err.byte - 1));
  }

  RunConfig cfg;
  std::vector<std::string> violations;
  Section top(&doc, "config", violations, cfg.notices);
  top.text("name", cfg.name);
  if (top.present("suite")) {
    top.text("suite", cfg.suite);
    const auto known = scenarios::suite_names();
    if (!cfg.suite.empty() && std::find(known.begin(), known.end(), cfg.suite) == known.end())
      top.violation("unknown suite '" + cfg.suite + "'");
  } else {
    (void)top.raw("suite");
  }
  std::string out = cfg.output_dir.string();
  top.text("output_dir", out);
  cfg.output_dir = out;
  top.integer("verbosity", cfg.verbosity);
  if (const json* h = top.raw("horizon")) {
    if (h->is_number_unsigned()) {
      cfg.horizon = h->get<std::size_t>();
    } else if (!h->is_null()) {
      top.violation("horizon: expected a non-negative integer");
    }
  }
  if (const json* list = top.raw("scenarios")) {
    if (!list->is_array()) {
      top.violation("scenarios must be an array");
    } else {
      for (std::size_t i = 0; i < list->size(); ++i)
        cfg.scenarios.push_back(
            read_scenario((*list)[i], "config.scenarios[" + std::to_string(i) + "]", violations, cfg.notices));
    }
  } else {
    cfg.notices.push_back("config.scenarios: absent, no scenarios listed");
  }
  if (const json* list = top.raw("ratios")) {
    if (!list->is_array()) {
      top.violation("ratios must be an array");
    } else {
      for (std::size_t i = 0; i < list->size(); ++i)
        cfg.ratios.push_back(read_ratio((*list)[i], "config.ratios[" + std::to_string(i) + "]", violations, cfg.notices));
    }
  }
  top.finish();

  std::set<std::string> names;
  for (const auto& sc : cfg.scenarios) {
    if (!names.insert(sc.name).second) violations.push_back("config: duplicate scenario name '" + sc.name + "'");
    Scenario checked = sc;
    if (cfg.horizon) checked.horizon = *cfg.horizon;
    try {
      checked.validate();
      if (sc.eso.enabled) validate_eso(sc.eso.config, sc.plant);
    } catch (const Error& err) {
      violations.push_back(std::string("config: scenario ") + err.what());
    }
  }
  if (!violations.empty()) {
    std::string msg = "config has " + std::to_string(violations.size()) + " violation(s):";
    for (const auto& v : violations) msg += "\n  " + v;
    throw ValidationError(msg);
  }
  return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("config: cannot open " + path.string(), 0);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

json serialize_scenario(const Scenario& sc) {
  json j;
  j["base"] = nullptr;
  j["name"] = sc.name;
  j["plant"] = {{"last_row", to_json_vec(-sc.plant.denominator())},
                {"c", to_json_row(sc.plant.c)},
                {"input_gain", sc.plant.input_gain}};
  if (sc.exo.kind == "paper") {
    j["exosystem"] = {{"kind", "paper"}, {"lambda", sc.exo.lambda}, {"sample_time", sc.exo.sample_time}};
  } else if (sc.exo.kind == "constant") {
    j["exosystem"] = {{"kind", "constant"},
                      {"s", to_json_mat(sc.exo.s(0))},
                      {"q", to_json_row(sc.exo.q(0))},
                      {"sample_time", sc.exo.sample_time}};
  } else {
    throw ValidationError("serialize_scenario: exosystem kind '" + sc.exo.kind + "' has no file form");
  }
  const DisturbanceModel& d = sc.disturbance;
  j["disturbance"] = {{"enabled", d.enabled},
                      {"k1_amplitude", d.k1_amplitude},
                      {"k1_frequency", d.k1_frequency},
                      {"k2", d.k2},
                      {"noise_amplitude", d.noise_amplitude},
                      {"noise_frequency", d.noise_frequency}};
  j["eso"] = {{"enabled", sc.eso.enabled},
              {"mode", to_string(sc.eso.config.mode)},
              {"l1", to_json_vec(sc.eso.config.l1)},
              {"l2", sc.eso.config.l2}};
  j["stabilizer"] = {{"source", to_string(sc.stabilizer.source)},
                     {"k", to_json_row(sc.stabilizer.k)},
                     {"h", to_json_vec(sc.stabilizer.h)},
                     {"mode", to_string(sc.stabilizer.mode)},
                     {"certify_gamma", sc.stabilizer.certify_gamma},
                     {"gamma_max", sc.stabilizer.gamma_max},
                     {"gamma_tolerance", sc.stabilizer.gamma_tolerance}};
  j["sim"] = {{"horizon", sc.horizon},
              {"w0", to_json_vec(sc.w0)},
              {"x0", to_json_vec(sc.x0)},
              {"window_fraction", sc.window_fraction},
              {"strategy", to_string(sc.strategy)},
              {"realization", to_string(sc.realization)},
              {"saturation", sc.saturation},
              {"nominal_copy", sc.nominal_copy}};
  json bounds = json::array();
  for (const auto& ex : sc.expectations)
    bounds.push_back({{"metric", ex.metric}, {"lo", bound_json(ex.lo)}, {"hi", bound_json(ex.hi)}});
  j["expect"] = {{"divergence", sc.expect_divergence}, {"bounds", bounds}};
  return j;
}

json serialize_config(const RunConfig& cfg) {
  json j;
  j["name"] = cfg.name;
  j["suite"] = cfg.suite;
  j["output_dir"] = cfg.output_dir.string();
  j["verbosity"] = cfg.verbosity;
  j["horizon"] = cfg.horizon ? json(*cfg.horizon) : json(nullptr);
  j["scenarios"] = json::array();
  for (const auto& sc : cfg.scenarios) j["scenarios"].push_back(serialize_scenario(sc));
  j["ratios"] = json::array();
  for (const auto& rx : cfg.ratios)
    j["ratios"].push_back({{"numerator", rx.numerator},
                           {"denominator", rx.denominator},
                           {"metric", rx.metric},
                           {"lo", bound_json(rx.lo)},
                           {"hi", bound_json(rx.hi)}});
  return j;
}

Suite build_suite(const RunConfig& cfg) {
  Suite suite;
  if (!cfg.suite.empty()) suite = scenarios::suite_by_name(cfg.suite);
  if (cfg.suite.empty()) {
    suite.name = cfg.name;
  } else if (!cfg.scenarios.empty() || !cfg.ratios.empty()) {
    suite.name = cfg.suite + "+" + cfg.name;
  }
  suite.scenarios.insert(suite.scenarios.end(), cfg.scenarios.begin(), cfg.scenarios.end());
  suite.ratios.insert(suite.ratios.end(), cfg.ratios.begin(), cfg.ratios.end());
  if (cfg.horizon)
    for (auto& sc : suite.scenarios) sc.horizon = *cfg.horizon;
  return suite;
}

namespace {

json outcome_json(const ExpectationOutcome& o) {
  return {{"label", o.label},
          {"value", std::isfinite(o.value) ? json(o.value) : json(nullptr)},
          {"lo", bound_json(o.lo)},
          {"hi", bound_json(o.hi)},
          {"pass", o.pass}};
}

}  // namespace

json summary_json(const SuiteReport& report) {
  json j;
  j["suite"] = report.name;
  j["pass"] = report.pass;
  j["scenarios"] = json::array();
  for (const auto& s : report.scenarios) {
    json sj;
    sj["name"] = s.name;
    sj["status"] = s.completed ? "completed" : (s.diverged ? "diverged" : "error");
    sj["pass"] = s.pass;
    if (s.diverged) sj["divergence_step"] = s.divergence_step;
    if (!s.completed) sj["error"] = s.error;
    if (s.completed) {
      sj["metrics"] = {{"eps_rms", s.metrics.eps_rms},
                       {"eps_max", s.metrics.eps_max},
                       {"delta_r", s.metrics.delta_r},
                       {"eso_rel_err", s.metrics.eso_rel_err},
                       {"window", {s.metrics.window_begin, s.metrics.window_end}}};
      sj["bounds"] = {{"zeta_sup", s.bounds.zeta_sup},
                      {"zeta_bound", s.bounds.zeta_bound},
                      {"d_increment_sup", s.bounds.d_increment_sup},
                      {"d_error_sup", s.bounds.d_error_sup},
                      {"delta_sup", s.bounds.delta_sup},
                      {"delta_bound", s.bounds.delta_bound},
                      {"tracking_gap", s.bounds.tracking_gap},
                      {"tracking_gap_tolerance", s.bounds.tracking_gap_tolerance}};
    }
    if (s.result) {
      const GainInfo& g = s.result->gain;
      json gains = json::array();
      for (const auto& k : g.gains) gains.push_back(to_json_row(k));
      sj["stabilizer"] = {{"source", to_string(g.source)}, {"gains", gains}};
      if (g.certificate) {
        sj["stabilizer"]["certificate"] = {{"gamma", g.certificate->gamma},
                                           {"margin", g.certificate->margin},
                                           {"relative_margin", g.certificate->relative_margin},
                                           {"certified", g.certificate->certified}};
      }
    }
    sj["expectations"] = json::array();
    for (const auto& o : s.outcomes) sj["expectations"].push_back(outcome_json(o));
    j["scenarios"].push_back(sj);
  }
  j["ratios"] = json::array();
  for (const auto& o : report.ratios) j["ratios"].push_back(outcome_json(o));
  return j;
}

void write_timeseries(std::ostream& out, const SimResult& res) {
  out << "k,t,r,y,e,u,u0,u_im,u_st,d_l,d_hat,delta\n";
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << ',' << buf;
  };
  for (std::size_t i = 0; i < res.size(); ++i) {
    out << i;
    for (const auto* series : {&res.t, &res.r, &res.y, &res.e, &res.u, &res.u0, &res.u_im, &res.u_st, &res.d_l,
                               &res.d_hat, &res.delta})
      put((*series)[i]);
    out << '\n';
  }
}

int run(const RunConfig& cfg, std::ostream& log) {
  if (cfg.verbosity > 1) {
    for (const auto& n : cfg.notices) log << "default: " << n << '\n';
  } else if (cfg.verbosity > 0 && !cfg.notices.empty()) {
    log << cfg.notices.size() << " default(s) applied; raise verbosity to list them\n";
  }
  const Suite suite = build_suite(cfg);
  std::filesystem::create_directories(cfg.output_dir);
  const SuiteReport report = run_scenario_suite(suite);

  for (const auto& s : report.scenarios) {
    if (s.result) {
      std::ofstream csv(cfg.output_dir / (s.name + ".csv"));
      write_timeseries(csv, *s.result);
      if (!csv) throw Error("cannot write time series for " + s.name);
    }
    if (cfg.verbosity > 0) {
      log << (s.pass ? "PASS " : "FAIL ") << s.name;
      if (s.completed) log << "  eps_rms=" << s.metrics.eps_rms;
      if (s.diverged) log << "  diverged at step " << s.divergence_step;
      if (!s.completed && !s.diverged) log << "  error: " << s.error;
      log << '\n';
      for (const auto& o : s.outcomes)
        if (!o.pass) log << "    " << o.label << " = " << o.value << " outside [" << o.lo << ", " << o.hi << "]\n";
    }
  }
  if (cfg.verbosity > 0)
    for (const auto& o : report.ratios)
      log << (o.pass ? "PASS " : "FAIL ") << o.label << " = " << o.value << '\n';

  const std::string file = (report.name.empty() ? std::string("suite") : report.name) + "-summary.json";
  std::ofstream summary(cfg.output_dir / file);
  summary << summary_json(report).dump(2) << '\n';
  if (!summary) throw Error("cannot write summary");
  return report.pass ? 0 : 1;
}

}  // namespace tvimpc
