#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tvimpc/sim.hpp"

namespace tvimpc {

struct RunConfig {
  std::string name = "custom";
  std::string suite;  // built-in suite whose scenarios run before the listed ones
  std::vector<Scenario> scenarios;
  std::vector<RatioExpectation> ratios;
  std::filesystem::path output_dir = "out";
  int verbosity = 1;
  std::optional<std::size_t> horizon;

  // Defaults applied while parsing, one line each.
  std::vector<std::string> notices;
};

// JSON document; see README for the schema. Throws ParseError (with the line
// number) on malformed text and ValidationError listing every violation.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config(const std::filesystem::path& path);

// Fully explicit form; parse_config_text(serialize_config(c).dump()) == c.
nlohmann::json serialize_config(const RunConfig& cfg);
nlohmann::json serialize_scenario(const Scenario& sc);

// Built-in suite (if any) followed by the listed scenarios, with the horizon
// override applied.
Suite build_suite(const RunConfig& cfg);

nlohmann::json summary_json(const SuiteReport& report);

// Header k,t,r,y,e,u,u0,u_im,u_st,d_l,d_hat,delta with 17 significant digits.
void write_timeseries(std::ostream& out, const SimResult& result);

// Runs the suite, writes <scenario>.csv per run and <suite>-summary.json.
// Returns 0 iff every expectation passed.
int run(const RunConfig& cfg, std::ostream& log);

}  // namespace tvimpc
