#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "sipdyn/codim2.hpp"
#include "sipdyn/integrate.hpp"
#include "sipdyn/model.hpp"
#include "sipdyn/scan.hpp"

namespace sipdyn::cli {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kConfigSchema = "sip-dyn/config/v1";
inline constexpr std::string_view kSummarySchema = "sip-dyn/summary/v1";

enum class Command { simulate, equilibria, sweep, curve, scan, threshold, percapita };
std::string_view command_name(Command c) noexcept;
// Throws ValidationError.
Command parse_command(std::string_view name);

struct SimulateConfig {
  State ic{2.0, 1.0, 3.0};
  SimOptions sim;
  double tol = 1e-3;  // outcome classification
};

struct EquilibriaConfig {};

struct SweepConfig {
  ParamId parameter = ParamId::L;
  Range range{-0.6, 0.6};
  int n = 1201;
  double localize_tol = 1e-8;
  bool include_infeasible = false;
};

struct CurveConfig {
  CurveKind kind = CurveKind::hopf;
  ParamId p1 = ParamId::L;
  ParamId p2 = ParamId::a0;
  std::array<double, 2> seed{0.2184, 3.0};
  TraceOptions trace;
  std::optional<std::array<double, 2>> boundary_zero_hopf_seed;
};

struct ScanConfig {
  Range L{-1.0, 1.0};
  Range r{0.05, 0.95};
  int nL = 61;
  int nr = 61;
  State ic{2.0, 1.0, 3.0};
  SimOptions sim;
  double tol = 1e-3;
};

struct ThresholdConfig {
  double tol = 1e-12;
  int samples = 401;
};

struct PercapitaConfig {
  std::vector<double> I_values{0.0, 0.5, 2.0};
  Range S{0.0, 0.0};  // resolved to (K/1000, K] when absent
  int n = 401;
};

using Options = std::variant<SimulateConfig, EquilibriaConfig, SweepConfig, CurveConfig,
                             ScanConfig, ThresholdConfig, PercapitaConfig>;

struct RunConfig {
  Command command = Command::simulate;
  Parameters params;
  Options options;
};

// Accepts a config document or a summary written by a previous run. Missing
// keys take their defaults, unknown keys are rejected. Everything is
// validated here, so a config that parses can only fail numerically.
// Throws ValidationError.
RunConfig parse_config(const Json& doc, Command command);
RunConfig load_config(const std::string& path, Command command);

// Fully resolved form; parse_config(to_json(c), c.command) == c.
Json to_json(const RunConfig& c);

Json params_json(const Parameters& p);

}  // namespace sipdyn::cli
