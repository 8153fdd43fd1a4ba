#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "router/types.hpp"

namespace router {

inline constexpr const char* kToolVersion = "0.1.0";

struct ParsedConfig {
  RouterConfig config;
  PulseSpec pulse;    // varpi = carrier_k
  double carrier_k = 0.0;
};

/// Strict parse of the device document
///   {"channels": [{"omega": r, "gamma_minus": r, "gamma_plus": r}, ...],
///    "carrier_k": r, "epsilon": r}
/// Unknown or missing keys raise SchemaError naming the offending path;
/// out-of-range values raise ValueError.
ParsedConfig parse_config(const std::string& json_text);

/// Inverse of parse_config (canonical key order).
std::string config_to_json(const RouterConfig& config, double carrier_k,
                           double epsilon);

/// One sweep axis, parsed from "param:min:max:steps". Axis values are the
/// steps-point inclusive linear grid between min and max.
struct AxisSpec {
  std::string param;
  double min = 0.0;
  double max = 0.0;
  int steps = 0;

  double value(int index) const;
};

AxisSpec parse_axis_spec(const std::string& text);

/// Writes `value` into the parameter named by `param`:
/// ch<i>.omega | ch<i>.gamma_minus | ch<i>.gamma_plus (1-based i),
/// pulse.epsilon, or carrier_k. Throws UnknownParameter otherwise.
void apply_parameter(const std::string& param, double value,
                     RouterConfig& config, PulseSpec& pulse, double& k);

/// Shortest-width formatting with 17 significant digits (%.17g), enough
/// to round-trip a double exactly.
std::string format17(double value);

/// Record of a resolved run, embedded in JSON reports and written next to
/// CSV outputs; rerunning the same command line reproduces the output
/// byte for byte.
struct RunManifest {
  std::string subcommand;
  std::string config_json;  // resolved input document
  std::optional<double> k;
  std::string out_path;
  std::vector<AxisSpec> grid;
  std::optional<long> budget;
  std::optional<std::uint64_t> rng_seed;
  std::optional<int> trials;

  std::string to_json() const;
};

/// Closed-form probabilities over a 1- or 2-axis parameter grid, written
/// as CSV: header `axis1[,axis2],p_back,p_out_1..N`, rows in row-major
/// axis order, floats with 17 significant digits. Grid points where the
/// evaluation degenerates emit nan fields.
void run_sweep(const RouterConfig& config, const PulseSpec& pulse, double k,
               const std::vector<AxisSpec>& axes, std::ostream& out);

}  // namespace router
