#include "router/config_io.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "json.hpp"
#include "router/core.hpp"

namespace router {

namespace {

using ordered_json = nlohmann::ordered_json;

double require_number(const nlohmann::json& node, const std::string& path) {
  if (!node.is_number())
    throw SchemaError("'" + path + "' must be a number");
  return node.get<double>();
}

void reject_unknown_keys(const nlohmann::json& obj,
                         std::initializer_list<const char*> allowed,
                         const std::string& prefix) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed)
      if (item.key() == key) known = true;
    if (!known)
      throw SchemaError("unknown key '" + prefix + item.key() + "'");
  }
}

}  // namespace

ParsedConfig parse_config(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("top-level value must be an object");
  reject_unknown_keys(doc, {"channels", "carrier_k", "epsilon"}, "");

  if (!doc.contains("channels"))
    throw SchemaError("missing required key 'channels'");
  if (!doc["channels"].is_array())
    throw SchemaError("'channels' must be an array");
  if (!doc.contains("carrier_k"))
    throw SchemaError("missing required key 'carrier_k'");
  if (!doc.contains("epsilon"))
    throw SchemaError("missing required key 'epsilon'");

  ParsedConfig parsed;
  std::size_t index = 0;
  for (const auto& ch : doc["channels"]) {
    const std::string path = "channels[" + std::to_string(index) + "]";
    if (!ch.is_object()) throw SchemaError("'" + path + "' must be an object");
    reject_unknown_keys(ch, {"omega", "gamma_minus", "gamma_plus"}, path + ".");
    for (const char* key : {"omega", "gamma_minus", "gamma_plus"})
      if (!ch.contains(key))
        throw SchemaError("missing required key '" + path + "." + key + "'");

    ChannelParams params;
    params.omega = require_number(ch["omega"], path + ".omega");
    params.gamma_minus = require_number(ch["gamma_minus"], path + ".gamma_minus");
    params.gamma_plus = require_number(ch["gamma_plus"], path + ".gamma_plus");
    if (!std::isfinite(params.omega))
      throw ValueError("'" + path + ".omega' must be finite");
    if (!(params.gamma_minus >= 0.0) || !std::isfinite(params.gamma_minus))
      throw ValueError("'" + path + ".gamma_minus' must be >= 0");
    if (!(params.gamma_plus >= 0.0) || !std::isfinite(params.gamma_plus))
      throw ValueError("'" + path + ".gamma_plus' must be >= 0");
    parsed.config.channels.push_back(params);
    ++index;
  }
  if (parsed.config.channels.empty())
    throw ValueError("'channels' must contain at least one entry");

  parsed.carrier_k = require_number(doc["carrier_k"], "carrier_k");
  if (!std::isfinite(parsed.carrier_k))
    throw ValueError("'carrier_k' must be finite");
  const double epsilon = require_number(doc["epsilon"], "epsilon");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw ValueError("'epsilon' must be > 0");
  parsed.pulse.varpi = parsed.carrier_k;
  parsed.pulse.epsilon = epsilon;
  return parsed;
}

std::string config_to_json(const RouterConfig& config, double carrier_k,
                           double epsilon) {
  ordered_json doc;
  doc["channels"] = ordered_json::array();
  for (const auto& ch : config.channels) {
    ordered_json entry;
    entry["omega"] = ch.omega;
    entry["gamma_minus"] = ch.gamma_minus;
    entry["gamma_plus"] = ch.gamma_plus;
    doc["channels"].push_back(entry);
  }
  doc["carrier_k"] = carrier_k;
  doc["epsilon"] = epsilon;
  return doc.dump(2);
}

double AxisSpec::value(int index) const {
  if (steps < 2) return min;
  return min + (max - min) * static_cast<double>(index) /
                   static_cast<double>(steps - 1);
}

AxisSpec parse_axis_spec(const std::string& text) {
  AxisSpec axis;
  const auto p1 = text.find(':');
  const auto p2 = p1 == std::string::npos ? p1 : text.find(':', p1 + 1);
  const auto p3 = p2 == std::string::npos ? p2 : text.find(':', p2 + 1);
  if (p1 == std::string::npos || p2 == std::string::npos ||
      p3 == std::string::npos || text.find(':', p3 + 1) != std::string::npos)
    throw ValueError("grid spec must look like param:min:max:steps, got '" +
                     text + "'");
  axis.param = text.substr(0, p1);
  try {
    axis.min = std::stod(text.substr(p1 + 1, p2 - p1 - 1));
    axis.max = std::stod(text.substr(p2 + 1, p3 - p2 - 1));
    axis.steps = std::stoi(text.substr(p3 + 1));
  } catch (const std::exception&) {
    throw ValueError("could not parse numbers in grid spec '" + text + "'");
  }
  if (axis.param.empty()) throw ValueError("grid spec has an empty parameter name");
  if (axis.steps < 2) throw ValueError("grid steps must be >= 2");
  if (!std::isfinite(axis.min) || !std::isfinite(axis.max))
    throw ValueError("grid bounds must be finite");
  return axis;
}

void apply_parameter(const std::string& param, double value,
                     RouterConfig& config, PulseSpec& pulse, double& k) {
  if (param == "carrier_k") {
    k = value;
    pulse.varpi = value;
    return;
  }
  if (param == "pulse.epsilon") {
    if (!(value > 0.0)) throw ValueError("epsilon must stay > 0 along a sweep");
    pulse.epsilon = value;
    return;
  }
  if (param.rfind("ch", 0) == 0) {
    const auto dot = param.find('.');
    if (dot != std::string::npos && dot > 2) {
      std::size_t index = 0;
      try {
        index = std::stoul(param.substr(2, dot - 2));
      } catch (const std::exception&) {
        throw UnknownParameter("unknown parameter '" + param + "'");
      }
      if (index < 1 || index > config.size())
        throw UnknownParameter("channel index out of range in '" + param + "'");
      auto& ch = config.channels[index - 1];
      const std::string field = param.substr(dot + 1);
      if (field == "omega") {
        ch.omega = value;
        return;
      }
      if (field == "gamma_minus") {
        if (value < 0.0) throw ValueError("gamma_minus must stay >= 0");
        ch.gamma_minus = value;
        return;
      }
      if (field == "gamma_plus") {
        if (value < 0.0) throw ValueError("gamma_plus must stay >= 0");
        ch.gamma_plus = value;
        return;
      }
    }
  }
  throw UnknownParameter("unknown parameter '" + param + "'");
}

std::string format17(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::string RunManifest::to_json() const {
  ordered_json doc;
  doc["tool_version"] = kToolVersion;
  doc["subcommand"] = subcommand;
  doc["config"] = config_json.empty()
                      ? ordered_json::object()
                      : ordered_json::parse(config_json);
  if (k) doc["k"] = *k;
  if (!out_path.empty()) doc["out"] = out_path;
  if (!grid.empty()) {
    doc["grid"] = ordered_json::array();
    for (const auto& axis : grid) {
      ordered_json a;
      a["param"] = axis.param;
      a["min"] = axis.min;
      a["max"] = axis.max;
      a["steps"] = axis.steps;
      doc["grid"].push_back(a);
    }
  }
  if (budget) doc["budget"] = *budget;
  if (rng_seed) doc["rng_seed"] = *rng_seed;
  if (trials) doc["trials"] = *trials;
  return doc.dump(2);
}

void run_sweep(const RouterConfig& config, const PulseSpec& pulse, double k,
               const std::vector<AxisSpec>& axes, std::ostream& out) {
  config.validate();
  pulse.validate();
  if (axes.empty() || axes.size() > 2)
    throw ValueError("sweeps take one or two grid axes");

  // Validate axis names against the base configuration up front.
  {
    RouterConfig cfg = config;
    PulseSpec p = pulse;
    double kk = k;
    for (const auto& axis : axes)
      apply_parameter(axis.param, axis.value(0), cfg, p, kk);
  }

  out << "axis1";
  if (axes.size() == 2) out << ",axis2";
  out << ",p_back";
  for (std::size_t i = 1; i <= config.size(); ++i) out << ",p_out_" << i;
  out << "\n";

  const int outer = axes[0].steps;
  const int inner = axes.size() == 2 ? axes[1].steps : 1;
  for (int a = 0; a < outer; ++a) {
    for (int b = 0; b < inner; ++b) {
      RouterConfig cfg = config;
      PulseSpec p = pulse;
      double kk = k;
      const double v1 = axes[0].value(a);
      apply_parameter(axes[0].param, v1, cfg, p, kk);
      double v2 = 0.0;
      if (axes.size() == 2) {
        v2 = axes[1].value(b);
        apply_parameter(axes[1].param, v2, cfg, p, kk);
      }

      out << format17(v1);
      if (axes.size() == 2) out << ',' << format17(v2);
      try {
        const auto dist = routing_distribution(eval_amplitudes(cfg, kk));
        out << ',' << format17(dist.p_back);
        for (double pr : dist.p_out) out << ',' << format17(pr);
      } catch (const NumericError&) {
        out << ",nan";
        for (std::size_t i = 0; i < cfg.size(); ++i) out << ",nan";
      }
      out << "\n";
    }
  }
}

}  // namespace router
