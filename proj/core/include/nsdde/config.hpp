#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "nsdde/ctmc.hpp"
#include "nsdde/ensemble.hpp"
#include "nsdde/model.hpp"
#include "nsdde/theta_em.hpp"

namespace nsdde {

/// Parsed experiment description. The file format is flat `key = value`
/// lines under `[model]`, `[chain]`, `[scheme]` and `[ensemble]` section
/// headers; arrays are bracketed comma lists, `#` starts a comment. Unknown
/// sections or keys are rejected. The step size is never a key, only
/// m_steps is, so delta = tau/m_steps holds by construction.
struct RunConfig {
  // [model]
  std::string model_name = "sine_neutral";
  double tau = 1.0;
  Vec xi{1.0};  // constant initial segment
  std::map<std::string, double> model_params;

  // [chain]
  Matrix rates;  // empty: use the model's default template
  int i0 = 1;

  // [scheme]
  double theta = 1.0;
  int m_steps = 100;
  double horizon = 8.0;

  // [ensemble]
  int n_paths = 2000;
  double p_moment = 2.0;
  std::uint64_t seed = 42;
  double window_t0 = 0.0;  // defaults to the last 75% of the horizon
  double window_t1 = 0.0;
  bool window_given = false;
  std::string output;
};

/// Parses and validates; throws Error(errc::invalid_config) with the
/// offending field named.
RunConfig parse_config(const std::string& text);
RunConfig load_config_file(const std::string& path);

/// Canonical re-emission: fixed section and key order, round-trip number
/// formatting, defaults resolved. parse(normalize(c)) == c.
std::string normalize_config(const RunConfig& cfg);

// Materialization of the validated pieces.
ModelSpec make_model(const RunConfig& cfg);
GeneratorMatrix make_generator(const RunConfig& cfg);
SchemeConfig make_scheme(const RunConfig& cfg, const ModelSpec& model);
EnsembleConfig make_ensemble(const RunConfig& cfg);
InitialSegment make_initial_segment(const RunConfig& cfg, const ModelSpec& model);

}  // namespace nsdde
