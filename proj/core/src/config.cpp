#include "nsdde/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "nsdde/error.hpp"
#include "nsdde/io.hpp"

namespace nsdde {

namespace {

[[noreturn]] void config_fail(const std::string& message) { fail(errc::invalid_config, message); }

std::string trim(const std::string& s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  return s.substr(begin, end - begin);
}

// splits a bracketed comma list at the top nesting level
std::vector<std::string> split_array(const std::string& value, const std::string& key) {
  if (value.size() < 2 || value.front() != '[' || value.back() != ']') {
    config_fail("field '" + key + "' expects a bracketed array, got '" + value + "'");
  }
  std::vector<std::string> items;
  int depth = 0;
  std::string current;
  for (std::size_t pos = 1; pos + 1 < value.size(); ++pos) {
    const char ch = value[pos];
    if (ch == '[') ++depth;
    if (ch == ']') --depth;
    if (ch == ',' && depth == 0) {
      items.push_back(trim(current));
      current.clear();
      continue;
    }
    current += ch;
  }
  if (!trim(current).empty()) items.push_back(trim(current));
  return items;
}

double parse_number(const std::string& value, const std::string& key) {
  try {
    return io::parse_double(value);
  } catch (const Error&) {
    config_fail("field '" + key + "' expects a number, got '" + value + "'");
  }
}

Vec parse_vector(const std::string& value, const std::string& key) {
  Vec out;
  if (!value.empty() && value.front() == '[') {
    for (const std::string& item : split_array(value, key)) {
      out.push_back(parse_number(item, key));
    }
  } else {
    out.push_back(parse_number(value, key));
  }
  return out;
}

Matrix parse_matrix(const std::string& value, const std::string& key) {
  const std::vector<std::string> rows = split_array(value, key);
  if (rows.empty()) config_fail("field '" + key + "' must not be empty");
  std::vector<Vec> parsed;
  for (const std::string& row : rows) parsed.push_back(parse_vector(row, key));
  const std::size_t cols = parsed.front().size();
  Matrix m(parsed.size(), cols);
  for (std::size_t r = 0; r < parsed.size(); ++r) {
    if (parsed[r].size() != cols) config_fail("field '" + key + "' is ragged");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = parsed[r][c];
  }
  return m;
}

const std::set<std::string>& model_param_keys(const std::string& name) {
  static const std::set<std::string> sine_keys = {"lambda", "alpha1", "alpha2"};
  static const std::set<std::string> rotation_keys = {"r", "beta", "lambda", "alpha1",
                                                      "alpha2"};
  static const std::set<std::string> linear_keys = {"a",       "b",      "sigma_x", "sigma_y",
                                                    "neutral", "lambda", "alpha1",  "alpha2"};
  if (name == "sine_neutral") return sine_keys;
  if (name == "rotation2d") return rotation_keys;
  if (name == "linear") return linear_keys;
  config_fail("unknown model '" + name + "' (expected sine_neutral, rotation2d or linear)");
}

double param_or(const RunConfig& cfg, const std::string& key, double fallback) {
  const auto it = cfg.model_params.find(key);
  return it == cfg.model_params.end() ? fallback : it->second;
}

void validate(RunConfig& cfg) {
  if (cfg.tau <= 0.0) config_fail("field 'tau' must be positive");
  if (cfg.theta < 0.0 || cfg.theta > 1.0) config_fail("field 'theta' must be in [0,1]");
  if (cfg.m_steps < 1) config_fail("field 'm_steps' must be a positive integer");
  if (cfg.horizon <= 0.0) config_fail("field 'horizon' must be positive");
  if (cfg.n_paths < 2) config_fail("field 'n_paths' must be at least 2");
  if (cfg.p_moment < 1.0) config_fail("field 'p_moment' must be >= 1");
  for (double v : cfg.xi) {
    if (!std::isfinite(v)) config_fail("field 'xi' must be finite");
  }

  if (!cfg.window_given) {
    cfg.window_t0 = 0.25 * cfg.horizon;  // skip the transient by default
    cfg.window_t1 = cfg.horizon;
  }
  if (!(cfg.window_t0 < cfg.window_t1) || cfg.window_t1 > cfg.horizon * (1.0 + 1e-12)) {
    config_fail("field 'window' needs t0 < t1 <= horizon");
  }

  // cross-module invariants are revalidated here so a bad file fails at load
  ModelSpec model;
  GeneratorMatrix gen = make_generator(cfg);
  try {
    model = make_model(cfg);
    validate_model(model);
  } catch (const Error& e) {
    config_fail(std::string("model construction failed: ") + e.what());
  }
  if (model.n_regimes != gen.n_states()) {
    config_fail("field 'rates': model '" + cfg.model_name + "' expects " +
                std::to_string(model.n_regimes) + " regimes, generator has " +
                std::to_string(gen.n_states()));
  }
  if (cfg.i0 < 1 || cfg.i0 > gen.n_states()) config_fail("field 'i0' outside 1..N");
  if (static_cast<int>(cfg.xi.size()) != model.dim_x) {
    config_fail("field 'xi' has dimension " + std::to_string(cfg.xi.size()) +
                ", model needs " + std::to_string(model.dim_x));
  }
  // the well-posedness gate L*theta*delta < 1 is enforced when the scheme is
  // materialized (make_scheme); certify instead reports it as a failed check
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  bool rates_given = false;

  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') config_fail("line " + std::to_string(line_no) + ": bad section");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "model" && section != "chain" && section != "scheme" &&
          section != "ensemble") {
        config_fail("unknown section '[" + section + "]'");
      }
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      config_fail("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) config_fail("key '" + key + "' appears before any section");

    if (section == "model") {
      if (key == "name") {
        cfg.model_name = value;
      } else if (key == "tau") {
        cfg.tau = parse_number(value, key);
      } else if (key == "xi") {
        cfg.xi = parse_vector(value, key);
      } else {
        cfg.model_params[key] = parse_number(value, key);
      }
    } else if (section == "chain") {
      if (key == "rates") {
        cfg.rates = parse_matrix(value, key);
        rates_given = true;
      } else if (key == "i0") {
        cfg.i0 = static_cast<int>(parse_number(value, key));
      } else {
        config_fail("unknown key '" + key + "' in [chain]");
      }
    } else if (section == "scheme") {
      if (key == "theta") {
        cfg.theta = parse_number(value, key);
      } else if (key == "m_steps") {
        cfg.m_steps = static_cast<int>(parse_number(value, key));
      } else if (key == "horizon") {
        cfg.horizon = parse_number(value, key);
      } else {
        config_fail("unknown key '" + key + "' in [scheme]");
      }
    } else {  // ensemble
      if (key == "n_paths") {
        cfg.n_paths = static_cast<int>(parse_number(value, key));
      } else if (key == "p_moment") {
        cfg.p_moment = parse_number(value, key);
      } else if (key == "seed") {
        cfg.seed = static_cast<std::uint64_t>(parse_number(value, key));
      } else if (key == "window") {
        const Vec window = parse_vector(value, key);
        if (window.size() != 2) config_fail("field 'window' expects [t0, t1]");
        cfg.window_t0 = window[0];
        cfg.window_t1 = window[1];
        cfg.window_given = true;
      } else if (key == "output") {
        cfg.output = value;
      } else {
        config_fail("unknown key '" + key + "' in [ensemble]");
      }
    }
  }

  // unknown model-parameter keys are rejected against the per-model allowlist
  const std::set<std::string>& allowed = model_param_keys(cfg.model_name);
  for (const auto& [key, value] : cfg.model_params) {
    if (!allowed.count(key)) {
      config_fail("unknown key '" + key + "' in [model] for model '" + cfg.model_name + "'");
    }
  }
  if (!rates_given) cfg.rates = Matrix();

  validate(cfg);
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  return parse_config(io::read_file(path));
}

std::string normalize_config(const RunConfig& cfg) {
  std::string out;
  out += "[model]\n";
  out += "name = " + cfg.model_name + "\n";
  out += "tau = " + io::format_double(cfg.tau) + "\n";
  out += "xi = [";
  for (std::size_t c = 0; c < cfg.xi.size(); ++c) {
    if (c) out += ", ";
    out += io::format_double(cfg.xi[c]);
  }
  out += "]\n";
  for (const auto& [key, value] : cfg.model_params) {
    out += key + " = " + io::format_double(value) + "\n";
  }

  const GeneratorMatrix gen = make_generator(cfg);
  out += "[chain]\n";
  out += "rates = [";
  for (std::size_t r = 0; r < gen.rates().rows(); ++r) {
    if (r) out += ", ";
    out += "[";
    for (std::size_t c = 0; c < gen.rates().cols(); ++c) {
      if (c) out += ", ";
      out += io::format_double(gen.rates()(r, c));
    }
    out += "]";
  }
  out += "]\n";
  out += "i0 = " + std::to_string(cfg.i0) + "\n";

  out += "[scheme]\n";
  out += "theta = " + io::format_double(cfg.theta) + "\n";
  out += "m_steps = " + std::to_string(cfg.m_steps) + "\n";
  out += "horizon = " + io::format_double(cfg.horizon) + "\n";

  out += "[ensemble]\n";
  out += "n_paths = " + std::to_string(cfg.n_paths) + "\n";
  out += "p_moment = " + io::format_double(cfg.p_moment) + "\n";
  out += "seed = " + std::to_string(cfg.seed) + "\n";
  out += "window = [" + io::format_double(cfg.window_t0) + ", " +
         io::format_double(cfg.window_t1) + "]\n";
  if (!cfg.output.empty()) out += "output = " + cfg.output + "\n";
  return out;
}

ModelSpec make_model(const RunConfig& cfg) {
  if (cfg.model_name == "sine_neutral") {
    return builtin_sine_neutral(cfg.tau);
  }
  if (cfg.model_name == "rotation2d") {
    const int n_regimes = cfg.rates.rows() == 0 ? 1 : static_cast<int>(cfg.rates.rows());
    return builtin_rotation2d(param_or(cfg, "r", 1.0), nullptr, param_or(cfg, "beta", 0.25),
                              n_regimes, cfg.tau);
  }
  if (cfg.model_name == "linear") {
    return builtin_linear(param_or(cfg, "a", 1.0), param_or(cfg, "b", 0.0),
                          param_or(cfg, "sigma_x", 0.0), param_or(cfg, "sigma_y", 0.0),
                          param_or(cfg, "neutral", 0.0), cfg.tau);
  }
  config_fail("unknown model '" + cfg.model_name + "'");
}

GeneratorMatrix make_generator(const RunConfig& cfg) {
  if (cfg.rates.rows() > 0) {
    try {
      return validate_generator(cfg.rates);
    } catch (const Error& e) {
      config_fail(std::string("field 'rates': ") + e.what());
    }
  }
  if (cfg.model_name == "sine_neutral") return sine_neutral_generator();
  return validate_generator(Matrix{{0.0}});  // single absorbing regime
}

SchemeConfig make_scheme(const RunConfig& cfg, const ModelSpec& model) {
  return SchemeConfig::create(cfg.tau, cfg.m_steps, cfg.theta, cfg.horizon,
                              model.one_sided_L);
}

EnsembleConfig make_ensemble(const RunConfig& cfg) {
  EnsembleConfig ens;
  ens.n_paths = cfg.n_paths;
  ens.p_moment = cfg.p_moment;
  ens.master_seed = cfg.seed;
  ens.window_t0 = cfg.window_t0;
  ens.window_t1 = cfg.window_t1;
  return ens;
}

InitialSegment make_initial_segment(const RunConfig& cfg, const ModelSpec& model) {
  require(static_cast<int>(cfg.xi.size()) == model.dim_x, errc::invalid_config,
          "xi dimension mismatch");
  return InitialSegment::constant(cfg.xi);
}

}  // namespace nsdde
