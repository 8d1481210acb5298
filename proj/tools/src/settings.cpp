#include "settings.hpp"

#include <charconv>
#include <limits>
#include <type_traits>
#include <fstream>
#include <sstream>

#include "neuropong/error.hpp"
#include "neuropong/io.hpp"

namespace neuropong::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto r = std::from_chars(text.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end) throw std::invalid_argument("expected a number");
  return v;
}

std::uint64_t parse_uint(const std::string& text) {
  std::uint64_t v = 0;
  const char* end = text.data() + text.size();
  const auto r = std::from_chars(text.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end) throw std::invalid_argument("expected a non-negative integer");
  return v;
}

bool parse_bool(const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw std::invalid_argument("expected true or false");
}

template <typename Ref>
Key real(std::string sec, std::string name, Ref ref) {
  return {std::move(sec), std::move(name), Kind::kReal,
          [ref](const Settings& s) { return io::format_double(ref(const_cast<Settings&>(s))); },
          [ref](Settings& s, const std::string& v) { ref(s) = parse_real(v); }};
}

template <typename Ref>
Key integer(std::string sec, std::string name, Ref ref) {
  return {std::move(sec), std::move(name), Kind::kInteger,
          [ref](const Settings& s) { return std::to_string(ref(const_cast<Settings&>(s))); },
          [ref](Settings& s, const std::string& v) {
            using T = std::remove_reference_t<decltype(ref(s))>;
            const std::uint64_t x = parse_uint(v);
            if (x > static_cast<std::uint64_t>(std::numeric_limits<T>::max())) {
              throw std::invalid_argument("value out of range");
            }
            ref(s) = static_cast<T>(x);
          }};
}

template <typename Ref>
Key boolean(std::string sec, std::string name, Ref ref) {
  return {std::move(sec), std::move(name), Kind::kBool,
          [ref](const Settings& s) { return std::string(ref(const_cast<Settings&>(s)) ? "true" : "false"); },
          [ref](Settings& s, const std::string& v) { ref(s) = parse_bool(v); }};
}

Key text(std::string sec, std::string name, std::function<std::string(const Settings&)> get,
         std::function<void(Settings&, const std::string&)> set) {
  return {std::move(sec), std::move(name), Kind::kText, std::move(get), std::move(set)};
}

std::string join_sizes(const std::vector<bench::Size>& sizes) {
  std::string out;
  for (const auto& s : sizes) {
    if (!out.empty()) out += ',';
    out += std::to_string(s.n_input) + "x" + std::to_string(s.n_output);
  }
  return out;
}

std::string join_modes(const std::vector<bench::Mode>& modes) {
  std::string out;
  for (const auto m : modes) {
    if (!out.empty()) out += ',';
    out += bench::mode_name(m);
  }
  return out;
}

std::vector<bench::Mode> parse_modes(const std::string& v) {
  std::vector<bench::Mode> modes;
  std::istringstream ss(v);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      modes.push_back(bench::parse_mode(trim(item)));
    } catch (const ConfigError& e) {
      throw std::invalid_argument(e.what());
    }
  }
  if (modes.empty()) throw std::invalid_argument("expected at least one mode");
  return modes;
}

std::vector<Key> build_keys() {
  using S = Settings;
  std::vector<Key> k;
  // experiment
  k.push_back(integer("experiment", "iterations", [](S& s) -> auto& { return s.experiment.n_iterations; }));
  k.push_back(text(
      "experiment", "schedule",
      [](const S& s) {
        return std::string(s.experiment.schedule == StateSchedule::kCyclic ? "cyclic" : "uniform-random");
      },
      [](S& s, const std::string& v) {
        if (v == "cyclic") s.experiment.schedule = StateSchedule::kCyclic;
        else if (v == "uniform-random") s.experiment.schedule = StateSchedule::kUniformRandom;
        else throw std::invalid_argument("expected cyclic or uniform-random");
      }));
  k.push_back(integer("experiment", "seed", [](S& s) -> auto& { return s.experiment.seed; }));
  k.push_back(integer("experiment", "eval_every", [](S& s) -> auto& { return s.experiment.eval_every; }));
  k.push_back(integer("experiment", "eval_repeats", [](S& s) -> auto& { return s.experiment.eval_repeats; }));
  k.push_back(boolean("experiment", "record_wall_time", [](S& s) -> auto& { return s.experiment.record_wall_time; }));
  k.push_back(integer("experiment", "permutation_shuffles",
                      [](S& s) -> auto& { return s.experiment.permutation_shuffles; }));
  k.push_back(text(
      "experiment", "fixed_pattern_seed",
      [](const S& s) {
        return s.experiment.fixed_pattern_seed ? std::to_string(*s.experiment.fixed_pattern_seed)
                                               : std::string("auto");
      },
      [](S& s, const std::string& v) {
        if (v == "auto") s.experiment.fixed_pattern_seed.reset();
        else s.experiment.fixed_pattern_seed = parse_uint(v);
      }));
  // snn
  k.push_back(real("snn", "tau_m_ms", [](S& s) -> auto& { return s.experiment.neuron.tau_m_ms; }));
  k.push_back(real("snn", "v_rest_mv", [](S& s) -> auto& { return s.experiment.neuron.v_rest_mv; }));
  k.push_back(real("snn", "v_reset_mv", [](S& s) -> auto& { return s.experiment.neuron.v_reset_mv; }));
  k.push_back(real("snn", "v_thresh_mv", [](S& s) -> auto& { return s.experiment.neuron.v_thresh_mv; }));
  k.push_back(real("snn", "tau_refrac_ms", [](S& s) -> auto& { return s.experiment.neuron.tau_refrac_ms; }));
  k.push_back(real("snn", "tau_syn_ms", [](S& s) -> auto& { return s.experiment.neuron.tau_syn_ms; }));
  k.push_back(real("snn", "dt_ms", [](S& s) -> auto& { return s.experiment.sim.dt_ms; }));
  k.push_back(real("snn", "trial_duration_ms", [](S& s) -> auto& { return s.experiment.sim.trial_duration_ms; }));
  k.push_back(real("snn", "rate_hi_hz", [](S& s) -> auto& { return s.experiment.sim.rate_hi_hz; }));
  k.push_back(real("snn", "rate_lo_hz", [](S& s) -> auto& { return s.experiment.sim.rate_lo_hz; }));
  k.push_back(real("snn", "weight_scale", [](S& s) -> auto& { return s.experiment.sim.weight_scale; }));
  // noise
  k.push_back(real("noise", "fixed_pattern_sigma", [](S& s) -> auto& { return s.experiment.noise.fixed_pattern_sigma; }));
  k.push_back(real("noise", "trial_sigma", [](S& s) -> auto& { return s.experiment.noise.trial_noise_current_sigma; }));
  k.push_back(integer("noise", "seed", [](S& s) -> auto& { return s.experiment.noise.seed; }));
  // plasticity
  k.push_back(real("plasticity", "a_plus", [](S& s) -> auto& { return s.experiment.kernel.a_plus; }));
  k.push_back(real("plasticity", "a_minus", [](S& s) -> auto& { return s.experiment.kernel.a_minus; }));
  k.push_back(real("plasticity", "tau_plus_ms", [](S& s) -> auto& { return s.experiment.kernel.tau_plus_ms; }));
  k.push_back(real("plasticity", "tau_minus_ms", [](S& s) -> auto& { return s.experiment.kernel.tau_minus_ms; }));
  k.push_back(real("plasticity", "trace_saturation", [](S& s) -> auto& { return s.experiment.traces.saturation; }));
  k.push_back(integer("plasticity", "adc_levels", [](S& s) -> auto& { return s.experiment.traces.adc_levels; }));
  k.push_back(real("plasticity", "eta", [](S& s) -> auto& { return s.experiment.rstdp.eta; }));
  k.push_back(real("plasticity", "baseline_gamma", [](S& s) -> auto& { return s.experiment.rstdp.baseline_gamma; }));
  k.push_back(text(
      "plasticity", "baseline_mode",
      [](const S& s) {
        return std::string(s.experiment.rstdp.baseline_mode == BaselineMode::kGlobal ? "global" : "per-state");
      },
      [](S& s, const std::string& v) {
        if (v == "global") s.experiment.rstdp.baseline_mode = BaselineMode::kGlobal;
        else if (v == "per-state") s.experiment.rstdp.baseline_mode = BaselineMode::kPerState;
        else throw std::invalid_argument("expected global or per-state");
      }));
  k.push_back(real("plasticity", "initial_baseline", [](S& s) -> auto& { return s.experiment.initial_baseline; }));
  k.push_back(boolean("plasticity", "stochastic_rounding",
                      [](S& s) -> auto& { return s.experiment.rstdp.stochastic_rounding; }));
  // weights
  k.push_back(real("weights", "init_fraction", [](S& s) -> auto& { return s.experiment.weights.fraction; }));
  k.push_back(real("weights", "w_min", [](S& s) -> auto& { return s.experiment.weights.w_min; }));
  k.push_back(real("weights", "w_max", [](S& s) -> auto& { return s.experiment.weights.w_max; }));
  k.push_back(integer("weights", "levels", [](S& s) -> auto& { return s.experiment.weights.levels; }));
  // env
  k.push_back(integer("env", "n_columns", [](S& s) -> auto& { return s.experiment.env.n_columns; }));
  k.push_back(real("env", "field_height", [](S& s) -> auto& { return s.experiment.env.field_height; }));
  k.push_back(real("env", "ball_speed", [](S& s) -> auto& { return s.experiment.env.ball_speed; }));
  k.push_back(real("env", "paddle_speed", [](S& s) -> auto& { return s.experiment.env.paddle_speed; }));
  k.push_back(real("env", "paddle_halfwidth", [](S& s) -> auto& { return s.experiment.env.paddle_halfwidth; }));
  k.push_back(real("env", "launch_angle_deg", [](S& s) -> auto& { return s.experiment.env.launch_angle_deg; }));
  k.push_back(real("env", "reward_halfwidth", [](S& s) -> auto& { return s.experiment.reward.halfwidth; }));
  // bench
  k.push_back(integer("bench", "iterations", [](S& s) -> auto& { return s.bench.n_iterations; }));
  k.push_back(integer("bench", "warmup", [](S& s) -> auto& { return s.bench.warmup; }));
  k.push_back(text(
      "bench", "sizes", [](const S& s) { return join_sizes(s.bench.sizes); },
      [](S& s, const std::string& v) {
        try {
          s.bench.sizes = bench::parse_sizes(v);
        } catch (const ConfigError& e) {
          throw std::invalid_argument(e.what());
        }
      }));
  k.push_back(text(
      "bench", "modes", [](const S& s) { return join_modes(s.bench.modes); },
      [](S& s, const std::string& v) { s.bench.modes = parse_modes(v); }));
  k.push_back(integer("bench", "seed", [](S& s) -> auto& { return s.bench.seed; }));
  k.push_back(boolean("bench", "pin_thread", [](S& s) -> auto& { return s.bench.pin_thread; }));
  return k;
}

}  // namespace

const std::vector<Key>& keys() {
  static const std::vector<Key> all = build_keys();
  return all;
}

void apply(Settings& s, const std::string& dotted, const std::string& value, const std::string& origin) {
  const std::string where = origin.empty() ? "" : origin + ": ";
  for (const auto& k : keys()) {
    if (k.dotted() != dotted) continue;
    try {
      k.set(s, trim(value));
    } catch (const std::exception& e) {
      throw ConfigError(where + "bad value '" + trim(value) + "' for " + dotted + " (" + e.what() + ")");
    }
    return;
  }
  throw ConfigError(where + "unknown key '" + dotted + "'");
}

void load_ini_text(Settings& s, const std::string& content, const std::string& origin) {
  std::istringstream in(content);
  std::string section;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    const std::string where = origin + ":" + std::to_string(line_no);
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ConfigError(where + ": unterminated section header");
      section = trim(t.substr(1, t.size() - 2));
      bool known = false;
      for (const auto& k : keys()) known = known || k.section == section;
      if (!known) throw ConfigError(where + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    if (section.empty()) throw ConfigError(where + ": key outside of any [section]");
    std::string value = trim(t.substr(eq + 1));
    const auto hash = value.find(" #");
    if (hash != std::string::npos) value = trim(value.substr(0, hash));
    apply(s, section + "." + trim(t.substr(0, eq)), value, where);
  }
}

void load_ini(Settings& s, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  load_ini_text(s, ss.str(), path.string());
}

std::string to_ini(const Settings& s) {
  std::ostringstream out;
  std::string section;
  for (const auto& k : keys()) {
    if (k.section != section) {
      if (!section.empty()) out << '\n';
      section = k.section;
      out << '[' << section << "]\n";
    }
    out << k.name << " = " << k.get(s) << '\n';
  }
  return out.str();
}

nlohmann::json to_json(const Settings& s) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& k : keys()) {
    const std::string v = k.get(s);
    switch (k.kind) {
      case Kind::kReal: j[k.section][k.name] = parse_real(v); break;
      case Kind::kInteger: j[k.section][k.name] = parse_uint(v); break;
      case Kind::kBool: j[k.section][k.name] = parse_bool(v); break;
      case Kind::kText: j[k.section][k.name] = v; break;
    }
  }
  return j;
}

void from_json(Settings& s, const nlohmann::json& j, const std::string& origin) {
  if (!j.is_object()) throw ConfigError(origin + ": configuration must be an object");
  for (const auto& [section, entries] : j.items()) {
    if (!entries.is_object()) throw ConfigError(origin + ": section '" + section + "' must be an object");
    for (const auto& [name, value] : entries.items()) {
      std::string text;
      if (value.is_string()) text = value.get<std::string>();
      else if (value.is_boolean()) text = value.get<bool>() ? "true" : "false";
      else if (value.is_number_float()) text = io::format_double(value.get<double>());
      else if (value.is_number_integer()) text = value.dump();
      else throw ConfigError(origin + ": unsupported value for " + section + "." + name);
      apply(s, section + "." + name, text, origin);
    }
  }
}

}  // namespace neuropong::cli
