#include <algorithm>
#include <optional>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "ccsim/harness.hpp"

// Config file parsing. Format: INI-style sections of key = value lines,
// '#' starts a comment, scalar values may carry the field's unit as a
// suffix ("-0.5 dBm", "80 km"). Every key maps to exactly one field;
// anything unrecognized is an error so typos cannot silently fall back to
// defaults.

namespace ccsim::harness {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(s);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_number(const std::string& path, const std::string& value, const std::string& unit) {
  std::string v = trim(value);
  if (!unit.empty() && v.size() > unit.size()) {
    const std::string tail = trim(v.substr(v.size() - unit.size()));
    const std::string head = trim(v.substr(0, v.size() - unit.size()));
    if (tail == unit && !head.empty() &&
        (std::isdigit(static_cast<unsigned char>(head.back())) || head.back() == '.')) {
      v = head;
    }
  }
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError(path + ": cannot parse '" + value + "'" +
                      (unit.empty() ? "" : " (expected a number, optionally with unit " + unit + ")"));
  }
}

long parse_integer(const std::string& path, const std::string& value) {
  const double d = parse_number(path, value, "");
  const long l = std::lround(d);
  if (static_cast<double>(l) != d) throw ConfigError(path + ": expected an integer, got '" + value + "'");
  return l;
}

bool parse_flag(const std::string& path, const std::string& value) {
  const std::string v = trim(value);
  if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
  if (v == "off" || v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(path + ": expected on/off, got '" + value + "'");
}

}  // namespace

long ExperimentConfig::payload_symbols_per_run() const {
  return symbols_per_run / fec_block_len * fec_block_len;
}

void ExperimentConfig::validate() {
  warnings.clear();
  try {
    wdm.validate();
    link.validate();
    alphabet.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (block_lengths.empty()) throw ConfigError("sweep.block_lengths: list must not be empty");
  for (int n : block_lengths)
    if (n < static_cast<int>(alphabet.arity()))
      throw ConfigError("sweep.block_lengths: block length " + std::to_string(n) +
                        " is smaller than the alphabet arity");
  if (pairings.empty()) throw ConfigError("sweep.pairings: list must not be empty");
  if (interleave_flags.empty()) throw ConfigError("sweep.interleave: list must not be empty");
  if (num_runs < 1) throw ConfigError("sweep.runs: must be at least 1");
  if (fec_block_len < 1) throw ConfigError("shaping.fec_block_symbols: must be positive");
  if (symbols_per_run < fec_block_len)
    throw ConfigError("sweep.symbols_per_run: need at least one FEC block (" +
                      std::to_string(fec_block_len) + " symbols)");
  if (workers < 0) throw ConfigError("sweep.workers: must be non-negative");
  if (symbols_per_run < 10L * fec_block_len)
    warnings.push_back("sweep.symbols_per_run below 10 FEC blocks; confidence intervals will be wide");
}

void apply_scale(ExperimentConfig& config, Scale scale) {
  if (scale == Scale::desk) {
    config.wdm.num_channels = 3;
    config.link.num_spans = 5;
    config.symbols_per_run = 65536;
    config.num_runs = 4;
  } else {
    config.wdm.num_channels = 5;
    config.link.num_spans = 10;
    config.symbols_per_run = 500000;
    config.num_runs = 10;
  }
  config.validate();
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig config;

  std::map<std::string, std::string> values;
  std::string section;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": malformed section");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string path = section.empty() ? key : section + "." + key;
    if (values.count(path)) throw ConfigError(path + ": duplicate key");
    values[path] = trim(line.substr(eq + 1));
  }

  auto take = [&](const char* path) -> std::optional<std::string> {
    auto it = values.find(path);
    if (it == values.end()) return std::nullopt;
    std::string v = it->second;
    values.erase(it);
    return v;
  };
  // scale converts the configured unit into the stored one.
  auto number = [&](const char* path, double& dst, const char* unit, double scale = 1.0) {
    if (const auto v = take(path)) dst = parse_number(path, *v, unit) * scale;
  };
  auto integer = [&](const char* path, int& dst) {
    if (const auto v = take(path)) dst = static_cast<int>(parse_integer(path, *v));
  };

  number("wdm.spacing", config.wdm.spacing_hz, "GHz", 1e9);
  number("wdm.symbol_rate", config.wdm.symbol_rate_hz, "GBd", 1e9);
  number("wdm.rolloff", config.wdm.rolloff, "");
  integer("wdm.channels", config.wdm.num_channels);
  integer("wdm.oversampling", config.wdm.oversampling);

  number("fiber.span_length", config.link.span_length_km, "km");
  integer("fiber.spans", config.link.num_spans);
  number("fiber.attenuation", config.link.alpha_db_per_km, "dB/km");
  number("fiber.dispersion", config.link.dispersion_ps_nm_km, "ps/nm/km");
  number("fiber.gamma", config.link.gamma_per_w_km, "1/W/km");
  number("fiber.noise_figure", config.link.edfa_noise_figure_db, "dB");
  number("fiber.launch_power", config.link.launch_power_dbm, "dBm");
  number("fiber.max_nl_phase", config.link.max_nl_phase_rad, "rad");
  number("fiber.reference_wavelength", config.link.reference_wavelength_nm, "nm");

  if (const auto v = take("shaping.amplitudes")) {
    config.alphabet.amplitudes.clear();
    for (const auto& item : split_list(*v))
      config.alphabet.amplitudes.push_back(parse_number("shaping.amplitudes", item, ""));
  }
  if (const auto v = take("shaping.pmf")) {
    config.alphabet.target_pmf.clear();
    for (const auto& item : split_list(*v))
      config.alphabet.target_pmf.push_back(parse_number("shaping.pmf", item, ""));
  }
  integer("shaping.fec_block_symbols", config.fec_block_len);

  if (const auto v = take("sweep.block_lengths")) {
    config.block_lengths.clear();
    for (const auto& item : split_list(*v))
      config.block_lengths.push_back(static_cast<int>(parse_integer("sweep.block_lengths", item)));
  }
  if (const auto v = take("sweep.pairings")) {
    config.pairings.clear();
    for (const auto& item : split_list(*v)) {
      try {
        config.pairings.push_back(mapping::pairing_from_string(item));
      } catch (const std::exception& e) {
        throw ConfigError(std::string("sweep.pairings: ") + e.what());
      }
    }
  }
  if (const auto v = take("sweep.interleave")) {
    config.interleave_flags.clear();
    for (const auto& item : split_list(*v))
      config.interleave_flags.push_back(parse_flag("sweep.interleave", item) ? 1 : 0);
  }
  if (const auto v = take("sweep.symbols_per_run"))
    config.symbols_per_run = parse_integer("sweep.symbols_per_run", *v);
  if (const auto v = take("sweep.runs"))
    config.num_runs = static_cast<int>(parse_integer("sweep.runs", *v));
  if (const auto v = take("sweep.seed"))
    config.base_seed = static_cast<std::uint64_t>(parse_integer("sweep.seed", *v));
  if (const auto v = take("sweep.workers"))
    config.workers = static_cast<int>(parse_integer("sweep.workers", *v));
  if (const auto v = take("sweep.output")) config.output_path = *v;

  if (!values.empty()) {
    std::string unknown;
    for (const auto& [k, _] : values) unknown += (unknown.empty() ? "" : ", ") + k;
    throw ConfigError("unknown config key(s): " + unknown);
  }

  config.validate();
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

}  // namespace ccsim::harness
