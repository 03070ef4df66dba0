#include "ccipm/scenario.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ccipm {

namespace {

bool is_power_of_two(int n) { return n >= 1 && (n & (n - 1)) == 0; }

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace

void ScenarioConfig::validate() const {
  if (num_tx_antennas < 1) throw std::invalid_argument("num_tx_antennas must be >= 1");
  if (num_users < 1) throw std::invalid_argument("num_users must be >= 1");
  if (num_users > num_tx_antennas - 1)
    throw std::invalid_argument("num_users must satisfy K <= M - 1");
  if (num_primary_antennas < 1)
    throw std::invalid_argument("num_primary_antennas must be >= 1");
  if (!(noise_power > 0.0)) throw std::invalid_argument("noise_power must be > 0");
  if (!(channel_gain_ss > 0.0) || !(channel_gain_sp > 0.0) ||
      !(channel_gain_ps > 0.0) || !(channel_gain_pp > 0.0))
    throw std::invalid_argument("channel gains must be > 0");
  if (modulation_order < 2 || !is_power_of_two(modulation_order))
    throw std::invalid_argument("modulation_order must be a power of two >= 2");
  if (primary_modulation_order != 0 &&
      (primary_modulation_order < 2 || !is_power_of_two(primary_modulation_order)))
    throw std::invalid_argument("primary_modulation_order must be a power of two >= 2");
  if (!snr_targets.empty() && snr_targets.size() != 1 &&
      snr_targets.size() != static_cast<std::size_t>(num_users))
    throw std::invalid_argument("snr_targets must have 1 or K entries");
  for (double z : snr_targets)
    if (!(z > 0.0)) throw std::invalid_argument("snr_targets must be > 0");
  if (std::isnan(interference_limit) || interference_limit < 0.0)
    throw std::invalid_argument("interference_limit must be >= 0 or unbounded");
  if (primary_power < 0.0) throw std::invalid_argument("primary_power must be >= 0");
}

std::vector<double> ScenarioConfig::resolved_snr_targets() const {
  if (snr_targets.empty()) return std::vector<double>(num_users, 3.0);
  if (snr_targets.size() == 1) return std::vector<double>(num_users, snr_targets[0]);
  return snr_targets;
}

int ScenarioConfig::resolved_primary_order() const {
  return primary_modulation_order == 0 ? modulation_order : primary_modulation_order;
}

Eigen::VectorXcd make_primary_beamformer(const Eigen::RowVectorXcd& h_pp,
                                         double primary_power) {
  const double norm = h_pp.norm();
  if (primary_power == 0.0) return Eigen::VectorXcd::Zero(h_pp.size());
  if (norm == 0.0)
    throw std::invalid_argument("make_primary_beamformer: zero h_pp with p_p > 0");
  return std::sqrt(primary_power) / norm * h_pp.adjoint();
}

ChannelSet generate_channels(const ScenarioConfig& config,
                             std::uint64_t trial_index) {
  const int m = config.num_tx_antennas;
  const int k = config.num_users;
  const int np = config.num_primary_antennas;
  SubstreamRng rng(config.seed, kChannelStream, trial_index);

  ChannelSet cs;
  cs.h_ss.resize(k, m);
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < m; ++i) cs.h_ss(j, i) = rng.complex_normal(config.channel_gain_ss);
  cs.h_sp.resize(k, np);
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < np; ++i) cs.h_sp(j, i) = rng.complex_normal(config.channel_gain_sp);
  cs.h_ps.resize(m);
  for (int i = 0; i < m; ++i) cs.h_ps(i) = rng.complex_normal(config.channel_gain_ps);
  cs.h_pp.resize(np);
  for (int i = 0; i < np; ++i) cs.h_pp(i) = rng.complex_normal(config.channel_gain_pp);

  cs.g = make_primary_beamformer(cs.h_pp, config.primary_power);
  cs.psi.resize(k);
  for (int j = 0; j < k; ++j) {
    const std::complex<double> leak = (cs.h_sp.row(j) * cs.g).value();
    cs.psi(j) = config.noise_power + std::norm(leak);
  }
  return cs;
}

KeyValueFile KeyValueFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

KeyValueFile KeyValueFile::parse(const std::string& text) {
  KeyValueFile kv;
  std::istringstream in(text);
  std::string line;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) continue;
    bool replaced = false;
    for (auto& [k, v] : kv.entries)
      if (k == key) {
        v = value;
        replaced = true;
      }
    if (!replaced) kv.entries.emplace_back(key, value);
  }
  return kv;
}

bool KeyValueFile::has(const std::string& key) const {
  for (const auto& [k, v] : entries)
    if (k == key) return true;
  return false;
}

std::string KeyValueFile::get(const std::string& key) const {
  for (const auto& [k, v] : entries)
    if (k == key) return v;
  throw std::invalid_argument("missing config key: " + key);
}

namespace {

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(value, &pos);
    while (pos < value.size() && std::isspace(static_cast<unsigned char>(value[pos]))) ++pos;
    if (pos != value.size()) throw std::invalid_argument("");
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key " + key + ": bad number '" + value + "'");
  }
}

std::vector<double> parse_double_list(const std::string& key,
                                      const std::string& value) {
  std::vector<double> out;
  std::istringstream in(value);
  std::string item;
  while (std::getline(in, item, ','))
    out.push_back(parse_double(key, item));
  return out;
}

// Fetches key either directly (linear) or via its _db variant.
bool fetch_scalar(const KeyValueFile& kv, const std::string& key, double* out) {
  if (kv.has(key)) {
    *out = parse_double(key, kv.get(key));
    return true;
  }
  if (kv.has(key + "_db")) {
    *out = db_to_linear(parse_double(key + "_db", kv.get(key + "_db")));
    return true;
  }
  return false;
}

}  // namespace

ScenarioConfig scenario_from_keyvalues(const KeyValueFile& kv) {
  ScenarioConfig cfg;
  auto fetch_int = [&](const std::string& key, int* out) {
    if (kv.has(key)) *out = static_cast<int>(parse_double(key, kv.get(key)));
  };
  fetch_int("num_tx_antennas", &cfg.num_tx_antennas);
  fetch_int("num_users", &cfg.num_users);
  fetch_int("num_primary_antennas", &cfg.num_primary_antennas);
  fetch_int("modulation_order", &cfg.modulation_order);
  fetch_int("primary_modulation_order", &cfg.primary_modulation_order);
  fetch_scalar(kv, "noise_power", &cfg.noise_power);
  fetch_scalar(kv, "channel_gain_ss", &cfg.channel_gain_ss);
  fetch_scalar(kv, "channel_gain_sp", &cfg.channel_gain_sp);
  fetch_scalar(kv, "channel_gain_ps", &cfg.channel_gain_ps);
  fetch_scalar(kv, "channel_gain_pp", &cfg.channel_gain_pp);
  fetch_scalar(kv, "primary_power", &cfg.primary_power);

  if (kv.has("snr_targets")) {
    cfg.snr_targets = parse_double_list("snr_targets", kv.get("snr_targets"));
  } else if (kv.has("snr_targets_db")) {
    cfg.snr_targets = parse_double_list("snr_targets_db", kv.get("snr_targets_db"));
    for (double& z : cfg.snr_targets) z = db_to_linear(z);
  }

  if (kv.has("interference_limit")) {
    const std::string v = kv.get("interference_limit");
    if (v == "unbounded" || v == "inf")
      cfg.interference_limit = kUnboundedInterference;
    else
      cfg.interference_limit = parse_double("interference_limit", v);
  } else if (kv.has("interference_limit_db")) {
    cfg.interference_limit =
        db_to_linear(parse_double("interference_limit_db", kv.get("interference_limit_db")));
  }

  if (kv.has("seed"))
    cfg.seed = static_cast<std::uint64_t>(std::stoull(kv.get("seed")));

  cfg.validate();
  return cfg;
}

ScenarioConfig load_scenario_config(const std::string& path) {
  return scenario_from_keyvalues(KeyValueFile::load(path));
}

}  // namespace ccipm
