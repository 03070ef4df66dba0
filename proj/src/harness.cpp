#include "ccipm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "ccipm/baselines.hpp"
#include "ccipm/ci_precoder.hpp"

namespace ccipm {

namespace {

std::string fmt12(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

bool is_bound_scheme(Scheme s) {
  return s == Scheme::MulticastBound || s == Scheme::MulticastBoundStrict;
}

// The bound row whose constraint mode matches a scheme's.
Scheme matching_bound(Scheme s) {
  switch (s) {
    case Scheme::Ccipm: return Scheme::MulticastBound;
    case Scheme::CcipmStrict:
    case Scheme::CcizfStandin: return Scheme::MulticastBoundStrict;
    default: return s;
  }
}

struct TrialCell {
  bool feasible = false;
  double power = 0.0;
  int sym_errors = 0;
  bool audit_pass = true;
};

void parallel_for(int count, int workers, const std::function<void(int)>& body) {
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex err_mutex;
  std::string first_error;
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (first_error.empty()) first_error = e.what();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (!first_error.empty())
    throw std::runtime_error("sweep trial failed: " + first_error);
}

std::string render_resolved_config(const SweepSpec& spec) {
  const ScenarioConfig& c = spec.base_config;
  std::ostringstream out;
  out << "# resolved configuration\n";
  out << "code_version = " << kCodeVersion << "\n";
  out << "num_tx_antennas = " << c.num_tx_antennas << "\n";
  out << "num_users = " << c.num_users << "\n";
  out << "num_primary_antennas = " << c.num_primary_antennas << "\n";
  out << "noise_power = " << fmt12(c.noise_power) << "\n";
  out << "channel_gain_ss = " << fmt12(c.channel_gain_ss) << "\n";
  out << "channel_gain_sp = " << fmt12(c.channel_gain_sp) << "\n";
  out << "channel_gain_ps = " << fmt12(c.channel_gain_ps) << "\n";
  out << "channel_gain_pp = " << fmt12(c.channel_gain_pp) << "\n";
  out << "modulation_order = " << c.modulation_order << "\n";
  out << "primary_modulation_order = " << c.resolved_primary_order() << "\n";
  out << "snr_targets = ";
  const std::vector<double> zeta = c.resolved_snr_targets();
  for (std::size_t i = 0; i < zeta.size(); ++i)
    out << (i ? "," : "") << fmt12(zeta[i]);
  out << "\n";
  out << "interference_limit = " << fmt12(c.interference_limit) << "\n";
  out << "primary_power = " << fmt12(c.primary_power) << "\n";
  out << "seed = " << c.seed << "\n";
  out << "sweep_variable = " << to_string(spec.sweep_variable) << "\n";
  out << "sweep_points = ";
  for (std::size_t i = 0; i < spec.sweep_points.size(); ++i)
    out << (i ? "," : "") << fmt12(spec.sweep_points[i]);
  out << "\n";
  out << "trials_per_point = " << spec.trials_per_point << "\n";
  out << "schemes = ";
  for (std::size_t i = 0; i < spec.schemes.size(); ++i)
    out << (i ? "," : "") << scheme_label(spec.schemes[i]);
  out << "\n";
  return out.str();
}

}  // namespace

std::string to_string(SweepVariable variable) {
  switch (variable) {
    case SweepVariable::ChannelStrengthDb: return "channel_strength_db";
    case SweepVariable::TargetRate: return "target_rate";
    case SweepVariable::InterferenceLimit: return "interference_limit";
  }
  return "unknown";
}

SweepVariable sweep_variable_from_string(const std::string& name) {
  if (name == "channel_strength_db") return SweepVariable::ChannelStrengthDb;
  if (name == "target_rate") return SweepVariable::TargetRate;
  if (name == "interference_limit") return SweepVariable::InterferenceLimit;
  throw std::invalid_argument("unknown sweep_variable: " + name);
}

std::string scheme_label(Scheme scheme) {
  switch (scheme) {
    case Scheme::Ccipm: return "ccipm";
    case Scheme::CcipmStrict: return "ccipm_strict";
    case Scheme::CcizfStandin: return "ccizf_standin";
    case Scheme::MulticastBound: return "multicast_bound";
    case Scheme::MulticastBoundStrict: return "multicast_bound_strict";
  }
  return "unknown";
}

Scheme scheme_from_label(const std::string& label) {
  if (label == "ccipm") return Scheme::Ccipm;
  if (label == "ccipm_strict") return Scheme::CcipmStrict;
  if (label == "ccizf_standin") return Scheme::CcizfStandin;
  if (label == "multicast_bound") return Scheme::MulticastBound;
  if (label == "multicast_bound_strict") return Scheme::MulticastBoundStrict;
  throw std::invalid_argument("unknown scheme: " + label);
}

void SweepSpec::validate() const {
  base_config.validate();
  if (sweep_points.empty())
    throw std::invalid_argument("sweep_points must be nonempty");
  for (std::size_t i = 1; i < sweep_points.size(); ++i) {
    const bool up = sweep_points[1] > sweep_points[0];
    if (up ? sweep_points[i] <= sweep_points[i - 1]
           : sweep_points[i] >= sweep_points[i - 1])
      throw std::invalid_argument("sweep_points must be strictly monotone");
  }
  if (trials_per_point < 1)
    throw std::invalid_argument("trials_per_point must be >= 1");
  if (schemes.empty()) throw std::invalid_argument("schemes must be nonempty");
  for (std::size_t i = 0; i < schemes.size(); ++i)
    for (std::size_t j = i + 1; j < schemes.size(); ++j)
      if (schemes[i] == schemes[j])
        throw std::invalid_argument("duplicate scheme requested");
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
  if (sweep_variable == SweepVariable::TargetRate)
    for (double p : sweep_points) rate_to_modulation(p);  // throws if invalid
  if (sweep_variable == SweepVariable::InterferenceLimit)
    for (double p : sweep_points)
      if (std::isnan(p) || p < 0.0)
        throw std::invalid_argument("interference sweep points must be >= 0");
}

ScenarioConfig config_for_point(const SweepSpec& spec, double point) {
  ScenarioConfig cfg = spec.base_config;
  switch (spec.sweep_variable) {
    case SweepVariable::ChannelStrengthDb: {
      const double gain = std::pow(10.0, point / 10.0);
      cfg.channel_gain_ss = gain;
      cfg.channel_gain_sp = gain;
      cfg.channel_gain_ps = gain;
      cfg.channel_gain_pp = gain;
      break;
    }
    case SweepVariable::TargetRate: {
      const RateModulation rm = rate_to_modulation(point);
      cfg.modulation_order = rm.modulation_order;
      cfg.snr_targets.assign(cfg.num_users, rm.snr_target);
      break;
    }
    case SweepVariable::InterferenceLimit:
      cfg.interference_limit = point;
      break;
  }
  cfg.validate();
  return cfg;
}

SweepResult run_sweep(const SweepSpec& spec) {
  spec.validate();
  SweepResult result;
  result.sweep_variable_name = to_string(spec.sweep_variable);
  result.seed = spec.base_config.seed;
  result.code_version = kCodeVersion;
  result.resolved_config_text = render_resolved_config(spec);
  result.config_digest = hex64(fnv1a(result.resolved_config_text));

  const int trials = spec.trials_per_point;
  const int num_schemes = static_cast<int>(spec.schemes.size());

  for (double point : spec.sweep_points) {
    const ScenarioConfig cfg = config_for_point(spec, point);
    const std::vector<double> rates = user_rates(cfg);
    const PskAlphabet alphabet(cfg.modulation_order);
    const PskAlphabet primary_alphabet(cfg.resolved_primary_order());

    // Audit strict schemes against the zero-interference constraint.
    ScenarioConfig strict_cfg = cfg;
    strict_cfg.interference_limit = 0.0;

    std::vector<std::vector<TrialCell>> cells(
        num_schemes, std::vector<TrialCell>(trials));

    parallel_for(trials, spec.workers, [&](int trial) {
      const ChannelSet channels = generate_channels(cfg, trial);
      SubstreamRng symbol_rng(cfg.seed, kSymbolStream, trial);
      const SymbolVector symbols = uniform_symbols(
          alphabet, primary_alphabet, cfg.num_users, symbol_rng);

      for (int s = 0; s < num_schemes; ++s) {
        const Scheme scheme = spec.schemes[s];
        TrialCell& cell = cells[s][trial];
        if (is_bound_scheme(scheme)) {
          const BoundSolution bound =
              scheme == Scheme::MulticastBound
                  ? solve_multicast_bound(channels, cfg)
                  : solve_multicast_bound_strict(channels, cfg);
          cell.feasible = bound.status == BoundStatus::Optimal;
          cell.power = bound.power;
          continue;
        }
        PrecodeSolution sol;
        const ScenarioConfig* audit_cfg = &cfg;
        switch (scheme) {
          case Scheme::Ccipm:
            sol = solve_precoder(channels, symbols, cfg);
            break;
          case Scheme::CcipmStrict:
            sol = solve_ccipm_strict(channels, symbols, cfg);
            audit_cfg = &strict_cfg;
            break;
          case Scheme::CcizfStandin:
            sol = solve_ccizf(channels, symbols, cfg);
            audit_cfg = &strict_cfg;
            break;
          default: break;
        }
        cell.feasible = sol.status == SolveStatus::Optimal;
        if (!cell.feasible) continue;
        cell.power = sol.power;
        cell.audit_pass =
            audit_solution(channels, sol.x, symbols, *audit_cfg).pass();
        const SlotOutcome slot =
            simulate_slot(channels, sol.x, symbols, cfg, trial);
        for (bool e : slot.errors) cell.sym_errors += e ? 1 : 0;
      }
    });

    // Deterministic reduction in trial order.
    bool all_empty = true;
    std::vector<SweepRow> point_rows;
    for (int s = 0; s < num_schemes; ++s) {
      SweepRow row;
      row.sweep_point = point;
      row.scheme = scheme_label(spec.schemes[s]);
      double sum_power = 0.0, sum_eta = 0.0;
      long long errors = 0;
      int feasible = 0;
      for (int trial = 0; trial < trials; ++trial) {
        const TrialCell& cell = cells[s][trial];
        if (!cell.feasible) continue;
        ++feasible;
        sum_power += cell.power;
        sum_eta += energy_efficiency(rates, cell.power);
        errors += cell.sym_errors;
      }
      row.trial_count = feasible;
      row.degenerate_count = trials - feasible;
      row.empty = feasible == 0;
      row.metrics.scheme_label = row.scheme;
      const double nan = std::numeric_limits<double>::quiet_NaN();
      row.metrics.mean_power = feasible ? sum_power / feasible : nan;
      row.metrics.energy_efficiency = feasible ? sum_eta / feasible : nan;
      row.metrics.ser =
          (!is_bound_scheme(spec.schemes[s]) && feasible)
              ? static_cast<double>(errors) / (static_cast<double>(feasible) * cfg.num_users)
              : 0.0;
      row.metrics.feasibility_rate = static_cast<double>(feasible) / trials;
      row.metrics.mean_bound_power = nan;
      if (!row.empty) all_empty = false;
      point_rows.push_back(std::move(row));
    }
    // Attach the matching-mode bound mean where one was computed.
    for (int s = 0; s < num_schemes; ++s) {
      const std::string want = scheme_label(matching_bound(spec.schemes[s]));
      for (const SweepRow& other : point_rows)
        if (other.scheme == want && !other.empty)
          point_rows[s].metrics.mean_bound_power = other.metrics.mean_power;
    }
    if (all_empty) result.any_empty_point = true;
    for (auto& row : point_rows) result.rows.push_back(std::move(row));
  }

  std::sort(result.rows.begin(), result.rows.end(),
            [](const SweepRow& a, const SweepRow& b) {
              if (a.sweep_point != b.sweep_point)
                return a.sweep_point < b.sweep_point;
              return a.scheme < b.scheme;
            });
  return result;
}

std::string render_csv(const SweepResult& result) {
  std::ostringstream out;
  out << "sweep_variable,sweep_point,scheme,mean_power,energy_efficiency,ser,"
         "feasibility_rate,mean_bound_power,trials,degenerate,seed\n";
  for (const SweepRow& row : result.rows) {
    out << result.sweep_variable_name << ',' << fmt12(row.sweep_point) << ','
        << row.scheme << ',' << fmt12(row.metrics.mean_power) << ','
        << fmt12(row.metrics.energy_efficiency) << ',' << fmt12(row.metrics.ser)
        << ',' << fmt12(row.metrics.feasibility_rate) << ','
        << fmt12(row.metrics.mean_bound_power) << ',' << row.trial_count << ','
        << row.degenerate_count << ',' << result.seed << '\n';
  }
  return out.str();
}

void write_csv(const SweepResult& result, const std::string& path) {
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write CSV: " + path);
    out << render_csv(result);
    if (!out) throw std::runtime_error("write failed: " + path);
  }
  const std::string sidecar = path + ".config.txt";
  std::ofstream out(sidecar, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write sidecar: " + sidecar);
  out << result.resolved_config_text;
  out << "config_digest = " << result.config_digest << "\n";
  if (!out) throw std::runtime_error("write failed: " + sidecar);
}

SweepSpec sweep_spec_from_keyvalues(const KeyValueFile& kv) {
  SweepSpec spec;
  spec.base_config = scenario_from_keyvalues(kv);
  if (kv.has("sweep_variable"))
    spec.sweep_variable = sweep_variable_from_string(kv.get("sweep_variable"));
  if (kv.has("sweep_points")) {
    spec.sweep_points.clear();
    std::istringstream in(kv.get("sweep_points"));
    std::string item;
    while (std::getline(in, item, ',')) {
      const auto b = item.find_first_not_of(" \t");
      const auto e = item.find_last_not_of(" \t");
      item = b == std::string::npos ? "" : item.substr(b, e - b + 1);
      if (item == "inf" || item == "unbounded")
        spec.sweep_points.push_back(kUnboundedInterference);
      else
        spec.sweep_points.push_back(std::stod(item));
    }
  }
  if (kv.has("trials_per_point"))
    spec.trials_per_point = std::stoi(kv.get("trials_per_point"));
  if (kv.has("schemes")) {
    spec.schemes.clear();
    std::istringstream in(kv.get("schemes"));
    std::string item;
    while (std::getline(in, item, ',')) {
      const auto b = item.find_first_not_of(" \t");
      const auto e = item.find_last_not_of(" \t");
      if (b == std::string::npos) continue;
      spec.schemes.push_back(scheme_from_label(item.substr(b, e - b + 1)));
    }
  }
  if (kv.has("workers")) spec.workers = std::stoi(kv.get("workers"));
  if (spec.schemes.empty())
    spec.schemes = {Scheme::CcipmStrict, Scheme::CcizfStandin};
  if (spec.sweep_points.empty())
    spec.sweep_points = {0, 2, 4, 6, 8, 10, 12, 14, 16, 18, 20};
  spec.validate();
  return spec;
}

SweepSpec load_sweep_spec(const std::string& path) {
  return sweep_spec_from_keyvalues(KeyValueFile::load(path));
}

bool run_selftest(std::ostream& out) {
  bool all_ok = true;
  auto report = [&](const std::string& name, bool ok, const std::string& note) {
    out << (ok ? "[ok]   " : "[FAIL] ") << name;
    if (!note.empty()) out << " (" << note << ")";
    out << "\n";
    all_ok = all_ok && ok;
  };

  // Projector algebra.
  {
    SubstreamRng rng(7, kTestStream, 1);
    double worst = 0.0;
    for (int i = 0; i < 2000; ++i) {
      Eigen::RowVectorXcd h(3);
      for (int j = 0; j < 3; ++j) h(j) = rng.complex_normal(1.0);
      const NullSpaceProjector p = make_projector(h);
      worst = std::max(worst, (p.pi * p.pi - p.pi).norm());
      worst = std::max(worst, (p.pi * h.adjoint()).norm() / h.norm());
    }
    report("projector idempotence/annihilation", worst <= 1e-10,
           "max residual " + fmt12(worst));
  }

  // Constructive-interference mutuality over the QPSK grid.
  {
    const PskAlphabet qpsk(4);
    SubstreamRng rng(7, kTestStream, 2);
    int bad = 0;
    for (int i = 0; i < 2000; ++i) {
      const std::complex<double> rho =
          rng.complex_normal(0.5) * std::sqrt(rng.uniform());
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          if (is_constructive(rho, qpsk.point(a), qpsk.point(b), 4) !=
              is_constructive(rho, qpsk.point(b), qpsk.point(a), 4))
            ++bad;
    }
    report("mutuality on QPSK grid", bad == 0, fmt12(bad) + " counterexamples");
  }

  // Matched-filter closed form, K = 1.
  {
    ScenarioConfig cfg;
    cfg.num_tx_antennas = 3;
    cfg.num_users = 1;
    cfg.snr_targets = {3.0};
    cfg.seed = 99;
    cfg.validate();
    const PskAlphabet alphabet(cfg.modulation_order);
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
      const ChannelSet ch = generate_channels(cfg, t);
      SubstreamRng rng(cfg.seed, kSymbolStream, t);
      const SymbolVector sym = uniform_symbols(alphabet, alphabet, 1, rng);
      const PrecodeSolution sol = solve_ccipm(ch, sym, cfg);
      const double expect = ch.psi(0) * 3.0 / ch.h_ss.row(0).squaredNorm();
      worst = std::max(worst, std::abs(sol.power - expect) / expect);
    }
    report("matched filter closed form", worst <= 1e-9,
           "max rel err " + fmt12(worst));
  }

  // Power monotone in the interference limit.
  {
    ScenarioConfig cfg;
    cfg.seed = 4242;
    cfg.validate();
    const PskAlphabet alphabet(cfg.modulation_order);
    const double limits[] = {0.01, 0.1, 1.0, 10.0, kUnboundedInterference};
    int violations = 0;
    for (int t = 0; t < 50; ++t) {
      const ChannelSet ch = generate_channels(cfg, t);
      SubstreamRng rng(cfg.seed, kSymbolStream, t);
      const SymbolVector sym = uniform_symbols(alphabet, alphabet, cfg.num_users, rng);
      double prev = solve_ccipm_strict(ch, sym, cfg).power;
      for (double limit : limits) {
        ScenarioConfig c2 = cfg;
        c2.interference_limit = limit;
        const double p = solve_ccipm(ch, sym, c2).power;
        if (p > prev * (1.0 + 1e-12)) ++violations;
        prev = p;
      }
    }
    report("power monotone in interference limit", violations == 0,
           fmt12(violations) + " violations");
  }

  // Sweep determinism across worker counts.
  {
    SweepSpec spec;
    spec.sweep_points = {0.0, 10.0};
    spec.trials_per_point = 40;
    spec.schemes = {Scheme::CcipmStrict, Scheme::CcizfStandin};
    spec.base_config.seed = 31337;
    spec.workers = 1;
    const std::string csv1 = render_csv(run_sweep(spec));
    spec.workers = 2;
    const std::string csv2 = render_csv(run_sweep(spec));
    report("sweep determinism across workers", csv1 == csv2, "");
  }

  return all_ok;
}

}  // namespace ccipm
