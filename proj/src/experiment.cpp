#include "seeopt/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>
#include <tuple>

#include "seeopt/miso.hpp"
#include "seeopt/rng.hpp"
#include "seeopt/siso.hpp"

namespace seeopt::experiment {

namespace {

constexpr std::string_view kRowsHeader =
    "sweep_value,trial_index,seed,zeta,eta,transmit_power,feasible,iterations,status";
constexpr std::string_view kSummaryHeader =
    "sweep_value,trials,feasible,infeasible,failed,mean_zeta,se_zeta,mean_eta,se_eta,mean_zeta_all";

constexpr int kDefaultTradeoffPoints = 20;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw Error(Errc::InvalidArgument, "invalid value '" + std::string(value) + "' for " + std::string(key));
}

double parse_double(std::string_view key, std::string_view text) {
  text = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) bad_value(key, text);
  return v;
}

template <typename Int>
Int parse_int(std::string_view key, std::string_view text) {
  text = trim(text);
  Int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) bad_value(key, text);
  return v;
}

bool is_infeasibility(std::string_view status) {
  return status == "QosInfeasible" || status == "AlphaNonPositive" || status == "RateRegionEmpty";
}

bool is_tradeoff(Method m) { return m == Method::TradeoffMiso || m == Method::TradeoffSiso; }

SystemConfig config_for(const Scenario& s, double sweep_value) {
  SystemConfig c = s.config;
  if (!s.sweep) return c;
  switch (s.sweep->param) {
    case SweepParam::Eta0: c.qos_floor_bps_hz = sweep_value; break;
    case SweepParam::NAntennas: c.n_antennas = static_cast<int>(sweep_value); break;
    case SweepParam::Pc: c.circuit_power_w = sweep_value; break;
    case SweepParam::Power:
      if (is_tradeoff(s.method)) {
        c.max_power_w = std::max(c.max_power_w, sweep_value);
      } else {
        c.max_power_w = sweep_value;
      }
      break;
  }
  return c;
}

void fill(ResultRow& row, const miso::BeamformerSolution& sol, int iterations) {
  row.iterations = iterations;
  if (!sol.feasible) {
    row.status = "QosInfeasible";
    return;
  }
  row.feasible = true;
  row.zeta = sol.zeta_bits_per_joule;
  row.eta = sol.eta_bps_hz;
  row.transmit_power = sol.transmit_power_w;
}

void run_cell(ResultRow& row, const Scenario& s, const SystemConfig& cfg, double sweep_value) {
  const ChannelPair ch = generate_channel(cfg, row.seed);
  const NoisePowers noise = noise_powers(cfg);
  switch (s.method) {
    case Method::MisoQos: {
      SystemConfig c = cfg;
      c.qos_floor_bps_hz = cfg.qos_floor();
      const auto sol = miso::solve_with_qos(ch, noise, c);
      fill(row, sol, sol.sdp_iterations);
      return;
    }
    case Method::MisoZf: {
      SystemConfig c = cfg;
      c.qos_floor_bps_hz = cfg.qos_floor();
      const auto sol = miso::solve_zf(ch, noise, c);
      fill(row, sol, sol.sdp_iterations);
      return;
    }
    case Method::MisoNoQos: {
      const auto sol = miso::solve_without_qos(ch, noise, cfg);
      fill(row, sol, static_cast<int>(sol.evaluations.size()));
      return;
    }
    case Method::Siso: {
      siso::SisoParams p;
      try {
        p = siso::make_params(ch, noise, cfg);
      } catch (const Error& e) {
        // Without a QoS floor an empty rate region just means zero secrecy at zero power.
        if (e.code() != Errc::RateRegionEmpty || cfg.qos_floor() > 0.0) throw;
        row.feasible = true;
        return;
      }
      const auto r = siso::dinkelbach(p);
      row.feasible = true;
      row.zeta = r.zeta_star;
      row.eta = r.eta_star;
      row.transmit_power = r.p_star_w;
      row.iterations = r.iterations;
      return;
    }
    case Method::TradeoffMiso: {
      const auto curve = miso::tradeoff_curve_miso(ch, noise, cfg, {sweep_value});
      row.feasible = true;
      row.zeta = curve.points.front().zeta;
      row.eta = curve.points.front().eta;
      row.transmit_power = sweep_value;
      row.iterations = 1;
      return;
    }
    case Method::TradeoffSiso: {
      row.feasible = true;
      row.transmit_power = sweep_value;
      row.iterations = 1;
      SystemConfig c = cfg;
      c.qos_floor_bps_hz.reset();
      siso::SisoParams p;
      try {
        p = siso::make_params(ch, noise, c);
      } catch (const Error& e) {
        if (e.code() != Errc::RateRegionEmpty) throw;
        return;
      }
      row.eta = secrecy_rate_siso(sweep_value, ch, noise);
      row.zeta = siso::zeta_of_eta(row.eta, p, cfg.bandwidth_hz);
      return;
    }
  }
}

void write_field(std::ostream& os, std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) {
    os << s;
    return;
  }
  os << '"';
  for (char ch : s) {
    if (ch == '"') os << '"';
    os << ch;
  }
  os << '"';
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(Errc::IoError, "cannot open " + path.string() + " for writing");
  return os;
}

}  // namespace

std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::MisoQos: return "miso-qos";
    case Method::MisoZf: return "miso-zf";
    case Method::MisoNoQos: return "miso-noqos";
    case Method::Siso: return "siso";
    case Method::TradeoffMiso: return "tradeoff-miso";
    case Method::TradeoffSiso: return "tradeoff-siso";
  }
  return "?";
}

std::string_view to_string(SweepParam p) noexcept {
  switch (p) {
    case SweepParam::Eta0: return "eta0";
    case SweepParam::NAntennas: return "n_antennas";
    case SweepParam::Pc: return "p_c";
    case SweepParam::Power: return "power";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::MisoQos, Method::MisoZf, Method::MisoNoQos, Method::Siso, Method::TradeoffMiso,
                   Method::TradeoffSiso}) {
    if (to_string(m) == name) return m;
  }
  throw Error(Errc::InvalidArgument, "unknown method '" + std::string(name) + "'");
}

SweepParam parse_sweep_param(std::string_view name) {
  for (SweepParam p : {SweepParam::Eta0, SweepParam::NAntennas, SweepParam::Pc, SweepParam::Power}) {
    if (to_string(p) == name) return p;
  }
  throw Error(Errc::InvalidArgument, "unknown sweep parameter '" + std::string(name) + "'");
}

Sweep parse_sweep(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos) throw Error(Errc::InvalidArgument, "sweep must look like name=v1,v2,...");
  Sweep sw;
  sw.param = parse_sweep_param(trim(text.substr(0, eq)));
  std::string_view rest = text.substr(eq + 1);
  while (true) {
    const auto comma = rest.find(',');
    sw.values.push_back(parse_double("sweep", rest.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return sw;
}

void validate(const Scenario& s) {
  if (s.trials < 1) throw Error(Errc::InvalidArgument, "trials must be at least 1");
  if (s.workers < 1) throw Error(Errc::InvalidArgument, "workers must be at least 1");
  seeopt::validate(s.config);
  const bool single = s.method == Method::Siso || s.method == Method::TradeoffSiso;
  if (single && s.config.n_antennas != 1) {
    throw Error(Errc::InvalidArgument, "SISO methods need antennas = 1");
  }
  if (s.method == Method::MisoZf && s.config.n_antennas < 2) {
    throw Error(Errc::InvalidArgument, "zero-forcing needs at least two antennas");
  }
  if (!s.sweep) return;
  if (s.sweep->values.empty()) throw Error(Errc::InvalidArgument, "sweep has no values");
  for (double v : s.sweep->values) {
    const std::string name(to_string(s.sweep->param));
    if (!std::isfinite(v)) bad_value(name, std::to_string(v));
    switch (s.sweep->param) {
      case SweepParam::Eta0:
        if (v < 0.0) bad_value(name, std::to_string(v));
        break;
      case SweepParam::NAntennas:
        if (v < 1.0 || v != std::floor(v) || single || (s.method == Method::MisoZf && v < 2.0)) {
          bad_value(name, std::to_string(v));
        }
        break;
      case SweepParam::Pc:
      case SweepParam::Power:
        if (!(v > 0.0)) bad_value(name, std::to_string(v));
        break;
    }
  }
}

void apply_setting(Scenario& s, std::string_view key, std::string_view value) {
  value = trim(value);
  if (key == "method") {
    s.method = parse_method(value);
  } else if (key == "antennas") {
    s.config.n_antennas = parse_int<int>(key, value);
  } else if (key == "eta0") {
    s.config.qos_floor_bps_hz = parse_double(key, value);
  } else if (key == "pc") {
    s.config.circuit_power_w = parse_double(key, value);
  } else if (key == "pmax") {
    s.config.max_power_w = parse_double(key, value);
  } else if (key == "bandwidth") {
    s.config.bandwidth_hz = parse_double(key, value);
  } else if (key == "distance") {
    s.config.distance_km = parse_double(key, value);
  } else if (key == "distance_e") {
    s.config.distance_e_km = parse_double(key, value);
  } else if (key == "temp") {
    s.config.temp_r_kelvin = s.config.temp_e_kelvin = parse_double(key, value);
  } else if (key == "temp_r") {
    s.config.temp_r_kelvin = parse_double(key, value);
  } else if (key == "temp_e") {
    s.config.temp_e_kelvin = parse_double(key, value);
  } else if (key == "seed") {
    s.base_seed = parse_int<std::uint64_t>(key, value);
  } else if (key == "trials") {
    s.trials = parse_int<int>(key, value);
  } else if (key == "workers") {
    s.workers = parse_int<int>(key, value);
  } else if (key == "sweep") {
    s.sweep = parse_sweep(value);
  } else {
    throw Error(Errc::InvalidArgument, "unknown scenario key '" + std::string(key) + "'");
  }
}

Scenario load_scenario(const std::filesystem::path& path, Scenario base) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot read scenario file " + path.string());
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view v = line;
    if (const auto hash = v.find('#'); hash != std::string_view::npos) v = v.substr(0, hash);
    v = trim(v);
    if (v.empty()) continue;
    const auto eq = v.find('=');
    if (eq == std::string_view::npos) {
      throw Error(Errc::InvalidArgument, path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    }
    try {
      apply_setting(base, trim(v.substr(0, eq)), v.substr(eq + 1));
    } catch (const Error& e) {
      throw Error(e.code(), path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return base;
}

Sweep effective_sweep(const Scenario& s) {
  if (s.sweep) return *s.sweep;
  if (is_tradeoff(s.method)) {
    const double pmax = s.config.max_power_w;
    return {SweepParam::Power, miso::log_grid(1e-3 * pmax, pmax, kDefaultTradeoffPoints)};
  }
  return {SweepParam::Eta0, {s.config.qos_floor()}};
}

ResultRow run_trial(const Scenario& s, double sweep_value, int trial_index) {
  ResultRow row;
  row.sweep_value = sweep_value;
  row.trial_index = trial_index;
  row.seed = split_seed(s.base_seed, static_cast<std::uint64_t>(trial_index));
  row.status = "ok";
  Scenario eff = s;
  eff.sweep = effective_sweep(s);
  try {
    run_cell(row, s, config_for(eff, sweep_value), sweep_value);
    if (!row.feasible && row.status == "ok") row.status = "QosInfeasible";
  } catch (const Error& e) {
    row = ResultRow{sweep_value, trial_index, row.seed, 0.0, 0.0, 0.0, false, row.iterations,
                    std::string(errc_name(e.code()))};
  } catch (const std::exception&) {
    row = ResultRow{sweep_value, trial_index, row.seed, 0.0, 0.0, 0.0, false, row.iterations, "Exception"};
  }
  return row;
}

RunResult run_scenario(const Scenario& s) {
  validate(s);
  const Sweep sweep = effective_sweep(s);
  const std::size_t n_trials = static_cast<std::size_t>(s.trials);
  const std::size_t n_cells = sweep.values.size() * n_trials;
  RunResult out;
  out.rows.resize(n_cells);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < n_cells; k = next++) {
      out.rows[k] = run_trial(s, sweep.values[k / n_trials], static_cast<int>(k % n_trials));
    }
  };
  const std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(s.workers), n_cells);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_threads);
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  }
  out.summary = summarize(out.rows);
  return out;
}

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
  std::vector<SummaryRow> out;
  std::vector<std::vector<const ResultRow*>> groups;
  for (const ResultRow& r : rows) {
    auto it = std::find_if(out.begin(), out.end(), [&](const SummaryRow& s) { return s.sweep_value == r.sweep_value; });
    if (it == out.end()) {
      out.push_back({});
      out.back().sweep_value = r.sweep_value;
      groups.emplace_back();
      it = out.end() - 1;
    }
    groups[static_cast<std::size_t>(it - out.begin())].push_back(&r);
  }
  auto mean_se = [](const std::vector<double>& xs) -> std::pair<double, double> {
    if (xs.empty()) return {0.0, 0.0};
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    if (xs.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const double n = static_cast<double>(xs.size());
    return {mean, std::sqrt(ss / (n - 1.0) / n)};
  };
  for (std::size_t g = 0; g < out.size(); ++g) {
    SummaryRow& s = out[g];
    std::vector<double> zeta, eta;
    double total = 0.0;
    for (const ResultRow* r : groups[g]) {
      ++s.trials;
      if (r->feasible) {
        ++s.feasible;
        zeta.push_back(r->zeta);
        eta.push_back(r->eta);
        total += r->zeta;
      } else if (is_infeasibility(r->status)) {
        ++s.infeasible;
      } else {
        ++s.failed;
      }
    }
    std::tie(s.mean_zeta, s.se_zeta) = mean_se(zeta);
    std::tie(s.mean_eta, s.se_eta) = mean_se(eta);
    s.mean_zeta_all = total / static_cast<double>(s.trials);
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_rows_csv(std::ostream& os, const std::vector<ResultRow>& rows, const std::optional<std::string>& comment) {
  if (comment) os << "# " << *comment << '\n';
  os << kRowsHeader << '\n';
  for (const ResultRow& r : rows) {
    os << format_double(r.sweep_value) << ',' << r.trial_index << ',' << r.seed << ',' << format_double(r.zeta) << ','
       << format_double(r.eta) << ',' << format_double(r.transmit_power) << ',' << (r.feasible ? 1 : 0) << ','
       << r.iterations << ',';
    write_field(os, r.status);
    os << '\n';
  }
}

void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
  os << kSummaryHeader << '\n';
  for (const SummaryRow& s : rows) {
    os << format_double(s.sweep_value) << ',' << s.trials << ',' << s.feasible << ',' << s.infeasible << ','
       << s.failed << ',' << format_double(s.mean_zeta) << ',' << format_double(s.se_zeta) << ','
       << format_double(s.mean_eta) << ',' << format_double(s.se_eta) << ',' << format_double(s.mean_zeta_all)
       << '\n';
  }
}

std::filesystem::path summary_path(const std::filesystem::path& rows_path) {
  std::filesystem::path p = rows_path;
  p.replace_filename(rows_path.stem().string() + ".summary.csv");
  return p;
}

void emit_csv(const RunResult& result, const std::filesystem::path& path, const std::optional<std::string>& comment) {
  {
    auto os = open_for_write(path);
    write_rows_csv(os, result.rows, comment);
    if (!os.flush()) throw Error(Errc::IoError, "failed writing " + path.string());
  }
  const auto sp = summary_path(path);
  auto os = open_for_write(sp);
  write_summary_csv(os, result.summary);
  if (!os.flush()) throw Error(Errc::IoError, "failed writing " + sp.string());
}

std::vector<ResultRow> read_rows_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot read " + path.string());
  std::vector<ResultRow> rows;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (trim(line) != kRowsHeader) throw Error(Errc::IoError, path.string() + ": unexpected header");
      header_seen = true;
      continue;
    }
    const auto f = split_csv_line(line);
    if (f.size() != 9) throw Error(Errc::IoError, path.string() + ": expected 9 fields");
    try {
      ResultRow r;
      r.sweep_value = parse_double("sweep_value", f[0]);
      r.trial_index = parse_int<int>("trial_index", f[1]);
      r.seed = parse_int<std::uint64_t>("seed", f[2]);
      r.zeta = parse_double("zeta", f[3]);
      r.eta = parse_double("eta", f[4]);
      r.transmit_power = parse_double("transmit_power", f[5]);
      r.feasible = parse_int<int>("feasible", f[6]) != 0;
      r.iterations = parse_int<int>("iterations", f[7]);
      r.status = f[8];
      rows.push_back(std::move(r));
    } catch (const Error& e) {
      throw Error(Errc::IoError, path.string() + ": " + e.what());
    }
  }
  if (!header_seen) throw Error(Errc::IoError, path.string() + ": missing header");
  return rows;
}

}  // namespace seeopt::experiment
