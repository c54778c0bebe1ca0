// seeopt: single-instance solvers and Monte Carlo batches from the command line.
//
// Exit codes: 0 success, 2 invalid arguments, 3 infeasible instance, 4 solver failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "seeopt/experiment.hpp"
#include "seeopt/miso.hpp"
#include "seeopt/rng.hpp"
#include "seeopt/siso.hpp"

namespace {

using seeopt::Errc;
using seeopt::Error;
namespace ex = seeopt::experiment;
using json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitSolver = 4;

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::QosInfeasible:
    case Errc::AlphaNonPositive:
    case Errc::RateRegionEmpty:
      return kExitInfeasible;
    case Errc::InvalidArgument:
    case Errc::IoError:
    case Errc::NonPositiveDistance:
    case Errc::NonPositiveInput:
    case Errc::NegativePower:
    case Errc::ZfUndefined:
    case Errc::DimensionMismatch:
    case Errc::EtaOutOfRange:
      return kExitInvalid;
    default:
      return kExitSolver;
  }
}

struct Options {
  std::vector<std::pair<std::string, std::string>> settings;  // applied in order after the config file
  std::optional<std::string> config_file;
  std::optional<std::string> out;
  bool stamp = false;
};

// Every flag is stored as the matching scenario-file key so file and flags share one parser.
void add_common(CLI::App& cmd, Options& opt, bool batch) {
  auto keyed = [&](const std::string& flag, const std::string& key, const std::string& help) {
    cmd.add_option_function<std::string>(
        flag, [&opt, key](const std::string& v) { opt.settings.emplace_back(key, v); }, help);
  };
  keyed("--antennas", "antennas", "number of transmit antennas N");
  keyed("--eta0", "eta0", "QoS floor on the secrecy rate, bits/s/Hz");
  keyed("--pc", "pc", "circuit power P_c, W");
  keyed("--pmax", "pmax", "maximum transmit power, W");
  keyed("--bandwidth", "bandwidth", "bandwidth, Hz");
  keyed("--distance", "distance", "link distance, km");
  keyed("--distance-e", "distance_e", "eavesdropper distance, km (defaults to --distance)");
  keyed("--temp", "temp", "noise temperature of both receivers, K");
  keyed("--seed", "seed", "base seed");
  keyed("--trials", "trials", "trials per sweep value");
  keyed("--sweep", "sweep", "name=v1,v2,... with name in eta0, n_antennas, p_c, power");
  keyed("--workers", "workers", "worker threads");
  if (batch) keyed("--method", "method", "miso-qos, miso-zf, miso-noqos, siso, tradeoff-miso, tradeoff-siso");
  cmd.add_option("--config", opt.config_file, "scenario file; flags override its values");
  cmd.add_option("--out", opt.out, "output path");
  if (batch) cmd.add_flag("--stamp", opt.stamp, "write a timestamp comment line at the top of the CSV");
}

ex::Scenario build_scenario(const Options& opt, ex::Scenario base) {
  if (opt.config_file) base = ex::load_scenario(*opt.config_file, base);
  for (const auto& [key, value] : opt.settings) ex::apply_setting(base, key, value);
  ex::validate(base);
  return base;
}

json complex_array(const seeopt::ComplexVec& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back({v(i).real(), v(i).imag()});
  return arr;
}

json config_json(const ex::Scenario& s, std::uint64_t channel_seed) {
  const auto& c = s.config;
  return {{"antennas", c.n_antennas}, {"eta0", c.qos_floor()},  {"pc", c.circuit_power_w},
          {"pmax", c.max_power_w},    {"bandwidth", c.bandwidth_hz}, {"distance", c.distance_km},
          {"seed", s.base_seed},      {"channel_seed", channel_seed}};
}

void emit_json(const json& j, const Options& opt) {
  const std::string text = j.dump(2) + "\n";
  if (opt.out) {
    std::ofstream os(*opt.out, std::ios::binary | std::ios::trunc);
    if (!os || !(os << text)) throw Error(Errc::IoError, "cannot write " + *opt.out);
  } else {
    std::cout << text;
  }
}

// Single instances use the channel of trial 0 of a batch with the same seed.
int solve_miso(const Options& opt, seeopt::miso::Method method) {
  ex::Scenario base;
  base.config.n_antennas = method == seeopt::miso::Method::ZeroForcing ? 2 : 1;
  ex::Scenario s = build_scenario(opt, base);
  if (method != seeopt::miso::Method::NoQosClosedForm) s.config.qos_floor_bps_hz = s.config.qos_floor();
  const std::uint64_t seed = seeopt::split_seed(s.base_seed, 0);
  const auto ch = seeopt::generate_channel(s.config, seed);
  const auto noise = seeopt::noise_powers(s.config);
  seeopt::miso::BeamformerSolution sol;
  switch (method) {
    case seeopt::miso::Method::QosSdp: sol = seeopt::miso::solve_with_qos(ch, noise, s.config); break;
    case seeopt::miso::Method::ZeroForcing: sol = seeopt::miso::solve_zf(ch, noise, s.config); break;
    case seeopt::miso::Method::NoQosClosedForm: sol = seeopt::miso::solve_without_qos(ch, noise, s.config); break;
  }
  json j;
  j["method"] = seeopt::miso::to_string(method);
  j["config"] = config_json(s, seed);
  j["feasible"] = sol.feasible;
  j["zeta"] = sol.zeta_bits_per_joule;
  j["eta"] = sol.eta_bps_hz;
  j["transmit_power"] = sol.transmit_power_w;
  j["sdp_iterations"] = sol.sdp_iterations;
  j["w"] = complex_array(sol.w);
  emit_json(j, opt);
  return sol.feasible ? kExitOk : kExitInfeasible;
}

int solve_siso(const Options& opt) {
  ex::Scenario base;
  base.method = ex::Method::Siso;
  ex::Scenario s = build_scenario(opt, base);
  if (s.config.n_antennas != 1) throw Error(Errc::InvalidArgument, "solve-siso needs --antennas 1");
  const std::uint64_t seed = seeopt::split_seed(s.base_seed, 0);
  const auto ch = seeopt::generate_channel(s.config, seed);
  const auto params = seeopt::siso::make_params(ch, seeopt::noise_powers(s.config), s.config);
  const auto r = seeopt::siso::dinkelbach(params);
  json j;
  j["method"] = "Dinkelbach";
  j["config"] = config_json(s, seed);
  j["feasible"] = true;
  j["zeta"] = r.zeta_star;
  j["eta"] = r.eta_star;
  j["transmit_power"] = r.p_star_w;
  j["p_min"] = params.p_min;
  j["iterations"] = r.iterations;
  json trace = json::array();
  for (const auto& step : r.trace) trace.push_back({{"q", step.q}, {"p", step.p}, {"F", step.f_value}});
  j["trace"] = trace;
  emit_json(j, opt);
  return kExitOk;
}

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

int run_batch(const Options& opt, ex::Scenario base) {
  const ex::Scenario s = build_scenario(opt, base);
  const ex::RunResult result = ex::run_scenario(s);
  std::optional<std::string> comment;
  if (opt.stamp) comment = "generated " + timestamp();
  if (opt.out) {
    ex::emit_csv(result, *opt.out, comment);
    std::cerr << "wrote " << result.rows.size() << " rows to " << *opt.out << " and summary to "
              << ex::summary_path(*opt.out).string() << "\n";
  } else {
    ex::write_summary_csv(std::cout, result.summary);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Secrecy energy efficiency optimisation for MISO and SISO wiretap links"};
  app.require_subcommand(1);

  Options opt;
  auto* qos = app.add_subcommand("solve-miso-qos", "SDP beamformer with a secrecy-rate floor");
  auto* zf = app.add_subcommand("solve-miso-zf", "zero-forcing beamformer with a secrecy-rate floor");
  auto* noqos = app.add_subcommand("solve-miso-noqos", "closed-form beamformer without a QoS floor");
  auto* siso = app.add_subcommand("solve-siso", "single-antenna power control (Dinkelbach)");
  auto* tradeoff = app.add_subcommand("tradeoff", "zeta versus eta trade-off curve, written as CSV");
  auto* mc = app.add_subcommand("montecarlo", "seeded Monte Carlo batch, written as CSV");
  for (auto* cmd : {qos, zf, noqos, siso}) add_common(*cmd, opt, false);
  for (auto* cmd : {tradeoff, mc}) add_common(*cmd, opt, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (qos->parsed()) return solve_miso(opt, seeopt::miso::Method::QosSdp);
    if (zf->parsed()) return solve_miso(opt, seeopt::miso::Method::ZeroForcing);
    if (noqos->parsed()) return solve_miso(opt, seeopt::miso::Method::NoQosClosedForm);
    if (siso->parsed()) return solve_siso(opt);
    if (tradeoff->parsed()) {
      ex::Scenario base;
      base.trials = 1;
      base.method = ex::Method::TradeoffMiso;
      ex::Scenario probe = base;
      if (opt.config_file) probe = ex::load_scenario(*opt.config_file, probe);
      for (const auto& [key, value] : opt.settings) ex::apply_setting(probe, key, value);
      if (probe.method != ex::Method::TradeoffMiso && probe.method != ex::Method::TradeoffSiso) {
        throw Error(Errc::InvalidArgument, "tradeoff accepts only the tradeoff-miso and tradeoff-siso methods");
      }
      if (probe.config.n_antennas == 1) base.method = ex::Method::TradeoffSiso;
      return run_batch(opt, base);
    }
    return run_batch(opt, ex::Scenario{});
  } catch (const Error& e) {
    std::cerr << "seeopt: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "seeopt: " << e.what() << "\n";
    return kExitSolver;
  }
}
