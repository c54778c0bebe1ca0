#pragma once

// Seeded Monte Carlo batches over a scenario, plus CSV output.
//
// Scenario files are flat key = value text, one key per line; '#' starts a
// comment. Recognised keys:
//
//   method      miso-qos | miso-zf | miso-noqos | siso | tradeoff-miso | tradeoff-siso
//   antennas    integer >= 1
//   eta0        QoS floor in bits/s/Hz
//   pc          circuit power, W
//   pmax        maximum transmit power, W
//   bandwidth   Hz
//   distance    transmitter-receiver distance, km (also the eavesdropper's unless distance_e is set)
//   distance_e  transmitter-eavesdropper distance, km
//   temp        noise temperature of both receivers, K (temp_r / temp_e set them separately)
//   seed        base seed, unsigned 64-bit
//   trials      trials per sweep value
//   workers     worker threads
//   sweep       name=v1,v2,...  with name one of eta0, n_antennas, p_c, power
//
// For the solver methods the power sweep sets P_max. For the trade-off
// methods it is the transmit power at which each trade-off point is taken.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "seeopt/channel.hpp"

namespace seeopt::experiment {

enum class Method { MisoQos, MisoZf, MisoNoQos, Siso, TradeoffMiso, TradeoffSiso };
enum class SweepParam { Eta0, NAntennas, Pc, Power };

std::string_view to_string(Method m) noexcept;
std::string_view to_string(SweepParam p) noexcept;
/// Throws InvalidArgument for an unknown name.
Method parse_method(std::string_view name);
SweepParam parse_sweep_param(std::string_view name);

struct Sweep {
  SweepParam param = SweepParam::Eta0;
  std::vector<double> values;
};

/// Parses "name=v1,v2,...". Throws InvalidArgument on malformed input.
Sweep parse_sweep(std::string_view text);

inline constexpr int kDefaultTrials = 200;

struct Scenario {
  SystemConfig config;
  Method method = Method::MisoNoQos;
  int trials = kDefaultTrials;
  std::uint64_t base_seed = 1;
  std::optional<Sweep> sweep;
  int workers = 1;
};

/// Throws InvalidArgument when trials < 1, workers < 1, the config is invalid
/// or a sweep value is out of range for its parameter.
void validate(const Scenario& s);

/// Applies every key of a scenario file on top of `base`. Throws IoError when
/// the file cannot be read and InvalidArgument (with the line number) on a bad line.
Scenario load_scenario(const std::filesystem::path& path, Scenario base = {});
void apply_setting(Scenario& s, std::string_view key, std::string_view value);

struct ResultRow {
  double sweep_value = 0.0;
  int trial_index = 0;
  std::uint64_t seed = 0;
  double zeta = 0.0;
  double eta = 0.0;
  double transmit_power = 0.0;
  bool feasible = false;
  int iterations = 0;
  std::string status;

  bool operator==(const ResultRow&) const = default;
};

struct SummaryRow {
  double sweep_value = 0.0;
  int trials = 0;
  int feasible = 0;
  int infeasible = 0;  // QoS unreachable for the draw
  int failed = 0;      // solver errors
  double mean_zeta = 0.0;
  double se_zeta = 0.0;
  double mean_eta = 0.0;
  double se_eta = 0.0;
  /// Mean over every trial with infeasible and failed draws counted as zeta = 0.
  double mean_zeta_all = 0.0;

  bool operator==(const SummaryRow&) const = default;
};

struct RunResult {
  std::vector<ResultRow> rows;  // ordered by (sweep index, trial_index)
  std::vector<SummaryRow> summary;
};

/// Sweep values in effect: the scenario's sweep, or a single value taken
/// from the config (a default power grid for the trade-off methods).
Sweep effective_sweep(const Scenario& s);

/// Solves one (sweep value, trial) cell. Per-trial errors are captured in the row.
ResultRow run_trial(const Scenario& s, double sweep_value, int trial_index);

/// Runs every cell on `workers` threads; trial i uses split_seed(base_seed, i)
/// for every sweep value, so sweeps are paired across the same channels.
RunResult run_scenario(const Scenario& s);

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows);

/// 17 significant digits, which round-trips every double exactly.
std::string format_double(double v);

void write_rows_csv(std::ostream& os, const std::vector<ResultRow>& rows,
                    const std::optional<std::string>& comment = std::nullopt);
void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows);

/// Writes rows to `path` and the summary to `<stem>.summary.csv` next to it.
/// An optional comment becomes a leading '#' line. Throws IoError.
void emit_csv(const RunResult& result, const std::filesystem::path& path,
              const std::optional<std::string>& comment = std::nullopt);
std::filesystem::path summary_path(const std::filesystem::path& rows_path);

/// Reads a rows file written by emit_csv. Throws IoError.
std::vector<ResultRow> read_rows_csv(const std::filesystem::path& path);

}  // namespace seeopt::experiment
