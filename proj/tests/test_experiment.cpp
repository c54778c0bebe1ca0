#include <doctest.h>

#include <bit>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "helpers.hpp"
#include "seeopt/experiment.hpp"
#include "seeopt/rng.hpp"

using namespace seeopt;
namespace ex = seeopt::experiment;

namespace {

template <typename F>
Errc code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::InvalidArgument;
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("seeopt_test_" + std::to_string(split_seed(std::random_device{}(), 0)));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double parse(const std::string& s) {
  double v = 0.0;
  std::from_chars(s.data(), s.data() + s.size(), v);
  return v;
}

int count_lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

ex::Scenario small_scenario(ex::Method m, int n) {
  ex::Scenario s;
  s.method = m;
  s.config.n_antennas = n;
  s.trials = 4;
  s.base_seed = 99;
  return s;
}

}  // namespace

TEST_CASE("format_double round-trips bit for bit") {
  CounterRng rng(51);
  for (int k = 0; k < 20000; ++k) {
    const double v = std::bit_cast<double>(rng());
    if (!std::isfinite(v)) continue;
    const std::string s = ex::format_double(v);
    CHECK(std::bit_cast<std::uint64_t>(parse(s)) == std::bit_cast<std::uint64_t>(v));
  }
  for (double v : {0.0, -0.0, 1.0, 0.1, 1e-310, std::numeric_limits<double>::max(), 2148628.456}) {
    CHECK(std::bit_cast<std::uint64_t>(parse(ex::format_double(v))) == std::bit_cast<std::uint64_t>(v));
  }
}

TEST_CASE("rows CSV shape") {
  std::ostringstream empty;
  ex::write_rows_csv(empty, {});
  CHECK(count_lines(empty.str()) == 1);
  CHECK(empty.str().rfind("sweep_value,", 0) == 0);

  std::ostringstream one;
  ex::write_rows_csv(one, {ex::ResultRow{0.5, 0, 7, 1.0, 2.0, 3.0, true, 4, "ok"}});
  CHECK(count_lines(one.str()) == 2);

  std::ostringstream stamped;
  ex::write_rows_csv(stamped, {}, "generated now");
  CHECK(stamped.str().rfind("# generated now\n", 0) == 0);
}

TEST_CASE("rows CSV round trip through a file") {
  TempDir dir;
  CounterRng rng(52);
  ex::RunResult r;
  for (int i = 0; i < 50; ++i) {
    ex::ResultRow row;
    row.sweep_value = rng.uniform() * 10;
    row.trial_index = i;
    row.seed = rng();
    row.zeta = rng.normal() * 1e6;
    row.eta = rng.uniform() * 1e-300;
    row.transmit_power = rng.uniform();
    row.feasible = i % 3 != 0;
    row.iterations = i * 7;
    row.status = i % 5 == 0 ? "odd, \"quoted\" status" : "ok";
    r.rows.push_back(row);
  }
  r.summary = ex::summarize(r.rows);
  const auto path = dir.path / "rows.csv";
  ex::emit_csv(r, path, "stamp");
  const auto back = ex::read_rows_csv(path);
  REQUIRE(back.size() == r.rows.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i] == r.rows[i]);
    CHECK(std::bit_cast<std::uint64_t>(back[i].zeta) == std::bit_cast<std::uint64_t>(r.rows[i].zeta));
  }
  CHECK(std::filesystem::exists(dir.path / "rows.summary.csv"));
  CHECK(count_lines(slurp(dir.path / "rows.summary.csv")) == 1 + static_cast<int>(r.summary.size()));

  ex::emit_csv(ex::RunResult{}, dir.path / "empty.csv");
  CHECK(count_lines(slurp(dir.path / "empty.csv")) == 1);
  CHECK(ex::read_rows_csv(dir.path / "empty.csv").empty());

  CHECK(code_of([&] { ex::read_rows_csv(dir.path / "missing.csv"); }) == Errc::IoError);
  CHECK(code_of([&] { ex::emit_csv(r, dir.path / "no" / "such" / "dir.csv"); }) == Errc::IoError);
  std::ofstream(dir.path / "garbage.csv") << "a,b\n1,2\n";
  CHECK(code_of([&] { ex::read_rows_csv(dir.path / "garbage.csv"); }) == Errc::IoError);
}

TEST_CASE("summary statistics and classification") {
  std::vector<ex::ResultRow> rows{
      {1.0, 0, 0, 2.0, 1.0, 1.0, true, 1, "ok"},
      {1.0, 1, 0, 4.0, 3.0, 1.0, true, 1, "ok"},
      {1.0, 2, 0, 0.0, 0.0, 0.0, false, 1, "QosInfeasible"},
      {1.0, 3, 0, 0.0, 0.0, 0.0, false, 1, "SolverFailure"},
      {2.0, 0, 0, 5.0, 1.0, 1.0, true, 1, "ok"},
  };
  const auto s = ex::summarize(rows);
  REQUIRE(s.size() == 2);
  CHECK(s[0].trials == 4);
  CHECK(s[0].feasible == 2);
  CHECK(s[0].infeasible == 1);
  CHECK(s[0].failed == 1);
  CHECK(s[0].mean_zeta == 3.0);
  CHECK(s[0].se_zeta == doctest::Approx(1.0));  // sd sqrt(2) over sqrt(2)
  CHECK(s[0].mean_eta == 2.0);
  CHECK(s[0].mean_zeta_all == 1.5);
  CHECK(s[1].trials == 1);
  CHECK(s[1].se_zeta == 0.0);
}

TEST_CASE("scenario files and overrides") {
  TempDir dir;
  const auto path = dir.path / "s.conf";
  std::ofstream(path) << "# antenna sweep batch\n"
                         "method = miso-zf\n"
                         "antennas = 4   # four antennas\n"
                         "\n"
                         "pc=1\n"
                         "seed = 18446744073709551615\n"
                         "sweep = eta0=0,1.5,3\n"
                         "temp = 300\n"
                         "temp_e = 310\n";
  ex::Scenario s = ex::load_scenario(path);
  CHECK(s.method == ex::Method::MisoZf);
  CHECK(s.config.n_antennas == 4);
  CHECK(s.config.circuit_power_w == 1.0);
  CHECK(s.base_seed == std::numeric_limits<std::uint64_t>::max());
  REQUIRE(s.sweep.has_value());
  CHECK(s.sweep->param == ex::SweepParam::Eta0);
  CHECK(s.sweep->values == std::vector<double>{0.0, 1.5, 3.0});
  CHECK(s.config.temp_r_kelvin == 300.0);
  CHECK(s.config.temp_e_kelvin == 310.0);
  CHECK(s.trials == ex::kDefaultTrials);
  CHECK_NOTHROW(ex::validate(s));

  ex::apply_setting(s, "antennas", "2");
  CHECK(s.config.n_antennas == 2);

  std::ofstream(dir.path / "bad.conf") << "antennas = 2\nthis line is wrong\n";
  try {
    ex::load_scenario(dir.path / "bad.conf");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InvalidArgument);
    CHECK(std::string(e.what()).find(":2:") != std::string::npos);
  }
  CHECK(code_of([&] { ex::apply_setting(s, "colour", "red"); }) == Errc::InvalidArgument);
  CHECK(code_of([&] { ex::apply_setting(s, "trials", "ten"); }) == Errc::InvalidArgument);
  CHECK(code_of([&] { ex::apply_setting(s, "method", "annealing"); }) == Errc::InvalidArgument);
  CHECK(code_of([] { ex::parse_sweep("eta0"); }) == Errc::InvalidArgument);
  CHECK(code_of([] { ex::parse_sweep("mass=1,2"); }) == Errc::InvalidArgument);
  CHECK(code_of([] { ex::parse_sweep("eta0=1,,2"); }) == Errc::InvalidArgument);
  CHECK(code_of([&] { ex::load_scenario(dir.path / "absent.conf"); }) == Errc::IoError);
}

TEST_CASE("scenario validation") {
  ex::Scenario s = small_scenario(ex::Method::MisoNoQos, 2);
  s.trials = 0;
  CHECK(code_of([&] { ex::validate(s); }) == Errc::InvalidArgument);
  s = small_scenario(ex::Method::MisoNoQos, 2);
  s.workers = 0;
  CHECK(code_of([&] { ex::validate(s); }) == Errc::InvalidArgument);
  s = small_scenario(ex::Method::MisoNoQos, 2);
  s.sweep = ex::Sweep{ex::SweepParam::NAntennas, {2.0, 2.5}};
  CHECK(code_of([&] { ex::validate(s); }) == Errc::InvalidArgument);
  s.sweep = ex::Sweep{ex::SweepParam::Eta0, {-1.0}};
  CHECK(code_of([&] { ex::validate(s); }) == Errc::InvalidArgument);
  s.sweep = ex::Sweep{ex::SweepParam::Pc, {0.0}};
  CHECK(code_of([&] { ex::validate(s); }) == Errc::InvalidArgument);
  s = small_scenario(ex::Method::Siso, 2);
  CHECK(code_of([&] { ex::validate(s); }) == Errc::InvalidArgument);
  s = small_scenario(ex::Method::MisoZf, 1);
  CHECK(code_of([&] { ex::validate(s); }) == Errc::InvalidArgument);
}

TEST_CASE("batches are deterministic, paired and independent of worker count") {
  for (auto [m, n] : {std::pair{ex::Method::MisoQos, 2}, std::pair{ex::Method::MisoZf, 3},
                      std::pair{ex::Method::MisoNoQos, 4}, std::pair{ex::Method::Siso, 1},
                      std::pair{ex::Method::TradeoffMiso, 2}, std::pair{ex::Method::TradeoffSiso, 1}}) {
    ex::Scenario s = small_scenario(m, n);
    if (m == ex::Method::MisoQos || m == ex::Method::MisoZf || m == ex::Method::Siso) {
      s.sweep = ex::Sweep{ex::SweepParam::Eta0, {0.0, 1.0}};
    }
    if (m == ex::Method::TradeoffMiso || m == ex::Method::TradeoffSiso) {
      s.sweep = ex::Sweep{ex::SweepParam::Power, {1.0, 10.0, 50.0}};
    }
    const auto a = ex::run_scenario(s);
    const auto b = ex::run_scenario(s);
    s.workers = 3;
    const auto c = ex::run_scenario(s);
    REQUIRE(a.rows.size() == ex::effective_sweep(s).values.size() * 4);
    std::ostringstream sa, sb, sc;
    ex::write_rows_csv(sa, a.rows);
    ex::write_rows_csv(sb, b.rows);
    ex::write_rows_csv(sc, c.rows);
    CHECK(sa.str() == sb.str());
    CHECK(sa.str() == sc.str());
    CHECK(a.summary == c.summary);
    for (const auto& row : a.rows) {
      CHECK(row.seed == split_seed(99, static_cast<std::uint64_t>(row.trial_index)));
      if (row.feasible) CHECK(row.status == "ok");
    }
  }
}

TEST_CASE("trial outcomes") {
  // SISO draw with the eavesdropper stronger: zero row without a floor, infeasible with one.
  ex::Scenario s = small_scenario(ex::Method::Siso, 1);
  const NoisePowers n = noise_powers(s.config);
  int trial = 0;
  for (;; ++trial) {
    const auto ch = generate_channel(s.config, split_seed(s.base_seed, static_cast<std::uint64_t>(trial)));
    if (std::norm(ch.h_tr(0)) / n.sigma2_r_w <= std::norm(ch.h_te(0)) / n.sigma2_e_w) break;
  }
  const auto zero = ex::run_trial(s, 0.0, trial);
  CHECK(zero.feasible);
  CHECK(zero.zeta == 0.0);
  s.sweep = ex::Sweep{ex::SweepParam::Eta0, {1.0}};
  const auto inf = ex::run_trial(s, 1.0, trial);
  CHECK_FALSE(inf.feasible);
  CHECK(inf.status == "RateRegionEmpty");

  ex::Scenario q = small_scenario(ex::Method::MisoQos, 2);
  q.sweep = ex::Sweep{ex::SweepParam::Eta0, {40.0}};
  const auto r = ex::run_trial(q, 40.0, 0);
  CHECK_FALSE(r.feasible);
  CHECK(r.status == "QosInfeasible");
  CHECK(ex::summarize({r})[0].infeasible == 1);
}

TEST_CASE("effective sweep defaults") {
  ex::Scenario s = small_scenario(ex::Method::MisoQos, 2);
  s.config.qos_floor_bps_hz = 1.5;
  const auto e = ex::effective_sweep(s);
  CHECK(e.param == ex::SweepParam::Eta0);
  CHECK(e.values == std::vector<double>{1.5});

  s.method = ex::Method::TradeoffMiso;
  const auto t = ex::effective_sweep(s);
  CHECK(t.param == ex::SweepParam::Power);
  CHECK(t.values.size() == 20);
  CHECK(t.values.back() == s.config.max_power_w);
}
