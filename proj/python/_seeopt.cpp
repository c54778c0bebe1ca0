#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "seeopt/channel.hpp"
#include "seeopt/experiment.hpp"
#include "seeopt/miso.hpp"
#include "seeopt/siso.hpp"

namespace py = pybind11;
using namespace seeopt;
namespace ex = seeopt::experiment;

namespace {

py::dict solution_dict(const miso::BeamformerSolution& s) {
  py::dict d;
  d["method"] = miso::to_string(s.method);
  d["feasible"] = s.feasible;
  d["zeta"] = s.zeta_bits_per_joule;
  d["eta"] = s.eta_bps_hz;
  d["transmit_power"] = s.transmit_power_w;
  d["w"] = s.w;
  d["sdp_iterations"] = s.sdp_iterations;
  return d;
}

py::dict row_dict(const ex::ResultRow& r) {
  py::dict d;
  d["sweep_value"] = r.sweep_value;
  d["trial_index"] = r.trial_index;
  d["seed"] = r.seed;
  d["zeta"] = r.zeta;
  d["eta"] = r.eta;
  d["transmit_power"] = r.transmit_power;
  d["feasible"] = r.feasible;
  d["iterations"] = r.iterations;
  d["status"] = r.status;
  return d;
}

py::dict summary_dict(const ex::SummaryRow& r) {
  py::dict d;
  d["sweep_value"] = r.sweep_value;
  d["trials"] = r.trials;
  d["feasible"] = r.feasible;
  d["infeasible"] = r.infeasible;
  d["failed"] = r.failed;
  d["mean_zeta"] = r.mean_zeta;
  d["se_zeta"] = r.se_zeta;
  d["mean_eta"] = r.mean_eta;
  d["se_eta"] = r.se_eta;
  d["mean_zeta_all"] = r.mean_zeta_all;
  return d;
}

}  // namespace

PYBIND11_MODULE(_seeopt, m) {
  m.doc() = "Secrecy energy efficiency optimisation (C++ core)";

  static py::exception<Error> error_type(m, "SeeoptError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error_type.ptr())(e.what());
      exc.attr("code") = std::string(errc_name(e.code()));
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  py::class_<SystemConfig>(m, "SystemConfig")
      .def(py::init<>())
      .def_readwrite("bandwidth_hz", &SystemConfig::bandwidth_hz)
      .def_readwrite("circuit_power_w", &SystemConfig::circuit_power_w)
      .def_readwrite("max_power_w", &SystemConfig::max_power_w)
      .def_readwrite("qos_floor_bps_hz", &SystemConfig::qos_floor_bps_hz)
      .def_readwrite("temp_r_kelvin", &SystemConfig::temp_r_kelvin)
      .def_readwrite("temp_e_kelvin", &SystemConfig::temp_e_kelvin)
      .def_readwrite("distance_km", &SystemConfig::distance_km)
      .def_readwrite("distance_e_km", &SystemConfig::distance_e_km)
      .def_readwrite("n_antennas", &SystemConfig::n_antennas);

  py::class_<NoisePowers>(m, "NoisePowers")
      .def(py::init<double, double>(), py::arg("sigma2_r_w"), py::arg("sigma2_e_w"))
      .def_readwrite("sigma2_r_w", &NoisePowers::sigma2_r_w)
      .def_readwrite("sigma2_e_w", &NoisePowers::sigma2_e_w);

  py::class_<ChannelPair>(m, "ChannelPair")
      .def(py::init<ComplexVec, ComplexVec>(), py::arg("h_tr"), py::arg("h_te"))
      .def_readwrite("h_tr", &ChannelPair::h_tr)
      .def_readwrite("h_te", &ChannelPair::h_te);

  m.def("path_loss_db", &path_loss_db, py::arg("d_km"));
  m.def("noise_powers", &noise_powers, py::arg("config"));
  m.def("generate_channel", &generate_channel, py::arg("config"), py::arg("seed"));
  m.def("secrecy_rate_miso", &secrecy_rate_miso, py::arg("w"), py::arg("channel"), py::arg("noise"));
  m.def("secrecy_rate_siso", &secrecy_rate_siso, py::arg("p_w"), py::arg("channel"), py::arg("noise"));
  m.def("secrecy_ee", &secrecy_ee, py::arg("eta"), py::arg("power_w"), py::arg("config"));

  m.def(
      "solve_miso_qos",
      [](const ChannelPair& ch, const NoisePowers& n, const SystemConfig& c) {
        return solution_dict(miso::solve_with_qos(ch, n, c));
      },
      py::arg("channel"), py::arg("noise"), py::arg("config"));
  m.def(
      "solve_miso_zf",
      [](const ChannelPair& ch, const NoisePowers& n, const SystemConfig& c) {
        return solution_dict(miso::solve_zf(ch, n, c));
      },
      py::arg("channel"), py::arg("noise"), py::arg("config"));
  m.def(
      "solve_miso_noqos",
      [](const ChannelPair& ch, const NoisePowers& n, const SystemConfig& c) {
        return solution_dict(miso::solve_without_qos(ch, n, c));
      },
      py::arg("channel"), py::arg("noise"), py::arg("config"));
  m.def(
      "tradeoff_miso",
      [](const ChannelPair& ch, const NoisePowers& n, const SystemConfig& c, const std::vector<double>& powers) {
        py::list out;
        for (const auto& pt : miso::tradeoff_curve_miso(ch, n, c, powers).points) {
          out.append(py::make_tuple(pt.power_w, pt.eta, pt.zeta));
        }
        return out;
      },
      py::arg("channel"), py::arg("noise"), py::arg("config"), py::arg("powers"));

  m.def(
      "solve_siso",
      [](const ChannelPair& ch, const NoisePowers& n, const SystemConfig& c, double delta) {
        const auto params = siso::make_params(ch, n, c);
        const auto r = siso::dinkelbach(params, delta);
        py::list trace;
        for (const auto& s : r.trace) trace.append(py::make_tuple(s.q, s.p, s.f_value));
        py::dict d;
        d["zeta"] = r.zeta_star;
        d["eta"] = r.eta_star;
        d["transmit_power"] = r.p_star_w;
        d["p_min"] = params.p_min;
        d["iterations"] = r.iterations;
        d["trace"] = trace;
        return d;
      },
      py::arg("channel"), py::arg("noise"), py::arg("config"), py::arg("delta") = 1e-3);
  m.def(
      "siso_grid_optimum",
      [](const ChannelPair& ch, const NoisePowers& n, const SystemConfig& c, long points) {
        const auto g = siso::grid_oracle(siso::make_params(ch, n, c), points);
        return py::make_tuple(g.p_star, g.zeta_star);
      },
      py::arg("channel"), py::arg("noise"), py::arg("config"), py::arg("points") = 1000000);
  m.def(
      "siso_zeta_of_eta",
      [](double eta, const ChannelPair& ch, const NoisePowers& n, const SystemConfig& c) {
        return siso::zeta_of_eta(eta, siso::make_params(ch, n, c), c.bandwidth_hz);
      },
      py::arg("eta"), py::arg("channel"), py::arg("noise"), py::arg("config"));

  m.def(
      "run_scenario",
      [](const std::vector<std::pair<std::string, std::string>>& settings) {
        ex::Scenario s;
        for (const auto& [k, v] : settings) ex::apply_setting(s, k, v);
        ex::validate(s);
        ex::RunResult r;
        {
          py::gil_scoped_release release;
          r = ex::run_scenario(s);
        }
        py::list rows, summary;
        for (const auto& row : r.rows) rows.append(row_dict(row));
        for (const auto& row : r.summary) summary.append(summary_dict(row));
        return py::make_tuple(rows, summary);
      },
      py::arg("settings"),
      "Runs a batch from (key, value) scenario settings; returns (rows, summary) as lists of dicts.");
}
