// Copyright 2026 The pasmsim Authors
// SPDX-License-Identifier: Apache-2.0
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "pasmsim/analysis.hpp"
#include "pasmsim/config.hpp"
#include "pasmsim/detect.hpp"
#include "pasmsim/harness.hpp"
#include "pasmsim/modem.hpp"

namespace py = pybind11;
using namespace pasm;

namespace {

std::vector<std::string> detector_names(const SweepConfig& sc) {
  std::vector<std::string> out;
  out.reserve(sc.detectors.size());
  for (auto k : sc.detectors) out.push_back(detector_name(k));
  return out;
}

void set_detector_names(SweepConfig& sc, const std::vector<std::string>& names) {
  sc.detectors.clear();
  for (const auto& n : names) sc.detectors.push_back(detector_from_name(n));
}

DetectionResult detect_py(const std::string& kind, const Eigen::VectorXcd& y,
                          const Eigen::MatrixXcd& h_eff, const PasmConfig& cfg,
                          const VampParams& vp) {
  auto cc = build_constellation(cfg);
  switch (detector_from_name(kind)) {
    case DetectorKind::ml: return ml_detect(y, h_eff, cfg, cc);
    case DetectorKind::zf: return linear_detect(y, h_eff, cfg, cc, LinearKind::zf);
    case DetectorKind::mmse: return linear_detect(y, h_eff, cfg, cc, LinearKind::mmse);
    case DetectorKind::sic_zf: return sic_detect(y, h_eff, cfg, cc, LinearKind::zf);
    case DetectorKind::sic_mmse: return sic_detect(y, h_eff, cfg, cc, LinearKind::mmse);
    case DetectorKind::vamp: return vamp_detect(y, h_eff, cfg, cc, vp);
  }
  throw std::invalid_argument("unknown detector kind");
}

}  // namespace

PYBIND11_MODULE(_pasmsim, m) {
  m.doc() = "link-level simulator for pinching-antenna spatial multiplexing";

  py::class_<PasmConfig>(m, "Config")
      .def(py::init<>())
      .def_readwrite("n_wg", &PasmConfig::n_wg)
      .def_readwrite("n_pa", &PasmConfig::n_pa)
      .def_readwrite("n_rx", &PasmConfig::n_rx)
      .def_readwrite("mod_b", &PasmConfig::mod_b)
      .def_readwrite("mod_p", &PasmConfig::mod_p)
      .def_readwrite("power_w", &PasmConfig::power_w)
      .def_readwrite("noise_w", &PasmConfig::noise_w)
      .def_readwrite("region_m", &PasmConfig::region_m)
      .def_readwrite("feed_height_m", &PasmConfig::feed_height_m)
      .def_property_readonly("n_tx", &PasmConfig::n_tx)
      .def_property_readonly("delta", &PasmConfig::delta)
      .def("validate", &PasmConfig::validate)
      .def("__repr__", [](const PasmConfig& c) {
        return "Config(n_wg=" + std::to_string(c.n_wg) + ", n_pa=" + std::to_string(c.n_pa) +
               ", n_rx=" + std::to_string(c.n_rx) + ", mod_b=" + std::to_string(c.mod_b) +
               ", mod_p=" + std::to_string(c.mod_p) + ")";
      });

  py::class_<VampParams>(m, "VampParams")
      .def(py::init<>())
      .def_readwrite("max_iters", &VampParams::max_iters)
      .def_readwrite("damping", &VampParams::damping)
      .def_readwrite("tol", &VampParams::tol)
      .def_readwrite("gamma_min", &VampParams::gamma_min)
      .def_readwrite("gamma_max", &VampParams::gamma_max)
      .def_readwrite("llr_clip", &VampParams::llr_clip);

  py::class_<SweepConfig>(m, "SweepConfig")
      .def(py::init<>())
      .def_readwrite("system", &SweepConfig::system)
      .def_readwrite("vamp", &SweepConfig::vamp)
      .def_property("detectors", &detector_names, &set_detector_names)
      .def_readwrite("power_dbm", &SweepConfig::power_dbm)
      .def_readwrite("frames", &SweepConfig::frames)
      .def_readwrite("seed", &SweepConfig::seed)
      .def_readwrite("ls_block_frames", &SweepConfig::ls_block_frames)
      .def_readwrite("stop_errors", &SweepConfig::stop_errors)
      .def_readwrite("pssm_geometry", &SweepConfig::pssm_geometry)
      .def_readwrite("record_wall_time", &SweepConfig::record_wall_time)
      .def_readwrite("bound_ls_draws", &SweepConfig::bound_ls_draws)
      .def_readwrite("bound_use_approx", &SweepConfig::bound_use_approx)
      .def_readwrite("bound_match_sim_blocks", &SweepConfig::bound_match_sim_blocks)
      .def_readwrite("profile", &SweepConfig::profile);

  py::class_<BerRecord>(m, "BerRecord")
      .def_readonly("power_dbm", &BerRecord::power_dbm)
      .def_readonly("detector", &BerRecord::detector)
      .def_readonly("frames", &BerRecord::frames)
      .def_readonly("bits", &BerRecord::bits)
      .def_readonly("errors", &BerRecord::errors)
      .def_readonly("ber", &BerRecord::ber)
      .def_readonly("ci95", &BerRecord::ci95)
      .def_readonly("iters_mean", &BerRecord::iters_mean)
      .def_readonly("seconds", &BerRecord::seconds)
      .def("__repr__", [](const BerRecord& r) {
        return "BerRecord(" + std::to_string(r.power_dbm) + " dBm, " + r.detector +
               ", ber=" + std::to_string(r.ber) + ")";
      });

  py::class_<DetectionResult>(m, "DetectionResult")
      .def_readonly("bits", &DetectionResult::bits)
      .def_readonly("llr_b", &DetectionResult::llr_b)
      .def_readonly("llr_p", &DetectionResult::llr_p)
      .def_readonly("x_est", &DetectionResult::x_est)
      .def_readonly("iters", &DetectionResult::iters)
      .def_readonly("converged", &DetectionResult::converged);

  m.def("profiles", &profile_names, "available preset names");
  m.def("profile", &profile_config, py::arg("name"), "sweep preset by name");
  m.def("config_from_json", &config_from_json, py::arg("text"));
  m.def("config_to_json", &config_to_json, py::arg("config"));

  m.def("run_sweep", &run_sweep, py::arg("config"),
        py::call_guard<py::gil_scoped_release>(), "Monte-Carlo BER sweep");
  m.def("run_bound", &run_bound, py::arg("config"),
        py::call_guard<py::gil_scoped_release>(), "analytical union-bound curve");
  m.def("run_pssm_baseline", &run_pssm_baseline, py::arg("config"),
        py::call_guard<py::gil_scoped_release>(), "fixed-array baseline sweep");

  m.def("csv_string", &csv_string, py::arg("records"));
  m.def("crossing_power_dbm", &crossing_power_dbm, py::arg("records"), py::arg("detector"),
        py::arg("target"), "power where a BER curve crosses `target` (None if never)");

  m.def("detect", &detect_py, py::arg("kind"), py::arg("y"), py::arg("h_eff"),
        py::arg("config"), py::arg("vamp") = VampParams{},
        "run one detector on an effective channel; kinds: ml zf mmse sic-zf sic-mmse vamp");

  m.def("spectral_efficiency", &spectral_efficiency, py::arg("config"));
  m.def(
      "constellation",
      [](const PasmConfig& cfg) { return build_constellation(cfg).points; }, py::arg("config"),
      "composite points, one column per label");
  m.def(
      "map_bits",
      [](const std::vector<uint8_t>& bits, const PasmConfig& cfg) {
        return map_bits(bits, cfg, build_constellation(cfg)).x;
      },
      py::arg("bits"), py::arg("config"), "element-domain signal for one frame of bits");

  m.def(
      "flops",
      [](const PasmConfig& cfg, int vamp_iters) {
        auto f = flop_estimate(cfg, vamp_iters);
        py::dict d;
        d["ml"] = f.ml;
        d["vamp_per_iter"] = f.vamp_per_iter;
        d["vamp"] = f.vamp;
        d["mmse"] = f.mmse;
        return d;
      },
      py::arg("config"), py::arg("vamp_iters") = 10, "operation-count model per frame");

  m.attr("__version__") = "0.1.0";
}
