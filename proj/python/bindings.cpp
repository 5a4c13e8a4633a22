#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hybridbf/beamdesign.hpp"
#include "hybridbf/channel.hpp"
#include "hybridbf/codebook.hpp"
#include "hybridbf/config.hpp"
#include "hybridbf/harness.hpp"
#include "hybridbf/metrics.hpp"
#include "hybridbf/sensing.hpp"

namespace py = pybind11;
using namespace hbf;

namespace {

MeasurementMatrix as_phi(const CMatrix& m) { return MeasurementMatrix{m}; }

std::vector<std::string> mode_names(const std::vector<Mode>& modes) {
  std::vector<std::string> out;
  for (Mode m : modes) out.emplace_back(to_string(m));
  return out;
}

}  // namespace

PYBIND11_MODULE(_hybridbf, m) {
  m.doc() = "Iterative compressive-sensing hybrid beamforming for mmWave MIMO-OFDM";
  m.attr("__version__") = std::string(kVersion);

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  // channel
  py::class_<PathSet>(m, "PathSet")
      .def(py::init<>())
      .def_readwrite("gains", &PathSet::gains)
      .def_readwrite("delays", &PathSet::delays)
      .def_readwrite("aoa", &PathSet::aoa)
      .def_readwrite("aod", &PathSet::aod)
      .def("__len__", &PathSet::size);

  py::class_<ChannelRealization>(m, "ChannelRealization")
      .def_readonly("paths", &ChannelRealization::paths)
      .def_readonly("sample_period", &ChannelRealization::sample_period)
      .def_readonly("rolloff", &ChannelRealization::rolloff)
      .def_readonly("freq", &ChannelRealization::freq);

  m.def("array_response", &array_response, py::arg("angle"), py::arg("num_elements"));
  m.def("raised_cosine", &raised_cosine, py::arg("t"), py::arg("sample_period"),
        py::arg("rolloff"));
  m.def(
      "sample_paths",
      [](std::uint64_t seed, int num_paths, int cp_length, double sample_period) {
        Rng rng(seed);
        return sample_paths(rng, num_paths, cp_length, sample_period);
      },
      py::arg("seed"), py::arg("num_paths"), py::arg("cp_length"), py::arg("sample_period") = 1.0);
  m.def("frequency_channel", &frequency_channel, py::arg("paths"), py::arg("num_subcarriers"),
        py::arg("sample_period"), py::arg("num_rx"), py::arg("num_tx"), py::arg("rolloff"));

  // codebook
  py::class_<BeamCodebook>(m, "BeamCodebook")
      .def_readonly("vectors", &BeamCodebook::vectors)
      .def_readonly("angles", &BeamCodebook::angles)
      .def("__len__", &BeamCodebook::size);
  py::class_<AngleDictionary>(m, "AngleDictionary")
      .def_readonly("atoms", &AngleDictionary::atoms)
      .def_readonly("grid_angles", &AngleDictionary::grid_angles)
      .def("__len__", &AngleDictionary::size);
  m.def("build_codebook", &build_codebook, py::arg("num_antennas"), py::arg("num_beams"));
  m.def("build_dictionary", &build_dictionary, py::arg("num_antennas"),
        py::arg("resolution_deg"));

  // sensing
  m.def(
      "generate_measurement_matrix",
      [](std::uint64_t seed, Eigen::Index rows, Eigen::Index num_antennas) {
        Rng rng(seed);
        return generate_measurement_matrix(rng, rows, num_antennas).entries;
      },
      py::arg("seed"), py::arg("rows"), py::arg("num_antennas"));
  py::class_<SparseEstimate>(m, "SparseEstimate")
      .def_readonly("support", &SparseEstimate::support)
      .def_readonly("coefficients", &SparseEstimate::coefficients)
      .def_readonly("effective_channel", &SparseEstimate::effective_channel)
      .def_readonly("residual_history", &SparseEstimate::residual_history);
  m.def(
      "somp_recover",
      [](const MatrixSeries& meas, const CMatrix& phi, const AngleDictionary& dict,
         int max_sparsity, double residual_tol) {
        return somp_recover(meas, as_phi(phi), dict, max_sparsity, residual_tol);
      },
      py::arg("measurements"), py::arg("phi"), py::arg("dictionary"), py::arg("max_sparsity"),
      py::arg("residual_tol") = 1e-6);

  // beamdesign
  py::class_<MmseTarget>(m, "MmseTarget")
      .def_readonly("columns", &MmseTarget::columns)
      .def_readonly("zero_columns", &MmseTarget::zero_columns);
  py::class_<AnalogSelection>(m, "AnalogSelection")
      .def_readonly("analog", &AnalogSelection::analog)
      .def_readonly("indices", &AnalogSelection::indices)
      .def_readonly("basis", &AnalogSelection::basis)
      .def_readonly("degenerate", &AnalogSelection::degenerate);
  py::class_<DigitalStage>(m, "DigitalStage")
      .def_readonly("f_bb", &DigitalStage::f_bb)
      .def_readonly("w_bb", &DigitalStage::w_bb)
      .def_readonly("zero_channel_subcarriers", &DigitalStage::zero_channel_subcarriers);
  py::class_<HybridBeamformer>(m, "HybridBeamformer")
      .def(py::init<>())
      .def_readwrite("f_rf", &HybridBeamformer::f_rf)
      .def_readwrite("w_rf", &HybridBeamformer::w_rf)
      .def_readwrite("f_bb", &HybridBeamformer::f_bb)
      .def_readwrite("w_bb", &HybridBeamformer::w_bb);
  py::class_<IterationRecord>(m, "IterationRecord")
      .def_readonly("w_indices", &IterationRecord::w_indices)
      .def_readonly("f_indices", &IterationRecord::f_indices)
      .def_readonly("degenerate", &IterationRecord::degenerate);
  py::class_<DesignResult>(m, "DesignResult")
      .def_readonly("beamformer", &DesignResult::beamformer)
      .def_readonly("initial_f_indices", &DesignResult::initial_f_indices)
      .def_readonly("trace", &DesignResult::trace)
      .def_readonly("converged", &DesignResult::converged);
  m.def("mmse_target", &mmse_target, py::arg("effective"), py::arg("reg"));
  m.def("select_analog", &select_analog, py::arg("target"), py::arg("codebook"));
  m.def("digital_stage", &digital_stage, py::arg("w_rf"), py::arg("f_rf"),
        py::arg("rx_effective"), py::arg("num_streams"));

  // metrics
  m.def(
      "spectral_efficiency",
      [](const MatrixSeries& h, const HybridBeamformer& bf, double power, double noise_var) {
        return spectral_efficiency(h, bf, power, noise_var).per_subcarrier;
      },
      py::arg("channel"), py::arg("beamformer"), py::arg("power"), py::arg("noise_var") = 1.0,
      "Per-subcarrier rates in bits/s/Hz.");
  m.def(
      "full_digital_bound",
      [](const MatrixSeries& h, double power, double noise_var, int num_streams) {
        return full_digital_bound(h, power, noise_var, num_streams).per_subcarrier;
      },
      py::arg("channel"), py::arg("power"), py::arg("noise_var"), py::arg("num_streams"));

  // config
  py::class_<ScenarioConfig>(m, "ScenarioConfig")
      .def(py::init<>())
      .def_readwrite("N_t", &ScenarioConfig::N_t)
      .def_readwrite("N_r", &ScenarioConfig::N_r)
      .def_readwrite("N_RF", &ScenarioConfig::N_RF)
      .def_readwrite("N_s", &ScenarioConfig::N_s)
      .def_readwrite("N", &ScenarioConfig::N)
      .def_readwrite("N_cp", &ScenarioConfig::N_cp)
      .def_readwrite("L", &ScenarioConfig::L)
      .def_readwrite("codebook_size", &ScenarioConfig::codebook_size)
      .def_readwrite("dictionary_resolution", &ScenarioConfig::dictionary_resolution)
      .def_readwrite("rolloff", &ScenarioConfig::rolloff)
      .def_readwrite("snr_grid_dB", &ScenarioConfig::snr_grid_dB)
      .def_readwrite("trials", &ScenarioConfig::trials)
      .def_readwrite("max_iterations", &ScenarioConfig::max_iterations)
      .def_readwrite("seed", &ScenarioConfig::seed)
      .def_property_readonly("mode", [](const ScenarioConfig& c) { return mode_names(c.mode); })
      .def(
          "set",
          [](ScenarioConfig& c, const std::string& key, const std::string& value) {
            apply_setting(c, key, value);
          },
          py::arg("key"), py::arg("value"), "Set any field from its config-file text.")
      .def("violations", &config_violations)
      .def("text", &config_text);
  m.def("parse_config", [](const std::string& text) { return parse_config(text); },
        py::arg("text"));
  m.def("load_config", &load_config, py::arg("path"));

  // harness
  m.def(
      "run_trial",
      [](const ScenarioConfig& cfg, double snr_db, std::uint64_t trial) {
        check_config(cfg);
        py::gil_scoped_release release;
        const TrialResult r = run_trial(cfg, snr_db, trial);
        std::vector<std::pair<std::string, double>> out;
        for (const auto& mr : r.rates) out.emplace_back(to_string(mr.mode), mr.rate);
        return out;
      },
      py::arg("config"), py::arg("snr_db"), py::arg("trial"),
      "Rates per configured mode as (mode, bits/s/Hz) pairs.");
  py::class_<CellRecord>(m, "CellRecord")
      .def_readonly("snr_db", &CellRecord::snr_db)
      .def_property_readonly("mode", [](const CellRecord& r) { return std::string(to_string(r.mode)); })
      .def_readonly("mean_rate", &CellRecord::mean_rate)
      .def_readonly("std_err", &CellRecord::std_err)
      .def_readonly("trials", &CellRecord::trials_used)
      .def_readonly("degenerate_std_err", &CellRecord::degenerate_std_err);
  py::class_<SweepResult>(m, "SweepResult")
      .def_readonly("records", &SweepResult::records)
      .def("csv", &csv_text)
      .def("metadata", &metadata_text)
      .def("write", &emit_csv, py::arg("path"));
  m.def(
      "run_sweep",
      [](const ScenarioConfig& cfg, unsigned threads) {
        py::gil_scoped_release release;
        return run_sweep(cfg, SweepOptions{threads});
      },
      py::arg("config"), py::arg("threads") = 0);
}
