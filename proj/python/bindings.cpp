// Python bindings for the drowsiness analysis core. The module keeps a
// deliberately small, dictionary-shaped surface: exact transforms, band
// powers, c-means calibration, synthetic recording authoring, and the
// full analysis pipeline returning the same structure as report.json.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <json.hpp>

#include <complex>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "vigil/edf.hpp"
#include "vigil/errors.hpp"
#include "vigil/features.hpp"
#include "vigil/fuzzy.hpp"
#include "vigil/pipeline.hpp"
#include "vigil/report.hpp"
#include "vigil/spectral.hpp"

namespace py = pybind11;
using namespace vigil;

namespace {

py::object to_python(const nlohmann::ordered_json& j) {
    switch (j.type()) {
        case nlohmann::ordered_json::value_t::null:
            return py::none();
        case nlohmann::ordered_json::value_t::boolean:
            return py::bool_(j.get<bool>());
        case nlohmann::ordered_json::value_t::number_integer:
            return py::int_(j.get<long long>());
        case nlohmann::ordered_json::value_t::number_unsigned:
            return py::int_(j.get<unsigned long long>());
        case nlohmann::ordered_json::value_t::number_float:
            return py::float_(j.get<double>());
        case nlohmann::ordered_json::value_t::string:
            return py::str(j.get<std::string>());
        case nlohmann::ordered_json::value_t::array: {
            py::list out;
            for (const auto& item : j) out.append(to_python(item));
            return out;
        }
        case nlohmann::ordered_json::value_t::object: {
            py::dict out;
            for (const auto& [key, value] : j.items()) out[py::str(key)] = to_python(value);
            return out;
        }
        default:
            return py::none();
    }
}

std::vector<std::complex<double>> py_fft(const std::vector<std::complex<double>>& x) {
    return spectral::fft_complex(x);
}

std::vector<std::complex<double>> py_ifft(const std::vector<std::complex<double>>& x) {
    return spectral::ifft_complex(x);
}

py::dict py_band_powers(const std::vector<double>& samples, double sample_rate_hz) {
    const spectral::ChannelBandPower powers =
        spectral::channel_band_powers(spectral::fft(samples, sample_rate_hz));
    py::dict out;
    for (std::size_t i = 0; i < spectral::kNumBands; ++i) {
        const auto name = static_cast<spectral::BandName>(i);
        out[py::str(std::string(spectral::band_label(name)))] = powers[name];
    }
    out["total"] = powers.total;
    return out;
}

py::dict py_fcm_cluster(const std::vector<double>& values, int clusters, double fuzzifier,
                        double tol, int max_iter) {
    fuzzy::FcmParams params;
    params.clusters = clusters;
    params.fuzzifier = fuzzifier;
    params.tol = tol;
    params.max_iter = max_iter;
    const fuzzy::FcmResult result = fuzzy::fcm_cluster(values, params);
    py::dict out;
    out["centers"] = result.centers;
    out["memberships"] = result.memberships;
    out["objective_history"] = result.objective_history;
    out["iterations"] = result.iterations;
    out["converged"] = result.converged;
    return out;
}

void py_save_recording(const std::filesystem::path& path, const py::dict& channels,
                       double sample_rate_hz, double physical_range,
                       double record_duration_s) {
    std::vector<edf::SyntheticChannel> synth;
    for (const auto& item : channels) {
        edf::SyntheticChannel ch;
        ch.label = item.first.cast<std::string>();
        ch.samples = item.second.cast<std::vector<double>>();
        ch.sample_rate_hz = sample_rate_hz;
        ch.physical_min = -physical_range;
        ch.physical_max = physical_range;
        synth.push_back(std::move(ch));
    }
    edf::save_edf(edf::make_recording(synth, record_duration_s), path);
}

pipeline::AnalysisOptions build_options(const py::object& channel_map, double epoch_seconds,
                                        const std::string& epoch_mode,
                                        const py::object& rules) {
    pipeline::AnalysisOptions options;
    options.epoch_seconds = epoch_seconds;
    options.mode = spectral::parse_epoch_mode(epoch_mode);
    if (!channel_map.is_none()) {
        for (const auto& item : channel_map.cast<py::dict>()) {
            const auto role_text = item.first.cast<std::string>();
            const auto role = features::parse_role(role_text);
            if (!role) throw InputError("unknown electrode role: " + role_text);
            options.channel_map.set_label(*role, item.second.cast<std::string>());
        }
    }
    if (!rules.is_none()) options.rules = fuzzy::parse_rules(rules.cast<std::string>());
    return options;
}

py::object py_analyze(const std::filesystem::path& path, const py::object& channel_map,
                      double epoch_seconds, const std::string& epoch_mode,
                      const py::object& rules) {
    const pipeline::AnalysisOptions options =
        build_options(channel_map, epoch_seconds, epoch_mode, rules);
    const edf::EdfRecording recording = edf::read_edf_file(path);
    const std::string name = path.string();
    const report::DrowsinessReport rep = pipeline::analyze_recording(recording, options, name);
    return to_python(nlohmann::ordered_json::parse(report::render_json(rep)));
}

}  // namespace

PYBIND11_MODULE(_vigil, m) {
    m.doc() = "Drowsiness scoring from EEG recordings: exact spectral transforms, "
              "rhythm band powers, fuzzy c-means calibration, and Mamdani inference.";

    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const IoError& e) {
            PyErr_SetString(PyExc_OSError, e.what());
        } catch (const Error& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        }
    });

    m.def("fft", &py_fft, py::arg("x"),
          "Exact length-n DFT of a complex sequence (no zero padding).");
    m.def("ifft", &py_ifft, py::arg("x"),
          "Inverse DFT normalized by 1/n; ifft(fft(x)) == x.");
    m.def("band_powers", &py_band_powers, py::arg("samples"), py::arg("sample_rate_hz"),
          "Mean-square power of one channel in each rhythm band (delta, theta, "
          "alpha, mu, beta, gamma) plus the non-DC total.");
    m.def("fcm_cluster", &py_fcm_cluster, py::arg("values"), py::arg("clusters") = 3,
          py::arg("fuzzifier") = 2.0, py::arg("tol") = 1e-6, py::arg("max_iter") = 300,
          "Fuzzy c-means over a 1-D point set with deterministic quantile seeding. "
          "Returns centers (ascending), per-point memberships, the objective "
          "history, the iteration count, and a convergence flag.");
    m.def("save_recording", &py_save_recording, py::arg("path"), py::arg("channels"),
          py::arg("sample_rate_hz") = 100.0, py::arg("physical_range") = 1000.0,
          py::arg("record_duration_s") = 1.0,
          "Write a recording to an EDF file. channels maps label -> samples "
          "(physical units); every channel shares the given rate and symmetric "
          "physical range.");
    m.def("analyze", &py_analyze, py::arg("path"), py::arg("channel_map") = py::none(),
          py::arg("epoch_seconds") = 20.0, py::arg("epoch_mode") = "all",
          py::arg("rules") = py::none(),
          "Score an EDF recording epoch by epoch. Returns the full report as a "
          "dictionary (same structure as report.json). channel_map overrides "
          "electrode roles (e.g. {'F4': 'EEG Pz-Oz'}); rules is override rule "
          "text like 'A=S & V=S & D=S -> DS=S', one rule per line.");
}
