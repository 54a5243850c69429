#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vigil/edf.hpp"
#include "vigil/features.hpp"
#include "vigil/fuzzy.hpp"
#include "vigil/report.hpp"
#include "vigil/spectral.hpp"

namespace vigil::pipeline {

// Analysis knobs shared by the file-based and in-memory entry points.
struct AnalysisOptions {
    double epoch_seconds = 20.0;
    spectral::EpochMode mode = spectral::EpochMode::All;
    features::ChannelMap channel_map = features::ChannelMap::default_sleep_edf();
    fuzzy::RuleBase rules = fuzzy::default_rules();
    fuzzy::FcmParams fcm{};
};

// Full file-based run configuration (mirrors the CLI).
struct PipelineConfig {
    std::filesystem::path input;
    std::optional<std::filesystem::path> channel_map_path;
    std::optional<std::filesystem::path> rules_path;
    double epoch_seconds = 20.0;
    spectral::EpochMode mode = spectral::EpochMode::All;
    std::string format = "csv";
    bool plots = false;
    std::filesystem::path out_dir = ".";
    fuzzy::FcmParams fcm{};
};

struct PipelineResult {
    report::DrowsinessReport report;
    std::filesystem::path report_path;
    std::vector<std::filesystem::path> plot_paths;
};

// Two-pass analysis of an in-memory recording: extract features per
// epoch, calibrate the input variables on the defined series, then
// score every defined epoch. Epochs with undefined features are
// flagged and skipped; they still count toward total_windows.
report::DrowsinessReport analyze_recording(const edf::EdfRecording& recording,
                                           const AnalysisOptions& options = {},
                                           std::string_view input_name = "<memory>");

// analyze_recording applied to an EDF file on disk.
report::DrowsinessReport analyze_file(const PipelineConfig& config);

// analyze_file plus outputs: report.csv/report.json in out_dir and,
// when requested, per-epoch series under out_dir/plots/.
PipelineResult run_pipeline(const PipelineConfig& config);

// Per-epoch series written when plots are enabled: the raw signal of
// the first mapped role plus its band-limited waveforms, and an
// alpha-versus-beta pairing.
std::vector<std::filesystem::path> emit_plot_data(const edf::EdfRecording& recording,
                                                  const AnalysisOptions& options,
                                                  const report::DrowsinessReport& report,
                                                  const std::filesystem::path& plot_dir);

// True when the VIGIL_LOG environment variable asks for diagnostics.
bool logging_enabled();
void log_line(const std::string& message);

}  // namespace vigil::pipeline
