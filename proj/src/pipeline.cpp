#include "vigil/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "vigil/errors.hpp"

namespace vigil::pipeline {

bool logging_enabled() {
    const char* value = std::getenv("VIGIL_LOG");
    if (value == nullptr) return false;
    std::string v(value);
    return !(v.empty() || v == "0" || v == "off" || v == "false");
}

void log_line(const std::string& message) {
    if (logging_enabled()) std::fprintf(stderr, "[vigil] %s\n", message.c_str());
}

namespace {

struct WindowData {
    spectral::EpochWindow window;
    spectral::BandPowerTable table;  // keyed by role name
    bool defined = false;
    features::FeatureVector features;
};

struct MappedChannels {
    double sample_rate_hz = 0.0;
    std::size_t num_samples = 0;
    std::vector<std::pair<std::string, edf::ChannelView>> views;  // one per distinct label
};

MappedChannels resolve_channels(const edf::EdfRecording& recording,
                                const features::ChannelMap& map) {
    MappedChannels mapped;
    for (const std::string& label : map.distinct_labels()) {
        edf::ChannelView view = edf::select_channel(recording, label);
        if (mapped.views.empty()) {
            mapped.sample_rate_hz = view.sample_rate_hz;
            mapped.num_samples = view.samples.size();
        } else {
            if (view.sample_rate_hz != mapped.sample_rate_hz) {
                throw InputError("mapped channels disagree on sample rate: '" +
                                 mapped.views.front().first + "' runs at " +
                                 std::to_string(mapped.sample_rate_hz) + " Hz but '" + label +
                                 "' runs at " + std::to_string(view.sample_rate_hz) + " Hz");
            }
            if (view.samples.size() != mapped.num_samples) {
                throw InputError("mapped channels disagree on length: '" +
                                 mapped.views.front().first + "' has " +
                                 std::to_string(mapped.num_samples) + " samples but '" + label +
                                 "' has " + std::to_string(view.samples.size()));
            }
        }
        mapped.views.emplace_back(label, view);
    }
    return mapped;
}

spectral::Epoch slice_epoch(const MappedChannels& mapped, const spectral::EpochWindow& window,
                            double epoch_seconds) {
    spectral::Epoch epoch;
    epoch.sample_rate_hz = mapped.sample_rate_hz;
    epoch.start_time_s = window.start_time_s;
    epoch.duration_s = epoch_seconds;
    for (const auto& [label, view] : mapped.views) {
        auto begin = view.samples.begin() + static_cast<std::ptrdiff_t>(window.start_index);
        epoch.add_channel(label,
                          std::vector<double>(begin, begin + static_cast<std::ptrdiff_t>(
                                                                 window.length)));
    }
    return epoch;
}

std::string format_seconds(double t) { return report::format_value(t) + "s"; }

report::VariableCalibration summarize(const std::string& name,
                                      const fuzzy::CalibratedVariable& var) {
    report::VariableCalibration out;
    out.name = name;
    out.centers = var.centers;
    out.universe_lo = var.variable.lo;
    out.universe_hi = var.variable.hi;
    out.fallback = var.fallback;
    return out;
}

}  // namespace

report::DrowsinessReport analyze_recording(const edf::EdfRecording& recording,
                                           const AnalysisOptions& options,
                                           std::string_view input_name) {
    if (!(options.epoch_seconds > 0.0)) throw InputError("epoch length must be positive");
    if (options.rules.empty()) throw InputError("rule base is empty");
    options.channel_map.validate_against(recording);

    MappedChannels mapped = resolve_channels(recording, options.channel_map);
    log_line("input '" + std::string(input_name) + "': " +
             std::to_string(recording.header.num_signals) + " signals, mapped channels at " +
             report::format_value(mapped.sample_rate_hz) + " Hz, " +
             std::to_string(mapped.num_samples) + " samples");

    // Throws when the recording is shorter than one epoch window.
    auto windows = spectral::epoch_windows(mapped.num_samples, mapped.sample_rate_hz,
                                           options.epoch_seconds, options.mode);

    report::DrowsinessReport out;
    out.input_path = std::string(input_name);
    out.epoch_seconds = options.epoch_seconds;
    out.epoch_mode = std::string(spectral::epoch_mode_name(options.mode));
    out.sample_rate_hz = mapped.sample_rate_hz;
    for (features::ChannelRole role : features::all_roles()) {
        out.channel_map.emplace_back(std::string(features::role_name(role)),
                                     options.channel_map.label(role));
    }
    out.total_windows = windows.size();
    out.rule_count = options.rules.size();
    if (options.mode == spectral::EpochMode::All) {
        std::size_t used = windows.size() * windows.front().length;
        out.discarded_tail_s =
            static_cast<double>(mapped.num_samples - used) / mapped.sample_rate_hz;
    }

    // Pass 1: band powers and features per window.
    std::vector<WindowData> data;
    data.reserve(windows.size());
    for (const spectral::EpochWindow& window : windows) {
        WindowData item;
        item.window = window;
        spectral::Epoch epoch = slice_epoch(mapped, window, options.epoch_seconds);
        item.table = features::role_band_powers(epoch, options.channel_map);
        try {
            item.features = features::extract_features(item.table);
            item.features.epoch_start_s = window.start_time_s;
            item.defined = true;
        } catch (const FeatureUndefinedError& e) {
            item.defined = false;
            out.flagged.push_back({window.start_time_s, e.what()});
            log_line("flagged epoch at " + format_seconds(window.start_time_s) + ": " + e.what());
        }
        data.push_back(std::move(item));
    }

    std::vector<double> arousal_series;
    std::vector<double> valence_series;
    std::vector<double> dominance_series;
    for (const WindowData& item : data) {
        if (!item.defined) continue;
        arousal_series.push_back(item.features.arousal);
        valence_series.push_back(item.features.valence);
        dominance_series.push_back(item.features.dominance);
    }

    if (arousal_series.empty()) {
        log_line("no epoch produced defined features; nothing to score");
        return out;
    }

    // Calibrate the scoring system on the defined feature series.
    fuzzy::CalibratedVariable arousal =
        fuzzy::calibrate_variable("A", arousal_series, options.fcm);
    fuzzy::CalibratedVariable valence =
        fuzzy::calibrate_variable("V", valence_series, options.fcm);
    fuzzy::CalibratedVariable dominance =
        fuzzy::calibrate_variable("D", dominance_series, options.fcm);
    out.calibration.push_back(summarize("arousal", arousal));
    out.calibration.push_back(summarize("valence", valence));
    out.calibration.push_back(summarize("dominance", dominance));
    for (const report::VariableCalibration& cal : out.calibration) {
        log_line("calibrated " + cal.name + ": centers " + report::format_value(cal.centers[0]) +
                 ", " + report::format_value(cal.centers[1]) + ", " +
                 report::format_value(cal.centers[2]) +
                 (cal.fallback ? " (uniform fallback)" : ""));
    }

    fuzzy::CalibratedSystem system = fuzzy::make_system(std::move(arousal), std::move(valence),
                                                        std::move(dominance), options.rules);

    // Pass 2: score every defined epoch.
    for (const WindowData& item : data) {
        if (!item.defined) continue;
        fuzzy::Classification scored = fuzzy::classify(system, item.features);
        report::EpochRow row;
        row.start_time_s = item.window.start_time_s;
        for (std::size_t r = 0; r < features::kNumRoles; ++r) {
            const spectral::ChannelBandPower& power =
                item.table.at(features::role_name(features::all_roles()[r]));
            for (std::size_t b = 0; b < report::kReportBands.size(); ++b) {
                row.band_power[r][b] = power[report::kReportBands[b]];
            }
        }
        row.arousal = item.features.arousal;
        row.valence = item.features.valence;
        row.dominance = item.features.dominance;
        row.ds = scored.ds;
        row.indeterminate = scored.indeterminate;
        row.rule_strengths = std::move(scored.rule_strengths);
        out.rows.push_back(std::move(row));
    }
    log_line("scored " + std::to_string(out.rows.size()) + " of " +
             std::to_string(out.total_windows) + " windows (" +
             std::to_string(out.flagged.size()) + " flagged, " +
             std::to_string(out.indeterminate_count()) + " indeterminate)");
    return out;
}

namespace {

AnalysisOptions options_from_config(const PipelineConfig& config) {
    AnalysisOptions options;
    options.epoch_seconds = config.epoch_seconds;
    options.mode = config.mode;
    if (config.channel_map_path) {
        options.channel_map = features::ChannelMap::load(*config.channel_map_path);
    }
    if (config.rules_path) options.rules = fuzzy::load_rules(*config.rules_path);
    options.fcm = config.fcm;
    return options;
}

void write_series_file(const std::filesystem::path& path, std::string_view header,
                       const std::vector<std::array<double, 2>>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open plot file: " + path.string());
    out << header << '\n';
    for (const auto& row : rows) {
        out << report::format_value(row[0]) << ',' << report::format_value(row[1]) << '\n';
    }
    out.flush();
    if (!out) throw IoError("failed writing plot file: " + path.string());
}

}  // namespace

std::vector<std::filesystem::path> emit_plot_data(const edf::EdfRecording& recording,
                                                  const AnalysisOptions& options,
                                                  const report::DrowsinessReport& report,
                                                  const std::filesystem::path& plot_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(plot_dir, ec);
    if (ec) throw IoError("cannot create plot directory " + plot_dir.string() + ": " + ec.message());

    const features::ChannelRole lead_role = features::all_roles().front();
    const std::string label = options.channel_map.label(lead_role);
    edf::ChannelView view = edf::select_channel(recording, label);
    const double rate = view.sample_rate_hz;
    const auto window_len = static_cast<std::size_t>(std::llround(options.epoch_seconds * rate));

    const std::array<spectral::BandName, 4> bands = {
        spectral::BandName::Delta, spectral::BandName::Theta, spectral::BandName::Alpha,
        spectral::BandName::Beta};

    std::vector<fs::path> written;
    for (const report::EpochRow& row : report.rows) {
        const auto start =
            static_cast<std::size_t>(std::llround(row.start_time_s * rate));
        if (start + window_len > view.samples.size()) {
            throw InputError("epoch at " + report::format_value(row.start_time_s) +
                             "s extends past the recording");
        }
        spectral::Epoch epoch;
        epoch.sample_rate_hz = rate;
        epoch.start_time_s = row.start_time_s;
        epoch.duration_s = options.epoch_seconds;
        epoch.add_channel(label,
                          std::vector<double>(view.samples.begin() +
                                                  static_cast<std::ptrdiff_t>(start),
                                              view.samples.begin() +
                                                  static_cast<std::ptrdiff_t>(start + window_len)));

        const std::string stem = "epoch_" + report::format_value(row.start_time_s) + "_";
        auto path_for = [&](std::string_view series) {
            return plot_dir / (stem + std::string(series) + ".csv");
        };

        std::vector<std::array<double, 2>> series(window_len);
        const auto& raw = epoch.channels.front().second;
        for (std::size_t i = 0; i < window_len; ++i) {
            series[i] = {row.start_time_s + static_cast<double>(i) / rate, raw[i]};
        }
        write_series_file(path_for("raw"), "time_s,value", series);
        written.push_back(path_for("raw"));

        std::map<spectral::BandName, std::vector<double>> waveforms;
        for (spectral::BandName band : bands) {
            waveforms[band] = spectral::band_waveform(epoch, label, spectral::canonical_band(band));
            for (std::size_t i = 0; i < window_len; ++i) {
                series[i] = {row.start_time_s + static_cast<double>(i) / rate,
                             waveforms[band][i]};
            }
            auto path = path_for(spectral::band_label(band));
            write_series_file(path, "time_s,value", series);
            written.push_back(path);
        }

        for (std::size_t i = 0; i < window_len; ++i) {
            series[i] = {waveforms[spectral::BandName::Alpha][i],
                         waveforms[spectral::BandName::Beta][i]};
        }
        write_series_file(path_for("alpha_vs_beta"), "alpha,beta", series);
        written.push_back(path_for("alpha_vs_beta"));
    }
    return written;
}

report::DrowsinessReport analyze_file(const PipelineConfig& config) {
    edf::EdfRecording recording = edf::read_edf_file(config.input);
    return analyze_recording(recording, options_from_config(config), config.input.string());
}

PipelineResult run_pipeline(const PipelineConfig& config) {
    edf::EdfRecording recording = edf::read_edf_file(config.input);
    AnalysisOptions options = options_from_config(config);

    PipelineResult result;
    result.report = analyze_recording(recording, options, config.input.string());

    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(config.out_dir, ec);
    if (ec) {
        throw IoError("cannot create output directory " + config.out_dir.string() + ": " +
                      ec.message());
    }
    result.report_path = report::save_report(result.report, config.out_dir, config.format);
    if (result.report.rows.empty()) {
        std::fprintf(stderr,
                     "warning: no epoch produced defined features; report has no rows\n");
    }
    log_line("wrote " + result.report_path.string());

    if (config.plots) {
        result.plot_paths =
            emit_plot_data(recording, options, result.report, config.out_dir / "plots");
        log_line("wrote " + std::to_string(result.plot_paths.size()) + " plot series files");
    }
    return result;
}

}  // namespace vigil::pipeline
