#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vigil/features.hpp"
#include "vigil/spectral.hpp"

namespace vigil::report {

// Bands reported per channel role, in column order.
constexpr std::array<spectral::BandName, 4> kReportBands = {
    spectral::BandName::Delta,
    spectral::BandName::Theta,
    spectral::BandName::Alpha,
    spectral::BandName::Beta,
};

// One analyzed epoch. Band powers are indexed [role][band] following
// features::all_roles() and kReportBands.
struct EpochRow {
    double start_time_s = 0.0;
    std::array<std::array<double, kReportBands.size()>, features::kNumRoles> band_power{};
    double arousal = 0.0;
    double valence = 0.0;
    double dominance = 0.0;
    double ds = 0.5;
    bool indeterminate = false;          // no rule fired; ds holds the 0.5 sentinel
    std::vector<double> rule_strengths;  // one per rule in the active rule base
};

// An epoch that was skipped because a feature denominator vanished.
struct FlaggedEpoch {
    double start_time_s = 0.0;
    std::string reason;
};

// How one input variable's terms were placed.
struct VariableCalibration {
    std::string name;  // "arousal", "valence", "dominance"
    std::array<double, 3> centers{};
    double universe_lo = 0.0;
    double universe_hi = 1.0;
    bool fallback = false;  // uniform partition instead of clustering
};

struct DrowsinessReport {
    std::string input_path;
    double epoch_seconds = 20.0;
    std::string epoch_mode = "all";
    double sample_rate_hz = 0.0;
    std::vector<std::pair<std::string, std::string>> channel_map;  // role -> EDF label
    std::size_t total_windows = 0;   // windows examined, analyzed + flagged
    double discarded_tail_s = 0.0;   // trailing samples shorter than one epoch
    std::size_t rule_count = 0;
    std::vector<VariableCalibration> calibration;
    std::vector<EpochRow> rows;
    std::vector<FlaggedEpoch> flagged;

    std::size_t indeterminate_count() const;
    // Mean drowsiness and the fraction of epochs above 0.5, over rows
    // with a determinate score; empty when there are none.
    std::optional<double> mean_ds() const;
    std::optional<double> fraction_above_half() const;
};

// Shortest-faithful numeric formatting used for every CSV cell (%.9g).
std::string format_value(double v);

std::vector<std::string> csv_header(std::size_t rule_count);
void write_csv(const DrowsinessReport& report, std::ostream& out);
std::string render_csv(const DrowsinessReport& report);
std::string render_json(const DrowsinessReport& report, int indent = 2);

// Writes report.csv or report.json (per `format`) into `dir` and
// returns the path written.
std::filesystem::path save_report(const DrowsinessReport& report,
                                  const std::filesystem::path& dir, std::string_view format);

}  // namespace vigil::report
