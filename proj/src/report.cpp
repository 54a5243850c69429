#include "vigil/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "vigil/errors.hpp"

namespace vigil::report {

std::size_t DrowsinessReport::indeterminate_count() const {
    std::size_t n = 0;
    for (const EpochRow& row : rows) n += row.indeterminate ? 1 : 0;
    return n;
}

std::optional<double> DrowsinessReport::mean_ds() const {
    double sum = 0.0;
    std::size_t n = 0;
    for (const EpochRow& row : rows) {
        if (row.indeterminate) continue;
        sum += row.ds;
        ++n;
    }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
}

std::optional<double> DrowsinessReport::fraction_above_half() const {
    std::size_t above = 0;
    std::size_t n = 0;
    for (const EpochRow& row : rows) {
        if (row.indeterminate) continue;
        ++n;
        if (row.ds > 0.5) ++above;
    }
    if (n == 0) return std::nullopt;
    return static_cast<double>(above) / static_cast<double>(n);
}

std::string format_value(double v) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.9g", v);
    return buffer;
}

std::vector<std::string> csv_header(std::size_t rule_count) {
    std::vector<std::string> columns;
    columns.emplace_back("start_time_s");
    for (features::ChannelRole role : features::all_roles()) {
        for (spectral::BandName band : kReportBands) {
            columns.push_back(std::string(features::role_key(role)) + "_" +
                              std::string(spectral::band_label(band)));
        }
    }
    columns.emplace_back("arousal");
    columns.emplace_back("valence");
    columns.emplace_back("dominance");
    columns.emplace_back("ds");
    columns.emplace_back("indeterminate");
    for (std::size_t r = 1; r <= rule_count; ++r) {
        columns.push_back("rule_" + std::to_string(r));
    }
    return columns;
}

void write_csv(const DrowsinessReport& report, std::ostream& out) {
    const auto columns = csv_header(report.rule_count);
    for (std::size_t i = 0; i < columns.size(); ++i) {
        out << (i == 0 ? "" : ",") << columns[i];
    }
    out << '\n';
    for (const EpochRow& row : report.rows) {
        out << format_value(row.start_time_s);
        for (std::size_t role = 0; role < features::kNumRoles; ++role) {
            for (std::size_t band = 0; band < kReportBands.size(); ++band) {
                out << ',' << format_value(row.band_power[role][band]);
            }
        }
        out << ',' << format_value(row.arousal);
        out << ',' << format_value(row.valence);
        out << ',' << format_value(row.dominance);
        out << ',' << format_value(row.ds);
        out << ',' << (row.indeterminate ? 1 : 0);
        for (double strength : row.rule_strengths) {
            out << ',' << format_value(strength);
        }
        out << '\n';
    }
}

std::string render_csv(const DrowsinessReport& report) {
    std::ostringstream out;
    write_csv(report, out);
    return out.str();
}

std::string render_json(const DrowsinessReport& report, int indent) {
    using json = nlohmann::ordered_json;
    json root;
    root["input"] = report.input_path;
    root["epoch_seconds"] = report.epoch_seconds;
    root["epoch_mode"] = report.epoch_mode;
    root["sample_rate_hz"] = report.sample_rate_hz;

    json channel_map = json::object();
    for (const auto& [role, label] : report.channel_map) channel_map[role] = label;
    root["channel_map"] = channel_map;

    root["epochs"] = {
        {"total_windows", report.total_windows},
        {"analyzed", report.rows.size()},
        {"flagged", report.flagged.size()},
        {"indeterminate", report.indeterminate_count()},
        {"discarded_tail_s", report.discarded_tail_s},
    };

    json calibration = json::object();
    for (const VariableCalibration& var : report.calibration) {
        calibration[var.name] = {
            {"centers", var.centers},
            {"universe", {var.universe_lo, var.universe_hi}},
            {"fallback", var.fallback},
        };
    }
    root["calibration"] = calibration;
    root["rule_count"] = report.rule_count;

    json summary = json::object();
    if (auto mean = report.mean_ds()) summary["mean_ds"] = *mean;
    else summary["mean_ds"] = nullptr;
    if (auto fraction = report.fraction_above_half()) summary["fraction_above_half"] = *fraction;
    else summary["fraction_above_half"] = nullptr;
    root["summary"] = summary;

    json rows = json::array();
    for (const EpochRow& row : report.rows) {
        json entry;
        entry["start_time_s"] = row.start_time_s;
        json bands = json::object();
        for (std::size_t role = 0; role < features::kNumRoles; ++role) {
            json per_band = json::object();
            for (std::size_t band = 0; band < kReportBands.size(); ++band) {
                per_band[std::string(spectral::band_label(kReportBands[band]))] =
                    row.band_power[role][band];
            }
            bands[std::string(features::role_key(features::all_roles()[role]))] = per_band;
        }
        entry["band_power"] = bands;
        entry["arousal"] = row.arousal;
        entry["valence"] = row.valence;
        entry["dominance"] = row.dominance;
        entry["ds"] = row.ds;
        entry["indeterminate"] = row.indeterminate;
        entry["rule_strengths"] = row.rule_strengths;
        rows.push_back(std::move(entry));
    }
    root["rows"] = rows;

    json flagged = json::array();
    for (const FlaggedEpoch& epoch : report.flagged) {
        flagged.push_back({{"start_time_s", epoch.start_time_s}, {"reason", epoch.reason}});
    }
    root["flagged_epochs"] = flagged;

    return root.dump(indent) + "\n";
}

std::filesystem::path save_report(const DrowsinessReport& report,
                                  const std::filesystem::path& dir, std::string_view format) {
    std::filesystem::path path;
    std::string body;
    if (format == "csv") {
        path = dir / "report.csv";
        body = render_csv(report);
    } else if (format == "json") {
        path = dir / "report.json";
        body = render_json(report);
    } else {
        throw InputError("unknown report format: " + std::string(format) +
                         " (expected csv or json)");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open output file: " + path.string());
    out << body;
    out.flush();
    if (!out) throw IoError("failed writing output file: " + path.string());
    return path;
}

}  // namespace vigil::report
