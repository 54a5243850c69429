#include "vigil/features.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace vigil::features {

namespace {

using spectral::BandName;
using spectral::BandPowerTable;

// A band power below this fraction of the channel's total is treated
// as absent: dividing by it would amplify FFT noise, not neural
// activity. Relative, so uniform channel gains cannot change the
// verdict.
constexpr double kDegenerateBandFraction = 1e-12;

struct RoleInfo {
    ChannelRole role;
    std::string_view name;
    std::string_view key;
};

constexpr std::array<RoleInfo, kNumRoles> kRoles = {{
    {ChannelRole::AF3, "AF3", "af3"},
    {ChannelRole::AF4, "AF4", "af4"},
    {ChannelRole::F3, "F3", "f3"},
    {ChannelRole::F4, "F4", "f4"},
    {ChannelRole::FC6, "FC6", "fc6"},
    {ChannelRole::F8, "F8", "f8"},
    {ChannelRole::P8, "P8", "p8"},
}};

std::size_t role_index(ChannelRole role) { return static_cast<std::size_t>(role); }

std::string trim(std::string_view s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string_view::npos) return {};
    const auto end = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(begin, end - begin + 1));
}

[[noreturn]] void undefined(std::string_view what) {
    throw FeatureUndefinedError("features: " + std::string(what) +
                                " carries no power; feature undefined for this epoch");
}

// Denominator guard shared by the three formulas.
void require_power(double denominator, double channel_total, std::string_view what) {
    if (denominator <= 0.0 || denominator < kDegenerateBandFraction * channel_total)
        undefined(what);
}

}  // namespace

const std::array<ChannelRole, kNumRoles>& all_roles() {
    static const std::array<ChannelRole, kNumRoles> roles = {
        ChannelRole::AF3, ChannelRole::AF4, ChannelRole::F3, ChannelRole::F4,
        ChannelRole::FC6, ChannelRole::F8,  ChannelRole::P8};
    return roles;
}

std::string_view role_name(ChannelRole role) { return kRoles[role_index(role)].name; }

std::string_view role_key(ChannelRole role) { return kRoles[role_index(role)].key; }

std::optional<ChannelRole> parse_role(std::string_view text) {
    for (const auto& info : kRoles) {
        if (text == info.name) return info.role;
        if (text == info.key) return info.role;
    }
    return std::nullopt;
}

ChannelMap ChannelMap::default_sleep_edf() {
    ChannelMap map;
    for (ChannelRole role : all_roles()) map.labels_[role_index(role)] = "EEG Fpz-Cz";
    map.labels_[role_index(ChannelRole::P8)] = "EEG Pz-Oz";
    return map;
}

ChannelMap ChannelMap::parse(std::string_view text) {
    ChannelMap map;
    std::array<bool, kNumRoles> seen{};
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string entry = trim(line);
        if (entry.empty()) continue;
        const auto eq = entry.find('=');
        if (eq == std::string::npos)
            throw InputError("channel map line " + std::to_string(line_no) +
                             ": expected \"ROLE = EDF_LABEL\", got \"" + entry + "\"");
        const std::string role_txt = trim(entry.substr(0, eq));
        const std::string label = trim(entry.substr(eq + 1));
        const auto role = parse_role(role_txt);
        if (!role)
            throw InputError("channel map line " + std::to_string(line_no) +
                             ": unknown role \"" + role_txt +
                             "\" (expected AF3, AF4, F3, F4, FC6, F8 or P8)");
        if (label.empty())
            throw InputError("channel map line " + std::to_string(line_no) +
                             ": empty label for role " + role_txt);
        if (seen[role_index(*role)])
            throw InputError("channel map line " + std::to_string(line_no) + ": role " +
                             std::string(role_name(*role)) + " mapped twice");
        seen[role_index(*role)] = true;
        map.labels_[role_index(*role)] = label;
    }
    std::string missing;
    for (ChannelRole role : all_roles())
        if (!seen[role_index(role)]) missing += " " + std::string(role_name(role));
    if (!missing.empty())
        throw InputError("channel map: missing roles:" + missing);
    return map;
}

ChannelMap ChannelMap::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("channel map: cannot open \"" + path.string() + "\"");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

const std::string& ChannelMap::label(ChannelRole role) const {
    return labels_[role_index(role)];
}

void ChannelMap::set_label(ChannelRole role, std::string label) {
    labels_[role_index(role)] = std::move(label);
}

std::vector<std::string> ChannelMap::distinct_labels() const {
    std::vector<std::string> out;
    for (ChannelRole role : all_roles()) {
        const std::string& l = labels_[role_index(role)];
        if (std::find(out.begin(), out.end(), l) == out.end()) out.push_back(l);
    }
    return out;
}

void ChannelMap::validate_against(const edf::EdfRecording& recording) const {
    for (ChannelRole role : all_roles())
        edf::select_channel(recording, labels_[role_index(role)]);  // throws if absent
}

double arousal(const BandPowerTable& bp) {
    double alpha_sum = 0.0, beta_sum = 0.0, total_sum = 0.0;
    for (ChannelRole role : {ChannelRole::AF3, ChannelRole::AF4, ChannelRole::F3, ChannelRole::F4}) {
        const auto& p = bp.at(role_name(role));
        alpha_sum += p[BandName::Alpha];
        beta_sum += p[BandName::Beta];
        total_sum += p.total;
    }
    require_power(beta_sum, total_sum, "frontal beta (AF3+AF4+F3+F4)");
    return alpha_sum / beta_sum;
}

double valence(const BandPowerTable& bp) {
    const auto& f4 = bp.at("F4");
    const auto& f3 = bp.at("F3");
    require_power(f4[BandName::Beta], f4.total, "F4 beta");
    require_power(f3[BandName::Beta], f3.total, "F3 beta");
    return f4[BandName::Alpha] / f4[BandName::Beta] - f3[BandName::Alpha] / f3[BandName::Beta];
}

double dominance(const BandPowerTable& bp) {
    double sum = 0.0;
    for (ChannelRole role : {ChannelRole::FC6, ChannelRole::F8, ChannelRole::P8}) {
        const auto& p = bp.at(role_name(role));
        require_power(p[BandName::Alpha], p.total,
                      std::string(role_name(role)) + " alpha");
        sum += p[BandName::Beta] / p[BandName::Alpha];
    }
    return sum;
}

spectral::BandPowerTable role_band_powers(const spectral::Epoch& epoch, const ChannelMap& map) {
    // One FFT per distinct physical channel, shared across roles.
    std::map<std::string, spectral::ChannelBandPower> by_label;
    for (const std::string& label : map.distinct_labels()) {
        const spectral::Spectrum spectrum =
            spectral::fft(epoch.channel(label), epoch.sample_rate_hz);
        by_label.emplace(label, spectral::channel_band_powers(spectrum));
    }
    spectral::BandPowerTable table;
    for (ChannelRole role : all_roles())
        table.put(std::string(role_name(role)), by_label.at(map.label(role)));
    return table;
}

FeatureVector extract_features(const spectral::BandPowerTable& role_powers) {
    FeatureVector fv;
    fv.arousal = arousal(role_powers);
    fv.valence = valence(role_powers);
    fv.dominance = dominance(role_powers);
    return fv;
}

FeatureVector extract_features(const spectral::Epoch& epoch, const ChannelMap& map) {
    FeatureVector fv = extract_features(role_band_powers(epoch, map));
    fv.epoch_start_s = epoch.start_time_s;
    return fv;
}

}  // namespace vigil::features
