#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vigil/edf.hpp"
#include "vigil/spectral.hpp"

namespace vigil::features {

// The seven electrode roles the feature formulas draw on: six frontal
// positions plus one parietal, named after the 10-20 system.
enum class ChannelRole { AF3, AF4, F3, F4, FC6, F8, P8 };

constexpr std::size_t kNumRoles = 7;
const std::array<ChannelRole, kNumRoles>& all_roles();
std::string_view role_name(ChannelRole role);       // "AF3"
std::string_view role_key(ChannelRole role);        // "af3" (report keys)
std::optional<ChannelRole> parse_role(std::string_view text);

// Total map role -> EDF channel label. Labels may repeat (several
// roles reading one physical channel).
class ChannelMap {
  public:
    // All six frontal roles on "EEG Fpz-Cz", P8 on "EEG Pz-Oz": the
    // mapping used for sleep-EDF polysomnograms, which carry only two
    // EEG channels. Valence is identically zero under it, since F3 and
    // F4 read the same channel.
    static ChannelMap default_sleep_edf();

    // Plain-text config: one "ROLE = EDF_LABEL" entry per line, '#'
    // comments, every role required exactly once.
    static ChannelMap parse(std::string_view text);
    static ChannelMap load(const std::filesystem::path& path);

    const std::string& label(ChannelRole role) const;
    void set_label(ChannelRole role, std::string label);

    // Mapped labels with duplicates removed, in first-use order.
    std::vector<std::string> distinct_labels() const;

    // Every mapped label must exist in the recording.
    void validate_against(const edf::EdfRecording& recording) const;

  private:
    std::array<std::string, kNumRoles> labels_;
};

// The three per-epoch scalars.
struct FeatureVector {
    double arousal = 0.0;
    double valence = 0.0;
    double dominance = 0.0;
    double epoch_start_s = 0.0;
};

// Alpha/beta ratio features over a role-keyed band power table. Each
// throws FeatureUndefinedError when a denominator carries no power
// (exactly zero, or negligible next to the channel's total).
//
//   arousal   = sum_alpha(AF3,AF4,F3,F4) / sum_beta(AF3,AF4,F3,F4)
//   valence   = alpha(F4)/beta(F4) - alpha(F3)/beta(F3)
//   dominance = beta(FC6)/alpha(FC6) + beta(F8)/alpha(F8) + beta(P8)/alpha(P8)
double arousal(const spectral::BandPowerTable& bp);
double valence(const spectral::BandPowerTable& bp);
double dominance(const spectral::BandPowerTable& bp);

// Band powers for every role in one epoch, keyed by role name. Each
// distinct physical channel is transformed once and shared across the
// roles mapped to it.
spectral::BandPowerTable role_band_powers(const spectral::Epoch& epoch, const ChannelMap& map);

// Full feature evaluation for one epoch: band powers via the spectral
// layer, then the three formulas. Propagates FeatureUndefinedError.
FeatureVector extract_features(const spectral::Epoch& epoch, const ChannelMap& map);

// Same composition over an already-computed role-keyed table.
FeatureVector extract_features(const spectral::BandPowerTable& role_powers);

}  // namespace vigil::features
