#pragma once

// Synthetic recordings shared by the test binaries. The standard
// fixture mimics a two-channel polysomnogram at 100 Hz whose rhythm
// flips from beta-dominant (alert) to alpha-dominant (drowsy) halfway
// through.

#include <cstddef>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "vigil/edf.hpp"

namespace fixtures {

constexpr double kRate = 100.0;
constexpr std::size_t kEpochSamples = 2000;  // 20 s at 100 Hz

// Strong 20 Hz rhythm with a faint 10 Hz undertone.
inline std::vector<double> alert_template() {
    auto x = oracles::tone(kEpochSamples, kRate, 20.0, 2.0);
    oracles::add_tone(x, kRate, 10.0, 0.2);
    return x;
}

// Strong 10 Hz rhythm with a faint 20 Hz undertone.
inline std::vector<double> drowsy_template() {
    auto x = oracles::tone(kEpochSamples, kRate, 10.0, 2.0);
    oracles::add_tone(x, kRate, 20.0, 0.2);
    return x;
}

// Both standard channels carry `signal`, sliced into one-second
// records.
inline vigil::edf::EdfRecording two_channel_recording(const std::vector<double>& signal,
                                                      double rate = kRate,
                                                      double physical_range = 10.0) {
    vigil::edf::SyntheticChannel a;
    a.label = "EEG Fpz-Cz";
    a.samples = signal;
    a.sample_rate_hz = rate;
    a.physical_min = -physical_range;
    a.physical_max = physical_range;
    vigil::edf::SyntheticChannel b = a;
    b.label = "EEG Pz-Oz";
    return vigil::edf::make_recording({a, b});
}

// Like two_channel_recording but with the physical range equal to the
// digital range, so calibration is the identity map and integer-valued
// samples -- a flat dropout in particular -- survive the file format
// bit-exactly. Sample values must lie in [-32768, 32767].
inline vigil::edf::EdfRecording two_channel_recording_exact(const std::vector<double>& signal,
                                                            double rate = kRate) {
    vigil::edf::SyntheticChannel a;
    a.label = "EEG Fpz-Cz";
    a.samples = signal;
    a.sample_rate_hz = rate;
    a.physical_min = -32768.0;
    a.physical_max = 32767.0;
    vigil::edf::SyntheticChannel b = a;
    b.label = "EEG Pz-Oz";
    return vigil::edf::make_recording({a, b});
}

// `alert_epochs` copies of the alert template followed by
// `drowsy_epochs` copies of the drowsy one.
inline vigil::edf::EdfRecording alert_drowsy_recording(std::size_t alert_epochs,
                                                       std::size_t drowsy_epochs) {
    const auto alert = alert_template();
    const auto drowsy = drowsy_template();
    std::vector<double> signal;
    signal.reserve((alert_epochs + drowsy_epochs) * kEpochSamples);
    for (std::size_t e = 0; e < alert_epochs; ++e) {
        signal.insert(signal.end(), alert.begin(), alert.end());
    }
    for (std::size_t e = 0; e < drowsy_epochs; ++e) {
        signal.insert(signal.end(), drowsy.begin(), drowsy.end());
    }
    return two_channel_recording(signal);
}

}  // namespace fixtures
