#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vigil/errors.hpp"

namespace vigil::edf {

// Global header of an EDF/EDF+ file. Text fields are stored trimmed;
// the on-disk representation is fixed-width space-padded ASCII.
struct EdfHeader {
    std::string version;       // 8 chars, "0" for EDF
    std::string patient_id;    // 80 chars
    std::string recording_id;  // 80 chars
    std::string start_date;    // dd.mm.yy
    std::string start_time;    // hh.mm.ss
    std::string reserved;      // 44 chars, "EDF+C" marks a continuous EDF+ file
    int header_bytes = 0;      // 256 + 256 * num_signals
    int num_records = 0;
    double record_duration_s = 1.0;
    int num_signals = 0;
};

// Per-signal header. digital_min/max bound the stored 16-bit samples,
// physical_min/max give the calibrated range in physical_dim units.
struct SignalHeader {
    std::string label;         // 16 chars
    std::string transducer;    // 80 chars
    std::string physical_dim;  // 8 chars, e.g. "uV"
    double physical_min = 0.0;
    double physical_max = 0.0;
    int digital_min = 0;
    int digital_max = 0;
    std::string prefiltering;  // 80 chars
    int samples_per_record = 0;
    std::string reserved;      // 32 chars
};

// One fully decoded recording. Samples are kept in physical units
// (double); the raw digital values are retained so a recording can be
// re-serialized bit-exactly. Immutable after construction and safe to
// read from multiple threads.
struct EdfRecording {
    EdfHeader header;
    std::vector<SignalHeader> signals;
    std::vector<std::vector<double>> physical;    // per signal
    std::vector<std::vector<int16_t>> digital;    // per signal

    double sample_rate_hz(std::size_t signal_index) const;
    double duration_s() const;
    bool is_annotation(std::size_t signal_index) const;
};

// A borrowed view of one channel's samples.
struct ChannelView {
    std::span<const double> samples;
    double sample_rate_hz = 0.0;
    std::size_t signal_index = 0;
};

// Affine digital-to-physical calibration:
//   physical_min + (d - digital_min) * (physical_max - physical_min)
//                                    / (digital_max - digital_min)
double digital_to_physical(int d, const SignalHeader& cal);

// Inverse of digital_to_physical, rounded to the nearest integer.
// Throws InputError when the value does not quantize into
// [digital_min, digital_max].
int16_t physical_to_digital(double p, const SignalHeader& cal);

// Decode a complete EDF/EDF+ file held in memory. Validates header
// invariants, record accounting and calibration ranges; throws
// InputError on any violation.
EdfRecording parse_edf(std::span<const std::uint8_t> bytes);

// Serialize a recording back to EDF bytes. parse_edf(write_edf(r))
// reproduces r's digital samples bit-exactly.
std::vector<std::uint8_t> write_edf(const EdfRecording& recording);

// File convenience wrappers. Filesystem failures throw IoError.
EdfRecording read_edf_file(const std::filesystem::path& path);
void save_edf(const EdfRecording& recording, const std::filesystem::path& path);

// Look a channel up by label (whitespace-trimmed comparison).
// Annotation signals are never selectable. Unknown labels raise an
// InputError naming the available channels; duplicate labels raise an
// InputError for ambiguity.
ChannelView select_channel(const EdfRecording& recording, std::string_view label);

// Labels of all waveform (non-annotation) channels, in signal order.
std::vector<std::string> channel_labels(const EdfRecording& recording);

// Ingredients for building a recording in memory (tests, synthetic
// data, python callers).
struct SyntheticChannel {
    std::string label;
    std::vector<double> samples;  // physical units
    double sample_rate_hz = 100.0;
    double physical_min = -1000.0;
    double physical_max = 1000.0;
    int digital_min = -32768;
    int digital_max = 32767;
    std::string physical_dim = "uV";
};

// Assemble a valid EdfRecording from physical-unit channel data.
// samples_per_record is sample_rate_hz * record_duration_s (must be a
// positive integer) and every channel must supply the same whole
// number of records. Samples are quantized through the channel's
// calibration; values outside the physical range throw InputError.
EdfRecording make_recording(const std::vector<SyntheticChannel>& channels,
                            double record_duration_s = 1.0);

}  // namespace vigil::edf
