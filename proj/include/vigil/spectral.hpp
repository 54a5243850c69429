#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vigil/errors.hpp"

namespace vigil::spectral {

// The classical EEG rhythm bands. Intervals are half-open [low, high)
// so shared printed endpoints (13 Hz) resolve deterministically to the
// higher band. Gamma is open-ended and clamps to Nyquist.
enum class BandName { Delta, Theta, Alpha, Mu, Beta, Gamma };

struct Band {
    BandName name;
    double low_hz;
    double high_hz;  // may be +infinity (Gamma)
};

constexpr std::size_t kNumBands = 6;

// Canonical table: Delta [0,4), Theta [4,7), Alpha [8,13), Mu [8,12),
// Beta [13,30), Gamma [30, Nyquist].
Band canonical_band(BandName name);
const std::array<Band, kNumBands>& canonical_bands();
std::string_view band_label(BandName name);  // "delta", "theta", ...

// Forward DFT coefficients of one real channel. Coefficient k sits at
// frequency k * sample_rate / n for k <= n/2; the upper half mirrors
// conjugate-symmetrically for real input.
struct Spectrum {
    std::vector<std::complex<double>> coeffs;
    double sample_rate_hz = 0.0;

    std::size_t size() const { return coeffs.size(); }
    double bin_hz(std::size_t k) const {
        return static_cast<double>(k) * sample_rate_hz / static_cast<double>(coeffs.size());
    }
};

// Exact length-n DFT of a complex sequence, any n >= 1:
//   X[k] = sum_j x[j] * exp(-2*pi*i*j*k/n)
// Power-of-two lengths use iterative radix-2; everything else goes
// through Bluestein's chirp-z reduction, so no zero padding ever shifts
// the bin grid.
std::vector<std::complex<double>> fft_complex(std::span<const std::complex<double>> x);

// Inverse transform, normalized by 1/n: ifft_complex(fft_complex(x)) == x.
std::vector<std::complex<double>> ifft_complex(std::span<const std::complex<double>> x);

// Forward DFT of a real channel tagged with its sample rate.
Spectrum fft(std::span<const double> samples, double sample_rate_hz);

// Zero every coefficient outside the band. Bins 1..n/2 are kept when
// low_hz <= bin frequency < high_hz (the Nyquist bin counts as in-band
// when high_hz exceeds Nyquist); conjugate partners follow; DC is
// always zeroed. Throws InputError when the band lies entirely above
// Nyquist. Idempotent.
Spectrum band_mask(const Spectrum& spectrum, const Band& band);

// Mean-square signal power attributable to the band:
//   (1/n^2) * sum over in-band bins and their conjugate partners of |X[k]|^2
// DC never contributes.
double band_power(const Spectrum& spectrum, const Band& band);

// Mean-square power of everything except DC.
double total_power(const Spectrum& spectrum);

// Power in every canonical band plus the non-DC total, for one channel.
struct ChannelBandPower {
    std::array<double, kNumBands> band{};  // indexed by BandName
    double total = 0.0;

    double operator[](BandName name) const { return band[static_cast<std::size_t>(name)]; }
};

ChannelBandPower channel_band_powers(const Spectrum& spectrum);

// Per-channel band powers for one epoch, keyed by channel name (the
// feature layer re-keys these by electrode role).
struct BandPowerTable {
    std::vector<std::pair<std::string, ChannelBandPower>> channels;

    const ChannelBandPower& at(std::string_view key) const;
    bool contains(std::string_view key) const;
    void put(std::string key, ChannelBandPower powers);
};

// A fixed-duration analysis window cut from a recording; may carry
// several named channels sliced over the same time span.
struct Epoch {
    double sample_rate_hz = 0.0;
    double start_time_s = 0.0;
    double duration_s = 0.0;
    std::vector<std::pair<std::string, std::vector<double>>> channels;

    const std::vector<double>& channel(std::string_view label) const;
    void add_channel(std::string label, std::vector<double> samples);
    std::size_t samples_per_channel() const;
};

enum class EpochMode { Start, Middle, End, All };

EpochMode parse_epoch_mode(std::string_view text);  // "start" | "middle" | "end" | "all"
std::string_view epoch_mode_name(EpochMode mode);

struct EpochWindow {
    std::size_t start_index = 0;
    std::size_t length = 0;
    double start_time_s = 0.0;
};

// Window placement for a signal of n samples. Start/Middle/End return
// a single window at that position; All tiles the signal with
// consecutive non-overlapping windows and drops the partial tail.
// Throws InputError when the signal is shorter than one window or the
// window does not hold a whole number of samples.
std::vector<EpochWindow> epoch_windows(std::size_t n_samples, double sample_rate_hz,
                                       double duration_s, EpochMode mode);

// Cut one signal into single-channel epochs.
std::vector<Epoch> make_epochs(std::span<const double> signal, double sample_rate_hz,
                               double duration_s, EpochMode mode,
                               std::string_view label = "signal");

// Time-domain waveform of one band: inverse FFT of the masked spectrum
// (real part; the imaginary residue of a real input is numerically
// zero). Used for plot emission.
std::vector<double> band_waveform(const Epoch& epoch, std::string_view channel,
                                  const Band& band);

}  // namespace vigil::spectral
