#include "vigil/spectral.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <cmath>
#include <limits>
#include <numbers>

namespace vigil::spectral {

namespace {

using cd = std::complex<double>;

// Iterative radix-2 Cooley-Tukey, in place. n must be a power of two.
void fft_pow2_inplace(std::vector<cd>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n < 2) return;

    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }

    // One twiddle table at the finest stride serves every stage.
    const double sign = inverse ? 1.0 : -1.0;
    std::vector<cd> twiddle(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
        const double angle = sign * 2.0 * std::numbers::pi * static_cast<double>(k) /
                             static_cast<double>(n);
        twiddle[k] = cd(std::cos(angle), std::sin(angle));
    }

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t stride = n / len;
        for (std::size_t start = 0; start < n; start += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                const cd w = twiddle[k * stride];
                const cd u = a[start + k];
                const cd v = a[start + k + len / 2] * w;
                a[start + k] = u + v;
                a[start + k + len / 2] = u - v;
            }
        }
    }
}

// Chirp for Bluestein: exp(sign * i * pi * j^2 / n). j^2 is reduced
// mod 2n first so the angle stays small and accurate.
cd chirp(std::size_t j, std::size_t n, double sign) {
    const auto j2 = static_cast<double>((j * j) % (2 * n));
    const double angle = sign * std::numbers::pi * j2 / static_cast<double>(n);
    return cd(std::cos(angle), std::sin(angle));
}

// Bluestein's algorithm: the length-n DFT re-expressed as a circular
// convolution of length m = next power of two >= 2n-1.
std::vector<cd> dft_bluestein(std::span<const cd> x, bool inverse) {
    const std::size_t n = x.size();
    const double sign = inverse ? 1.0 : -1.0;
    const std::size_t m = std::bit_ceil(2 * n - 1);

    std::vector<cd> a(m, cd(0.0, 0.0));
    for (std::size_t j = 0; j < n; ++j) a[j] = x[j] * chirp(j, n, sign);

    std::vector<cd> b(m, cd(0.0, 0.0));
    b[0] = cd(1.0, 0.0);
    for (std::size_t j = 1; j < n; ++j) {
        const cd c = chirp(j, n, -sign);
        b[j] = c;
        b[m - j] = c;
    }

    fft_pow2_inplace(a, false);
    fft_pow2_inplace(b, false);
    for (std::size_t j = 0; j < m; ++j) a[j] *= b[j];
    fft_pow2_inplace(a, true);

    std::vector<cd> out(n);
    const double scale = 1.0 / static_cast<double>(m);
    for (std::size_t k = 0; k < n; ++k) out[k] = a[k] * scale * chirp(k, n, sign);
    return out;
}

std::vector<cd> dft(std::span<const cd> x, bool inverse) {
    if (x.empty()) throw InputError("spectral: cannot transform an empty sequence");
    const std::size_t n = x.size();
    if (std::has_single_bit(n)) {
        std::vector<cd> a(x.begin(), x.end());
        fft_pow2_inplace(a, inverse);
        return a;
    }
    return dft_bluestein(x, inverse);
}

double nyquist(const Spectrum& s) { return s.sample_rate_hz / 2.0; }

// In-band test for bin k in 1..n/2. Half-open [low, high), except that
// a high edge beyond Nyquist closes the interval at the Nyquist bin.
bool bin_in_band(const Spectrum& s, std::size_t k, const Band& band) {
    const double f = s.bin_hz(k);
    if (f < band.low_hz) return false;
    if (band.high_hz > nyquist(s)) return f <= nyquist(s);
    return f < band.high_hz;
}

void check_band(const Spectrum& s, const Band& band) {
    if (!(band.low_hz >= 0) || !(band.low_hz < band.high_hz))
        throw InputError("spectral: malformed band [" + std::to_string(band.low_hz) + ", " +
                         std::to_string(band.high_hz) + ")");
    if (band.low_hz > nyquist(s))
        throw InputError("spectral: band [" + std::to_string(band.low_hz) + ", " +
                         std::to_string(band.high_hz) + ") lies entirely above the Nyquist rate " +
                         std::to_string(nyquist(s)) + " Hz");
}

}  // namespace

Band canonical_band(BandName name) {
    switch (name) {
        case BandName::Delta: return {BandName::Delta, 0.0, 4.0};
        case BandName::Theta: return {BandName::Theta, 4.0, 7.0};
        case BandName::Alpha: return {BandName::Alpha, 8.0, 13.0};
        case BandName::Mu: return {BandName::Mu, 8.0, 12.0};
        case BandName::Beta: return {BandName::Beta, 13.0, 30.0};
        case BandName::Gamma:
            return {BandName::Gamma, 30.0, std::numeric_limits<double>::infinity()};
    }
    throw InputError("spectral: unknown band");
}

const std::array<Band, kNumBands>& canonical_bands() {
    static const std::array<Band, kNumBands> table = {
        canonical_band(BandName::Delta), canonical_band(BandName::Theta),
        canonical_band(BandName::Alpha), canonical_band(BandName::Mu),
        canonical_band(BandName::Beta),  canonical_band(BandName::Gamma)};
    return table;
}

std::string_view band_label(BandName name) {
    switch (name) {
        case BandName::Delta: return "delta";
        case BandName::Theta: return "theta";
        case BandName::Alpha: return "alpha";
        case BandName::Mu: return "mu";
        case BandName::Beta: return "beta";
        case BandName::Gamma: return "gamma";
    }
    return "?";
}

std::vector<cd> fft_complex(std::span<const cd> x) { return dft(x, false); }

std::vector<cd> ifft_complex(std::span<const cd> x) {
    std::vector<cd> out = dft(x, true);
    const double scale = 1.0 / static_cast<double>(out.size());
    for (auto& v : out) v *= scale;
    return out;
}

Spectrum fft(std::span<const double> samples, double sample_rate_hz) {
    if (samples.empty()) throw InputError("spectral: cannot transform an empty signal");
    std::vector<cd> x(samples.size());
    for (std::size_t j = 0; j < samples.size(); ++j) x[j] = cd(samples[j], 0.0);
    return Spectrum{dft(x, false), sample_rate_hz};
}

Spectrum band_mask(const Spectrum& spectrum, const Band& band) {
    check_band(spectrum, band);
    const std::size_t n = spectrum.size();
    Spectrum out;
    out.sample_rate_hz = spectrum.sample_rate_hz;
    out.coeffs.assign(n, cd(0.0, 0.0));
    for (std::size_t k = 1; k <= n / 2; ++k) {
        if (!bin_in_band(spectrum, k, band)) continue;
        out.coeffs[k] = spectrum.coeffs[k];
        if (k != n - k) out.coeffs[n - k] = spectrum.coeffs[n - k];
    }
    return out;
}

double band_power(const Spectrum& spectrum, const Band& band) {
    check_band(spectrum, band);
    const std::size_t n = spectrum.size();
    double sum = 0.0;
    for (std::size_t k = 1; k <= n / 2; ++k) {
        if (!bin_in_band(spectrum, k, band)) continue;
        sum += std::norm(spectrum.coeffs[k]);
        if (k != n - k) sum += std::norm(spectrum.coeffs[n - k]);
    }
    return sum / (static_cast<double>(n) * static_cast<double>(n));
}

double total_power(const Spectrum& spectrum) {
    const std::size_t n = spectrum.size();
    double sum = 0.0;
    for (std::size_t k = 1; k < n; ++k) sum += std::norm(spectrum.coeffs[k]);
    return sum / (static_cast<double>(n) * static_cast<double>(n));
}

ChannelBandPower channel_band_powers(const Spectrum& spectrum) {
    ChannelBandPower out;
    for (const Band& band : canonical_bands())
        out.band[static_cast<std::size_t>(band.name)] =
            band.low_hz > nyquist(spectrum) ? 0.0 : band_power(spectrum, band);
    out.total = total_power(spectrum);
    return out;
}

const ChannelBandPower& BandPowerTable::at(std::string_view key) const {
    for (const auto& [name, powers] : channels)
        if (name == key) return powers;
    throw InputError("spectral: band power table has no entry \"" + std::string(key) + "\"");
}

bool BandPowerTable::contains(std::string_view key) const {
    return std::any_of(channels.begin(), channels.end(),
                       [&](const auto& e) { return e.first == key; });
}

void BandPowerTable::put(std::string key, ChannelBandPower powers) {
    channels.emplace_back(std::move(key), powers);
}

const std::vector<double>& Epoch::channel(std::string_view label) const {
    for (const auto& [name, samples] : channels)
        if (name == label) return samples;
    throw InputError("spectral: epoch has no channel \"" + std::string(label) + "\"");
}

void Epoch::add_channel(std::string label, std::vector<double> samples) {
    if (!channels.empty() && samples.size() != channels.front().second.size())
        throw InputError("spectral: epoch channels must share one length");
    channels.emplace_back(std::move(label), std::move(samples));
}

std::size_t Epoch::samples_per_channel() const {
    return channels.empty() ? 0 : channels.front().second.size();
}

EpochMode parse_epoch_mode(std::string_view text) {
    if (text == "start") return EpochMode::Start;
    if (text == "middle") return EpochMode::Middle;
    if (text == "end") return EpochMode::End;
    if (text == "all") return EpochMode::All;
    throw InputError("spectral: unknown epoch mode \"" + std::string(text) +
                     "\" (expected start|middle|end|all)");
}

std::string_view epoch_mode_name(EpochMode mode) {
    switch (mode) {
        case EpochMode::Start: return "start";
        case EpochMode::Middle: return "middle";
        case EpochMode::End: return "end";
        case EpochMode::All: return "all";
    }
    return "?";
}

std::vector<EpochWindow> epoch_windows(std::size_t n_samples, double sample_rate_hz,
                                       double duration_s, EpochMode mode) {
    if (sample_rate_hz <= 0) throw InputError("spectral: sample rate must be positive");
    if (duration_s <= 0) throw InputError("spectral: epoch duration must be positive");
    const double win_exact = duration_s * sample_rate_hz;
    const auto win = static_cast<std::size_t>(std::llround(win_exact));
    if (win < 1 || std::abs(win_exact - static_cast<double>(win)) > 1e-9)
        throw InputError("spectral: epoch duration * sample rate = " + std::to_string(win_exact) +
                         " is not a whole number of samples");
    if (n_samples < win)
        throw InputError("spectral: signal of " + std::to_string(n_samples) +
                         " samples is shorter than one " + std::to_string(win) +
                         "-sample epoch");

    auto window_at = [&](std::size_t start) {
        return EpochWindow{start, win, static_cast<double>(start) / sample_rate_hz};
    };

    std::vector<EpochWindow> out;
    switch (mode) {
        case EpochMode::Start:
            out.push_back(window_at(0));
            break;
        case EpochMode::Middle:
            out.push_back(window_at((n_samples - win) / 2));
            break;
        case EpochMode::End:
            out.push_back(window_at(n_samples - win));
            break;
        case EpochMode::All:
            for (std::size_t start = 0; start + win <= n_samples; start += win)
                out.push_back(window_at(start));
            break;
    }
    return out;
}

std::vector<Epoch> make_epochs(std::span<const double> signal, double sample_rate_hz,
                               double duration_s, EpochMode mode, std::string_view label) {
    std::vector<Epoch> out;
    for (const EpochWindow& w : epoch_windows(signal.size(), sample_rate_hz, duration_s, mode)) {
        Epoch e;
        e.sample_rate_hz = sample_rate_hz;
        e.start_time_s = w.start_time_s;
        e.duration_s = duration_s;
        e.add_channel(std::string(label),
                      std::vector<double>(signal.begin() + static_cast<std::ptrdiff_t>(w.start_index),
                                          signal.begin() +
                                              static_cast<std::ptrdiff_t>(w.start_index + w.length)));
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<double> band_waveform(const Epoch& epoch, std::string_view channel,
                                  const Band& band) {
    const std::vector<double>& samples = epoch.channel(channel);
    const Spectrum masked = band_mask(fft(samples, epoch.sample_rate_hz), band);
    const std::vector<cd> time = ifft_complex(masked.coeffs);
    std::vector<double> out(time.size());
    for (std::size_t j = 0; j < time.size(); ++j) out[j] = time[j].real();
    return out;
}

}  // namespace vigil::spectral
