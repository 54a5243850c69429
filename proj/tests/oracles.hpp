#pragma once

// Independent reference implementations and helpers shared by the test
// binaries. Everything here is deliberately naive: these are the
// oracles the fast library paths are checked against.

#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <unistd.h>

namespace oracles {

// O(n^2) direct DFT. The angle is reduced with (j*k) mod n in exact
// integer arithmetic so large products do not cost precision.
inline std::vector<std::complex<double>> naive_dft(std::span<const std::complex<double>> x) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> X(n);
    std::vector<std::complex<double>> twiddle(n);
    for (std::size_t r = 0; r < n; ++r) {
        double angle = -2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(n);
        twiddle[r] = {std::cos(angle), std::sin(angle)};
    }
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t j = 0; j < n; ++j) {
            acc += x[j] * twiddle[(j * k) % n];
        }
        X[k] = acc;
    }
    return X;
}

inline std::vector<std::complex<double>> naive_dft(std::span<const double> x) {
    std::vector<std::complex<double>> cx(x.begin(), x.end());
    return naive_dft(std::span<const std::complex<double>>(cx));
}

// max_k |a[k] - b[k]| / max_k |b[k]|
inline double max_relative_error(const std::vector<std::complex<double>>& a,
                                 const std::vector<std::complex<double>>& b) {
    double diff = 0.0;
    double scale = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        diff = std::max(diff, std::abs(a[k] - b[k]));
        scale = std::max(scale, std::abs(b[k]));
    }
    return scale == 0.0 ? diff : diff / scale;
}

// Trapezoid-rule centroid of an arbitrary shape, the numeric oracle
// for defuzzification checks.
inline double centroid_numeric(const std::function<double(double)>& mu, double lo, double hi,
                               std::size_t n = 100001) {
    double weighted = 0.0;
    double mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
        double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        weighted += w * mu(x) * x;
        mass += w * mu(x);
    }
    return weighted / mass;
}

// Exact integrals of a piecewise-linear shape given as breakpoints
// (x, mu): returns {integral of mu, integral of x*mu}. Closed-form
// segment moments, no sampling involved.
inline std::pair<double, double> piecewise_linear_moments(
    const std::vector<std::pair<double, double>>& points) {
    double mass = 0.0;
    double weighted = 0.0;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        const auto [x0, y0] = points[i];
        const auto [x1, y1] = points[i + 1];
        const double h = x1 - x0;
        if (h <= 0.0) continue;
        const double slope = (y1 - y0) / h;
        mass += 0.5 * (y0 + y1) * h;
        // integral of x*(y0 + slope*(x - x0)) over [x0, x1]
        const double ix2 = (x1 * x1 - x0 * x0) / 2.0;
        const double ix3 = (x1 * x1 * x1 - x0 * x0 * x0) / 3.0;
        weighted += y0 * ix2 + slope * (ix3 - x0 * ix2);
    }
    return {mass, weighted};
}

inline double piecewise_linear_centroid(const std::vector<std::pair<double, double>>& points) {
    auto [mass, weighted] = piecewise_linear_moments(points);
    return weighted / mass;
}

// A sinusoid sampled at `rate` Hz.
inline std::vector<double> tone(std::size_t n, double rate, double freq_hz, double amplitude,
                                double phase = 0.0) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double t = static_cast<double>(i) / rate;
        out[i] = amplitude * std::sin(2.0 * std::numbers::pi * freq_hz * t + phase);
    }
    return out;
}

inline void add_tone(std::vector<double>& signal, double rate, double freq_hz, double amplitude,
                     double phase = 0.0) {
    for (std::size_t i = 0; i < signal.size(); ++i) {
        double t = static_cast<double>(i) / rate;
        signal[i] += amplitude * std::sin(2.0 * std::numbers::pi * freq_hz * t + phase);
    }
}

inline double rms(std::span<const double> x) {
    double sum = 0.0;
    for (double v : x) sum += v * v;
    return std::sqrt(sum / static_cast<double>(x.size()));
}

// A fresh per-process scratch directory under the system temp root.
inline std::filesystem::path test_dir(const std::string& name) {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() /
                   ("vigil_test_" + std::to_string(::getpid())) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace oracles
