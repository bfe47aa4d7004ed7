#ifndef UPLAB_SIGNAL_HPP
#define UPLAB_SIGNAL_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "uplab/common.hpp"
#include "uplab/rng.hpp"

namespace uplab {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// Multichannel 1-D signal: `channels` rows of `length` samples, stored
/// row-major in one flat buffer. sample_rate rides along so analysis code
/// can label frequencies; the pure DSP ops only copy or scale it.
struct Signal {
    std::size_t channels = 0;
    std::size_t length = 0;
    double sample_rate = 1.0;
    std::vector<double> data;

    Signal() = default;
    Signal(std::size_t ch, std::size_t len, double rate = 1.0)
        : channels(ch), length(len), sample_rate(rate), data(ch * len, 0.0) {}

    double& at(std::size_t ch, std::size_t t) { return data[ch * length + t]; }
    double at(std::size_t ch, std::size_t t) const { return data[ch * length + t]; }

    bool same_shape(const Signal& other) const {
        return channels == other.channels && length == other.length;
    }
};

inline Signal ones(std::size_t channels, std::size_t length, double sample_rate = 1.0) {
    Signal s(channels, length, sample_rate);
    for (auto& v : s.data) v = 1.0;
    return s;
}

inline Signal constant_signal(std::size_t channels, std::size_t length, double value,
                              double sample_rate = 1.0) {
    Signal s(channels, length, sample_rate);
    for (auto& v : s.data) v = value;
    return s;
}

/// White noise, each sample i.i.d. uniform on [-1, 1).
inline Signal white_noise(std::size_t channels, std::size_t length, std::uint64_t seed,
                          double sample_rate = 1.0) {
    Signal s(channels, length, sample_rate);
    Rng rng(seed);
    for (auto& v : s.data) v = rng.uniform(-1.0, 1.0);
    return s;
}

/// sin(2*pi*freq*t/sample_rate + phase), identical across channels.
inline Signal sine(std::size_t channels, std::size_t length, double freq,
                   double sample_rate, double amplitude = 1.0, double phase = 0.0) {
    require(sample_rate > 0.0, "sine: sample_rate must be positive");
    Signal s(channels, length, sample_rate);
    for (std::size_t t = 0; t < length; ++t) {
        double v = amplitude * std::sin(2.0 * kPi * freq * static_cast<double>(t) / sample_rate + phase);
        for (std::size_t ch = 0; ch < channels; ++ch) s.at(ch, t) = v;
    }
    return s;
}

/// Sum of `n_partials` harmonics of `f0` with 1/k amplitude decay. Stands in
/// for band-limited tonal program material in the artifact experiments.
inline Signal harmonic(std::size_t channels, std::size_t length, double f0,
                       double sample_rate, std::size_t n_partials = 4) {
    require(sample_rate > 0.0, "harmonic: sample_rate must be positive");
    Signal s(channels, length, sample_rate);
    for (std::size_t t = 0; t < length; ++t) {
        double v = 0.0;
        for (std::size_t k = 1; k <= n_partials; ++k) {
            double fk = f0 * static_cast<double>(k);
            if (fk >= sample_rate / 2.0) break;
            v += std::sin(2.0 * kPi * fk * static_cast<double>(t) / sample_rate) / static_cast<double>(k);
        }
        for (std::size_t ch = 0; ch < channels; ++ch) s.at(ch, t) = v;
    }
    return s;
}

inline Signal add(const Signal& a, const Signal& b) {
    require(a.same_shape(b), "add: shape mismatch");
    Signal out = a;
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += b.data[i];
    return out;
}

inline Signal scale(const Signal& a, double factor) {
    Signal out = a;
    for (auto& v : out.data) v *= factor;
    return out;
}

} // namespace uplab

#endif
