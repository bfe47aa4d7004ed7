#ifndef UPLAB_STFT_HPP
#define UPLAB_STFT_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "uplab/common.hpp"
#include "uplab/fft.hpp"
#include "uplab/kernel.hpp"
#include "uplab/signal.hpp"

namespace uplab {

enum class Window { Hann, Rectangular };
enum class PadMode { Reflect, Zero };

struct StftConfig {
    std::size_t n_fft = 2048;
    std::size_t hop = 512;
    Window window = Window::Hann;
    bool center = false;
    PadMode pad_mode = PadMode::Reflect; // only consulted when center=true
    double floor_db = -100.0;

    void validate() const {
        require(is_power_of_two(n_fft), "stft: n_fft must be a power of two");
        require(hop >= 1 && hop <= n_fft, "stft: hop must satisfy 0 < hop <= n_fft");
    }
};

/// Magnitude spectrogram in dB, laid out [freq_bins x frames].
struct Spectrogram {
    std::size_t freq_bins = 0;
    std::size_t frames = 0;
    double bin_hz = 0.0;
    double hop_s = 0.0;
    double sample_rate = 0.0;
    double floor_db = -100.0;
    std::vector<double> magnitudes_db;

    double& at(std::size_t bin, std::size_t frame) { return magnitudes_db[bin * frames + frame]; }
    double at(std::size_t bin, std::size_t frame) const { return magnitudes_db[bin * frames + frame]; }
};

inline std::vector<double> make_window(Window w, std::size_t n) {
    std::vector<double> win(n, 1.0);
    if (w == Window::Hann) {
        // periodic Hann, the analysis convention of the common STFT stacks
        for (std::size_t i = 0; i < n; ++i)
            win[i] = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(i) / static_cast<double>(n)));
    }
    return win;
}

inline std::size_t stft_frame_count(std::size_t length, const StftConfig& cfg) {
    if (cfg.center) return length / cfg.hop + 1;
    require(length >= cfg.n_fft, "stft: signal shorter than one frame");
    return (length - cfg.n_fft) / cfg.hop + 1;
}

namespace detail {

// Mirror indexing without edge repetition: ... x2 x1 | x0 x1 x2 ... xn-1 | xn-2 xn-3 ...
inline double reflect_sample(const Signal& x, std::size_t channel, long long idx) {
    const long long n = static_cast<long long>(x.length);
    if (n == 1) return x.at(channel, 0);
    const long long period = 2 * (n - 1);
    long long m = idx % period;
    if (m < 0) m += period;
    if (m >= n) m = period - m;
    return x.at(channel, static_cast<std::size_t>(m));
}

inline double padded_sample(const Signal& x, std::size_t channel, long long idx, PadMode mode) {
    if (idx >= 0 && idx < static_cast<long long>(x.length))
        return x.at(channel, static_cast<std::size_t>(idx));
    if (mode == PadMode::Zero) return 0.0;
    return reflect_sample(x, channel, idx);
}

// Accumulates |X|^2 of one channel into power[bin * frames + frame].
inline void add_stft_power(const Signal& x, const StftConfig& cfg, std::size_t channel,
                           std::vector<double>& power, std::size_t freq_bins,
                           std::size_t frames) {
    const std::size_t n_fft = cfg.n_fft;
    const std::vector<double> win = make_window(cfg.window, n_fft);
    std::vector<std::complex<double>> buf(n_fft);
    const long long offset = cfg.center ? -static_cast<long long>(n_fft / 2) : 0;
    for (std::size_t f = 0; f < frames; ++f) {
        const long long start = static_cast<long long>(f * cfg.hop) + offset;
        for (std::size_t i = 0; i < n_fft; ++i) {
            double v = cfg.center
                           ? padded_sample(x, channel, start + static_cast<long long>(i), cfg.pad_mode)
                           : x.at(channel, static_cast<std::size_t>(start) + i);
            buf[i] = {v * win[i], 0.0};
        }
        fft_in_place(buf, false);
        for (std::size_t k = 0; k < freq_bins; ++k)
            power[k * frames + f] += buf[k].real() * buf[k].real() + buf[k].imag() * buf[k].imag();
    }
}

inline Spectrogram spectrogram_shell(const Signal& x, const StftConfig& cfg) {
    cfg.validate();
    require(x.length >= 1, "stft: empty signal");
    Spectrogram spec;
    spec.freq_bins = cfg.n_fft / 2 + 1;
    spec.frames = stft_frame_count(x.length, cfg);
    spec.sample_rate = x.sample_rate;
    spec.bin_hz = x.sample_rate / static_cast<double>(cfg.n_fft);
    spec.hop_s = static_cast<double>(cfg.hop) / x.sample_rate;
    spec.floor_db = cfg.floor_db;
    spec.magnitudes_db.assign(spec.freq_bins * spec.frames, cfg.floor_db);
    return spec;
}

inline void power_to_db(Spectrogram& spec, const std::vector<double>& power, double floor_db) {
    for (std::size_t i = 0; i < power.size(); ++i) {
        double db = 20.0 * std::log10(std::sqrt(power[i]) + 1e-10);
        spec.magnitudes_db[i] = db < floor_db ? floor_db : db;
    }
}

} // namespace detail

/// STFT of one channel. center=false: frames start at multiples of hop, no
/// padding. center=true: frame t is centered at t*hop, with n_fft/2 samples
/// of padding on each side. Magnitudes are 20*log10(|X| + 1e-10), clamped
/// below at cfg.floor_db.
inline Spectrogram stft(const Signal& x, const StftConfig& cfg, std::size_t channel = 0) {
    require(channel < x.channels, "stft: channel out of range");
    Spectrogram spec = detail::spectrogram_shell(x, cfg);
    std::vector<double> power(spec.magnitudes_db.size(), 0.0);
    detail::add_stft_power(x, cfg, channel, power, spec.freq_bins, spec.frames);
    detail::power_to_db(spec, power, cfg.floor_db);
    return spec;
}

/// Spectrogram of |X|^2 averaged over all channels, in the same dB convention
/// as stft. With one channel this equals stft exactly. Averaging power keeps
/// a line visible when individual channels null it out.
inline Spectrogram mean_power_stft(const Signal& x, const StftConfig& cfg) {
    Spectrogram spec = detail::spectrogram_shell(x, cfg);
    std::vector<double> power(spec.magnitudes_db.size(), 0.0);
    for (std::size_t c = 0; c < x.channels; ++c)
        detail::add_stft_power(x, cfg, c, power, spec.freq_bins, spec.frames);
    for (double& p : power) p /= static_cast<double>(x.channels);
    detail::power_to_db(spec, power, cfg.floor_db);
    return spec;
}

/// |H(w)| of an FIR tap vector, sampled at w = pi*j/(n_points-1), evaluated
/// directly from the transfer function sum.
inline std::vector<double> freq_response(const std::vector<double>& taps, std::size_t n_points) {
    require(n_points >= 2, "freq_response: need at least two points");
    std::vector<double> mag(n_points);
    for (std::size_t j = 0; j < n_points; ++j) {
        double w = kPi * static_cast<double>(j) / static_cast<double>(n_points - 1);
        std::complex<double> h = 0.0;
        for (std::size_t l = 0; l < taps.size(); ++l)
            h += taps[l] * std::complex<double>(std::cos(w * static_cast<double>(l)),
                                                -std::sin(w * static_cast<double>(l)));
        mag[j] = std::abs(h);
    }
    return mag;
}

inline std::vector<double> freq_response(const Kernel& k, std::size_t n_points,
                                         std::size_t oc = 0, std::size_t ic = 0) {
    require(oc < k.out_channels && ic < k.in_channels, "freq_response: channel out of range");
    std::vector<double> taps(k.length);
    for (std::size_t l = 0; l < k.length; ++l) taps[l] = k.at(oc, ic, l);
    return freq_response(taps, n_points);
}

} // namespace uplab

#endif
