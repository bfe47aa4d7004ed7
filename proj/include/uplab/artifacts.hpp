#ifndef UPLAB_ARTIFACTS_HPP
#define UPLAB_ARTIFACTS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "uplab/common.hpp"
#include "uplab/layer.hpp"
#include "uplab/signal.hpp"
#include "uplab/stft.hpp"

namespace uplab {

enum class ToneKind { Direct, Replica, OffsetReplica };

struct TonePrediction {
    double frequency_hz = 0.0;
    std::size_t origin_layer = 0; // layer whose output first carries the tone
    ToneKind kind = ToneKind::Direct;
};

namespace detail {

inline bool layer_has_periodic_weights(const LayerSpec& l) {
    return l.kind == LayerKind::TransposedConv || l.kind == LayerKind::SubpixelConv;
}

inline bool contains_frequency(const std::vector<TonePrediction>& tones, double f) {
    for (const auto& t : tones)
        if (std::abs(t.frequency_hz - f) < 1e-6) return true;
    return false;
}

} // namespace detail

/// Structural tone prediction; kernel values are never consulted.
///
/// Per upsampling layer (factor > 1):
///  - layers whose weights repeat across time (transposed, subpixel) put a
///    direct tone at the layer's input rate, the period of the weight
///    pattern in the output;
///  - every tone already present gets images at |m*R_in - f| and m*R_in + f
///    (m >= 1) up to the new Nyquist, because upsampling replicates the
///    input spectrum around multiples of the old rate;
///  - once any earlier layer carries bias or ReLU the signal has a DC
///    component, and weight-periodic layers image it to offset replicas at
///    multiples of their input rate. Fixed interpolation kernels have exact
///    nulls there, so interpolation layers add no direct tones and no
///    offset replicas.
/// Duplicate frequencies keep their first (direct before replica) label.
inline std::vector<TonePrediction> predict_tones(const StackSpec& spec) {
    spec.validate();
    std::vector<TonePrediction> tones;
    bool has_dc = false;
    double rate = spec.input_rate;
    for (std::size_t i = 0; i < spec.layers.size(); ++i) {
        const LayerSpec& l = spec.layers[i];
        const double in_rate = rate;
        const double out_rate = rate * l.rate_factor();
        if (l.upsampling_factor() > 1) {
            const double nyquist = out_rate / 2.0;
            const bool periodic = detail::layer_has_periodic_weights(l);
            std::vector<TonePrediction> fresh;
            if (periodic) fresh.push_back({in_rate, i, ToneKind::Direct});
            const std::size_t n_existing = tones.size();
            for (std::size_t t = 0; t < n_existing; ++t) {
                const double f = tones[t].frequency_hz;
                const ToneKind kind = tones[t].kind == ToneKind::OffsetReplica
                                          ? ToneKind::OffsetReplica
                                          : ToneKind::Replica;
                for (double m = 1.0; m * in_rate - f <= nyquist + 1e-9; m += 1.0) {
                    const double low = std::abs(m * in_rate - f);
                    const double high = m * in_rate + f;
                    if (low > 1e-9 && low <= nyquist + 1e-9) fresh.push_back({low, i, kind});
                    if (high <= nyquist + 1e-9) fresh.push_back({high, i, kind});
                }
            }
            if (has_dc && periodic)
                for (double m = 1.0; m * in_rate <= nyquist + 1e-9; m += 1.0)
                    fresh.push_back({m * in_rate, i, ToneKind::OffsetReplica});
            for (const auto& t : fresh)
                if (!detail::contains_frequency(tones, t.frequency_hz)) tones.push_back(t);
        }
        if (l.use_bias || l.activation == Activation::ReLU) has_dc = true;
        rate = out_rate;
    }
    std::sort(tones.begin(), tones.end(),
              [](const TonePrediction& a, const TonePrediction& b) {
                  return a.frequency_hz < b.frequency_hz;
              });
    return tones;
}

/// Frequencies fed purely by the DC path (bias/ReLU): offset replicas and
/// their images through later layers, regardless of how predict_tones ends
/// up labelling coincident weight-pattern tones. This is the bin set the
/// offset experiment compares energy at.
inline std::vector<double> offset_frequencies(const StackSpec& spec) {
    spec.validate();
    std::vector<double> freqs;
    auto add = [&](double f) {
        for (double g : freqs)
            if (std::abs(g - f) < 1e-6) return;
        freqs.push_back(f);
    };
    bool has_dc = false;
    double rate = spec.input_rate;
    for (std::size_t i = 0; i < spec.layers.size(); ++i) {
        const LayerSpec& l = spec.layers[i];
        const double in_rate = rate;
        const double out_rate = rate * l.rate_factor();
        if (l.upsampling_factor() > 1) {
            const double nyquist = out_rate / 2.0;
            // images of previously created offset tones
            std::vector<double> imaged;
            for (double f : freqs)
                for (double m = 1.0; m * in_rate - f <= nyquist + 1e-9; m += 1.0) {
                    const double low = std::abs(m * in_rate - f);
                    const double high = m * in_rate + f;
                    if (low > 1e-9 && low <= nyquist + 1e-9) imaged.push_back(low);
                    if (high <= nyquist + 1e-9) imaged.push_back(high);
                }
            for (double f : imaged) add(f);
            if (has_dc && detail::layer_has_periodic_weights(l))
                for (double m = 1.0; m * in_rate <= nyquist + 1e-9; m += 1.0) add(m * in_rate);
        }
        if (l.use_bias || l.activation == Activation::ReLU) has_dc = true;
        rate = out_rate;
    }
    std::sort(freqs.begin(), freqs.end());
    return freqs;
}

struct DetectedPeak {
    double frequency_hz = 0.0;
    double prominence_db = 0.0;
    std::size_t bin = 0;
};

namespace detail {

inline std::vector<double> average_db(const Spectrogram& spec) {
    std::vector<double> avg(spec.freq_bins, 0.0);
    for (std::size_t k = 0; k < spec.freq_bins; ++k) {
        double acc = 0.0;
        for (std::size_t f = 0; f < spec.frames; ++f) acc += spec.at(k, f);
        avg[k] = acc / static_cast<double>(spec.frames);
    }
    return avg;
}

inline double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace detail

/// Persistent narrowband ridges of the frame-averaged spectrum. A bin is a
/// peak when it is a local maximum (one-sided at the Nyquist edge) and
/// exceeds the median of its ±5-bin neighborhood (bin itself and the DC bin
/// excluded) by at least min_prominence_db. The DC bin never qualifies.
/// Peaks come back sorted by descending prominence.
inline std::vector<DetectedPeak> detect_tonal_peaks(const Spectrogram& spec,
                                                    double min_prominence_db = 10.0) {
    require(spec.frames >= 1, "detect_tonal_peaks: spectrogram has no frames");
    const std::vector<double> avg = detail::average_db(spec);
    const std::size_t bins = spec.freq_bins;
    std::vector<DetectedPeak> peaks;
    for (std::size_t k = 1; k < bins; ++k) {
        if (avg[k] <= avg[k - 1]) continue;
        if (k + 1 < bins && avg[k] <= avg[k + 1]) continue;
        std::vector<double> neigh;
        const std::size_t lo = k > 5 ? k - 5 : 1;
        const std::size_t hi = std::min(bins - 1, k + 5);
        for (std::size_t j = lo; j <= hi; ++j)
            if (j != k) neigh.push_back(avg[j]);
        if (neigh.empty()) continue;
        const double prominence = avg[k] - detail::median_of(std::move(neigh));
        if (prominence >= min_prominence_db)
            peaks.push_back({static_cast<double>(k) * spec.bin_hz, prominence, k});
    }
    std::sort(peaks.begin(), peaks.end(), [](const DetectedPeak& a, const DetectedPeak& b) {
        return a.prominence_db > b.prominence_db;
    });
    return peaks;
}

/// Mean dB of each of n_bands equal frequency bands, relative to the
/// full-spectrum mean.
inline std::vector<double> measure_filtering(const Spectrogram& spec, std::size_t n_bands = 8) {
    require(n_bands >= 2, "measure_filtering: need at least two bands");
    require(spec.freq_bins >= n_bands, "measure_filtering: more bands than bins");
    const std::vector<double> avg = detail::average_db(spec);
    double full = 0.0;
    for (double v : avg) full += v;
    full /= static_cast<double>(avg.size());
    std::vector<double> bands(n_bands, 0.0);
    for (std::size_t b = 0; b < n_bands; ++b) {
        const std::size_t lo = b * avg.size() / n_bands;
        const std::size_t hi = (b + 1) * avg.size() / n_bands;
        double acc = 0.0;
        for (std::size_t k = lo; k < hi; ++k) acc += avg[k];
        bands[b] = acc / static_cast<double>(hi - lo) - full;
    }
    return bands;
}

struct MatchedPrediction {
    TonePrediction prediction;
    bool matched = false;
    double measured_prominence_db = 0.0;
};

struct ArtifactReport {
    std::vector<DetectedPeak> tonal_peaks;
    std::vector<double> filtering_profile;
    std::vector<MatchedPrediction> predictions;
    bool tonal = false;
    bool filtering = false;
    double prominence_threshold_db = 10.0;
    double filtering_threshold_db = 6.0;
};

/// Detection + filtering profile + prediction matching (within one bin) in
/// one bundle. Verdicts: tonal when any peak clears the prominence
/// threshold, filtering when the top band sits filtering_threshold_db or
/// more below the full-spectrum mean.
inline ArtifactReport build_report(const Spectrogram& spec,
                                   const std::vector<TonePrediction>& predictions,
                                   double min_prominence_db = 10.0, std::size_t n_bands = 8,
                                   double filtering_threshold_db = 6.0) {
    ArtifactReport report;
    report.prominence_threshold_db = min_prominence_db;
    report.filtering_threshold_db = filtering_threshold_db;
    report.tonal_peaks = detect_tonal_peaks(spec, min_prominence_db);
    report.filtering_profile = measure_filtering(spec, n_bands);
    report.tonal = !report.tonal_peaks.empty();
    report.filtering = report.filtering_profile.back() <= -filtering_threshold_db;
    for (const auto& pred : predictions) {
        MatchedPrediction m;
        m.prediction = pred;
        const double bin_f = pred.frequency_hz / spec.bin_hz;
        for (const auto& peak : report.tonal_peaks) {
            if (std::abs(static_cast<double>(peak.bin) - bin_f) <= 1.0 + 1e-9) {
                m.matched = true;
                m.measured_prominence_db = peak.prominence_db;
                break;
            }
        }
        report.predictions.push_back(m);
    }
    return report;
}

struct OffsetComparison {
    ArtifactReport with_report;
    ArtifactReport without_report;
    std::vector<double> offset_frequencies_hz;
    std::vector<double> energy_delta_db; // with minus without, at each offset frequency
};

namespace detail {

inline void require_offset_comparable(const StackSpec& a, const StackSpec& b) {
    require(a.layers.size() == b.layers.size(), "compare_offset: layer counts differ");
    require(a.input_rate == b.input_rate && a.channels == b.channels,
            "compare_offset: input rate or channels differ");
    for (std::size_t i = 0; i < a.layers.size(); ++i) {
        const LayerSpec& la = a.layers[i];
        const LayerSpec& lb = b.layers[i];
        const bool same = la.kind == lb.kind && la.length == lb.length &&
                          la.stride == lb.stride && la.factor == lb.factor &&
                          la.init == lb.init && la.interp == lb.interp &&
                          la.constant_value == lb.constant_value;
        require(same, "compare_offset: stacks differ beyond bias/activation");
    }
}

} // namespace detail

/// Run both stacks on the same input and compare energy at the DC-path
/// (offset replica) frequencies of the `with` stack. Stacks must agree on
/// everything except use_bias and activation.
inline OffsetComparison compare_offset(const Stack& with, const Stack& without, const Signal& x,
                                       const StftConfig& cfg = StftConfig{},
                                       double min_prominence_db = 10.0, std::size_t n_bands = 8) {
    detail::require_offset_comparable(with.spec, without.spec);
    const Signal yw = apply_stack(x, with).back();
    const Signal yo = apply_stack(x, without).back();
    const Spectrogram sw = stft(yw, cfg);
    const Spectrogram so = stft(yo, cfg);
    OffsetComparison cmp;
    cmp.with_report = build_report(sw, predict_tones(with.spec), min_prominence_db, n_bands);
    cmp.without_report = build_report(so, predict_tones(without.spec), min_prominence_db, n_bands);
    cmp.offset_frequencies_hz = offset_frequencies(with.spec);
    const std::vector<double> avg_w = detail::average_db(sw);
    const std::vector<double> avg_o = detail::average_db(so);
    for (double f : cmp.offset_frequencies_hz) {
        const auto bin = static_cast<std::size_t>(std::llround(f / sw.bin_hz));
        if (bin >= sw.freq_bins) continue;
        cmp.energy_delta_db.push_back(avg_w[bin] - avg_o[bin]);
    }
    return cmp;
}

/// 10*log10(ref energy / error energy); +infinity when the estimate matches
/// the reference exactly.
inline double sdr(const Signal& reference, const Signal& estimate) {
    require(reference.same_shape(estimate), "sdr: shape mismatch");
    double ref_energy = 0.0;
    double err_energy = 0.0;
    for (std::size_t i = 0; i < reference.data.size(); ++i) {
        ref_energy += reference.data[i] * reference.data[i];
        const double e = reference.data[i] - estimate.data[i];
        err_energy += e * e;
    }
    require(ref_energy > 0.0, "sdr: reference is all zero");
    if (err_energy == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(ref_energy / err_energy);
}

} // namespace uplab

#endif
