#ifndef UPLAB_OPS_HPP
#define UPLAB_OPS_HPP

#include <cstddef>

#include "uplab/common.hpp"
#include "uplab/kernel.hpp"
#include "uplab/signal.hpp"

namespace uplab {

enum class OverlapClass { NoOverlap, PartialOverlap, FullOverlap };

/// NoOverlap when length = stride, FullOverlap when length is a larger
/// multiple of stride, PartialOverlap otherwise (including length < stride,
/// where the scatter leaves zero gaps).
inline OverlapClass classify_overlap(std::size_t length, std::size_t stride) {
    require(length >= 1 && stride >= 1, "classify_overlap: length and stride must be >= 1");
    if (length == stride) return OverlapClass::NoOverlap;
    if (length % stride == 0) return OverlapClass::FullOverlap;
    return OverlapClass::PartialOverlap;
}

/// Strided cross-correlation, valid region only:
/// out[c,t] = bias[c] + sum_{i,l} k[c,i,l] * x[i, t*stride + l].
/// Accumulation starts from the bias and runs in-channel-major, tap-minor;
/// tests that demand exact equality rely on this order.
inline Signal conv1d(const Signal& x, const Kernel& k, std::size_t stride) {
    require(stride >= 1, "conv1d: stride must be >= 1");
    require(x.channels == k.in_channels, "conv1d: input channels do not match kernel");
    require(x.length >= k.length, "conv1d: input shorter than kernel");
    std::size_t out_len = (x.length - k.length) / stride + 1;
    Signal out(k.out_channels, out_len, x.sample_rate);
    for (std::size_t oc = 0; oc < k.out_channels; ++oc) {
        for (std::size_t t = 0; t < out_len; ++t) {
            double acc = k.has_bias() ? k.bias[oc] : 0.0;
            for (std::size_t ic = 0; ic < k.in_channels; ++ic)
                for (std::size_t l = 0; l < k.length; ++l)
                    acc += k.at(oc, ic, l) * x.at(ic, t * stride + l);
            out.at(oc, t) = acc;
        }
    }
    return out;
}

/// Scatter / overlap-add: each input sample stamps a scaled copy of the
/// kernel every `stride` samples, overlaps summed (never averaged), bias
/// added to every output sample afterwards.
/// out.time = (x.time - 1)*stride + k.length.
/// Scatter order is t-major, then tap, then channels; at any output sample
/// the contributions therefore arrive in ascending input-time order, which a
/// gather-form reference reproduces exactly.
inline Signal transposed_conv1d(const Signal& x, const Kernel& k, std::size_t stride) {
    require(stride >= 1, "transposed_conv1d: stride must be >= 1");
    require(x.channels == k.in_channels, "transposed_conv1d: input channels do not match kernel");
    require(x.length >= 1, "transposed_conv1d: empty input");
    std::size_t out_len = (x.length - 1) * stride + k.length;
    Signal out(k.out_channels, out_len, x.sample_rate);
    for (std::size_t t = 0; t < x.length; ++t)
        for (std::size_t l = 0; l < k.length; ++l)
            for (std::size_t oc = 0; oc < k.out_channels; ++oc)
                for (std::size_t ic = 0; ic < k.in_channels; ++ic)
                    out.at(oc, t * stride + l) += k.at(oc, ic, l) * x.at(ic, t);
    if (k.has_bias())
        for (std::size_t oc = 0; oc < k.out_channels; ++oc)
            for (std::size_t n = 0; n < out_len; ++n) out.at(oc, n) += k.bias[oc];
    return out;
}

/// Zero insertion: out[c, r*t] = x[c,t], every other sample exactly 0.
inline Signal stretch(const Signal& x, std::size_t r) {
    require(r >= 1, "stretch: factor must be >= 1");
    Signal out(x.channels, x.length * r, x.sample_rate * static_cast<double>(r));
    for (std::size_t ch = 0; ch < x.channels; ++ch)
        for (std::size_t t = 0; t < x.length; ++t) out.at(ch, r * t) = x.at(ch, t);
    return out;
}

enum class InterpMode { Nearest, Linear };

/// Fixed smoothing kernels for stretch-based interpolation. Nearest is a
/// rectangle of r ones; linear is the unit-peak triangle
/// (1/r)*[1,2,...,r,...,2,1] of length 2r-1. Both have DC gain r.
inline Kernel interp_kernel(InterpMode mode, std::size_t r) {
    require(r >= 1, "interp_kernel: factor must be >= 1");
    if (mode == InterpMode::Nearest) {
        Kernel k(1, 1, r);
        for (std::size_t i = 0; i < r; ++i) k.at(0, 0, i) = 1.0;
        return k;
    }
    Kernel k(1, 1, 2 * r - 1);
    for (std::size_t i = 0; i < r; ++i) {
        double v = static_cast<double>(i + 1) / static_cast<double>(r);
        k.at(0, 0, i) = v;
        k.at(0, 0, 2 * r - 2 - i) = v;
    }
    return k;
}

inline Signal pad(const Signal& x, std::size_t left, std::size_t right) {
    Signal out(x.channels, left + x.length + right, x.sample_rate);
    for (std::size_t ch = 0; ch < x.channels; ++ch)
        for (std::size_t t = 0; t < x.length; ++t) out.at(ch, left + t) = x.at(ch, t);
    return out;
}

namespace detail {

// Per-channel valid convolution of a multichannel signal with a 1x1xL
// kernel; used by the interpolation upsamplers.
inline Signal conv_each_channel(const Signal& x, const Kernel& k, std::size_t stride) {
    require(k.in_channels == 1 && k.out_channels == 1,
            "conv_each_channel: kernel must be single channel");
    Signal mono(1, x.length);
    Signal out;
    for (std::size_t ch = 0; ch < x.channels; ++ch) {
        for (std::size_t t = 0; t < x.length; ++t) mono.at(0, t) = x.at(ch, t);
        Signal res = conv1d(mono, k, stride);
        if (ch == 0) out = Signal(x.channels, res.length, x.sample_rate);
        for (std::size_t t = 0; t < res.length; ++t) out.at(ch, t) = res.at(0, t);
    }
    if (x.channels == 0) out = Signal(0, 0);
    return out;
}

} // namespace detail

/// Zero-order hold: out[c,n] = x[c, floor(n/r)]. Equal to stretch followed
/// by a left-aligned rectangle convolution (r-1 zeros padded on the left).
inline Signal nearest_upsample(const Signal& x, std::size_t r) {
    require(r >= 1, "nearest_upsample: factor must be >= 1");
    Signal out(x.channels, x.length * r, x.sample_rate * static_cast<double>(r));
    for (std::size_t ch = 0; ch < x.channels; ++ch)
        for (std::size_t n = 0; n < out.length; ++n) out.at(ch, n) = x.at(ch, n / r);
    return out;
}

/// Stretch followed by the triangular kernel, zero-padded "same" and
/// center-aligned: interior samples at multiples of r reproduce the inputs,
/// the trailing r-1 samples roll off toward zero because the next input is
/// past the end. Implemented as the literal composition so the equivalence
/// with stretch+conv holds bitwise.
inline Signal linear_upsample(const Signal& x, std::size_t r) {
    require(r >= 1, "linear_upsample: factor must be >= 1");
    if (r == 1) return x;
    Signal stretched = stretch(x, r);
    Signal padded = pad(stretched, r - 1, r - 1);
    return detail::conv_each_channel(padded, interp_kernel(InterpMode::Linear, r), 1);
}

/// Interleave r channel groups across time: out[c, r*t + j] = x[j*C + c, t],
/// C = x.channels / r.
inline Signal periodic_shuffle(const Signal& x, std::size_t r) {
    require(r >= 1, "periodic_shuffle: factor must be >= 1");
    require(x.channels % r == 0, "periodic_shuffle: channels not divisible by factor");
    std::size_t c_out = x.channels / r;
    Signal out(c_out, x.length * r, x.sample_rate * static_cast<double>(r));
    for (std::size_t j = 0; j < r; ++j)
        for (std::size_t c = 0; c < c_out; ++c)
            for (std::size_t t = 0; t < x.length; ++t)
                out.at(c, r * t + j) = x.at(j * c_out + c, t);
    return out;
}

/// Stride-1 convolution emitting r*C channels, then periodic shuffle; no
/// overlap-add occurs anywhere by construction.
inline Signal subpixel_upsample(const Signal& x, const Kernel& k, std::size_t r) {
    require(k.out_channels % r == 0, "subpixel_upsample: kernel channels not divisible by factor");
    return periodic_shuffle(conv1d(x, k, 1), r);
}

inline Signal relu(const Signal& x) {
    Signal out = x;
    for (auto& v : out.data) v = v > 0.0 ? v : 0.0;
    return out;
}

} // namespace uplab

#endif
