#ifndef UPLAB_LAYER_HPP
#define UPLAB_LAYER_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "uplab/common.hpp"
#include "uplab/kernel.hpp"
#include "uplab/ops.hpp"
#include "uplab/rng.hpp"
#include "uplab/signal.hpp"

namespace uplab {

enum class LayerKind {
    TransposedConv,
    NearestUpsample,
    LinearUpsample,
    InterpPlusConv,
    SubpixelConv,
    PlainConv
};

enum class InitKind { RandomUniform, Constant, ICNR };
enum class Activation { None, ReLU };

struct LayerSpec {
    LayerKind kind = LayerKind::TransposedConv;
    std::size_t length = 1;  // kernel taps, conv-bearing kinds only
    std::size_t stride = 1;  // TransposedConv / PlainConv only
    std::size_t factor = 1;  // upsampling factor, interp / subpixel kinds
    InitKind init = InitKind::RandomUniform;
    double constant_value = 1.0; // Constant init fill
    bool use_bias = false;
    Activation activation = Activation::None;
    InterpMode interp = InterpMode::Nearest; // InterpPlusConv pre-stage
    std::optional<std::uint64_t> seed;       // overrides the derived per-layer seed

    bool has_weights() const {
        return kind == LayerKind::TransposedConv || kind == LayerKind::InterpPlusConv ||
               kind == LayerKind::SubpixelConv || kind == LayerKind::PlainConv;
    }

    /// Sampling-rate multiplier the layer applies.
    double rate_factor() const {
        switch (kind) {
            case LayerKind::TransposedConv: return static_cast<double>(stride);
            case LayerKind::NearestUpsample:
            case LayerKind::LinearUpsample:
            case LayerKind::InterpPlusConv:
            case LayerKind::SubpixelConv: return static_cast<double>(factor);
            case LayerKind::PlainConv: return 1.0 / static_cast<double>(stride);
        }
        return 1.0;
    }

    /// Integer upsampling factor (1 for non-upsampling kinds).
    std::size_t upsampling_factor() const {
        switch (kind) {
            case LayerKind::TransposedConv: return stride;
            case LayerKind::NearestUpsample:
            case LayerKind::LinearUpsample:
            case LayerKind::InterpPlusConv:
            case LayerKind::SubpixelConv: return factor;
            case LayerKind::PlainConv: return 1;
        }
        return 1;
    }

    OverlapClass overlap() const {
        require(kind == LayerKind::TransposedConv || kind == LayerKind::PlainConv,
                "overlap: defined for strided conv kinds only");
        return classify_overlap(length, stride);
    }

    void validate() const {
        switch (kind) {
            case LayerKind::TransposedConv:
            case LayerKind::PlainConv:
                require(length >= 1 && stride >= 1, "layer: length and stride must be >= 1");
                break;
            case LayerKind::NearestUpsample:
            case LayerKind::LinearUpsample:
                require(factor >= 1, "layer: factor must be >= 1");
                require(!use_bias, "layer: pure interpolation layers have no bias");
                break;
            case LayerKind::InterpPlusConv:
            case LayerKind::SubpixelConv:
                require(factor >= 1 && length >= 1, "layer: factor and length must be >= 1");
                break;
        }
        if (init == InitKind::ICNR)
            require(kind == LayerKind::SubpixelConv, "layer: ICNR requires a subpixel layer");
    }
};

/// Weights for one layer at `channels` stack width. Pure interpolation
/// layers get an empty kernel. RandomUniform draws taps then bias, i.i.d.
/// uniform on [-s, s], s = 1/sqrt(in_channels*length). ICNR draws one
/// sub-kernel and replicates it across the factor shuffle groups so the
/// freshly initialized subpixel layer equals nearest upsampling after a
/// shared convolution.
inline Kernel init_kernel(const LayerSpec& spec, std::size_t channels, std::uint64_t seed) {
    spec.validate();
    require(channels >= 1, "init_kernel: channels must be >= 1");
    if (!spec.has_weights()) return Kernel{};

    std::size_t out_channels =
        spec.kind == LayerKind::SubpixelConv ? spec.factor * channels : channels;
    Kernel k(out_channels, channels, spec.length, spec.use_bias);

    switch (spec.init) {
        case InitKind::Constant: {
            for (auto& v : k.taps) v = spec.constant_value;
            for (auto& v : k.bias) v = 0.0;
            break;
        }
        case InitKind::RandomUniform: {
            Rng rng(seed);
            double s = 1.0 / std::sqrt(static_cast<double>(channels * spec.length));
            for (auto& v : k.taps) v = rng.uniform(-s, s);
            for (auto& v : k.bias) v = rng.uniform(-s, s);
            break;
        }
        case InitKind::ICNR: {
            Rng rng(seed);
            double s = 1.0 / std::sqrt(static_cast<double>(channels * spec.length));
            Kernel sub(channels, channels, spec.length, spec.use_bias);
            for (auto& v : sub.taps) v = rng.uniform(-s, s);
            for (auto& v : sub.bias) v = rng.uniform(-s, s);
            for (std::size_t j = 0; j < spec.factor; ++j)
                for (std::size_t c = 0; c < channels; ++c) {
                    for (std::size_t i = 0; i < channels; ++i)
                        for (std::size_t l = 0; l < spec.length; ++l)
                            k.at(j * channels + c, i, l) = sub.at(c, i, l);
                    if (spec.use_bias) k.bias[j * channels + c] = sub.bias[c];
                }
            break;
        }
    }
    return k;
}

struct StackSpec {
    std::vector<LayerSpec> layers;
    double input_rate = 1.0;
    std::size_t channels = 1;

    void validate() const {
        require(input_rate > 0.0, "stack: input_rate must be positive");
        require(channels >= 1, "stack: channels must be >= 1");
        for (const auto& l : layers) l.validate();
    }

    double output_rate() const {
        double rate = input_rate;
        for (const auto& l : layers) rate *= l.rate_factor();
        return rate;
    }
};

struct Stack {
    StackSpec spec;
    std::vector<Kernel> kernels; // parallel to spec.layers
};

/// Build the weights of every layer. Layer i draws from sub-stream i of
/// `seed` unless its spec pins an explicit seed.
inline Stack realize(const StackSpec& spec, std::uint64_t seed) {
    spec.validate();
    Stack s;
    s.spec = spec;
    s.kernels.reserve(spec.layers.size());
    for (std::size_t i = 0; i < spec.layers.size(); ++i) {
        const LayerSpec& layer = spec.layers[i];
        std::uint64_t layer_seed = layer.seed ? *layer.seed : derive_seed(seed, i);
        s.kernels.push_back(init_kernel(layer, spec.channels, layer_seed));
    }
    return s;
}

inline Signal apply_layer(const Signal& x, const LayerSpec& spec, const Kernel& k) {
    Signal y;
    switch (spec.kind) {
        case LayerKind::TransposedConv:
            y = transposed_conv1d(x, k, spec.stride);
            y.sample_rate = x.sample_rate * static_cast<double>(spec.stride);
            break;
        case LayerKind::NearestUpsample:
            y = nearest_upsample(x, spec.factor);
            break;
        case LayerKind::LinearUpsample:
            y = linear_upsample(x, spec.factor);
            break;
        case LayerKind::InterpPlusConv: {
            Signal up = spec.interp == InterpMode::Nearest ? nearest_upsample(x, spec.factor)
                                                           : linear_upsample(x, spec.factor);
            y = conv1d(up, k, 1);
            break;
        }
        case LayerKind::SubpixelConv:
            y = subpixel_upsample(x, k, spec.factor);
            break;
        case LayerKind::PlainConv:
            y = conv1d(x, k, spec.stride);
            y.sample_rate = x.sample_rate / static_cast<double>(spec.stride);
            break;
    }
    if (spec.activation == Activation::ReLU) y = relu(y);
    return y;
}

/// Output of every layer in order (the per-layer views the analysis code
/// consumes). An empty stack returns the input unchanged.
inline std::vector<Signal> apply_stack(const Signal& x, const Stack& s) {
    require(x.sample_rate == s.spec.input_rate, "apply_stack: input rate does not match stack");
    require(x.channels == s.spec.channels, "apply_stack: input channels do not match stack");
    require(s.kernels.size() == s.spec.layers.size(), "apply_stack: stack not realized");
    if (s.spec.layers.empty()) return {x};
    std::vector<Signal> outs;
    outs.reserve(s.spec.layers.size());
    const Signal* cur = &x;
    for (std::size_t i = 0; i < s.spec.layers.size(); ++i) {
        outs.push_back(apply_layer(*cur, s.spec.layers[i], s.kernels[i]));
        cur = &outs.back();
    }
    return outs;
}

} // namespace uplab

#endif
