#ifndef UPLAB_TRAIN_HPP
#define UPLAB_TRAIN_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "uplab/artifacts.hpp"
#include "uplab/autodiff.hpp"
#include "uplab/common.hpp"
#include "uplab/layer.hpp"
#include "uplab/rng.hpp"
#include "uplab/signal.hpp"
#include "uplab/stft.hpp"

namespace uplab {

enum class Optimizer { SGD, Adam };
enum class Loss { L1 };

struct TrainConfig {
    std::size_t steps = 2000;
    double learning_rate = 2e-4;
    Loss loss = Loss::L1;
    std::uint64_t seed = 0;
    Optimizer optimizer = Optimizer::Adam;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    void validate() const {
        require(learning_rate >= 0.0, "train: learning rate must be non-negative");
        require(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0,
                "train: betas must lie in [0, 1)");
    }
};

struct ToyExample {
    Signal input;
    Signal target;
};

struct ToyDataset {
    std::vector<ToyExample> items;
};

/// Mixtures of a few sinusoids, band-limited below the input Nyquist, with
/// targets sampled analytically from the same continuous signal at the
/// output rate. Target length matches what the stack emits for this input
/// length.
inline ToyDataset make_toy_dataset(const StackSpec& spec, std::size_t n_items,
                                   std::size_t input_length, std::uint64_t seed,
                                   std::size_t n_partials = 3) {
    spec.validate();
    require(n_items >= 1 && input_length >= 1, "toy dataset: empty request");
    const double in_rate = spec.input_rate;
    const double out_rate = spec.output_rate();

    // output length for this input length, layer by layer
    std::size_t out_len = input_length;
    for (const auto& l : spec.layers) {
        switch (l.kind) {
        case LayerKind::TransposedConv: out_len = (out_len - 1) * l.stride + l.length; break;
        case LayerKind::PlainConv:
            require(out_len >= l.length, "toy dataset: input too short for the stack");
            out_len = (out_len - l.length) / l.stride + 1;
            break;
        case LayerKind::NearestUpsample:
        case LayerKind::LinearUpsample: out_len *= l.factor; break;
        case LayerKind::InterpPlusConv:
            out_len *= l.factor;
            require(out_len >= l.length, "toy dataset: input too short for the stack");
            out_len = out_len - l.length + 1;
            break;
        case LayerKind::SubpixelConv:
            require(out_len >= l.length, "toy dataset: input too short for the stack");
            out_len = (out_len - l.length + 1) * l.factor;
            break;
        }
    }

    ToyDataset ds;
    Rng rng(seed);
    for (std::size_t i = 0; i < n_items; ++i) {
        Signal x(spec.channels, input_length, in_rate);
        Signal y(spec.channels, out_len, out_rate);
        for (std::size_t c = 0; c < spec.channels; ++c) {
            for (std::size_t p = 0; p < n_partials; ++p) {
                double f = rng.uniform(0.05, 0.4) * in_rate; // below 0.8 x input Nyquist
                double a = rng.uniform(0.2, 1.0) / static_cast<double>(n_partials);
                double ph = rng.uniform(0.0, 2.0 * kPi);
                for (std::size_t t = 0; t < input_length; ++t)
                    x.at(c, t) += a * std::sin(2.0 * kPi * f * static_cast<double>(t) / in_rate + ph);
                for (std::size_t t = 0; t < out_len; ++t)
                    y.at(c, t) += a * std::sin(2.0 * kPi * f * static_cast<double>(t) / out_rate + ph);
            }
        }
        ds.items.push_back({std::move(x), std::move(y)});
    }
    return ds;
}

namespace detail {

struct AdamSlot {
    std::vector<double> m_taps, v_taps, m_bias, v_bias;
};

inline void sgd_update(Kernel& k, const Kernel& g, double lr) {
    for (std::size_t i = 0; i < k.taps.size(); ++i) k.taps[i] -= lr * g.taps[i];
    for (std::size_t i = 0; i < k.bias.size(); ++i) k.bias[i] -= lr * g.bias[i];
}

inline void adam_update(Kernel& k, const Kernel& g, AdamSlot& slot, const TrainConfig& cfg,
                        std::size_t step_1_based) {
    if (slot.m_taps.empty()) {
        slot.m_taps.assign(k.taps.size(), 0.0);
        slot.v_taps.assign(k.taps.size(), 0.0);
        slot.m_bias.assign(k.bias.size(), 0.0);
        slot.v_bias.assign(k.bias.size(), 0.0);
    }
    const double t = static_cast<double>(step_1_based);
    const double c1 = 1.0 - std::pow(cfg.beta1, t);
    const double c2 = 1.0 - std::pow(cfg.beta2, t);
    auto update = [&](std::vector<double>& w, const std::vector<double>& grad,
                      std::vector<double>& m, std::vector<double>& v) {
        for (std::size_t i = 0; i < w.size(); ++i) {
            m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * grad[i];
            v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
            double mhat = m[i] / c1;
            double vhat = v[i] / c2;
            w[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.epsilon);
        }
    };
    update(k.taps, g.taps, slot.m_taps, slot.v_taps);
    update(k.bias, g.bias, slot.m_bias, slot.v_bias);
}

} // namespace detail

struct TrainResult {
    Stack stack;
    std::vector<double> loss_curve;
    ArtifactReport before;
    ArtifactReport after;
};

/// Builds the held-out report for a stack: zero-mean white noise in,
/// channel-averaged power spectrogram of the final output, compared against
/// the stack's own tone predictions.
inline ArtifactReport held_out_report(const Stack& stack, std::uint64_t noise_seed,
                                      std::size_t noise_length, const StftConfig& cfg = {}) {
    Signal x = white_noise(stack.spec.channels, noise_length, noise_seed, stack.spec.input_rate);
    Signal y = apply_stack(x, stack).back();
    return build_report(mean_power_stft(y, cfg), predict_tones(stack.spec));
}

/// L1 training over the toy dataset, cycling items in order. Loss curve has
/// one entry per step (the loss before that step's update). NaN or inf loss
/// aborts with the failing step index.
inline TrainResult train_toy(const Stack& initial, const ToyDataset& data, const TrainConfig& cfg,
                             std::uint64_t held_out_seed = 1234,
                             std::size_t held_out_length = 1024,
                             const StftConfig& report_cfg = {}) {
    cfg.validate();
    require(!data.items.empty(), "train: empty dataset");
    require(initial.kernels.size() == initial.spec.layers.size(), "train: stack is not realized");

    TrainResult result{initial, {}, {}, {}};
    result.before = held_out_report(initial, held_out_seed, held_out_length, report_cfg);

    std::vector<detail::AdamSlot> slots;
    for (std::size_t step = 0; step < cfg.steps; ++step) {
        const ToyExample& ex = data.items[step % data.items.size()];
        Tape tape;
        NodeId xn = tape.input(ex.input);
        NodeId yn = taped_stack_forward(tape, result.stack, xn);
        double loss = tape.l1_loss(yn, ex.target);
        if (!std::isfinite(loss)) throw DivergenceError("train: loss diverged", step);
        result.loss_curve.push_back(loss);
        tape.backward();

        if (slots.empty()) slots.resize(tape.param_count());
        require(slots.size() == tape.param_count(), "train: parameter count changed");
        std::size_t p = 0;
        for (auto& k : result.stack.kernels) {
            if (k.taps.empty()) continue; // interp layers carry no weights
            const Kernel& g = tape.param_grad_at(p);
            if (cfg.optimizer == Optimizer::SGD)
                detail::sgd_update(k, g, cfg.learning_rate);
            else
                detail::adam_update(k, g, slots[p], cfg, step + 1);
            ++p;
        }
    }

    result.after = held_out_report(result.stack, held_out_seed, held_out_length, report_cfg);
    return result;
}

} // namespace uplab

#endif
