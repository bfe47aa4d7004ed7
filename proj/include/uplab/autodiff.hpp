#ifndef UPLAB_AUTODIFF_HPP
#define UPLAB_AUTODIFF_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "uplab/common.hpp"
#include "uplab/kernel.hpp"
#include "uplab/layer.hpp"
#include "uplab/ops.hpp"
#include "uplab/signal.hpp"
#include "uplab/stft.hpp"

namespace uplab {

struct NodeId {
    std::size_t v = 0;
};
struct ParamId {
    std::size_t v = 0;
};

/// Swaps the channel axes of a kernel: out[i, c, l] = in[c, i, l]. The bias is
/// dropped; adjoints never carry one.
inline Kernel swap_channels(const Kernel& k) {
    Kernel out(k.in_channels, k.out_channels, k.length, false);
    for (std::size_t oc = 0; oc < k.out_channels; ++oc)
        for (std::size_t ic = 0; ic < k.in_channels; ++ic)
            for (std::size_t l = 0; l < k.length; ++l) out.at(ic, oc, l) = k.at(oc, ic, l);
    return out;
}

namespace detail {

inline Signal zero_extend(const Signal& x, std::size_t length) {
    Signal out(x.channels, length, x.sample_rate);
    for (std::size_t c = 0; c < x.channels; ++c)
        for (std::size_t t = 0; t < std::min(x.length, length); ++t) out.at(c, t) = x.at(c, t);
    return out;
}

} // namespace detail

/// Reverse-mode tape over Signal values. Parameters are registered by
/// reference and must outlive the tape; their gradients accumulate in
/// tape-owned slots aligned with registration order.
class Tape {
  public:
    NodeId input(Signal x) {
        nodes_.push_back({std::move(x), Signal(), false});
        return {nodes_.size() - 1};
    }

    ParamId param(Kernel& k) {
        params_.push_back(&k);
        param_grads_.emplace_back(k.out_channels, k.in_channels, k.length, k.has_bias());
        return {params_.size() - 1};
    }

    const Signal& value(NodeId id) const { return nodes_.at(id.v).value; }

    const Signal& grad(NodeId id) const {
        require(ran_, "tape: gradients are only available after backward");
        return nodes_.at(id.v).grad;
    }

    const Kernel& param_grad(ParamId id) const {
        require(ran_, "tape: gradients are only available after backward");
        return param_grads_.at(id.v);
    }

    std::size_t param_count() const { return params_.size(); }
    const Kernel& param_grad_at(std::size_t i) const {
        require(ran_, "tape: gradients are only available after backward");
        return param_grads_.at(i);
    }

    /// y[c,t] = sum_{i,l} k[c,i,l] x[i, t*stride+l] + bias[c]. The input
    /// gradient is, by construction, a transposed convolution (stride kept,
    /// channels swapped) of the upstream gradient, zero-extended to the
    /// input length.
    NodeId conv(NodeId xn, ParamId kp, std::size_t stride) {
        const Kernel& k = *params_[kp.v];
        Signal y = conv1d(value(xn), k, stride);
        y.sample_rate = value(xn).sample_rate / static_cast<double>(stride);
        NodeId yn = input(std::move(y));
        backward_ops_.push_back([this, xn, kp, yn, stride]() {
            const Signal* gp = upstream(yn);
            if (!gp) return;
            const Signal& g = *gp;
            const Signal& x = nodes_[xn.v].value;
            const Kernel& kk = *params_[kp.v];
            Signal xg = transposed_conv1d(g, swap_channels(kk), stride);
            accumulate(xn, detail::zero_extend(xg, x.length));
            Kernel& kg = param_grads_[kp.v];
            for (std::size_t c = 0; c < kk.out_channels; ++c) {
                for (std::size_t t = 0; t < g.length; ++t) {
                    double gv = g.at(c, t);
                    for (std::size_t i = 0; i < kk.in_channels; ++i)
                        for (std::size_t l = 0; l < kk.length; ++l)
                            kg.at(c, i, l) += gv * x.at(i, t * stride + l);
                    if (kk.has_bias()) kg.bias[c] += gv;
                }
            }
        });
        return yn;
    }

    /// Scatter overlap-add forward; the input gradient is the mirror
    /// identity: a plain (cross-correlation) convolution of the upstream
    /// gradient with the channel-swapped kernel at the same stride.
    NodeId transposed(NodeId xn, ParamId kp, std::size_t stride) {
        const Kernel& k = *params_[kp.v];
        Signal y = transposed_conv1d(value(xn), k, stride);
        y.sample_rate = value(xn).sample_rate * static_cast<double>(stride);
        NodeId yn = input(std::move(y));
        backward_ops_.push_back([this, xn, kp, yn, stride]() {
            const Signal* gp = upstream(yn);
            if (!gp) return;
            const Signal& g = *gp;
            const Signal& x = nodes_[xn.v].value;
            const Kernel& kk = *params_[kp.v];
            accumulate(xn, conv1d(g, swap_channels(kk), stride));
            Kernel& kg = param_grads_[kp.v];
            for (std::size_t c = 0; c < kk.out_channels; ++c) {
                for (std::size_t t = 0; t < x.length; ++t)
                    for (std::size_t i = 0; i < kk.in_channels; ++i)
                        for (std::size_t l = 0; l < kk.length; ++l)
                            kg.at(c, i, l) += x.at(i, t) * g.at(c, t * stride + l);
                if (kk.has_bias())
                    for (std::size_t n = 0; n < g.length; ++n) kg.bias[c] += g.at(c, n);
            }
        });
        return yn;
    }

    NodeId relu(NodeId xn) {
        NodeId yn = input(uplab::relu(value(xn)));
        backward_ops_.push_back([this, xn, yn]() {
            const Signal* gp = upstream(yn);
            if (!gp) return;
            const Signal& g = *gp;
            const Signal& x = nodes_[xn.v].value;
            Signal xg(x.channels, x.length, x.sample_rate);
            // subgradient at 0 is 0
            for (std::size_t i = 0; i < xg.data.size(); ++i)
                xg.data[i] = x.data[i] > 0.0 ? g.data[i] : 0.0;
            accumulate(xn, std::move(xg));
        });
        return yn;
    }

    NodeId stretch(NodeId xn, std::size_t factor) {
        NodeId yn = input(uplab::stretch(value(xn), factor));
        backward_ops_.push_back([this, xn, yn, factor]() {
            const Signal* gp = upstream(yn);
            if (!gp) return;
            const Signal& g = *gp;
            const Signal& x = nodes_[xn.v].value;
            Signal xg(x.channels, x.length, x.sample_rate);
            for (std::size_t c = 0; c < x.channels; ++c)
                for (std::size_t t = 0; t < x.length; ++t) xg.at(c, t) = g.at(c, t * factor);
            accumulate(xn, std::move(xg));
        });
        return yn;
    }

    NodeId pad(NodeId xn, std::size_t left, std::size_t right) {
        NodeId yn = input(uplab::pad(value(xn), left, right));
        backward_ops_.push_back([this, xn, yn, left]() {
            const Signal* gp = upstream(yn);
            if (!gp) return;
            const Signal& g = *gp;
            const Signal& x = nodes_[xn.v].value;
            Signal xg(x.channels, x.length, x.sample_rate);
            for (std::size_t c = 0; c < x.channels; ++c)
                for (std::size_t t = 0; t < x.length; ++t) xg.at(c, t) = g.at(c, t + left);
            accumulate(xn, std::move(xg));
        });
        return yn;
    }

    NodeId nearest_up(NodeId xn, std::size_t factor) {
        NodeId yn = input(nearest_upsample(value(xn), factor));
        backward_ops_.push_back([this, xn, yn, factor]() {
            const Signal* gp = upstream(yn);
            if (!gp) return;
            const Signal& g = *gp;
            const Signal& x = nodes_[xn.v].value;
            Signal xg(x.channels, x.length, x.sample_rate);
            for (std::size_t c = 0; c < x.channels; ++c)
                for (std::size_t t = 0; t < x.length; ++t) {
                    double acc = 0.0;
                    for (std::size_t j = 0; j < factor; ++j) acc += g.at(c, t * factor + j);
                    xg.at(c, t) = acc;
                }
            accumulate(xn, std::move(xg));
        });
        return yn;
    }

    /// Fixed per-channel FIR at stride 1; taps are constants, not parameters.
    NodeId channel_fir(NodeId xn, const Kernel& k) {
        NodeId yn = input(detail::conv_each_channel(value(xn), k, 1));
        backward_ops_.push_back([this, xn, yn, taps = k.taps]() {
            const Signal* gp = upstream(yn);
            if (!gp) return;
            const Signal& g = *gp;
            const Signal& x = nodes_[xn.v].value;
            Signal xg(x.channels, x.length, x.sample_rate);
            for (std::size_t c = 0; c < x.channels; ++c)
                for (std::size_t n = 0; n < x.length; ++n) {
                    double acc = 0.0;
                    for (std::size_t l = 0; l < taps.size(); ++l) {
                        if (n < l) continue;
                        std::size_t t = n - l;
                        if (t < g.length) acc += taps[l] * g.at(c, t);
                    }
                    xg.at(c, n) = acc;
                }
            accumulate(xn, std::move(xg));
        });
        return yn;
    }

    /// Zero-insertion upsampling followed by the triangular interpolation
    /// filter; mirrors linear_upsample exactly, so forward values match it
    /// bit for bit.
    NodeId linear_up(NodeId xn, std::size_t factor) {
        if (factor == 1) return xn;
        NodeId s = stretch(xn, factor);
        NodeId p = pad(s, factor - 1, factor - 1);
        return channel_fir(p, interp_kernel(InterpMode::Linear, factor));
    }

    NodeId shuffle(NodeId xn, std::size_t factor) {
        NodeId yn = input(periodic_shuffle(value(xn), factor));
        backward_ops_.push_back([this, xn, yn, factor]() {
            const Signal* gp = upstream(yn);
            if (!gp) return;
            const Signal& g = *gp;
            const Signal& x = nodes_[xn.v].value;
            Signal xg(x.channels, x.length, x.sample_rate);
            std::size_t out_ch = x.channels / factor;
            for (std::size_t c = 0; c < out_ch; ++c)
                for (std::size_t t = 0; t < x.length; ++t)
                    for (std::size_t j = 0; j < factor; ++j)
                        xg.at(j * out_ch + c, t) = g.at(c, factor * t + j);
            accumulate(xn, std::move(xg));
        });
        return yn;
    }

    NodeId subpixel(NodeId xn, ParamId kp, std::size_t factor) {
        return shuffle(conv(xn, kp, 1), factor);
    }

    /// mean of all samples
    double mean_loss(NodeId yn) {
        const Signal& y = value(yn);
        require(!y.data.empty(), "tape: mean of an empty signal");
        double acc = 0.0;
        for (double v : y.data) acc += v;
        double n = static_cast<double>(y.data.size());
        seed_loss(yn, [n](double) { return 1.0 / n; });
        return acc / n;
    }

    /// sum of absolute values; gradient is the sign, 0 at 0
    double sum_abs_loss(NodeId yn) {
        const Signal& y = value(yn);
        double acc = 0.0;
        for (double v : y.data) acc += std::abs(v);
        seed_loss(yn, [](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); });
        return acc;
    }

    /// weighted sum; smooth in y, used by the finite-difference checks
    double weighted_sum_loss(NodeId yn, const Signal& weights) {
        const Signal& y = value(yn);
        require(y.same_shape(weights), "tape: weight shape mismatch");
        double acc = 0.0;
        for (std::size_t i = 0; i < y.data.size(); ++i) acc += weights.data[i] * y.data[i];
        Signal w = weights;
        seed_loss_signal(yn, std::move(w));
        return acc;
    }

    /// mean absolute error against a target of the same shape
    double l1_loss(NodeId yn, const Signal& target) {
        const Signal& y = value(yn);
        require(y.same_shape(target), "tape: l1 target shape mismatch");
        require(!y.data.empty(), "tape: l1 of an empty signal");
        double acc = 0.0;
        double n = static_cast<double>(y.data.size());
        Signal seed(y.channels, y.length, y.sample_rate);
        for (std::size_t i = 0; i < y.data.size(); ++i) {
            double d = y.data[i] - target.data[i];
            acc += std::abs(d);
            seed.data[i] = d > 0.0 ? 1.0 / n : (d < 0.0 ? -1.0 / n : 0.0);
        }
        seed_loss_signal(yn, std::move(seed));
        return acc / n;
    }

    void backward() {
        require(seeded_, "tape: backward before any loss was recorded");
        require(!ran_, "tape: backward ran already");
        ran_ = true;
        for (auto it = backward_ops_.rbegin(); it != backward_ops_.rend(); ++it) (*it)();
    }

  private:
    struct Node {
        Signal value;
        Signal grad;
        bool has_grad = false;
    };

    void accumulate(NodeId id, Signal g) {
        Node& n = nodes_[id.v];
        require(g.channels == n.value.channels && g.length == n.value.length,
                "tape: gradient shape mismatch");
        if (!n.has_grad) {
            n.grad = std::move(g);
            // adjoint ops reuse forward ops whose rate bookkeeping differs;
            // a gradient always lives at its value's rate
            n.grad.sample_rate = n.value.sample_rate;
            n.has_grad = true;
            return;
        }
        for (std::size_t i = 0; i < n.grad.data.size(); ++i) n.grad.data[i] += g.data[i];
    }

    // upstream gradient, or nullptr for branches the loss never consumed
    const Signal* upstream(NodeId yn) const {
        return nodes_[yn.v].has_grad ? &nodes_[yn.v].grad : nullptr;
    }

    template <typename F> void seed_loss(NodeId yn, F per_sample) {
        const Signal& y = value(yn);
        Signal seed(y.channels, y.length, y.sample_rate);
        for (std::size_t i = 0; i < y.data.size(); ++i) seed.data[i] = per_sample(y.data[i]);
        seed_loss_signal(yn, std::move(seed));
    }

    void seed_loss_signal(NodeId yn, Signal seed) {
        require(!seeded_, "tape: a loss was already recorded");
        seeded_ = true;
        accumulate(yn, std::move(seed));
        // ensure every node between loss and inputs has a grad slot filled
        // lazily by accumulate; nothing else to do here
    }

    std::vector<Node> nodes_;
    std::vector<Kernel*> params_;
    std::vector<Kernel> param_grads_;
    std::vector<std::function<void()>> backward_ops_;
    bool seeded_ = false;
    bool ran_ = false;
};

/// Differentiable mirror of apply_stack: records one taped op chain per
/// layer, registering each weighted layer's kernel as a parameter.
/// Parameter registration order equals layer order.
inline NodeId taped_stack_forward(Tape& t, Stack& stack, NodeId x) {
    stack.spec.validate();
    require(stack.kernels.size() == stack.spec.layers.size(),
            "taped forward: stack is not realized");
    NodeId cur = x;
    for (std::size_t i = 0; i < stack.spec.layers.size(); ++i) {
        const LayerSpec& l = stack.spec.layers[i];
        switch (l.kind) {
        case LayerKind::TransposedConv:
            cur = t.transposed(cur, t.param(stack.kernels[i]), l.stride);
            break;
        case LayerKind::PlainConv:
            cur = t.conv(cur, t.param(stack.kernels[i]), l.stride);
            break;
        case LayerKind::NearestUpsample:
            cur = t.nearest_up(cur, l.factor);
            break;
        case LayerKind::LinearUpsample:
            cur = t.linear_up(cur, l.factor);
            break;
        case LayerKind::InterpPlusConv:
            cur = l.interp == InterpMode::Nearest ? t.nearest_up(cur, l.factor)
                                                  : t.linear_up(cur, l.factor);
            cur = t.conv(cur, t.param(stack.kernels[i]), 1);
            break;
        case LayerKind::SubpixelConv:
            cur = t.subpixel(cur, t.param(stack.kernels[i]), l.factor);
            break;
        }
        if (l.activation == Activation::ReLU) cur = t.relu(cur);
    }
    return cur;
}

/// Spectrogram of d(mean critic output)/dx: feeds x through the critic
/// stack, reduces to the mean, and analyzes the input-gradient signal.
/// Strided critics paint the same periodic patterns into the gradient as
/// transposed convolutions paint into activations.
inline Spectrogram gradient_spectrum(Stack& critic, const Signal& x, const StftConfig& cfg = {}) {
    Tape t;
    NodeId xn = t.input(x);
    NodeId yn = taped_stack_forward(t, critic, xn);
    t.mean_loss(yn);
    t.backward();
    return mean_power_stft(t.grad(xn), cfg);
}

} // namespace uplab

#endif
