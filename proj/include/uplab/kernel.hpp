#ifndef UPLAB_KERNEL_HPP
#define UPLAB_KERNEL_HPP

#include <cstddef>
#include <vector>

#include "uplab/common.hpp"

namespace uplab {

/// Convolution weights: taps indexed [out_channel][in_channel][tap], stored
/// flat, plus an optional per-output-channel bias (empty vector = no bias).
struct Kernel {
    std::size_t out_channels = 0;
    std::size_t in_channels = 0;
    std::size_t length = 0;
    std::vector<double> taps;
    std::vector<double> bias; // size out_channels when present, else empty

    Kernel() = default;
    Kernel(std::size_t oc, std::size_t ic, std::size_t len, bool with_bias = false)
        : out_channels(oc), in_channels(ic), length(len),
          taps(oc * ic * len, 0.0),
          bias(with_bias ? oc : 0, 0.0) {}

    double& at(std::size_t oc, std::size_t ic, std::size_t tap) {
        return taps[(oc * in_channels + ic) * length + tap];
    }
    double at(std::size_t oc, std::size_t ic, std::size_t tap) const {
        return taps[(oc * in_channels + ic) * length + tap];
    }

    bool has_bias() const { return !bias.empty(); }
};

/// Single-channel kernel from a tap list, no bias.
inline Kernel kernel_from_taps(const std::vector<double>& taps) {
    Kernel k(1, 1, taps.size());
    for (std::size_t i = 0; i < taps.size(); ++i) k.at(0, 0, i) = taps[i];
    return k;
}

} // namespace uplab

#endif
