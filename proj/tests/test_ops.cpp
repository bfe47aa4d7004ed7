#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "uplab/ops.hpp"
#include "uplab/rng.hpp"
#include "uplab/signal.hpp"

using namespace uplab;

namespace {

Signal sig1(const std::vector<double>& v) {
    Signal s(1, v.size());
    for (std::size_t t = 0; t < v.size(); ++t) s.at(0, t) = v[t];
    return s;
}

void expect_exact(const Signal& got, const std::vector<std::vector<double>>& want) {
    REQUIRE(got.channels == want.size());
    for (std::size_t c = 0; c < want.size(); ++c) {
        REQUIRE(got.length == want[c].size());
        for (std::size_t t = 0; t < want[c].size(); ++t) {
            INFO("channel " << c << " sample " << t);
            REQUIRE(got.at(c, t) == want[c][t]);
        }
    }
}

// Gather-form reference for the scatter implementation: for every output
// sample, walk input times in ascending order and pick the tap that lands
// there. Accumulation order matches the scatter loop, so equality is exact.
Signal transposed_reference(const Signal& x, const Kernel& k, std::size_t stride) {
    std::size_t out_len = (x.length - 1) * stride + k.length;
    Signal out(k.out_channels, out_len);
    for (std::size_t oc = 0; oc < k.out_channels; ++oc) {
        for (std::size_t n = 0; n < out_len; ++n) {
            double acc = 0.0;
            for (std::size_t t = 0; t < x.length; ++t) {
                if (n < t * stride) break;
                std::size_t l = n - t * stride;
                if (l >= k.length) continue;
                for (std::size_t ic = 0; ic < k.in_channels; ++ic)
                    acc += k.at(oc, ic, l) * x.at(ic, t);
            }
            if (k.has_bias()) acc += k.bias[oc];
            out.at(oc, n) = acc;
        }
    }
    return out;
}

Signal conv_per_channel(const Signal& x, const Kernel& k1x1) {
    Signal out;
    for (std::size_t ch = 0; ch < x.channels; ++ch) {
        Signal mono(1, x.length);
        for (std::size_t t = 0; t < x.length; ++t) mono.at(0, t) = x.at(ch, t);
        Signal res = conv1d(mono, k1x1, 1);
        if (ch == 0) out = Signal(x.channels, res.length);
        for (std::size_t t = 0; t < res.length; ++t) out.at(ch, t) = res.at(0, t);
    }
    return out;
}

} // namespace

TEST_CASE("conv1d golden vectors") {
    expect_exact(conv1d(sig1({1, 2, 3, 4}), kernel_from_taps({1, 0, 0}), 1), {{1, 2}});
    expect_exact(conv1d(sig1({1, 1, 1, 1}), kernel_from_taps({1, 1, 1}), 1), {{3, 3}});
    expect_exact(conv1d(sig1({1, 2, 3, 4, 5}), kernel_from_taps({1, 1}), 2), {{3, 7}});
}

TEST_CASE("conv1d multichannel with bias") {
    Signal x(2, 3);
    x.at(0, 0) = 1; x.at(0, 1) = 2; x.at(0, 2) = 3;
    x.at(1, 0) = 4; x.at(1, 1) = 5; x.at(1, 2) = 6;
    Kernel k(1, 2, 2, true);
    k.at(0, 0, 0) = 1; k.at(0, 0, 1) = 1;
    k.at(0, 1, 0) = 1; k.at(0, 1, 1) = 1;
    k.bias[0] = 0.5;
    expect_exact(conv1d(x, k, 1), {{12.5, 16.5}});
}

TEST_CASE("conv1d rejects bad shapes") {
    REQUIRE_THROWS_AS(conv1d(sig1({1, 2}), kernel_from_taps({1, 1, 1}), 1), Error);
    REQUIRE_THROWS_AS(conv1d(sig1({1, 2, 3}), kernel_from_taps({1}), 0), Error);
    Kernel k(1, 2, 1);
    REQUIRE_THROWS_AS(conv1d(sig1({1, 2, 3}), k, 1), Error);
}

TEST_CASE("transposed_conv1d tiles the kernel when stride equals length") {
    Signal x = ones(1, 4);
    Kernel k = kernel_from_taps({0.3, -1.2, 2.5});
    Signal y = transposed_conv1d(x, k, 3);
    expect_exact(y, {{0.3, -1.2, 2.5, 0.3, -1.2, 2.5, 0.3, -1.2, 2.5, 0.3, -1.2, 2.5}});
}

TEST_CASE("transposed_conv1d partial overlap golden") {
    Signal y = transposed_conv1d(ones(1, 4), kernel_from_taps({1, 1, 1}), 2);
    expect_exact(y, {{1, 1, 2, 1, 2, 1, 2, 1, 1}});
}

TEST_CASE("transposed_conv1d full overlap golden") {
    Signal y = transposed_conv1d(ones(1, 5), kernel_from_taps({1, 1, 1}), 1);
    expect_exact(y, {{1, 2, 3, 3, 3, 2, 1}});
}

TEST_CASE("transposed_conv1d output length and errors") {
    Signal y = transposed_conv1d(sig1({1}), kernel_from_taps({1, 2}), 4);
    REQUIRE(y.length == 2);
    Kernel k(1, 2, 2);
    REQUIRE_THROWS_AS(transposed_conv1d(sig1({1, 2}), k, 1), Error);
    REQUIRE_THROWS_AS(transposed_conv1d(sig1({1, 2}), kernel_from_taps({1}), 0), Error);
}

TEST_CASE("transposed_conv1d stride larger than length leaves zero gaps") {
    Signal y = transposed_conv1d(sig1({1, 1}), kernel_from_taps({5, 7}), 4);
    expect_exact(y, {{5, 7, 0, 0, 5, 7}});
}

TEST_CASE("transposed_conv1d matches gather reference over randomized cases") {
    Rng rng(2024);
    int cases = 0;
    for (int iter = 0; iter < 10000; ++iter) {
        std::size_t T = 1 + static_cast<std::size_t>(rng.next_u64() % 16);
        std::size_t L = 1 + static_cast<std::size_t>(rng.next_u64() % 5);
        std::size_t S = 1 + static_cast<std::size_t>(rng.next_u64() % 4);
        std::size_t ci = 1 + static_cast<std::size_t>(rng.next_u64() % 3);
        std::size_t co = 1 + static_cast<std::size_t>(rng.next_u64() % 3);
        bool with_bias = (rng.next_u64() & 1) != 0;
        Signal x(ci, T);
        for (auto& v : x.data) v = rng.uniform(-1.0, 1.0);
        Kernel k(co, ci, L, with_bias);
        for (auto& v : k.taps) v = rng.uniform(-1.0, 1.0);
        for (auto& v : k.bias) v = rng.uniform(-1.0, 1.0);
        Signal got = transposed_conv1d(x, k, S);
        Signal want = transposed_reference(x, k, S);
        REQUIRE(got.channels == want.channels);
        REQUIRE(got.length == want.length);
        for (std::size_t i = 0; i < got.data.size(); ++i) {
            if (got.data[i] != want.data[i]) {
                INFO("case " << iter << " flat index " << i);
                REQUIRE(got.data[i] == want.data[i]);
            }
        }
        ++cases;
    }
    REQUIRE(cases == 10000);
}

TEST_CASE("no overlap: constant unit kernel maps ones to ones") {
    for (std::size_t s : {1u, 2u, 3u, 5u}) {
        Kernel k(1, 1, s);
        for (auto& v : k.taps) v = 1.0;
        Signal y = transposed_conv1d(ones(1, 6), k, s);
        REQUIRE(y.length == 6 * s);
        for (std::size_t n = 0; n < y.length; ++n) REQUIRE(y.at(0, n) == 1.0);
    }
}

TEST_CASE("partial overlap: interior repeats with period equal to the stride") {
    Signal y = transposed_conv1d(ones(1, 12), kernel_from_taps({1, 1, 1}), 2);
    std::size_t lo = 1, hi = y.length - 1;
    for (std::size_t i = lo; i + 2 < hi; ++i) REQUIRE(y.at(0, i) == y.at(0, i + 2));
    bool constant = true;
    for (std::size_t i = lo; i + 1 < hi; ++i)
        if (y.at(0, i) != y.at(0, i + 1)) constant = false;
    REQUIRE_FALSE(constant);
}

TEST_CASE("full overlap: constant interior, ramps confined to length minus stride") {
    for (std::size_t m : {2u, 3u}) {
        std::size_t S = 2, L = m * S;
        Kernel k(1, 1, L);
        for (auto& v : k.taps) v = 1.0;
        Signal y = transposed_conv1d(ones(1, 10), k, S);
        std::size_t edge = L - S;
        for (std::size_t n = edge; n + edge < y.length; ++n)
            REQUIRE(y.at(0, n) == static_cast<double>(m));
        for (std::size_t n = 0; n < edge; ++n) {
            REQUIRE(y.at(0, n) < static_cast<double>(m));
            REQUIRE(y.at(0, y.length - 1 - n) < static_cast<double>(m));
        }
    }
}

TEST_CASE("classify_overlap") {
    REQUIRE(classify_overlap(3, 3) == OverlapClass::NoOverlap);
    REQUIRE(classify_overlap(1, 1) == OverlapClass::NoOverlap);
    REQUIRE(classify_overlap(3, 2) == OverlapClass::PartialOverlap);
    REQUIRE(classify_overlap(2, 4) == OverlapClass::PartialOverlap);
    REQUIRE(classify_overlap(4, 2) == OverlapClass::FullOverlap);
    REQUIRE(classify_overlap(12, 4) == OverlapClass::FullOverlap);
    REQUIRE_THROWS_AS(classify_overlap(0, 1), Error);
    REQUIRE_THROWS_AS(classify_overlap(1, 0), Error);
}

TEST_CASE("stretch inserts zeros") {
    expect_exact(stretch(sig1({5}), 3), {{5, 0, 0}});
    expect_exact(stretch(sig1({1, 2}), 2), {{1, 0, 2, 0}});
    expect_exact(stretch(sig1({1, 2, 3}), 1), {{1, 2, 3}});
    REQUIRE_THROWS_AS(stretch(sig1({1}), 0), Error);
}

TEST_CASE("interp_kernel shapes and values") {
    Kernel n2 = interp_kernel(InterpMode::Nearest, 2);
    REQUIRE(n2.length == 2);
    REQUIRE(n2.at(0, 0, 0) == 1.0);
    REQUIRE(n2.at(0, 0, 1) == 1.0);

    Kernel l2 = interp_kernel(InterpMode::Linear, 2);
    REQUIRE(l2.length == 3);
    REQUIRE(l2.at(0, 0, 0) == 0.5);
    REQUIRE(l2.at(0, 0, 1) == 1.0);
    REQUIRE(l2.at(0, 0, 2) == 0.5);

    Kernel l3 = interp_kernel(InterpMode::Linear, 3);
    REQUIRE(l3.length == 5);
    REQUIRE(l3.at(0, 0, 0) == 1.0 / 3.0);
    REQUIRE(l3.at(0, 0, 1) == 2.0 / 3.0);
    REQUIRE(l3.at(0, 0, 2) == 1.0);
    REQUIRE(l3.at(0, 0, 3) == 2.0 / 3.0);
    REQUIRE(l3.at(0, 0, 4) == 1.0 / 3.0);

    REQUIRE_THROWS_AS(interp_kernel(InterpMode::Linear, 0), Error);
}

TEST_CASE("interpolation kernels have DC gain r") {
    for (std::size_t r = 1; r <= 8; ++r) {
        for (InterpMode mode : {InterpMode::Nearest, InterpMode::Linear}) {
            Kernel k = interp_kernel(mode, r);
            double sum = 0.0;
            for (double v : k.taps) sum += v;
            REQUIRE(sum == Catch::Approx(static_cast<double>(r)).margin(1e-12));
        }
    }
}

TEST_CASE("nearest_upsample golden vectors") {
    expect_exact(nearest_upsample(sig1({3.5, -2}), 2), {{3.5, 3.5, -2, -2}});
    expect_exact(nearest_upsample(sig1({1, 2, 3}), 1), {{1, 2, 3}});
    expect_exact(nearest_upsample(sig1({1, -1, 1}), 3), {{1, 1, 1, -1, -1, -1, 1, 1, 1}});
}

TEST_CASE("linear_upsample golden vectors") {
    expect_exact(linear_upsample(sig1({0, 2}), 2), {{0, 1, 2, 1}});
    expect_exact(linear_upsample(sig1({1, 2, 3}), 1), {{1, 2, 3}});
    Signal c = linear_upsample(constant_signal(1, 5, 4.25), 2);
    for (std::size_t n = 0; n + 1 < c.length; ++n) REQUIRE(c.at(0, n) == 4.25);
}

TEST_CASE("linear_upsample interpolates interior samples") {
    Rng rng(11);
    Signal x(1, 9);
    for (auto& v : x.data) v = rng.uniform(-1.0, 1.0);
    std::size_t r = 4;
    Signal y = linear_upsample(x, r);
    REQUIRE(y.length == x.length * r);
    for (std::size_t t = 0; t < x.length; ++t) {
        REQUIRE(y.at(0, r * t) == x.at(0, t));
        for (std::size_t j = 1; j < r; ++j) {
            double next = (t + 1 < x.length) ? x.at(0, t + 1) : 0.0;
            double want = (static_cast<double>(r - j) * x.at(0, t) + static_cast<double>(j) * next) /
                          static_cast<double>(r);
            REQUIRE(y.at(0, r * t + j) == Catch::Approx(want).margin(1e-14));
        }
    }
}

TEST_CASE("upsamplers equal their stretch plus convolution constructions") {
    Rng rng(505);
    for (int iter = 0; iter < 1000; ++iter) {
        std::size_t T = 1 + static_cast<std::size_t>(rng.next_u64() % 12);
        std::size_t r = 1 + static_cast<std::size_t>(rng.next_u64() % 5);
        std::size_t ch = 1 + static_cast<std::size_t>(rng.next_u64() % 2);
        Signal x(ch, T);
        for (auto& v : x.data) v = rng.uniform(-1.0, 1.0);

        Signal near_got = nearest_upsample(x, r);
        Signal near_want =
            conv_per_channel(pad(stretch(x, r), r - 1, 0), interp_kernel(InterpMode::Nearest, r));
        REQUIRE(near_got.length == near_want.length);
        for (std::size_t i = 0; i < near_got.data.size(); ++i)
            REQUIRE(near_got.data[i] == near_want.data[i]);

        Signal lin_got = linear_upsample(x, r);
        Signal lin_want =
            conv_per_channel(pad(stretch(x, r), r - 1, r - 1), interp_kernel(InterpMode::Linear, r));
        REQUIRE(lin_got.length == lin_want.length);
        for (std::size_t i = 0; i < lin_got.data.size(); ++i)
            REQUIRE(lin_got.data[i] == lin_want.data[i]);
    }
}

TEST_CASE("periodic_shuffle interleaves channel groups") {
    Signal x(2, 3);
    x.at(0, 0) = 1; x.at(0, 1) = 2; x.at(0, 2) = 3;
    x.at(1, 0) = 10; x.at(1, 1) = 20; x.at(1, 2) = 30;
    expect_exact(periodic_shuffle(x, 2), {{1, 10, 2, 20, 3, 30}});
    expect_exact(periodic_shuffle(x, 1), {{1, 2, 3}, {10, 20, 30}});

    Signal y(3, 1);
    y.at(0, 0) = 7; y.at(1, 0) = 8; y.at(2, 0) = 9;
    expect_exact(periodic_shuffle(y, 3), {{7, 8, 9}});

    REQUIRE_THROWS_AS(periodic_shuffle(x, 4), Error);
}

TEST_CASE("periodic_shuffle keeps multichannel groups aligned") {
    // 4 channels, r=2 -> 2 output channels; group j occupies channels j*C..j*C+C-1
    Signal x(4, 2);
    for (std::size_t c = 0; c < 4; ++c)
        for (std::size_t t = 0; t < 2; ++t) x.at(c, t) = static_cast<double>(10 * c + t);
    Signal y = periodic_shuffle(x, 2);
    REQUIRE(y.channels == 2);
    REQUIRE(y.length == 4);
    expect_exact(y, {{0, 20, 1, 21}, {10, 30, 11, 31}});
}

TEST_CASE("subpixel with identical sub-kernels equals nearest of shared conv") {
    Rng rng(77);
    std::size_t r = 3, C = 2, ic = 2, L = 4, T = 16;
    Kernel sub(C, ic, L);
    for (auto& v : sub.taps) v = rng.uniform(-1.0, 1.0);
    Kernel k(r * C, ic, L);
    for (std::size_t j = 0; j < r; ++j)
        for (std::size_t c = 0; c < C; ++c)
            for (std::size_t i = 0; i < ic; ++i)
                for (std::size_t l = 0; l < L; ++l) k.at(j * C + c, i, l) = sub.at(c, i, l);
    Signal x(ic, T);
    for (auto& v : x.data) v = rng.uniform(-1.0, 1.0);
    Signal got = subpixel_upsample(x, k, r);
    Signal want = nearest_upsample(conv1d(x, sub, 1), r);
    REQUIRE(got.channels == want.channels);
    REQUIRE(got.length == want.length);
    for (std::size_t i = 0; i < got.data.size(); ++i) REQUIRE(got.data[i] == want.data[i]);
}

TEST_CASE("subpixel with r=1 is plain convolution") {
    Rng rng(78);
    Kernel k(2, 1, 3);
    for (auto& v : k.taps) v = rng.uniform(-1.0, 1.0);
    Signal x(1, 10);
    for (auto& v : x.data) v = rng.uniform(-1.0, 1.0);
    Signal got = subpixel_upsample(x, k, 1);
    Signal want = conv1d(x, k, 1);
    for (std::size_t i = 0; i < got.data.size(); ++i) REQUIRE(got.data[i] == want.data[i]);
}

TEST_CASE("subpixel sub-kernels touch disjoint output phases") {
    Rng rng(79);
    std::size_t r = 4, C = 1, L = 3, T = 12;
    Kernel k(r * C, 1, L);
    for (auto& v : k.taps) v = rng.uniform(-1.0, 1.0);
    Signal x(1, T);
    for (auto& v : x.data) v = rng.uniform(-1.0, 1.0);
    Signal base = subpixel_upsample(x, k, r);
    for (std::size_t j = 0; j < r; ++j) {
        Kernel kp = k;
        kp.at(j * C, 0, 1) += 0.5;
        Signal bumped = subpixel_upsample(x, kp, r);
        for (std::size_t n = 0; n < base.length; ++n) {
            if (n % r == j) continue;
            REQUIRE(bumped.at(0, n) == base.at(0, n));
        }
        bool changed = false;
        for (std::size_t n = j; n < base.length; n += r)
            if (bumped.at(0, n) != base.at(0, n)) changed = true;
        REQUIRE(changed);
    }
}

TEST_CASE("sample_rate bookkeeping through the ops") {
    Signal x = ones(1, 8, 4000.0);
    REQUIRE(conv1d(x, kernel_from_taps({1, 1}), 1).sample_rate == 4000.0);
    REQUIRE(transposed_conv1d(x, kernel_from_taps({1, 1}), 2).sample_rate == 4000.0);
    REQUIRE(stretch(x, 2).sample_rate == 8000.0);
    REQUIRE(nearest_upsample(x, 3).sample_rate == 12000.0);
    REQUIRE(linear_upsample(x, 2).sample_rate == 8000.0);
    Signal multi(4, 4, 1000.0);
    REQUIRE(periodic_shuffle(multi, 2).sample_rate == 2000.0);
}

TEST_CASE("relu clamps negatives and keeps positives") {
    Signal y = relu(sig1({-1.5, 0.0, 2.5, -0.0}));
    expect_exact(y, {{0, 0, 2.5, 0}});
}
