#ifndef UPLAB_FIGURES_HPP
#define UPLAB_FIGURES_HPP

#include <string>
#include <vector>

#include "uplab/artifacts.hpp"
#include "uplab/csv.hpp"
#include "uplab/layer.hpp"
#include "uplab/manifest.hpp"
#include "uplab/pgm.hpp"
#include "uplab/serde.hpp"
#include "uplab/signal.hpp"
#include "uplab/stft.hpp"

namespace uplab {

enum class FigureFormat { Csv, Pgm, Both };

struct FigureJob {
    std::string figure_id;
    std::uint64_t seed = 0;
    std::string out_dir = ".";
    FigureFormat format = FigureFormat::Both;
    StftConfig stft{};
    double prominence_db = 10.0;
};

struct FigureResult {
    std::vector<std::string> files; // data files, deterministic order
    std::string manifest_path;
    bool tonal = false; // any emitted report with a tonal verdict
};

namespace detail {

struct FigureWriter {
    const FigureJob& job;
    FigureResult& result;

    std::string path(const std::string& name) const { return job.out_dir + "/" + name; }

    void vector_csv(const std::string& name, const std::vector<double>& v) const {
        const std::string p = path(name);
        write_vector_csv(p, v);
        result.files.push_back(p);
    }

    void spectrogram(const std::string& stem, const Spectrogram& spec) const {
        if (job.format != FigureFormat::Pgm) {
            const std::string p = path(stem + ".csv");
            write_spectrogram_csv(p, spec);
            result.files.push_back(p);
        }
        if (job.format != FigureFormat::Csv) {
            const std::string p = path(stem + ".pgm");
            write_spectrogram_pgm(p, spec);
            result.files.push_back(p);
        }
    }

    void report(const std::string& name, const ArtifactReport& rep) const {
        const std::string p = path(name);
        save_report_json(p, rep);
        result.files.push_back(p);
        if (rep.tonal) result.tonal = true;
    }
};

inline std::vector<double> channel0(const Signal& x) {
    std::vector<double> v(x.length);
    for (std::size_t t = 0; t < x.length; ++t) v[t] = x.at(0, t);
    return v;
}

inline LayerSpec transposed_layer(std::size_t length, std::size_t stride, InitKind init) {
    LayerSpec l;
    l.kind = LayerKind::TransposedConv;
    l.length = length;
    l.stride = stride;
    l.init = init;
    return l;
}

// Initialization-artifact demos feed non-negative noise (uniform on [0,1)),
// the range of post-activation feature maps these upsamplers see inside real
// models; tones ride on the mean.
inline Signal unit_noise(std::size_t channels, std::size_t length, std::uint64_t seed,
                         double rate) {
    return add(scale(white_noise(channels, length, seed, rate), 0.5),
               constant_signal(channels, length, 0.5, rate));
}

// Per-layer spectrograms + a final-layer report for one pipeline variant.
inline void emit_stack_column(const FigureWriter& w, const std::string& stem, const Stack& stack,
                              const Signal& x) {
    const std::vector<Signal> outs = apply_stack(x, stack);
    Spectrogram last;
    for (std::size_t i = 0; i < outs.size(); ++i) {
        last = mean_power_stft(outs[i], w.job.stft);
        char name[64];
        std::snprintf(name, sizeof name, "%s_layer%zu", stem.c_str(), i + 1);
        w.spectrogram(name, last);
    }
    w.report(stem + "_report.json",
             build_report(last, predict_tones(stack.spec), w.job.prominence_db));
}

inline void fig_small_vector(const FigureWriter& w, const std::string& id, const LayerSpec& layer,
                             std::size_t small_input, std::uint64_t seed) {
    StackSpec spec;
    spec.channels = 1;
    spec.input_rate = 1.0;
    spec.layers = {layer};
    Stack stack = realize(spec, seed);
    w.vector_csv(id + "_output.csv", channel0(apply_stack(ones(1, small_input), stack).back()));

    // same construction on a long constant input for the spectrogram view
    StackSpec wide = spec;
    wide.input_rate = 4000.0;
    Stack wide_stack = realize(wide, seed);
    const Signal y = apply_stack(ones(1, 4096, 4000.0), wide_stack).back();
    const Spectrogram view = mean_power_stft(y, w.job.stft);
    w.spectrogram(id + "_spectrogram", view);
    w.report(id + "_report.json",
             build_report(view, predict_tones(wide), w.job.prominence_db));
}

inline void fig2(const FigureWriter& w) {
    // no overlap, random weights: the kernel tiles verbatim, period = stride
    fig_small_vector(w, "fig2", transposed_layer(3, 3, InitKind::RandomUniform), 5, w.job.seed);
}

inline void fig3(const FigureWriter& w) {
    // partial overlap, constant ones: [1,1,2,1,2,1,2,1,1]
    fig_small_vector(w, "fig3", transposed_layer(3, 2, InitKind::Constant), 4, w.job.seed);
}

inline void fig4(const FigureWriter& w) {
    // full overlap at stride 1, constant ones: flat interior, ramped borders
    fig_small_vector(w, "fig4", transposed_layer(3, 1, InitKind::Constant), 5, w.job.seed);
}

inline void fig5(const FigureWriter& w) {
    // four bias-free variants on ones: the weight-initialization issue
    // persists wherever weights are random, whatever the overlap class
    const struct {
        const char* name;
        std::size_t length, stride;
        InitKind init;
    } variants[] = {{"a_no_overlap_random", 3, 3, InitKind::RandomUniform},
                    {"b_partial_overlap_random", 3, 2, InitKind::RandomUniform},
                    {"c_full_overlap_random", 4, 2, InitKind::RandomUniform},
                    {"d_full_overlap_constant", 4, 2, InitKind::Constant}};
    for (const auto& v : variants) {
        StackSpec spec;
        spec.channels = 1;
        spec.input_rate = 1.0;
        spec.layers = {transposed_layer(v.length, v.stride, v.init)};
        Stack stack = realize(spec, w.job.seed);
        w.vector_csv(std::string("fig5_") + v.name + "_output.csv",
                     channel0(apply_stack(ones(1, 16), stack).back()));
    }
}

inline void fig6(const FigureWriter& w) {
    // interpolation (x2) + conv, length 9, stride 1, three layers
    for (InterpMode mode : {InterpMode::Nearest, InterpMode::Linear}) {
        StackSpec spec;
        spec.channels = 8;
        spec.input_rate = 4000.0;
        for (int i = 0; i < 3; ++i) {
            LayerSpec l;
            l.kind = LayerKind::InterpPlusConv;
            l.factor = 2;
            l.length = 9;
            l.interp = mode;
            spec.layers.push_back(l);
        }
        Stack stack = realize(spec, w.job.seed);
        const std::string name = mode == InterpMode::Nearest ? "nearest" : "linear";
        // "music" stands in as a documented synthetic harmonic signal
        Signal music = harmonic(8, 2048, 220.0, 4000.0);
        emit_stack_column(w, "fig6_" + name + "_harmonic", stack, music);
        emit_stack_column(w, "fig6_" + name + "_noise", stack,
                          unit_noise(8, 2048, w.job.seed + 100, 4000.0));
    }
}

inline void fig7(const FigureWriter& w) {
    // subpixel: conv length 3 stride 1 + periodic shuffle (x2), three layers
    StackSpec spec;
    spec.channels = 8;
    spec.input_rate = 4000.0;
    for (int i = 0; i < 3; ++i) {
        LayerSpec l;
        l.kind = LayerKind::SubpixelConv;
        l.factor = 2;
        l.length = 3;
        spec.layers.push_back(l);
    }
    Stack stack = realize(spec, w.job.seed);
    Signal music = harmonic(8, 2048, 220.0, 4000.0);
    emit_stack_column(w, "fig7_harmonic", stack, music);
    emit_stack_column(w, "fig7_noise", stack, unit_noise(8, 2048, w.job.seed + 100, 4000.0));
}

inline void fig8(const FigureWriter& w) {
    // transposed length 4 stride 2 (x3) against pure linear interpolation
    StackSpec trans;
    trans.channels = 8;
    trans.input_rate = 4000.0;
    for (int i = 0; i < 3; ++i) trans.layers.push_back(transposed_layer(4, 2, InitKind::RandomUniform));
    Stack ts = realize(trans, w.job.seed);
    emit_stack_column(w, "fig8_transposed_ones", ts, ones(8, 2048, 4000.0));
    emit_stack_column(w, "fig8_transposed_noise", ts, unit_noise(8, 2048, w.job.seed + 100, 4000.0));

    StackSpec lin;
    lin.channels = 8;
    lin.input_rate = 4000.0;
    for (int i = 0; i < 3; ++i) {
        LayerSpec l;
        l.kind = LayerKind::LinearUpsample;
        l.factor = 2;
        lin.layers.push_back(l);
    }
    Stack ls = realize(lin, w.job.seed);
    emit_stack_column(w, "fig8_linear_ones", ls, ones(8, 2048, 4000.0));
    emit_stack_column(w, "fig8_linear_noise", ls, unit_noise(8, 2048, w.job.seed + 100, 4000.0));
}

inline void fig9(const FigureWriter& w) {
    // offset replicas: bias + first-layer ReLU against the stripped variant
    StackSpec with;
    with.channels = 1;
    with.input_rate = 4000.0;
    for (int i = 0; i < 2; ++i) {
        LayerSpec l = transposed_layer(8, 4, InitKind::RandomUniform);
        l.use_bias = true;
        l.activation = i == 0 ? Activation::ReLU : Activation::None;
        with.layers.push_back(l);
    }
    StackSpec without = with;
    for (auto& l : without.layers) {
        l.use_bias = false;
        l.activation = Activation::None;
    }
    Stack sw = realize(with, w.job.seed);
    Stack so = realize(without, w.job.seed);
    for (auto& k : sw.kernels) std::fill(k.bias.begin(), k.bias.end(), 0.1);

    Signal x = white_noise(1, 2048, w.job.seed + 100, 4000.0); // zero-mean
    OffsetComparison cmp = compare_offset(sw, so, x, w.job.stft, w.job.prominence_db);
    w.spectrogram("fig9_with_offsets", stft(apply_stack(x, sw).back(), w.job.stft));
    w.spectrogram("fig9_without_offsets", stft(apply_stack(x, so).back(), w.job.stft));
    w.report("fig9_with_report.json", cmp.with_report);
    w.report("fig9_without_report.json", cmp.without_report);

    json j{{"offset_frequencies_hz", cmp.offset_frequencies_hz},
           {"energy_delta_db", cmp.energy_delta_db}};
    const std::string p = w.path("fig9_offset_deltas.json");
    std::ofstream file(p, std::ios::trunc);
    require(file.good(), "figure: cannot open for writing: " + p);
    file << j.dump(2) << '\n';
    require(file.good(), "figure: write failed: " + p);
    w.result.files.push_back(p);
}

inline void fig10(const FigureWriter& w) {
    // same stack and input, analysis framing centered vs not
    StackSpec trans;
    trans.channels = 8;
    trans.input_rate = 4000.0;
    for (int i = 0; i < 3; ++i) trans.layers.push_back(transposed_layer(4, 2, InitKind::RandomUniform));
    Stack ts = realize(trans, w.job.seed);
    const Signal y = apply_stack(unit_noise(8, 2048, w.job.seed + 100, 4000.0), ts).back();
    StftConfig uncentered = w.job.stft;
    uncentered.center = false;
    StftConfig centered = w.job.stft;
    centered.center = true;
    w.spectrogram("fig10_center_false", mean_power_stft(y, uncentered));
    w.spectrogram("fig10_center_true", mean_power_stft(y, centered));
}

} // namespace detail

/// Renders one figure job into its output directory and writes the manifest.
inline FigureResult run_figure(const FigureJob& job) {
    job.stft.validate();
    FigureResult result;
    detail::FigureWriter w{job, result};

    RunManifest manifest;
    manifest.command = "figure " + job.figure_id;
    manifest.seed = job.seed;
    manifest.started_utc = RunManifest::now_utc();

    if (job.figure_id == "fig2") detail::fig2(w);
    else if (job.figure_id == "fig3") detail::fig3(w);
    else if (job.figure_id == "fig4") detail::fig4(w);
    else if (job.figure_id == "fig5") detail::fig5(w);
    else if (job.figure_id == "fig6") detail::fig6(w);
    else if (job.figure_id == "fig7") detail::fig7(w);
    else if (job.figure_id == "fig8") detail::fig8(w);
    else if (job.figure_id == "fig9") detail::fig9(w);
    else if (job.figure_id == "fig10") detail::fig10(w);
    else throw Error("figure: unknown figure id '" + job.figure_id + "'");

    char cfg[160];
    std::snprintf(cfg, sizeof cfg, "figure %s seed=%llu nfft=%zu hop=%zu center=%d prom=%g fmt=%d",
                  job.figure_id.c_str(), static_cast<unsigned long long>(job.seed), job.stft.n_fft,
                  job.stft.hop, job.stft.center ? 1 : 0, job.prominence_db,
                  static_cast<int>(job.format));
    manifest.config_hash = hex64(fnv1a64(std::string(cfg)));
    manifest.outputs = result.files;
    manifest.finished_utc = RunManifest::now_utc();
    result.manifest_path = w.path(job.figure_id + "_run_manifest.json");
    write_manifest(result.manifest_path, manifest);
    return result;
}

} // namespace uplab

#endif
