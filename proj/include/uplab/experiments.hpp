#ifndef UPLAB_EXPERIMENTS_HPP
#define UPLAB_EXPERIMENTS_HPP

#include <algorithm>
#include <fstream>
#include <string>
#include <vector>

#include "uplab/artifacts.hpp"
#include "uplab/autodiff.hpp"
#include "uplab/csv.hpp"
#include "uplab/layer.hpp"
#include "uplab/manifest.hpp"
#include "uplab/pgm.hpp"
#include "uplab/serde.hpp"
#include "uplab/train.hpp"

namespace uplab {

struct ExperimentJob {
    std::string name; // offset | gradient | training
    std::uint64_t seed = 0;
    std::string out_dir = ".";
    StftConfig stft{};
    double prominence_db = 10.0;
    // gradient
    std::size_t critic_stride = 4;
    // training
    std::size_t steps = 2000;
    double learning_rate = 2e-4;
};

struct ExperimentResult {
    std::vector<std::string> files;
    std::string manifest_path;
    bool tonal = false;
};

namespace detail {

inline void write_json_file(const std::string& path, const json& j,
                            std::vector<std::string>& files) {
    std::ofstream file(path, std::ios::trunc);
    require(file.good(), "experiment: cannot open for writing: " + path);
    file << j.dump(2) << '\n';
    require(file.good(), "experiment: write failed: " + path);
    files.push_back(path);
}

/// Bias + first-layer ReLU against the stripped variant, 20 seeds; the pair
/// isolates the DC path that turns into in-band offset replicas.
inline void experiment_offset(const ExperimentJob& job, ExperimentResult& result) {
    json rows = json::array();
    std::vector<double> deltas;
    int flips = 0;
    for (std::uint64_t s = 1; s <= 20; ++s) {
        StackSpec with;
        with.channels = 1;
        with.input_rate = 4000.0;
        for (int i = 0; i < 2; ++i) {
            LayerSpec l;
            l.kind = LayerKind::TransposedConv;
            l.length = 8;
            l.stride = 4;
            l.use_bias = true;
            l.activation = i == 0 ? Activation::ReLU : Activation::None;
            with.layers.push_back(l);
        }
        StackSpec without = with;
        for (auto& l : without.layers) {
            l.use_bias = false;
            l.activation = Activation::None;
        }
        Stack sw = realize(with, job.seed + s);
        Stack so = realize(without, job.seed + s);
        for (auto& k : sw.kernels) std::fill(k.bias.begin(), k.bias.end(), 0.1);

        Signal x = white_noise(1, 1024, job.seed + s + 200, 4000.0);
        OffsetComparison cmp = compare_offset(sw, so, x, job.stft, job.prominence_db);
        double mean = 0.0;
        for (double d : cmp.energy_delta_db) mean += d;
        mean /= static_cast<double>(cmp.energy_delta_db.size());
        deltas.push_back(mean);
        const bool flips_here = cmp.with_report.tonal && !cmp.without_report.tonal;
        if (flips_here) ++flips;
        if (cmp.with_report.tonal) result.tonal = true;
        rows.push_back({{"seed", job.seed + s},
                        {"mean_delta_db", mean},
                        {"with_tonal", cmp.with_report.tonal},
                        {"without_tonal", cmp.without_report.tonal}});
    }
    std::vector<double> sorted = deltas;
    std::sort(sorted.begin(), sorted.end());
    const double median = 0.5 * (sorted[9] + sorted[10]);
    detail::write_json_file(job.out_dir + "/offset_results.json",
                            json{{"runs", rows},
                                 {"median_mean_delta_db", median},
                                 {"verdict_flips", flips},
                                 {"seeds", 20}},
                            result.files);

    const std::string curve = job.out_dir + "/offset_deltas.csv";
    write_vector_csv(curve, deltas);
    result.files.push_back(curve);
}

/// Mean loss through a critic stack; strided critics tone the input
/// gradient, the stride-1 control does not.
inline void experiment_gradient(const ExperimentJob& job, ExperimentResult& result) {
    StackSpec critic;
    critic.channels = 4;
    critic.input_rate = 32000.0;
    for (int i = 0; i < 2; ++i) {
        LayerSpec l;
        l.kind = LayerKind::PlainConv;
        l.length = 8;
        l.stride = job.critic_stride;
        critic.layers.push_back(l);
    }
    Stack stack = realize(critic, job.seed + 1);
    Signal x = white_noise(4, 8192, job.seed + 40, 32000.0);
    StftConfig cfg; // resolution is part of the recipe, not a flag
    cfg.n_fft = 4096;
    cfg.hop = 1024;
    Spectrogram gs = gradient_spectrum(stack, x, cfg);

    const std::string stem = job.out_dir + "/gradient_stride" + std::to_string(job.critic_stride);
    write_spectrogram_csv(stem + ".csv", gs);
    result.files.push_back(stem + ".csv");
    write_spectrogram_pgm(stem + ".pgm", gs);
    result.files.push_back(stem + ".pgm");

    auto peaks = detect_tonal_peaks(gs, job.prominence_db);
    json jp = json::array();
    for (const auto& p : peaks)
        jp.push_back({{"frequency_hz", p.frequency_hz},
                      {"prominence_db", p.prominence_db},
                      {"bin", p.bin}});
    if (!peaks.empty()) result.tonal = true;
    detail::write_json_file(stem + "_peaks.json",
                            json{{"critic_stride", job.critic_stride}, {"peaks", jp}},
                            result.files);
}

/// The toy training loop on the biased two-layer transposed stack; loss
/// curve, stacks, weights, and held-out reports land on disk.
inline void experiment_training(const ExperimentJob& job, ExperimentResult& result) {
    StackSpec spec;
    spec.channels = 1;
    spec.input_rate = 4000.0;
    for (int i = 0; i < 2; ++i) {
        LayerSpec l;
        l.kind = LayerKind::TransposedConv;
        l.length = 8;
        l.stride = 4;
        l.use_bias = true;
        spec.layers.push_back(l);
    }
    Stack initial = realize(spec, job.seed + 8);
    ToyDataset ds = make_toy_dataset(spec, 1, 48, job.seed + 9, 1);
    TrainConfig cfg;
    cfg.steps = job.steps;
    cfg.learning_rate = job.learning_rate;
    TrainResult r = train_toy(initial, ds, cfg, 1234, 1024);

    const std::string curve = job.out_dir + "/training_loss.csv";
    write_loss_curve_csv(curve, r.loss_curve);
    result.files.push_back(curve);

    save_stack_json(job.out_dir + "/training_stack.json", spec);
    result.files.push_back(job.out_dir + "/training_stack.json");
    save_weights(job.out_dir + "/training_weights_initial.bin", initial);
    result.files.push_back(job.out_dir + "/training_weights_initial.bin");
    save_weights(job.out_dir + "/training_weights_final.bin", r.stack);
    result.files.push_back(job.out_dir + "/training_weights_final.bin");

    save_report_json(job.out_dir + "/training_report_before.json", r.before);
    result.files.push_back(job.out_dir + "/training_report_before.json");
    save_report_json(job.out_dir + "/training_report_after.json", r.after);
    result.files.push_back(job.out_dir + "/training_report_after.json");
    if (r.after.tonal) result.tonal = true;
}

} // namespace detail

inline ExperimentResult run_experiment(const ExperimentJob& job) {
    job.stft.validate();
    ExperimentResult result;

    RunManifest manifest;
    manifest.command = "experiment " + job.name;
    manifest.seed = job.seed;
    manifest.started_utc = RunManifest::now_utc();

    if (job.name == "offset") detail::experiment_offset(job, result);
    else if (job.name == "gradient") detail::experiment_gradient(job, result);
    else if (job.name == "training") detail::experiment_training(job, result);
    else throw Error("experiment: unknown name '" + job.name + "'");

    char cfg[200];
    std::snprintf(cfg, sizeof cfg,
                  "experiment %s seed=%llu nfft=%zu hop=%zu center=%d prom=%g stride=%zu steps=%zu lr=%g",
                  job.name.c_str(), static_cast<unsigned long long>(job.seed), job.stft.n_fft,
                  job.stft.hop, job.stft.center ? 1 : 0, job.prominence_db, job.critic_stride,
                  job.steps, job.learning_rate);
    manifest.config_hash = hex64(fnv1a64(std::string(cfg)));
    manifest.outputs = result.files;
    manifest.finished_utc = RunManifest::now_utc();
    result.manifest_path = job.out_dir + "/" + job.name + "_run_manifest.json";
    write_manifest(result.manifest_path, manifest);
    return result;
}

} // namespace uplab

#endif
