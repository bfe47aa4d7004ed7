#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "uplab/artifacts.hpp"
#include "uplab/csv.hpp"
#include "uplab/experiments.hpp"
#include "uplab/figures.hpp"
#include "uplab/layer.hpp"
#include "uplab/manifest.hpp"
#include "uplab/pgm.hpp"
#include "uplab/serde.hpp"
#include "uplab/version.hpp"
#include "uplab/wav.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitTonal = 2;

std::uint64_t env_seed() {
    const char* v = std::getenv("UPSAMPLE_LAB_SEED");
    if (!v) return 0;
    try {
        return std::stoull(v);
    } catch (const std::exception&) {
        throw uplab::Error("UPSAMPLE_LAB_SEED is not a valid unsigned integer");
    }
}

struct CommonFlags {
    std::uint64_t seed = 0;
    std::string out = ".";
    std::string format = "both";
    std::size_t nfft = 2048;
    std::size_t hop = 512;
    bool center = false;
    double prominence_db = 10.0;
    std::size_t jobs = 1;
    bool seed_given = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--seed", f.seed, "Base seed (falls back to UPSAMPLE_LAB_SEED, then 0)")
        ->each([&f](const std::string&) { f.seed_given = true; });
    cmd->add_option("--out", f.out, "Output directory (created if missing)");
    cmd->add_option("--format", f.format, "Spectrogram file format")
        ->check(CLI::IsMember({"csv", "pgm", "both"}));
    cmd->add_option("--nfft", f.nfft, "STFT size (power of two)");
    cmd->add_option("--hop", f.hop, "STFT hop");
    cmd->add_flag("--center", f.center, "Center STFT frames (zero-padded edges)");
    cmd->add_option("--prominence-db", f.prominence_db, "Tonal peak prominence threshold");
    cmd->add_option("--jobs", f.jobs, "Worker hint; this build runs single-threaded")
        ->check(CLI::PositiveNumber);
}

uplab::StftConfig stft_of(const CommonFlags& f) {
    uplab::StftConfig cfg;
    cfg.n_fft = f.nfft;
    cfg.hop = f.hop;
    cfg.center = f.center;
    return cfg;
}

uplab::FigureFormat format_of(const CommonFlags& f) {
    if (f.format == "csv") return uplab::FigureFormat::Csv;
    if (f.format == "pgm") return uplab::FigureFormat::Pgm;
    return uplab::FigureFormat::Both;
}

void finish_flags(CommonFlags& f) {
    if (!f.seed_given) f.seed = env_seed();
    std::filesystem::create_directories(f.out);
}

int cmd_figure(const std::string& figure_id, CommonFlags& flags) {
    finish_flags(flags);
    uplab::FigureJob job;
    job.figure_id = figure_id;
    job.seed = flags.seed;
    job.out_dir = flags.out;
    job.format = format_of(flags);
    job.stft = stft_of(flags);
    job.prominence_db = flags.prominence_db;
    uplab::FigureResult result = uplab::run_figure(job);
    std::printf("%s: wrote %zu files to %s\n", figure_id.c_str(), result.files.size() + 1,
                flags.out.c_str());
    return kExitOk;
}

int cmd_analyze(const std::string& wav_path, const std::string& stack_path, CommonFlags& flags,
                bool per_layer) {
    finish_flags(flags);
    uplab::Signal x = uplab::read_wav(wav_path);
    uplab::StackSpec spec = uplab::load_stack_json(stack_path);
    uplab::require(x.sample_rate == spec.input_rate,
                   "analyze: WAV sample rate does not match the stack's input rate");
    uplab::require(x.channels == spec.channels,
                   "analyze: WAV channel count does not match the stack");
    uplab::Stack stack = uplab::realize(spec, flags.seed);
    const std::vector<uplab::Signal> outs = uplab::apply_stack(x, stack);

    uplab::RunManifest manifest;
    manifest.command = "analyze";
    manifest.seed = flags.seed;
    manifest.started_utc = uplab::RunManifest::now_utc();
    manifest.inputs = {wav_path, stack_path};

    const uplab::StftConfig cfg = stft_of(flags);
    std::vector<std::string> files;
    if (per_layer) {
        for (std::size_t i = 0; i < outs.size(); ++i) {
            const uplab::Spectrogram spec_i = uplab::mean_power_stft(outs[i], cfg);
            char name[48];
            std::snprintf(name, sizeof name, "analyze_layer%zu", i + 1);
            if (flags.format != "pgm") {
                const std::string p = flags.out + "/" + name + ".csv";
                uplab::write_spectrogram_csv(p, spec_i);
                files.push_back(p);
            }
            if (flags.format != "csv") {
                const std::string p = flags.out + "/" + name + ".pgm";
                uplab::write_spectrogram_pgm(p, spec_i);
                files.push_back(p);
            }
        }
    }

    const uplab::Spectrogram final_spec = uplab::mean_power_stft(outs.back(), cfg);
    const uplab::ArtifactReport report = uplab::build_report(
        final_spec, uplab::predict_tones(spec), flags.prominence_db);
    const std::string report_path = flags.out + "/analyze_report.json";
    uplab::save_report_json(report_path, report);
    files.push_back(report_path);

    char cfgstr[200];
    std::snprintf(cfgstr, sizeof cfgstr,
                  "analyze %s %s seed=%llu nfft=%zu hop=%zu center=%d prom=%g layers=%d fmt=%s",
                  wav_path.c_str(), stack_path.c_str(),
                  static_cast<unsigned long long>(flags.seed), flags.nfft, flags.hop,
                  flags.center ? 1 : 0, flags.prominence_db, per_layer ? 1 : 0,
                  flags.format.c_str());
    manifest.config_hash = uplab::hex64(uplab::fnv1a64(std::string(cfgstr)));
    manifest.outputs = files;
    manifest.finished_utc = uplab::RunManifest::now_utc();
    uplab::write_manifest(flags.out + "/analyze_run_manifest.json", manifest);

    std::printf("analyze: tonal=%s filtering=%s (%zu peaks)\n", report.tonal ? "true" : "false",
                report.filtering ? "true" : "false", report.tonal_peaks.size());
    return report.tonal ? kExitTonal : kExitOk;
}

int cmd_experiment(const std::string& name, CommonFlags& flags, std::size_t stride,
                   std::size_t steps, double lr) {
    finish_flags(flags);
    uplab::ExperimentJob job;
    job.name = name;
    job.seed = flags.seed;
    job.out_dir = flags.out;
    job.stft = stft_of(flags);
    job.prominence_db = flags.prominence_db;
    job.critic_stride = stride;
    job.steps = steps;
    job.learning_rate = lr;
    uplab::ExperimentResult result = uplab::run_experiment(job);
    std::printf("%s: wrote %zu files to %s\n", name.c_str(), result.files.size() + 1,
                flags.out.c_str());
    return result.tonal ? kExitTonal : kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"1-D upsampler artifact laboratory"};
    app.set_version_flag("--version", std::string("upsample-lab ") + uplab::kVersion);
    app.require_subcommand(1);

    CommonFlags fig_flags;
    std::string figure_id;
    CLI::App* figure = app.add_subcommand("figure", "Render a figure's data files");
    figure->add_option("id", figure_id, "One of fig2..fig10")->required();
    add_common(figure, fig_flags);

    CommonFlags an_flags;
    std::string wav_path, stack_path;
    bool per_layer = false;
    CLI::App* analyze = app.add_subcommand("analyze", "Run a stack over a WAV and report artifacts");
    analyze->add_option("input", wav_path, "Input WAV file")->required();
    analyze->add_option("stack", stack_path, "Stack spec JSON")->required();
    analyze->add_flag("--layers", per_layer, "Also write per-layer spectrograms");
    add_common(analyze, an_flags);

    CommonFlags ex_flags;
    std::string experiment_name;
    std::size_t critic_stride = 4;
    std::size_t steps = 2000;
    double lr = 2e-4;
    CLI::App* experiment = app.add_subcommand("experiment", "Run a named experiment");
    experiment->add_option("name", experiment_name, "offset | gradient | training")->required();
    experiment->add_option("--stride", critic_stride, "Critic stride (gradient)")
        ->check(CLI::PositiveNumber);
    experiment->add_option("--steps", steps, "Training steps");
    experiment->add_option("--lr", lr, "Training learning rate");
    add_common(experiment, ex_flags);

    try {
        app.parse(argc, argv);
        if (figure->parsed()) return cmd_figure(figure_id, fig_flags);
        if (analyze->parsed()) return cmd_analyze(wav_path, stack_path, an_flags, per_layer);
        if (experiment->parsed())
            return cmd_experiment(experiment_name, ex_flags, critic_stride, steps, lr);
        return kExitUsage;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    } catch (const uplab::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    }
}
