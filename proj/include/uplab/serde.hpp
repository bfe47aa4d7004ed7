#ifndef UPLAB_SERDE_HPP
#define UPLAB_SERDE_HPP

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "uplab/artifacts.hpp"
#include "uplab/common.hpp"
#include "uplab/layer.hpp"

namespace uplab {

using json = nlohmann::json;

namespace detail {

inline std::string kind_name(LayerKind k) {
    switch (k) {
        case LayerKind::TransposedConv: return "transposed_conv";
        case LayerKind::NearestUpsample: return "nearest_upsample";
        case LayerKind::LinearUpsample: return "linear_upsample";
        case LayerKind::InterpPlusConv: return "interp_plus_conv";
        case LayerKind::SubpixelConv: return "subpixel_conv";
        case LayerKind::PlainConv: return "plain_conv";
    }
    return "transposed_conv";
}

inline LayerKind kind_from(const std::string& s) {
    if (s == "transposed_conv") return LayerKind::TransposedConv;
    if (s == "nearest_upsample") return LayerKind::NearestUpsample;
    if (s == "linear_upsample") return LayerKind::LinearUpsample;
    if (s == "interp_plus_conv") return LayerKind::InterpPlusConv;
    if (s == "subpixel_conv") return LayerKind::SubpixelConv;
    if (s == "plain_conv") return LayerKind::PlainConv;
    throw Error("stack json: unknown layer kind '" + s + "'");
}

inline std::string init_name(InitKind k) {
    switch (k) {
        case InitKind::RandomUniform: return "random_uniform";
        case InitKind::Constant: return "constant";
        case InitKind::ICNR: return "icnr";
    }
    return "random_uniform";
}

inline InitKind init_from(const std::string& s) {
    if (s == "random_uniform") return InitKind::RandomUniform;
    if (s == "constant") return InitKind::Constant;
    if (s == "icnr") return InitKind::ICNR;
    throw Error("stack json: unknown init '" + s + "'");
}

inline std::string tone_kind_name(ToneKind k) {
    switch (k) {
        case ToneKind::Direct: return "direct";
        case ToneKind::Replica: return "replica";
        case ToneKind::OffsetReplica: return "offset_replica";
    }
    return "direct";
}

} // namespace detail

inline json stack_to_json(const StackSpec& spec) {
    json layers = json::array();
    for (const auto& l : spec.layers) {
        json j{{"kind", detail::kind_name(l.kind)},
               {"length", l.length},
               {"stride", l.stride},
               {"factor", l.factor},
               {"init", detail::init_name(l.init)},
               {"constant_value", l.constant_value},
               {"use_bias", l.use_bias},
               {"activation", l.activation == Activation::ReLU ? "relu" : "none"},
               {"interp", l.interp == InterpMode::Linear ? "linear" : "nearest"}};
        if (l.seed) j["seed"] = *l.seed;
        layers.push_back(std::move(j));
    }
    return json{{"input_rate", spec.input_rate}, {"channels", spec.channels}, {"layers", layers}};
}

inline StackSpec stack_from_json(const json& j) {
    StackSpec spec;
    try {
        spec.input_rate = j.at("input_rate").get<double>();
        spec.channels = j.at("channels").get<std::size_t>();
        for (const auto& lj : j.at("layers")) {
            LayerSpec l;
            l.kind = detail::kind_from(lj.at("kind").get<std::string>());
            l.length = lj.value("length", std::size_t{1});
            l.stride = lj.value("stride", std::size_t{1});
            l.factor = lj.value("factor", std::size_t{1});
            l.init = detail::init_from(lj.value("init", std::string("random_uniform")));
            l.constant_value = lj.value("constant_value", 1.0);
            l.use_bias = lj.value("use_bias", false);
            const std::string act = lj.value("activation", std::string("none"));
            if (act == "relu") l.activation = Activation::ReLU;
            else if (act == "none") l.activation = Activation::None;
            else throw Error("stack json: unknown activation '" + act + "'");
            const std::string interp = lj.value("interp", std::string("nearest"));
            if (interp == "linear") l.interp = InterpMode::Linear;
            else if (interp == "nearest") l.interp = InterpMode::Nearest;
            else throw Error("stack json: unknown interp '" + interp + "'");
            if (lj.contains("seed")) l.seed = lj.at("seed").get<std::uint64_t>();
            spec.layers.push_back(l);
        }
    } catch (const json::exception& e) {
        throw Error(std::string("stack json: ") + e.what());
    }
    spec.validate();
    return spec;
}

inline void save_stack_json(const std::string& path, const StackSpec& spec) {
    std::ofstream file(path, std::ios::trunc);
    require(file.good(), "stack json: cannot open for writing: " + path);
    file << stack_to_json(spec).dump(2) << '\n';
    require(file.good(), "stack json: write failed: " + path);
}

inline StackSpec load_stack_json(const std::string& path) {
    std::ifstream file(path);
    require(file.good(), "stack json: cannot open: " + path);
    json j;
    try {
        file >> j;
    } catch (const json::exception& e) {
        throw Error(std::string("stack json: parse error in ") + path + ": " + e.what());
    }
    return stack_from_json(j);
}

inline json report_to_json(const ArtifactReport& report) {
    json peaks = json::array();
    for (const auto& p : report.tonal_peaks)
        peaks.push_back({{"frequency_hz", p.frequency_hz},
                         {"prominence_db", p.prominence_db},
                         {"bin", p.bin}});
    json predictions = json::array();
    for (const auto& m : report.predictions)
        predictions.push_back({{"frequency_hz", m.prediction.frequency_hz},
                               {"origin_layer", m.prediction.origin_layer},
                               {"kind", detail::tone_kind_name(m.prediction.kind)},
                               {"matched", m.matched},
                               {"measured_prominence_db", m.measured_prominence_db}});
    return json{{"tonal", report.tonal},
                {"filtering", report.filtering},
                {"prominence_threshold_db", report.prominence_threshold_db},
                {"filtering_threshold_db", report.filtering_threshold_db},
                {"peaks", peaks},
                {"bands", report.filtering_profile},
                {"predictions", predictions}};
}

inline void save_report_json(const std::string& path, const ArtifactReport& report) {
    std::ofstream file(path, std::ios::trunc);
    require(file.good(), "report json: cannot open for writing: " + path);
    file << report_to_json(report).dump(2) << '\n';
    require(file.good(), "report json: write failed: " + path);
}

/// Raw little-endian doubles: for each layer in order, taps then bias.
inline void save_weights(const std::string& path, const Stack& stack) {
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    require(file.good(), "weights: cannot open for writing: " + path);
    auto put = [&](const std::vector<double>& v) {
        for (double d : v) {
            std::uint64_t bits;
            std::memcpy(&bits, &d, 8);
            unsigned char b[8];
            for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
            file.write(reinterpret_cast<const char*>(b), 8);
        }
    };
    for (const auto& k : stack.kernels) {
        put(k.taps);
        put(k.bias);
    }
    require(file.good(), "weights: write failed: " + path);
}

/// Loads a blob written by save_weights into a stack of identical shape.
inline void load_weights(const std::string& path, Stack& stack) {
    std::ifstream file(path, std::ios::binary);
    require(file.good(), "weights: cannot open: " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(file)),
                                     std::istreambuf_iterator<char>());
    std::size_t expect = 0;
    for (const auto& k : stack.kernels) expect += k.taps.size() + k.bias.size();
    require(bytes.size() == expect * 8, "weights: size does not match the stack");
    std::size_t pos = 0;
    auto get = [&](std::vector<double>& v) {
        for (double& d : v) {
            std::uint64_t bits = 0;
            for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[pos + i]) << (8 * i);
            std::memcpy(&d, &bits, 8);
            pos += 8;
        }
    };
    for (auto& k : stack.kernels) {
        get(k.taps);
        get(k.bias);
    }
}

} // namespace uplab

#endif
