#ifndef UPLAB_WAV_HPP
#define UPLAB_WAV_HPP

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "uplab/common.hpp"
#include "uplab/signal.hpp"

namespace uplab {

enum class WavFormat { Pcm16, Float32 };

namespace detail {

inline void put_u16(std::vector<unsigned char>& out, std::uint16_t v) {
    out.push_back(static_cast<unsigned char>(v & 0xff));
    out.push_back(static_cast<unsigned char>(v >> 8));
}

inline void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xff));
}

inline std::uint16_t get_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

inline std::uint32_t get_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

// scale matches the read side (s / 32768); +1.0 clamps to the max code
inline std::int16_t clamp_pcm16(double v) {
    double scaled = std::lround(v * 32768.0);
    if (scaled > 32767.0) scaled = 32767.0;
    if (scaled < -32768.0) scaled = -32768.0;
    return static_cast<std::int16_t>(scaled);
}

} // namespace detail

/// RIFF/WAVE writer, little-endian, samples interleaved across channels.
inline void write_wav(const std::string& path, const Signal& x,
                      WavFormat format = WavFormat::Float32) {
    require(x.channels >= 1 && x.length >= 1, "wav: empty signal");
    require(x.sample_rate > 0.0, "wav: sample rate must be positive");

    const std::uint16_t channels = static_cast<std::uint16_t>(x.channels);
    const auto rate = static_cast<std::uint32_t>(std::llround(x.sample_rate));
    const std::uint16_t bits = format == WavFormat::Pcm16 ? 16 : 32;
    const std::uint16_t block = static_cast<std::uint16_t>(channels * bits / 8);
    const std::uint32_t data_bytes = static_cast<std::uint32_t>(x.length) * block;

    std::vector<unsigned char> out;
    out.reserve(44 + data_bytes);
    const char* riff = "RIFF";
    out.insert(out.end(), riff, riff + 4);
    detail::put_u32(out, 36 + data_bytes);
    const char* wave = "WAVEfmt ";
    out.insert(out.end(), wave, wave + 8);
    detail::put_u32(out, 16);
    detail::put_u16(out, format == WavFormat::Pcm16 ? 1 : 3); // 1 PCM, 3 IEEE float
    detail::put_u16(out, channels);
    detail::put_u32(out, rate);
    detail::put_u32(out, rate * block);
    detail::put_u16(out, block);
    detail::put_u16(out, bits);
    const char* data = "data";
    out.insert(out.end(), data, data + 4);
    detail::put_u32(out, data_bytes);

    for (std::size_t t = 0; t < x.length; ++t) {
        for (std::size_t c = 0; c < x.channels; ++c) {
            if (format == WavFormat::Pcm16) {
                std::int16_t s = detail::clamp_pcm16(x.at(c, t));
                detail::put_u16(out, static_cast<std::uint16_t>(s));
            } else {
                float f = static_cast<float>(x.at(c, t));
                std::uint32_t bitsv;
                std::memcpy(&bitsv, &f, 4);
                detail::put_u32(out, bitsv);
            }
        }
    }

    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    require(file.good(), "wav: cannot open for writing: " + path);
    file.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
    require(file.good(), "wav: write failed: " + path);
}

/// Reads PCM16 and 32-bit IEEE float WAVs; other codecs are rejected.
/// Unknown chunks are skipped.
inline Signal read_wav(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    require(file.good(), "wav: cannot open: " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(file)),
                                     std::istreambuf_iterator<char>());
    require(bytes.size() >= 12, "wav: file too short: " + path);
    require(std::memcmp(bytes.data(), "RIFF", 4) == 0 && std::memcmp(bytes.data() + 8, "WAVE", 4) == 0,
            "wav: not a RIFF/WAVE file: " + path);

    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;
    bool have_fmt = false;
    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const unsigned char* hdr = bytes.data() + pos;
        std::uint32_t chunk_size = detail::get_u32(hdr + 4);
        std::size_t body = pos + 8;
        if (std::memcmp(hdr, "fmt ", 4) == 0) {
            require(chunk_size >= 16 && body + 16 <= bytes.size(), "wav: truncated fmt chunk");
            format = detail::get_u16(bytes.data() + body);
            channels = detail::get_u16(bytes.data() + body + 2);
            rate = detail::get_u32(bytes.data() + body + 4);
            bits = detail::get_u16(bytes.data() + body + 14);
            have_fmt = true;
        } else if (std::memcmp(hdr, "data", 4) == 0) {
            require(have_fmt, "wav: data chunk before fmt chunk");
            require(channels >= 1 && rate >= 1, "wav: malformed fmt chunk");
            require(body + chunk_size <= bytes.size(), "wav: truncated data chunk");
            const bool pcm16 = format == 1 && bits == 16;
            const bool f32 = format == 3 && bits == 32;
            require(pcm16 || f32, "wav: only PCM16 and 32-bit float are supported");
            const std::size_t bytes_per = pcm16 ? 2 : 4;
            const std::size_t frames = chunk_size / (bytes_per * channels);
            Signal out(channels, frames, static_cast<double>(rate));
            for (std::size_t t = 0; t < frames; ++t) {
                for (std::size_t c = 0; c < channels; ++c) {
                    const unsigned char* p = bytes.data() + body + (t * channels + c) * bytes_per;
                    if (pcm16) {
                        auto s = static_cast<std::int16_t>(detail::get_u16(p));
                        out.at(c, t) = static_cast<double>(s) / 32768.0;
                    } else {
                        std::uint32_t bv = detail::get_u32(p);
                        float f;
                        std::memcpy(&f, &bv, 4);
                        out.at(c, t) = static_cast<double>(f);
                    }
                }
            }
            return out;
        }
        pos = body + chunk_size + (chunk_size & 1); // chunks are word-aligned
    }
    throw Error("wav: no data chunk found: " + path);
}

} // namespace uplab

#endif
