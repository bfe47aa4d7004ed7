#ifndef UPLAB_PGM_HPP
#define UPLAB_PGM_HPP

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "uplab/common.hpp"
#include "uplab/stft.hpp"

namespace uplab {

/// Binary 8-bit PGM (P5). One pixel per (bin, frame); the lowest frequency
/// is the bottom row. Levels map [spec.floor_db, max dB in the data] to
/// [0, 255]; a flat spectrogram renders black.
inline void write_spectrogram_pgm(const std::string& path, const Spectrogram& spec) {
    require(spec.freq_bins >= 1 && spec.frames >= 1, "pgm: empty spectrogram");
    double max_db = spec.floor_db;
    for (double v : spec.magnitudes_db) max_db = std::max(max_db, v);
    const double span = max_db - spec.floor_db;

    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    require(file.good(), "pgm: cannot open for writing: " + path);
    file << "P5\n" << spec.frames << ' ' << spec.freq_bins << "\n255\n";
    std::vector<unsigned char> row(spec.frames);
    for (std::size_t r = 0; r < spec.freq_bins; ++r) {
        const std::size_t bin = spec.freq_bins - 1 - r;
        for (std::size_t f = 0; f < spec.frames; ++f) {
            double v = span <= 0.0 ? 0.0 : (spec.at(bin, f) - spec.floor_db) / span;
            v = std::clamp(v, 0.0, 1.0);
            row[f] = static_cast<unsigned char>(std::lround(v * 255.0));
        }
        file.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
    }
    require(file.good(), "pgm: write failed: " + path);
}

} // namespace uplab

#endif
