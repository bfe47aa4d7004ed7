#ifndef UPLAB_CSV_HPP
#define UPLAB_CSV_HPP

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "uplab/common.hpp"
#include "uplab/signal.hpp"
#include "uplab/stft.hpp"

namespace uplab {

namespace detail {

// %.17g round-trips every double exactly
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_rows(const std::string& path, const std::vector<std::vector<double>>& rows) {
    std::ofstream file(path, std::ios::trunc);
    require(file.good(), "csv: cannot open for writing: " + path);
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) file << ',';
            file << format_double(row[i]);
        }
        file << '\n';
    }
    require(file.good(), "csv: write failed: " + path);
}

} // namespace detail

/// Headerless, one row per channel.
inline void write_signal_csv(const std::string& path, const Signal& x) {
    std::vector<std::vector<double>> rows(x.channels);
    for (std::size_t c = 0; c < x.channels; ++c) {
        rows[c].resize(x.length);
        for (std::size_t t = 0; t < x.length; ++t) rows[c][t] = x.at(c, t);
    }
    detail::write_rows(path, rows);
}

inline Signal read_signal_csv(const std::string& path, double sample_rate = 1.0) {
    std::ifstream file(path);
    require(file.good(), "csv: cannot open: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(file, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw Error("csv: bad number '" + cell + "' in " + path);
            }
        }
        rows.push_back(std::move(row));
    }
    require(!rows.empty(), "csv: empty file: " + path);
    for (const auto& row : rows)
        require(row.size() == rows[0].size(), "csv: ragged rows in " + path);
    Signal out(rows.size(), rows[0].size(), sample_rate);
    for (std::size_t c = 0; c < out.channels; ++c)
        for (std::size_t t = 0; t < out.length; ++t) out.at(c, t) = rows[c][t];
    return out;
}

/// One row per frequency bin (bin 0 first), one column per frame, dB values.
inline void write_spectrogram_csv(const std::string& path, const Spectrogram& spec) {
    std::vector<std::vector<double>> rows(spec.freq_bins);
    for (std::size_t k = 0; k < spec.freq_bins; ++k) {
        rows[k].resize(spec.frames);
        for (std::size_t f = 0; f < spec.frames; ++f) rows[k][f] = spec.at(k, f);
    }
    detail::write_rows(path, rows);
}

/// Rows of `step,loss`.
inline void write_loss_curve_csv(const std::string& path, const std::vector<double>& losses) {
    std::ofstream file(path, std::ios::trunc);
    require(file.good(), "csv: cannot open for writing: " + path);
    for (std::size_t i = 0; i < losses.size(); ++i)
        file << i << ',' << detail::format_double(losses[i]) << '\n';
    require(file.good(), "csv: write failed: " + path);
}

/// Single row; used for the small exact output vectors.
inline void write_vector_csv(const std::string& path, const std::vector<double>& v) {
    detail::write_rows(path, {v});
}

} // namespace uplab

#endif
