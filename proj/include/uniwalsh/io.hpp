#pragma once

// Run configuration, the JSON series file, target files and CSV traces.

#include "uniwalsh/universal.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace uniwalsh {

inline constexpr int kSeriesFormatVersion = 1;

struct RunConfig {
    std::size_t depth = 2;
    double eps = 0.25;
    Mode mode = Mode::strict;
    Freq fmax = Freq{1} << 10;
    int grid_rank = 14;  // working-rank cap for 1-D builds
    std::uint64_t seed = 1;
    CatalogParams catalog;
    int steps = 3;
    // Paths are not echoed into the series file.
    std::string target;
    std::string out = "series.json";

    Limits limits() const;
    /// Throws std::invalid_argument on non-positive bounds or eps outside (0,1).
    void validate() const;
    bool operator==(const RunConfig&) const = default;
};

struct SeriesFile {
    int version = kSeriesFormatVersion;
    RunConfig config;
    WalshSeries2D series;
    std::vector<BlockRecord> blocks;
    std::optional<WeightFunction> weight;
    std::optional<std::string> failure;
    std::string failure_kind;

    bool operator==(const SeriesFile&) const = default;
};

/// Exact text form: doubles as hex floats, masks run-length encoded
/// (alternating runs starting with a run of zeros).
std::string serialize(const SeriesFile& file);
/// Throws ParseError naming the offending location.
SeriesFile deserialize(std::string_view text);

/// Write-then-rename.
void save_series(const std::string& path, const SeriesFile& file);
SeriesFile load_series(const std::string& path);

std::vector<std::uint64_t> rle_encode(std::span<const std::uint8_t> mask);
std::vector<std::uint8_t> rle_decode(std::span<const std::uint64_t> runs, std::size_t size);

std::string hex_double(double v);
double parse_hex_double(const std::string& s);

/// Either piece lines "rank_x index_x rank_y index_y value", or a grid whose
/// first line is "# grid p q" followed by 2^p rows of 2^q comma-separated values.
/// Lines starting with '#' are comments. Throws ParseError with a line number.
Grid2D parse_target(std::string_view text);
Grid2D load_target(const std::string& path);

/// Header comment line, column row, one row per step.
void write_trace_csv(std::ostream& os, const ApproxTrace& trace);

}  // namespace uniwalsh
