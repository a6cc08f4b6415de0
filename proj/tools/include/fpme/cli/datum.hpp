#pragma once

#include "fpme/grid.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>

namespace fpme::cli {

struct GroundDatum {
    int sign = 1;
};

struct BumpMixDatum {
    double amplitude = 0.0;
    double center = 0.0;
    double width = 0.0;
    double neg_scale = 1.0;
};

struct RandomDatum {
    std::uint64_t seed = 0;
    double scale = 1.0;
};

struct FileDatum {
    std::filesystem::path path;
};

using DatumPreset = std::variant<GroundDatum, BumpMixDatum, RandomDatum, FileDatum>;

struct DatumSpec {
    DatumPreset preset;
    bool negated = false;  // leading `-`: u0 is replaced by -u0
};

/// `ground`, `minus_ground`, `bump_mix(amp, center, width[, neg_scale])`,
/// `random(seed, scale)` or `file(path.csv)`, optionally prefixed by `-`.
/// Throws ConfigError.
DatumSpec parse_datum(const std::string& text);

/// Initial datum u0 on `grid`; `w` is the ground state (ignored by
/// random and file data).
GridFunction make_datum(const DatumSpec& spec, const GridFunction& w, double m);

/// scale * sum_{k=1..5} c_k / k * sin(k pi (x - a) / (b - a)), c_k standard
/// normal from a 64-bit Mersenne twister seeded with `seed`.
GridFunction random_sine_mix(const Grid& grid, std::uint64_t seed, double scale);

}  // namespace fpme::cli
