#include "fpme/cli/datum.hpp"

#include "fpme/asymptotics.hpp"
#include "fpme/cli/config.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

namespace fpme::cli {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string::npos) return {};
    return s.substr(first, s.find_last_not_of(" \t") - first + 1);
}

std::vector<std::string> arguments(const std::string& text, const std::string& name) {
    const std::string body = trim(text.substr(name.size()));
    if (body.size() < 2 || body.front() != '(' || body.back() != ')') {
        throw ConfigError("datum `" + text + "`: expected " + name + "(...)");
    }
    std::vector<std::string> args;
    std::stringstream ss(body.substr(1, body.size() - 2));
    std::string item;
    while (std::getline(ss, item, ',')) args.push_back(trim(item));
    return args;
}

double number(const std::string& text, const std::string& arg) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), v);
    if (ec != std::errc() || ptr != arg.data() + arg.size() || !std::isfinite(v)) {
        throw ConfigError("datum `" + text + "`: bad number `" + arg + "`");
    }
    return v;
}

DatumPreset parse_preset(const std::string& text) {
    if (text == "ground") return GroundDatum{1};
    if (text == "minus_ground") return GroundDatum{-1};
    if (text.rfind("bump_mix", 0) == 0) {
        const auto args = arguments(text, "bump_mix");
        if (args.size() != 3 && args.size() != 4) throw ConfigError("datum `" + text + "`: bump_mix takes 3 or 4 arguments");
        BumpMixDatum d{number(text, args[0]), number(text, args[1]), number(text, args[2]), 1.0};
        if (args.size() == 4) d.neg_scale = number(text, args[3]);
        if (!(d.width > 0.0) || d.neg_scale < 0.0) throw ConfigError("datum `" + text + "`: width must be positive, neg_scale nonnegative");
        return d;
    }
    if (text.rfind("random", 0) == 0) {
        const auto args = arguments(text, "random");
        if (args.size() != 2) throw ConfigError("datum `" + text + "`: random takes 2 arguments");
        const double seed = number(text, args[0]);
        if (seed < 0.0 || seed != std::floor(seed)) throw ConfigError("datum `" + text + "`: seed must be a nonnegative integer");
        return RandomDatum{static_cast<std::uint64_t>(seed), number(text, args[1])};
    }
    if (text.rfind("file", 0) == 0) {
        const auto args = arguments(text, "file");
        if (args.size() != 1 || args[0].empty()) throw ConfigError("datum `" + text + "`: file takes one path");
        return FileDatum{args[0]};
    }
    throw ConfigError("unknown datum preset `" + text + "`");
}

}  // namespace

DatumSpec parse_datum(const std::string& raw) {
    const std::string text = trim(raw);
    if (!text.empty() && text.front() == '-') return DatumSpec{parse_preset(trim(text.substr(1))), true};
    return DatumSpec{parse_preset(text), false};
}

GridFunction random_sine_mix(const Grid& grid, std::uint64_t seed, double scale) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Eigen::VectorXd v = Eigen::VectorXd::Zero(grid.n());
    for (int k = 1; k <= 5; ++k) {
        const double c = normal(rng) / k;
        for (int i = 0; i < grid.n(); ++i) {
            v[i] += c * std::sin(k * std::numbers::pi * (grid.node(i) - grid.a()) / grid.length());
        }
    }
    return GridFunction(grid, scale * v);
}

namespace {

GridFunction make_preset(const DatumPreset& preset, const GridFunction& w, double m) {
    const double q = (m + 1.0) / m;
    if (auto g = std::get_if<GroundDatum>(&preset)) return static_cast<double>(g->sign) * phi_inv(w, q);
    if (auto b = std::get_if<BumpMixDatum>(&preset)) return bump_mix(w, b->amplitude, b->center, b->width, m, b->neg_scale);
    if (auto r = std::get_if<RandomDatum>(&preset)) return random_sine_mix(w.grid(), r->seed, r->scale);
    return read_csv(std::get<FileDatum>(preset).path, w.grid());
}

}  // namespace

GridFunction make_datum(const DatumSpec& spec, const GridFunction& w, double m) {
    const GridFunction u0 = make_preset(spec.preset, w, m);
    return spec.negated ? -u0 : u0;
}

}  // namespace fpme::cli
