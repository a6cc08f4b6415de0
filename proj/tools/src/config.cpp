#include "fpme/cli/config.hpp"

#include "fpme/cli/datum.hpp"
#include "fpme/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fpme::cli {

namespace {

const std::vector<std::string> kKeys{
    "a", "b", "n", "s", "m", "alpha", "h", "T", "tol", "window", "n_images", "quad_order", "seed", "datum",
    "file", "snapshots", "lambda2_est", "samples", "uniqueness_trials", "plot", "output_dir",
    "tol_nehari", "tol_closed_form", "tol_uniqueness", "tol_lyapunov", "tol_step_residual", "tol_terminal",
    "tol_plateau", "tol_string_energy", "tol_saddle", "tol_convexity",
};

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double to_double(const std::string& origin, const std::string& key, const std::string& text) {
    double v = 0.0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
        throw ConfigError(origin + ": `" + key + "` expects a number, got `" + text + "`");
    }
    return v;
}

long long to_integer(const std::string& origin, const std::string& key, const std::string& text) {
    long long v = 0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) {
        throw ConfigError(origin + ": `" + key + "` expects an integer, got `" + text + "`");
    }
    return v;
}

bool to_bool(const std::string& origin, const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ConfigError(origin + ": `" + key + "` expects true or false, got `" + text + "`");
}

struct Entry {
    std::string value;
    std::string origin;
};

class Builder {
public:
    void set(const std::string& key, const std::string& value, const std::string& origin) {
        if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) {
            throw ConfigError(origin + ": unknown key `" + key + "`");
        }
        if (value.empty()) throw ConfigError(origin + ": empty value for `" + key + "`");
        entries_[key] = Entry{value, origin};
    }

    RunConfig build() const {
        RunConfig c;
        real("a", c.a);
        real("b", c.b);
        integer("n", c.n);
        real("s", c.s);
        real("m", c.m);
        real("T", c.T);
        real("tol", c.tol);
        real("window", c.window);
        integer("n_images", c.n_images);
        integer("quad_order", c.quad_order);
        integer("samples", c.samples);
        integer("uniqueness_trials", c.uniqueness_trials);
        if (auto e = find("seed")) {
            const long long v = to_integer(e->origin, "seed", e->value);
            if (v < 0) throw ConfigError(e->origin + ": `seed` must be nonnegative");
            c.seed = static_cast<std::uint64_t>(v);
        }
        if (auto e = find("datum")) c.datum = e->value;
        if (auto e = find("file")) {
            if (find("datum")) throw ConfigError(e->origin + ": `file` and `datum` are mutually exclusive");
            c.datum = "file(" + e->value + ")";
        }
        if (auto e = find("snapshots")) {
            std::stringstream ss(e->value);
            std::string item;
            while (std::getline(ss, item, ',')) c.snapshots.push_back(to_double(e->origin, "snapshots", trim(item)));
        }
        if (auto e = find("lambda2_est")) c.lambda2_est = to_double(e->origin, "lambda2_est", e->value);
        if (auto e = find("plot")) c.plot = to_bool(e->origin, "plot", e->value);
        if (auto e = find("output_dir")) c.output_dir = e->value;

        real("tol_nehari", c.tols.nehari);
        real("tol_closed_form", c.tols.closed_form);
        real("tol_uniqueness", c.tols.uniqueness);
        real("tol_lyapunov", c.tols.lyapunov);
        real("tol_step_residual", c.tols.step_residual);
        real("tol_terminal", c.tols.terminal);
        real("tol_plateau", c.tols.plateau);
        real("tol_string_energy", c.tols.string_energy);
        real("tol_saddle", c.tols.saddle);
        real("tol_convexity", c.tols.convexity);

        validate(c);
        return c;
    }

private:
    const Entry* find(const std::string& key) const {
        auto it = entries_.find(key);
        return it == entries_.end() ? nullptr : &it->second;
    }

    std::string origin(const std::string& key) const {
        const Entry* e = find(key);
        return e ? e->origin : "default";
    }

    void real(const std::string& key, double& out) const {
        if (auto e = find(key)) out = to_double(e->origin, key, e->value);
    }

    void integer(const std::string& key, int& out) const {
        if (auto e = find(key)) {
            const long long v = to_integer(e->origin, key, e->value);
            if (v < -1000000000LL || v > 1000000000LL) throw ConfigError(e->origin + ": `" + key + "` out of range");
            out = static_cast<int>(v);
        }
    }

    void require(bool ok, const std::string& key, const std::string& what) const {
        if (!ok) throw ConfigError(origin(key) + ": " + what);
    }

    void validate(RunConfig& c) const {
        require(c.b > c.a, find("b") ? "b" : "a", "domain needs a < b");
        require(c.n >= 8, "n", "n must be at least 8");
        require(c.s > 0.0 && c.s < 1.0, "s", "s must lie in (0, 1)");
        require(c.m > 1.0, "m", "m must exceed 1");
        if (auto e = find("alpha")) {
            c.alpha = to_double(e->origin, "alpha", e->value);
            require(c.alpha > 0.0, "alpha", "alpha must be positive");
        } else {
            c.alpha = 1.0 / (c.m - 1.0);
        }
        if (auto e = find("h")) {
            c.h = to_double(e->origin, "h", e->value);
        } else {
            c.h = std::min(0.05, 0.5 / c.alpha);
        }
        require(c.h > 0.0, "h", "time step h must be positive");
        require(c.h * c.alpha < 1.0, find("h") ? "h" : "alpha", "time step violates h * alpha < 1");
        require(c.T > 0.0, "T", "T must be positive");
        require(c.tol > 0.0, "tol", "tol must be positive");
        require(c.window >= 0.0 && c.window <= c.T, "window", "window must lie in [0, T]");
        require(c.n_images >= 16, "n_images", "n_images must be at least 16");
        require(c.quad_order >= 1 && c.quad_order <= 64, "quad_order", "quad_order must lie in [1, 64]");
        require(c.samples >= 1, "samples", "samples must be positive");
        require(c.uniqueness_trials >= 2, "uniqueness_trials", "uniqueness_trials must be at least 2");
        for (double t : c.snapshots) require(t >= 0.0 && t <= c.T, "snapshots", "snapshot times must lie in [0, T]");
        try {
            parse_datum(c.datum);
        } catch (const ConfigError& e) {
            throw ConfigError(origin(find("file") ? "file" : "datum") + ": " + e.what());
        }
        if (c.lambda2_est) require(*c.lambda2_est < 0.0, "lambda2_est", "lambda2_est must be negative");
        const double Tolerances::*fields[] = {
            &Tolerances::nehari, &Tolerances::closed_form, &Tolerances::uniqueness, &Tolerances::lyapunov,
            &Tolerances::step_residual, &Tolerances::terminal, &Tolerances::plateau, &Tolerances::string_energy,
            &Tolerances::saddle, &Tolerances::convexity};
        for (auto f : fields) {
            if (!(c.tols.*f > 0.0)) throw ConfigError("tolerances must be positive");
        }
    }

    std::map<std::string, Entry> entries_;
};

}  // namespace

const std::vector<std::string>& config_keys() { return kKeys; }

RunConfig parse_config(const std::optional<std::filesystem::path>& file, const FlagValues& flags) {
    Builder builder;
    if (file) {
        std::string text;
        try {
            text = read_text(*file);
        } catch (const std::exception&) {
            throw ConfigError(file->string() + ": cannot read config file");
        }
        std::istringstream in(text);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const std::string origin = file->string() + ":" + std::to_string(lineno);
            if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            line = trim(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos) throw ConfigError(origin + ": expected `key = value`");
            builder.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)), origin);
        }
    }
    for (const auto& [key, value] : flags) builder.set(key, trim(value), "--" + key);
    return builder.build();
}

std::map<std::string, std::string> RunConfig::echo() const {
    std::map<std::string, std::string> out{
        {"a", format_double(a)},
        {"b", format_double(b)},
        {"n", std::to_string(n)},
        {"s", format_double(s)},
        {"m", format_double(m)},
        {"alpha", format_double(alpha)},
        {"h", format_double(h)},
        {"T", format_double(T)},
        {"tol", format_double(tol)},
        {"window", format_double(window)},
        {"n_images", std::to_string(n_images)},
        {"quad_order", std::to_string(quad_order)},
        {"seed", std::to_string(seed)},
        {"datum", datum},
        {"samples", std::to_string(samples)},
        {"uniqueness_trials", std::to_string(uniqueness_trials)},
        {"plot", plot ? "true" : "false"},
        {"output_dir", output_dir.string()},
        {"tol_nehari", format_double(tols.nehari)},
        {"tol_closed_form", format_double(tols.closed_form)},
        {"tol_uniqueness", format_double(tols.uniqueness)},
        {"tol_lyapunov", format_double(tols.lyapunov)},
        {"tol_step_residual", format_double(tols.step_residual)},
        {"tol_terminal", format_double(tols.terminal)},
        {"tol_plateau", format_double(tols.plateau)},
        {"tol_string_energy", format_double(tols.string_energy)},
        {"tol_saddle", format_double(tols.saddle)},
        {"tol_convexity", format_double(tols.convexity)},
    };
    std::string snaps;
    for (double t : snapshots) snaps += (snaps.empty() ? "" : ",") + format_double(t);
    out["snapshots"] = snaps.empty() ? "0," + format_double(T) : snaps;
    out["lambda2_est"] = lambda2_est ? format_double(*lambda2_est) : "auto";
    return out;
}

}  // namespace fpme::cli
