#include "fpme/cli/manifest.hpp"

#include "fpme/io.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace fpme::cli {

namespace {

const std::map<std::string, std::vector<std::string>>& registry() {
    static const std::map<std::string, std::vector<std::string>> r{
        {"ground-state",
         {"nehari_r1", "nehari_r2", "critical_residual", "closed_form_Lambda1", "uniqueness"}},
        {"evolve", {"run_complete", "lyapunov", "eed", "step_residual"}},
        {"selection", {"run_complete", "lyapunov", "eed", "step_residual", "prediction_consistent"}},
        {"landscape",
         {"string_converged", "saddle_residual", "saddle_above_ground", "saddle_below_zero", "sigma_identity",
          "gamma_convexity"}},
        {"check",
         {"bregman_gap", "midpoint_gap", "m_structure", "decomposition_identity", "hidden_convexity", "sigma_identity",
          "nehari_r1", "nehari_r2"}},
    };
    return r;
}

}  // namespace

nlohmann::json number(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

const std::vector<std::string>& invariant_registry(const std::string& command) {
    static const std::vector<std::string> none;
    auto it = registry().find(command);
    return it == registry().end() ? none : it->second;
}

RunManifest::RunManifest(std::string command, const RunConfig& config)
    : command_(std::move(command)), config_(config.echo()) {}

void RunManifest::record(const std::string& name, bool passed, double value, double tolerance) {
    records_.push_back({name, passed, value, tolerance});
}

void RunManifest::headline(const std::string& key, nlohmann::json value) { headline_[key] = std::move(value); }

void RunManifest::heuristic(const std::string& key, nlohmann::json value) { heuristic_[key] = std::move(value); }

void RunManifest::set_failure(const std::string& message) { failure_ = message; }

bool RunManifest::complete() const {
    for (const std::string& name : invariant_registry(command_)) {
        const bool found = std::any_of(records_.begin(), records_.end(), [&](const auto& r) { return r.name == name; });
        if (!found) return false;
    }
    return true;
}

bool RunManifest::all_passed() const {
    return complete() && std::all_of(records_.begin(), records_.end(), [](const auto& r) { return r.passed; });
}

nlohmann::json RunManifest::deterministic_json() const {
    nlohmann::json j;
    j["command"] = command_;
    j["version"] = FPME_VERSION_STRING;
    j["config"] = config_;
    nlohmann::json inv = nlohmann::json::object();
    for (const auto& r : records_) {
        inv[r.name] = {{"pass", r.passed}, {"value", number(r.value)}, {"tolerance", number(r.tolerance)}};
    }
    for (const std::string& name : invariant_registry(command_)) {
        if (!inv.contains(name)) inv[name] = {{"pass", false}, {"value", nullptr}, {"tolerance", nullptr}, {"note", "not exercised"}};
    }
    j["invariants"] = inv;
    j["all_passed"] = all_passed();
    j["headline"] = headline_;
    j["heuristic"] = heuristic_;
    if (!failure_.empty()) j["failure"] = failure_;
    return j;
}

void RunManifest::write(const std::filesystem::path& path, double wall_seconds) const {
    nlohmann::json j = deterministic_json();
    j["wall_clock_seconds"] = wall_seconds;
    write_text_atomic(path, j.dump(2) + "\n");
}

}  // namespace fpme::cli
