#pragma once

#include "fpme/cli/config.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace fpme::cli {

struct InvariantRecord {
    std::string name;
    bool passed = false;
    double value = 0.0;
    double tolerance = 0.0;
};

/// Invariant names each command must report; `check`, `ground-state`,
/// `evolve`, `selection`, `landscape`.
const std::vector<std::string>& invariant_registry(const std::string& command);

class RunManifest {
public:
    RunManifest(std::string command, const RunConfig& config);

    /// `passed` is stored as given; value and tolerance are recorded for reference.
    void record(const std::string& name, bool passed, double value = 0.0, double tolerance = 0.0);
    void headline(const std::string& key, nlohmann::json value);
    void heuristic(const std::string& key, nlohmann::json value);
    void set_failure(const std::string& message);

    /// Registry entries never recorded are added as failures.
    bool complete() const;
    bool all_passed() const;
    const std::vector<InvariantRecord>& invariants() const noexcept { return records_; }

    /// Manifest without the wall-clock field.
    nlohmann::json deterministic_json() const;
    void write(const std::filesystem::path& path, double wall_seconds) const;

private:
    std::string command_;
    std::map<std::string, std::string> config_;
    std::vector<InvariantRecord> records_;
    nlohmann::json headline_ = nlohmann::json::object();
    nlohmann::json heuristic_ = nlohmann::json::object();
    std::string failure_;
};

/// JSON number, or null when not finite.
nlohmann::json number(double x);

}  // namespace fpme::cli
