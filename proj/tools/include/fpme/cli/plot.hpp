#pragma once

#include <filesystem>
#include <vector>

namespace fpme::cli {

/// Writes a matplotlib script that plots the given CSV files, chosen by their
/// header: ledgers (t, energy, dist_plus, dist_minus) give energy-vs-time and
/// distance-vs-time panels, path profiles (tau, energy, bound) a profile
/// panel. Nothing is executed. Throws MissingFile when a file does not exist
/// or the list is empty, Io when no file has a recognized header.
void emit_plot_script(const std::vector<std::filesystem::path>& csv_files, const std::filesystem::path& script);

/// Collects ledger and profile CSVs from `dir` and writes `dir/plot.py`.
std::filesystem::path emit_plot_script(const std::filesystem::path& dir);

}  // namespace fpme::cli
