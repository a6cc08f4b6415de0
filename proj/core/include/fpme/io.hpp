#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace fpme {

/// Writes `content` to a sibling temp file and renames it over `path`.
void write_text_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_text(const std::filesystem::path& path);

/// Shortest round-trippable text is not needed here; outputs use a fixed
/// 17 significant digits so files are byte-stable across runs.
std::string format_double(double x);

}  // namespace fpme
