#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace aave {

/// Whole file as bytes. Throws IoError naming the path.
std::string read_text_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`, so readers
/// never see a partial file. Creates missing parent directories.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace aave
