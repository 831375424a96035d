#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace floorstitch {

// Writes through a sibling temporary file and renames it into place.
void WriteFileAtomic(const std::filesystem::path& path, std::string_view data);

std::string ReadFile(const std::filesystem::path& path);

}  // namespace floorstitch
