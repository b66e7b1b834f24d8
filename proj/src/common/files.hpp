#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace photoart {

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
std::string read_file_text(const std::filesystem::path& path);

void write_file(const std::filesystem::path& path, std::string_view data);
void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& data);

// Writes to a sibling temp file and renames over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view data);
void write_file_atomic(const std::filesystem::path& path, const std::vector<std::uint8_t>& data);

void append_line(const std::filesystem::path& path, std::string_view line);

}  // namespace photoart
