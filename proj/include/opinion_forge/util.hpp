#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace opinion_forge {

// Hex-encoded SHA-256 of the given bytes.
std::string sha256_hex(std::string_view data);

// Lowercase ASCII letters in place-copy; leaves other bytes untouched.
std::string to_lower(std::string_view s);

// Trim leading/trailing whitespace and collapse internal runs to one space.
std::string normalize_ws(std::string_view s);

// Whitespace tokenization (space, tab, CR, LF runs as separators).
std::vector<std::string> split_ws(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

bool contains_ws(std::string_view s);

// Read whole file; throws ParseError when unreadable.
std::string read_file(const std::filesystem::path& path);

// Write via temp file in the same directory, then rename over the target.
void atomic_write_file(const std::filesystem::path& path, std::string_view content);

// UTC timestamp, e.g. "2026-08-09T12:00:00Z".
std::string iso8601_now();

}  // namespace opinion_forge
