#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace caafc {

// ---- basic string hygiene ----

std::string trim(std::string_view s);

// Collapses every run of whitespace (incl. newlines/tabs) to one space and
// trims the ends.
std::string collapse_ws(std::string_view s);

// ASCII-lowercases.
std::string casefold(std::string_view s);

// Canonical form used for text identity checks between model echoes and our
// own strings: casefold + whitespace collapse + strip trailing .,;:!? runs.
std::string normalize_match(std::string_view s);

// ---- hashing ----

// FNV-1a, 64 bit.
std::uint64_t fnv1a64(std::string_view s);

// Lower-case 16-hex-digit rendering of fnv1a64; the key used for fixture
// files and caches.
std::string hash16(std::string_view s);

// ---- URLs ----

// All http(s) URLs in order of first appearance, exact-deduplicated.
// URLs are cut at whitespace and stripped of trailing .,;:!?)"'>] junk.
std::vector<std::string> extract_urls(std::string_view text);

// ---- small formatting helpers ----

// JSON-style bracketed list of double-quoted strings: ["a","b"].
std::string quoted_list(const std::vector<std::string>& items);

std::string join(const std::vector<std::string>& items,
                 std::string_view separator);

// ---- filesystem ----

// Reads a whole file; nullopt when it does not exist or cannot be opened.
std::optional<std::string> read_file(const std::filesystem::path& path);

// Writes via temp file + rename in the target directory, so concurrent
// writers of the same path never interleave. Creates parent directories.
void atomic_write_file(const std::filesystem::path& path,
                       std::string_view content);

// ---- wall clock ----

// "YYYY-MM-DDTHH:MM:SSZ" (UTC).
std::string now_iso8601_utc();

// "YYYY-MM-DD" (UTC).
std::string today_utc();

}  // namespace caafc
