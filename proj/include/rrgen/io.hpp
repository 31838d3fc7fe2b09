#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace rrgen {

std::string read_text_file(const std::filesystem::path& path);
std::vector<std::string> read_lines(const std::filesystem::path& path);

// Writes to `<path>.partial` and renames into place, so an interrupted run
// never leaves a plausible-looking artifact behind.
void atomic_write_text(const std::filesystem::path& path, std::string_view content);

// Canonical shortest-round-trip formatting for doubles in text artifacts.
std::string format_double(double value);

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 14695981039346656037ULL);

// Little-endian fixed-width binary primitives shared by the tensor and
// retrieval-index containers.
void put_u64(std::ostream& out, std::uint64_t value);
void put_f64(std::ostream& out, double value);
void put_string(std::ostream& out, std::string_view value);
std::uint64_t get_u64(std::istream& in);
double get_f64(std::istream& in);
std::string get_string(std::istream& in);

}  // namespace rrgen
