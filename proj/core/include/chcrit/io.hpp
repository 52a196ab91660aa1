#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "chcrit/grid.hpp"
#include "chcrit/string_method.hpp"

namespace chcrit {

// CHF1: magic "CHF1", little-endian u32 n, f64 side, f64 phi, f64 xi,
// then n*n f64 values row-major.
void write_field_chf1(const std::filesystem::path& p, const Field& u);
Field read_field_chf1(const std::filesystem::path& p);

// CHS1: magic "CHS1", u32 image count, the images as concatenated CHF1
// records, f64 alpha array, u64 iter.
void write_string_chs1(const std::filesystem::path& p, const StringState& s);
StringState read_string_chs1(const std::filesystem::path& p);

// Peeks at the 4-byte magic; empty string when unreadable.
std::string file_magic(const std::filesystem::path& p);

std::uint64_t fnv1a64(const void* data, std::size_t len);
std::uint64_t fnv1a64_str(const std::string& s);
std::uint64_t fnv1a64_file(const std::filesystem::path& p);

// Flat key=value text: one pair per line, '#' comments, blank lines ignored.
std::map<std::string, std::string> read_kv(const std::filesystem::path& p);
void write_kv(const std::filesystem::path& p,
              const std::vector<std::pair<std::string, std::string>>& kv);

// Shortest round-trip decimal formatting ("%.17g").
std::string fmt_g17(double v);

}  // namespace chcrit
