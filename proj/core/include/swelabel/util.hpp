#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace swelabel::util {

// FNV-1a, used everywhere a stable cross-platform hash is needed (stub
// backend keys, template hashes, manifest hashes). Never std::hash.
constexpr std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

// splitmix64 step; drives all deterministic pseudo-random generation.
constexpr std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

std::string hex64(std::uint64_t value);

std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::vector<std::string> split_lines(std::string_view text);
bool starts_with(std::string_view s, std::string_view prefix);
std::string to_lower(std::string_view s);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

// Median of unsorted values; even count averages the middle pair.
double median(std::vector<double> values);

struct CommandResult {
    int exit_code = -1;
    std::string output;  // stdout + stderr
};

// Runs a shell command, capturing combined output.
CommandResult run_command(const std::string& shell_command);

std::string shell_quote(const std::string& arg);

}  // namespace swelabel::util
