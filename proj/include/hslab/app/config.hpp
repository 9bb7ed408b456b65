#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hslab::app {

inline constexpr std::array<std::string_view, 7> commands{"classify", "atlas",     "simulate", "picard",
                                                          "ibps-check", "fre-scan", "sharpness"};

bool is_command(std::string_view name);

struct Param {
    std::string value;
    int line = 0;             // 0 for values set on the command line
    std::string origin;       // "line 12" or "--k"
};

struct RunConfig {
    std::string command;
    std::map<std::string, Param> params;                         // effective values for `command`
    std::map<std::string, std::map<std::string, Param>> sections; // [section] keys as written
    std::filesystem::path output_dir;
    std::uint64_t seed = 1;

    bool has(const std::string& key) const { return params.count(key) != 0; }
    std::string str(const std::string& key, std::string_view fallback) const;
    double number(const std::string& key, double fallback) const;
    double number(const std::string& key) const;  // required
    int integer(const std::string& key, int fallback) const;
    bool flag(const std::string& key, bool fallback) const;
    std::vector<double> numbers(const std::string& key, std::vector<double> fallback) const;
    const Param& at(const std::string& key) const;
};

// key = value lines, '#' comments, [section] headers naming a command or "run".
// Throws ConfigError("line N: ...") on malformed input.
RunConfig parse_config(std::string_view text);

// Applies command-line overrides, merges the command's section, fills output_dir
// and seed, and checks key sets and required keys. Throws ConfigError.
void finalize(RunConfig& cfg, const std::map<std::string, std::string>& overrides);

// Keys a command accepts (besides command, out, seed) and the ones it requires.
const std::vector<std::string>& allowed_keys(std::string_view command);
const std::vector<std::string>& required_keys(std::string_view command);

// HSLAB_OUT_DIR, else "hslab_out".
std::filesystem::path default_output_dir();

} // namespace hslab::app
