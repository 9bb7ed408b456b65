#include "hslab/app/config.hpp"
#include "hslab/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <sstream>

namespace hslab::app {

namespace {

using Keys = std::vector<std::string>;

const std::map<std::string, Keys, std::less<>>& key_table() {
    static const std::map<std::string, Keys, std::less<>> t{
        {"classify", {"a", "k", "s", "beta", "gamma", "theta", "original_system"}},
        {"atlas", {"a", "k_min", "k_max", "s_min", "s_max", "width"}},
        {"simulate",
         {"a", "beta", "gamma", "theta", "L", "n", "dt", "T", "dealias", "u_amp", "u_center", "u_width", "v_amp",
          "v_center", "v_width", "k", "s", "monitor_every"}},
        {"picard",
         {"a", "lemma", "N", "k", "s", "rho", "b", "delta", "c", "iterate", "t", "u_boxes", "v_boxes", "window_lo",
          "window_hi", "samples", "nodes"}},
        {"ibps-check",
         {"a", "beta", "gamma", "theta", "L", "n", "dt", "T", "delta_u", "delta_v", "eta", "amplitude", "width",
          "v_shift", "nonlinear", "tol"}},
        {"fre-scan",
         {"a", "k", "s", "form", "fixed", "ladder", "alphas", "Ms", "ppd", "alpha_exponent", "max_slope",
          "min_slope", "dual_N", "dual_samples"}},
        {"sharpness",
         {"lemma", "a", "k", "s", "rho", "b", "delta", "c", "N_ladder", "tol", "check_side_conditions", "nodes",
          "samples"}},
    };
    return t;
}

const std::map<std::string, Keys, std::less<>>& required_table() {
    static const std::map<std::string, Keys, std::less<>> t{
        {"classify", {"a", "k", "s"}}, {"atlas", {"a"}},        {"simulate", {"a"}},   {"picard", {"a"}},
        {"ibps-check", {}},           {"fre-scan", {"a", "k", "s"}}, {"sharpness", {"lemma"}},
    };
    return t;
}

const Keys common{"command", "out", "seed"};

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

bool valid_key(std::string_view k) {
    return !k.empty() && std::all_of(k.begin(), k.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_' || c == '-' || c == '.';
    });
}

[[noreturn]] void fail(const Param& p, const std::string& what) { throw ConfigError(p.origin + ": " + what); }

bool key_allowed(std::string_view command, const std::string& key) {
    if (std::find(common.begin(), common.end(), key) != common.end()) return true;
    const auto& ks = allowed_keys(command);
    return std::find(ks.begin(), ks.end(), key) != ks.end();
}

double parse_double(const Param& p, const std::string& key) {
    double v = 0.0;
    const char* b = p.value.data();
    const char* e = b + p.value.size();
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e) {
        // "3/4" style fractions are allowed for convenience
        const auto slash = p.value.find('/');
        if (slash != std::string::npos) {
            double n = 0.0, d = 0.0;
            auto r1 = std::from_chars(b, b + slash, n);
            auto r2 = std::from_chars(b + slash + 1, e, d);
            if (r1.ec == std::errc() && r1.ptr == b + slash && r2.ec == std::errc() && r2.ptr == e && d != 0.0)
                return n / d;
        }
        fail(p, "'" + key + "' expects a number, got '" + p.value + "'");
    }
    return v;
}

} // namespace

bool is_command(std::string_view name) {
    return std::find(commands.begin(), commands.end(), name) != commands.end();
}

const std::vector<std::string>& allowed_keys(std::string_view command) {
    auto it = key_table().find(command);
    if (it == key_table().end()) throw ConfigError("unknown command '" + std::string(command) + "'");
    return it->second;
}

const std::vector<std::string>& required_keys(std::string_view command) {
    auto it = required_table().find(command);
    if (it == required_table().end()) throw ConfigError("unknown command '" + std::string(command) + "'");
    return it->second;
}

std::filesystem::path default_output_dir() {
    if (const char* env = std::getenv("HSLAB_OUT_DIR"); env && *env) return env;
    return "hslab_out";
}

RunConfig parse_config(std::string_view text) {
    RunConfig cfg;
    std::string section;  // "" for the top level
    std::istringstream in{std::string(text)};
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string where = "line " + std::to_string(line);
        auto hash = raw.find('#');
        std::string s = trim(hash == std::string::npos ? std::string_view(raw) : std::string_view(raw).substr(0, hash));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ConfigError(where + ": malformed section header '" + s + "'");
            section = trim(std::string_view(s).substr(1, s.size() - 2));
            if (section == "run") section.clear();
            else if (!is_command(section)) throw ConfigError(where + ": unknown section [" + section + "]");
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected key = value, got '" + s + "'");
        const std::string key = trim(std::string_view(s).substr(0, eq));
        const std::string value = trim(std::string_view(s).substr(eq + 1));
        if (!valid_key(key)) throw ConfigError(where + ": bad key '" + key + "'");
        if (value.empty()) throw ConfigError(where + ": empty value for '" + key + "'");
        auto& target = section.empty() ? cfg.params : cfg.sections[section];
        if (target.count(key)) throw ConfigError(where + ": duplicate key '" + key + "'");
        if (!section.empty() && !key_allowed(section, key))
            throw ConfigError(where + ": unknown key '" + key + "' for [" + section + "]");
        target[key] = Param{value, line, where};
    }
    if (auto it = cfg.params.find("command"); it != cfg.params.end()) {
        if (!is_command(it->second.value)) fail(it->second, "unknown command '" + it->second.value + "'");
        cfg.command = it->second.value;
    }
    return cfg;
}

void finalize(RunConfig& cfg, const std::map<std::string, std::string>& overrides) {
    for (const auto& [k, v] : overrides) {
        if (!valid_key(k)) throw ConfigError("--" + k + ": bad key");
        cfg.params[k] = Param{v, 0, "--" + k};
    }
    if (auto it = cfg.params.find("command"); it != cfg.params.end()) cfg.command = it->second.value;
    if (cfg.command.empty()) throw ConfigError("no command given");
    if (!is_command(cfg.command)) throw ConfigError("unknown command '" + cfg.command + "'");

    // section values sit between the top level and the command line
    if (auto sec = cfg.sections.find(cfg.command); sec != cfg.sections.end())
        for (const auto& [k, p] : sec->second)
            if (!overrides.count(k)) cfg.params[k] = p;

    for (const auto& [k, p] : cfg.params)
        if (!key_allowed(cfg.command, k)) fail(p, "unknown key '" + k + "' for command " + cfg.command);
    for (const auto& k : required_keys(cfg.command))
        if (!cfg.has(k)) throw ConfigError("missing required key '" + k + "' for command " + cfg.command);

    cfg.output_dir = cfg.has("out") ? std::filesystem::path(cfg.params.at("out").value) : default_output_dir();
    if (cfg.has("seed")) {
        const auto& p = cfg.params.at("seed");
        std::uint64_t v = 0;
        auto [ptr, ec] = std::from_chars(p.value.data(), p.value.data() + p.value.size(), v);
        if (ec != std::errc() || ptr != p.value.data() + p.value.size()) fail(p, "seed must be a nonnegative integer");
        cfg.seed = v;
    }
}

const Param& RunConfig::at(const std::string& key) const {
    auto it = params.find(key);
    if (it == params.end()) throw ConfigError("missing required key '" + key + "'");
    return it->second;
}

std::string RunConfig::str(const std::string& key, std::string_view fallback) const {
    return has(key) ? params.at(key).value : std::string(fallback);
}

double RunConfig::number(const std::string& key, double fallback) const {
    return has(key) ? parse_double(params.at(key), key) : fallback;
}

double RunConfig::number(const std::string& key) const { return parse_double(at(key), key); }

int RunConfig::integer(const std::string& key, int fallback) const {
    if (!has(key)) return fallback;
    const auto& p = params.at(key);
    int v = 0;
    auto [ptr, ec] = std::from_chars(p.value.data(), p.value.data() + p.value.size(), v);
    if (ec != std::errc() || ptr != p.value.data() + p.value.size())
        fail(p, "'" + key + "' expects an integer, got '" + p.value + "'");
    return v;
}

bool RunConfig::flag(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const auto& p = params.at(key);
    if (p.value == "true" || p.value == "1" || p.value == "yes") return true;
    if (p.value == "false" || p.value == "0" || p.value == "no") return false;
    fail(p, "'" + key + "' expects true or false, got '" + p.value + "'");
}

std::vector<double> RunConfig::numbers(const std::string& key, std::vector<double> fallback) const {
    if (!has(key)) return fallback;
    const auto& p = params.at(key);
    std::vector<double> out;
    std::string item;
    std::istringstream in(p.value);
    while (std::getline(in, item, ',')) {
        Param one{trim(item), p.line, p.origin};
        if (one.value.empty()) fail(p, "'" + key + "' has an empty list item");
        out.push_back(parse_double(one, key));
    }
    if (out.empty()) fail(p, "'" + key + "' is an empty list");
    return out;
}

} // namespace hslab::app
