#include "watermap/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>
#include <string>

#include "watermap/error.hpp"
#include "watermap/io.hpp"

namespace watermap {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& v, int line) {
    double out = 0.0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size() || !std::isfinite(out)) {
        throw ConfigError("line " + std::to_string(line) + ": " + key + " expects a number, got '" + v + "'");
    }
    return out;
}

bool to_bool(const std::string& key, std::string v, int line) {
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("line " + std::to_string(line) + ": " + key + " expects true/false, got '" + v + "'");
}

}  // namespace

PipelineConfig parse_config(std::string_view text) {
    PipelineConfig cfg;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string s = trim(std::string_view(raw).substr(0, hash));
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line) + ": expected key=value");
        const std::string key = trim(std::string_view(s).substr(0, eq));
        const std::string value = trim(std::string_view(s).substr(eq + 1));

        if (key == "tc4_threshold") {
            cfg.classify.tc4_threshold = to_double(key, value, line);
        } else if (key == "per_scene_otsu") {
            cfg.classify.per_scene_otsu = to_bool(key, value, line);
        } else if (key == "slope_threshold_deg") {
            cfg.classify.slope_threshold_deg = to_double(key, value, line);
        } else if (key == "maxvis_threshold") {
            cfg.classify.maxvis_threshold = to_double(key, value, line);
        } else if (key == "cloud_skip_fraction") {
            cfg.classify.cloud_skip_fraction = to_double(key, value, line);
        } else if (key == "window") {
            const double w = to_double(key, value, line);
            if (w < 0 || w != std::floor(w)) {
                throw ConfigError("line " + std::to_string(line) + ": window must be a whole number");
            }
            cfg.unmix.window = static_cast<std::size_t>(w);
        } else if (key == "abundance_threshold") {
            cfg.unmix.abundance_threshold = to_double(key, value, line);
        } else {
            throw ConfigError("line " + std::to_string(line) + ": unknown key '" + key + "'");
        }
    }
    cfg.classify.validate();
    cfg.unmix.validate();
    return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    return parse_config(io::read_file(path));
}

}  // namespace watermap
