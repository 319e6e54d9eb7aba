#pragma once

#include <atomic>
#include <filesystem>
#include <string>
#include <vector>

#include <unistd.h>

#include "watermap/core.hpp"

namespace testsupport {

namespace fs = std::filesystem;

/// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = fs::temp_directory_path() /
                ("watermap_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

/// Scene whose every pixel has its own spectrum.
inline watermap::ReflectanceScene scene_from_spectra(std::size_t w, std::size_t h,
                                                     const std::vector<watermap::Spectrum>& px,
                                                     watermap::SensorKind sensor = watermap::SensorKind::OLI,
                                                     watermap::Date date = {2013, 10, 31},
                                                     std::string id = "t") {
    std::array<watermap::Grid, 6> bands;
    for (std::size_t b = 0; b < 6; ++b) {
        std::vector<float> v(w * h);
        for (std::size_t i = 0; i < w * h; ++i) v[i] = static_cast<float>(px[i][b]);
        bands[b] = watermap::Grid(w, h, 30.0, std::move(v));
    }
    return watermap::ReflectanceScene(std::move(id), date, sensor, std::move(bands));
}

inline watermap::ReflectanceScene uniform_scene(std::size_t w, std::size_t h, const watermap::Spectrum& s) {
    return scene_from_spectra(w, h, std::vector<watermap::Spectrum>(w * h, s));
}

inline watermap::ClassMap map_from_string(const std::vector<std::string>& rows, watermap::Date date = {2000, 1, 1},
                                          std::string id = "m") {
    using watermap::ClassLabel;
    std::vector<ClassLabel> labels;
    for (const auto& r : rows) {
        for (char ch : r) {
            switch (ch) {
                case 'W': labels.push_back(ClassLabel::Water); break;
                case 'L': labels.push_back(ClassLabel::Land); break;
                case 'C': labels.push_back(ClassLabel::Cloud); break;
                case 'I': labels.push_back(ClassLabel::IceSnow); break;
                default: labels.push_back(ClassLabel::NoData); break;
            }
        }
    }
    return watermap::ClassMap(std::move(id), date, rows.at(0).size(), rows.size(), 30.0, std::move(labels));
}

inline watermap::Grid flat_dem(std::size_t w, std::size_t h, float z = 100.0f) {
    return watermap::Grid::filled(w, h, 30.0, z);
}

inline watermap::Grid zero_slope(std::size_t w, std::size_t h) { return flat_dem(w, h, 0.0f); }

inline const fs::path& cli_path() {
    static const fs::path p = WATERMAP_CLI;
    return p;
}

}  // namespace testsupport
