#include "watermap/core.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "watermap/error.hpp"

namespace watermap {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

void check_pixel_size(double pixel_size_m) {
    if (!(pixel_size_m > 0.0) || !std::isfinite(pixel_size_m)) {
        throw DimensionError("pixel size must be positive, got " + std::to_string(pixel_size_m));
    }
}

}  // namespace

// ---------------------------------------------------------------- Date

Date Date::parse(std::string_view iso) {
    int y = 0, m = 0, d = 0;
    char tail = 0;
    std::string s(iso);
    if (s.size() != 10 || s[4] != '-' || s[7] != '-' ||
        std::sscanf(s.c_str(), "%4d-%2d-%2d%c", &y, &m, &d, &tail) != 3) {
        throw FormatError("bad date '" + s + "', expected YYYY-MM-DD");
    }
    Date out{y, m, d};
    if (!out.ok()) throw FormatError("invalid calendar date '" + s + "'");
    return out;
}

Date Date::from_days(long days_since_epoch) {
    using namespace std::chrono;
    const year_month_day ymd{sys_days{days{days_since_epoch}}};
    return {static_cast<int>(ymd.year()), static_cast<int>(static_cast<unsigned>(ymd.month())),
            static_cast<int>(static_cast<unsigned>(ymd.day()))};
}

std::string Date::iso() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
    return buf;
}

long Date::days_since_epoch() const {
    using namespace std::chrono;
    const year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                             std::chrono::day{static_cast<unsigned>(day)}};
    return sys_days{ymd}.time_since_epoch().count();
}

bool Date::ok() const {
    using namespace std::chrono;
    if (month < 1 || month > 12 || day < 1 || day > 31) return false;
    return year_month_day{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                          std::chrono::day{static_cast<unsigned>(day)}}
        .ok();
}

// ---------------------------------------------------------------- Grid

Grid::Grid(std::size_t width, std::size_t height, double pixel_size_m, std::vector<float> values,
           float nodata_value)
    : width_(width), height_(height), pixel_size_m_(pixel_size_m), nodata_(nodata_value),
      values_(std::move(values)) {
    check_pixel_size(pixel_size_m);
    if (values_.size() != width * height) {
        throw DimensionError("grid buffer holds " + std::to_string(values_.size()) +
                             " samples, expected " + std::to_string(width) + "x" +
                             std::to_string(height));
    }
}

Grid Grid::filled(std::size_t width, std::size_t height, double pixel_size_m, float value,
                  float nodata_value) {
    return Grid(width, height, pixel_size_m, std::vector<float>(width * height, value), nodata_value);
}

bool Grid::is_nodata(std::size_t i) const {
    const float v = values_[i];
    return std::isnan(v) || v == nodata_;
}

// ---------------------------------------------------------------- Mask

Mask::Mask(std::size_t width, std::size_t height, bool fill)
    : width_(width), height_(height), bits_(width * height, fill ? 1 : 0) {}

Mask::Mask(std::size_t width, std::size_t height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
    if (bits_.size() != width * height) throw DimensionError("mask buffer length mismatch");
    for (auto& b : bits_) b = b ? 1 : 0;
}

std::size_t Mask::count() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

// ---------------------------------------------------------------- bands / sensors

std::string_view band_name(BandRole role) {
    switch (role) {
        case BandRole::Blue: return "blue";
        case BandRole::Green: return "green";
        case BandRole::Red: return "red";
        case BandRole::NIR: return "nir";
        case BandRole::SWIR1: return "swir1";
        case BandRole::SWIR2: return "swir2";
    }
    return "?";
}

std::optional<BandRole> parse_band_role(std::string_view name) {
    const std::string n = lower(name);
    for (BandRole r : kBandRoles) {
        if (band_name(r) == n) return r;
    }
    return std::nullopt;
}

std::string_view sensor_name(SensorKind sensor) {
    return sensor == SensorKind::TM ? "TM" : "OLI";
}

SensorKind parse_sensor(std::string_view name) {
    const std::string n = lower(name);
    if (n == "tm") return SensorKind::TM;
    if (n == "oli") return SensorKind::OLI;
    throw FormatError("unknown sensor '" + std::string(name) + "'");
}

// ---------------------------------------------------------------- ReflectanceScene

ReflectanceScene::ReflectanceScene(std::string id, Date date, SensorKind sensor,
                                   std::array<Grid, 6> bands)
    : id_(std::move(id)), date_(date), sensor_(sensor), bands_(std::move(bands)) {
    const Grid& ref = bands_[0];
    for (const Grid& g : bands_) {
        if (g.shape() != ref.shape() || g.pixel_size_m() != ref.pixel_size_m()) {
            throw DimensionError("scene '" + id_ + "': band grids differ in size or pixel size");
        }
    }
}

bool ReflectanceScene::valid(std::size_t i) const {
    for (const Grid& g : bands_) {
        if (g.is_nodata(i)) return false;
        const float v = g[i];
        if (!std::isfinite(v) || v < 0.0f || v > kMaxReflectance) return false;
    }
    return true;
}

Spectrum ReflectanceScene::spectrum(std::size_t i) const {
    Spectrum s{};
    for (std::size_t b = 0; b < 6; ++b) s[b] = bands_[b][i];
    return s;
}

// ---------------------------------------------------------------- labels

std::optional<ClassLabel> label_from_code(std::uint8_t code) {
    switch (code) {
        case 0: return ClassLabel::Land;
        case 1: return ClassLabel::Water;
        case 2: return ClassLabel::Cloud;
        case 3: return ClassLabel::IceSnow;
        case 255: return ClassLabel::NoData;
        default: return std::nullopt;
    }
}

std::string_view label_name(ClassLabel l) {
    switch (l) {
        case ClassLabel::Land: return "land";
        case ClassLabel::Water: return "water";
        case ClassLabel::Cloud: return "cloud";
        case ClassLabel::IceSnow: return "ice_snow";
        case ClassLabel::NoData: return "nodata";
    }
    return "?";
}

ClassMap::ClassMap(std::string scene_id, Date date, std::size_t width, std::size_t height,
                   double pixel_size_m, std::vector<ClassLabel> labels)
    : scene_id_(std::move(scene_id)), date_(date), width_(width), height_(height),
      pixel_size_m_(pixel_size_m), labels_(std::move(labels)) {
    check_pixel_size(pixel_size_m);
    if (labels_.size() != width * height) {
        throw DimensionError("class map '" + scene_id_ + "' holds " +
                             std::to_string(labels_.size()) + " labels, expected " +
                             std::to_string(width * height));
    }
}

ClassMap ClassMap::with_labels(std::vector<ClassLabel> labels) const {
    return ClassMap(scene_id_, date_, width_, height_, pixel_size_m_, std::move(labels));
}

Mask ClassMap::mask_of(ClassLabel l) const {
    std::vector<std::uint8_t> bits(labels_.size());
    for (std::size_t i = 0; i < labels_.size(); ++i) bits[i] = labels_[i] == l ? 1 : 0;
    return Mask(width_, height_, std::move(bits));
}

double pixel_area_km2(double pixel_size_m) {
    check_pixel_size(pixel_size_m);
    return pixel_size_m * pixel_size_m / 1.0e6;
}

double pixel_area_km2(const Grid& grid) { return pixel_area_km2(grid.pixel_size_m()); }

}  // namespace watermap
