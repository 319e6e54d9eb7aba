#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace watermap {

inline constexpr double kDefaultPixelSizeM = 30.0;
inline constexpr float kDefaultNodata = -9999.0f;
/// Upper bound of a usable reflectance sample (calibration overshoot allowed).
inline constexpr float kMaxReflectance = 1.5f;

/// Calendar date (proleptic Gregorian).
struct Date {
    int year = 1970;
    int month = 1;
    int day = 1;

    /// Parses `YYYY-MM-DD`; throws FormatError on anything else.
    static Date parse(std::string_view iso);
    static Date from_days(long days_since_epoch);

    std::string iso() const;
    long days_since_epoch() const;
    bool ok() const;

    auto operator<=>(const Date&) const = default;
};

/// Width/height pair used for alignment checks.
struct RasterShape {
    std::size_t width = 0;
    std::size_t height = 0;

    std::size_t size() const { return width * height; }
    bool operator==(const RasterShape&) const = default;
};

/// Single-band raster of float samples.
class Grid {
public:
    Grid() = default;
    Grid(std::size_t width, std::size_t height, double pixel_size_m, std::vector<float> values,
         float nodata_value = kDefaultNodata);

    static Grid filled(std::size_t width, std::size_t height, double pixel_size_m, float value,
                       float nodata_value = kDefaultNodata);

    std::size_t width() const { return width_; }
    std::size_t height() const { return height_; }
    std::size_t size() const { return values_.size(); }
    RasterShape shape() const { return {width_, height_}; }
    double pixel_size_m() const { return pixel_size_m_; }
    float nodata_value() const { return nodata_; }

    std::span<const float> values() const { return values_; }
    float operator[](std::size_t i) const { return values_[i]; }
    float at(std::size_t row, std::size_t col) const { return values_[row * width_ + col]; }

    /// True for the nodata sentinel and for NaN samples.
    bool is_nodata(std::size_t i) const;

private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    double pixel_size_m_ = kDefaultPixelSizeM;
    float nodata_ = kDefaultNodata;
    std::vector<float> values_;
};

/// Boolean raster, one byte per pixel (0 or 1).
class Mask {
public:
    Mask() = default;
    Mask(std::size_t width, std::size_t height, bool fill = false);
    Mask(std::size_t width, std::size_t height, std::vector<std::uint8_t> bits);

    std::size_t width() const { return width_; }
    std::size_t height() const { return height_; }
    std::size_t size() const { return bits_.size(); }
    RasterShape shape() const { return {width_, height_}; }

    bool operator[](std::size_t i) const { return bits_[i] != 0; }
    bool at(std::size_t row, std::size_t col) const { return bits_[row * width_ + col] != 0; }
    void set(std::size_t i, bool v) { bits_[i] = v ? 1 : 0; }

    std::size_t count() const;
    std::span<const std::uint8_t> bits() const { return bits_; }

    bool operator==(const Mask&) const = default;

private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::vector<std::uint8_t> bits_;
};

enum class BandRole : std::uint8_t { Blue = 0, Green, Red, NIR, SWIR1, SWIR2 };

inline constexpr std::array<BandRole, 6> kBandRoles = {
    BandRole::Blue, BandRole::Green, BandRole::Red, BandRole::NIR, BandRole::SWIR1, BandRole::SWIR2};

std::string_view band_name(BandRole role);
std::optional<BandRole> parse_band_role(std::string_view name);

enum class SensorKind : std::uint8_t { TM, OLI };

std::string_view sensor_name(SensorKind sensor);
/// Accepts "TM" / "OLI" (case-insensitive); throws FormatError otherwise.
SensorKind parse_sensor(std::string_view name);

/// Reflectances in band-role order.
using Spectrum = std::array<double, 6>;

/// Six co-registered surface-reflectance bands of one acquisition.
class ReflectanceScene {
public:
    ReflectanceScene(std::string id, Date date, SensorKind sensor, std::array<Grid, 6> bands);

    const std::string& id() const { return id_; }
    const Date& date() const { return date_; }
    SensorKind sensor() const { return sensor_; }
    const Grid& band(BandRole role) const { return bands_[static_cast<std::size_t>(role)]; }

    std::size_t width() const { return bands_[0].width(); }
    std::size_t height() const { return bands_[0].height(); }
    std::size_t size() const { return bands_[0].size(); }
    RasterShape shape() const { return bands_[0].shape(); }
    double pixel_size_m() const { return bands_[0].pixel_size_m(); }

    /// All six samples present, finite and within [0, kMaxReflectance].
    bool valid(std::size_t i) const;
    Spectrum spectrum(std::size_t i) const;
    double reflectance(BandRole role, std::size_t i) const { return band(role)[i]; }

private:
    std::string id_;
    Date date_;
    SensorKind sensor_;
    std::array<Grid, 6> bands_;
};

enum class ClassLabel : std::uint8_t { Land = 0, Water = 1, Cloud = 2, IceSnow = 3, NoData = 255 };

inline constexpr std::uint8_t label_code(ClassLabel l) { return static_cast<std::uint8_t>(l); }
std::optional<ClassLabel> label_from_code(std::uint8_t code);
std::string_view label_name(ClassLabel l);

/// Land and Water are usable observations.
inline constexpr bool is_valid_observation(ClassLabel l) {
    return l == ClassLabel::Land || l == ClassLabel::Water;
}
/// Cloud and IceSnow hide the surface and are filled from the time series.
inline constexpr bool is_obscured(ClassLabel l) {
    return l == ClassLabel::Cloud || l == ClassLabel::IceSnow;
}

/// Per-pixel labels of one date.
class ClassMap {
public:
    ClassMap() = default;
    ClassMap(std::string scene_id, Date date, std::size_t width, std::size_t height,
             double pixel_size_m, std::vector<ClassLabel> labels);

    const std::string& scene_id() const { return scene_id_; }
    const Date& date() const { return date_; }
    std::size_t width() const { return width_; }
    std::size_t height() const { return height_; }
    std::size_t size() const { return labels_.size(); }
    RasterShape shape() const { return {width_, height_}; }
    double pixel_size_m() const { return pixel_size_m_; }

    std::span<const ClassLabel> labels() const { return labels_; }
    ClassLabel operator[](std::size_t i) const { return labels_[i]; }
    ClassLabel at(std::size_t row, std::size_t col) const { return labels_[row * width_ + col]; }

    /// Same identity and geometry, different labels.
    ClassMap with_labels(std::vector<ClassLabel> labels) const;
    Mask mask_of(ClassLabel l) const;

    bool operator==(const ClassMap&) const = default;

private:
    std::string scene_id_;
    Date date_;
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    double pixel_size_m_ = kDefaultPixelSizeM;
    std::vector<ClassLabel> labels_;
};

/// Two-class confusion counts with Water as the positive class.
struct ConfusionMatrix {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
    std::uint64_t tn = 0;

    std::uint64_t total() const { return tp + fp + fn + tn; }
    bool operator==(const ConfusionMatrix&) const = default;
};

/// One row of the per-date analytics series.
struct AreaRecord {
    Date date;
    double water_area_km2 = 0.0;
    /// Empty when the date has no water pixel inside the ROI.
    std::optional<double> division_index;
    double valid_fraction = 0.0;
};

double pixel_area_km2(double pixel_size_m);
double pixel_area_km2(const Grid& grid);

}  // namespace watermap
