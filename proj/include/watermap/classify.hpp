#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <utility>

#include "watermap/core.hpp"

namespace watermap {

struct ClassifyConfig {
    /// Cloud where TC4 <= this value.
    double tc4_threshold = -0.046;
    /// Re-estimate the TC4 threshold per scene with Otsu instead of using tc4_threshold.
    bool per_scene_otsu = false;
    /// Water pixels steeper than this are terrain shadow.
    double slope_threshold_deg = 4.0;
    /// Water pixels whose visible maximum reaches this are snow/ice.
    double maxvis_threshold = 0.15;
    /// Scenes with a larger cloud fraction inside the ROI are skipped.
    double cloud_skip_fraction = 0.8;

    /// Throws ConfigError when a field is out of range.
    void validate() const;
};

/// Fourth Tasseled Cap component coefficients, band-role order.
inline constexpr std::array<double, 6> kTc4CoefficientsTM = {-0.8242, 0.0849, 0.4392,
                                                              -0.0580, 0.2012, -0.2768};
inline constexpr std::array<double, 6> kTc4CoefficientsOLI = {-0.8239, 0.0849, 0.4396,
                                                               -0.0580, 0.2013, -0.2773};

const std::array<double, 6>& tc4_coefficients(SensorKind sensor);

/// TC4 of one spectrum.
double tc4_value(const Spectrum& s, SensorKind sensor);

/// Per-pixel TC4; invalid pixels carry the band nodata value.
Grid tc4(const ReflectanceScene& scene);

inline constexpr std::size_t kOtsuDefaultBins = 256;

/// Otsu threshold over a uniform histogram spanning [min, max] of the finite samples.
/// The result is the bin edge min + k*(max-min)/bins maximising between-class
/// variance; the lowest k wins ties. Throws DegenerateError when fewer than two
/// distinct finite samples exist or bins < 2.
double otsu_threshold(std::span<const double> samples, std::size_t bins = kOtsuDefaultBins);

/// Histogram-level Otsu: returns the split index k in [1, bins-1] (class 0 = bins [0, k)).
std::size_t otsu_split(std::span<const std::uint64_t> histogram);

/// Between-class variance score used by otsu_split, computed from exact integer sums.
/// Exposed so independent reference scans produce bit-identical scores.
double otsu_score(std::uint64_t n0, std::uint64_t s0, std::uint64_t n, std::uint64_t s);

/// True where tc4 <= threshold on valid samples.
Mask cloud_mask(const Grid& tc4_grid, double threshold);

/// True where max(Blue,Green,Red) > max(SWIR1,SWIR2) on valid pixels.
Mask water_index(const ReflectanceScene& scene);
bool water_index_pixel(const Spectrum& s);

/// Horn 3x3 slope in degrees, edge-replicated borders. Nodata neighbours are
/// replaced by the centre elevation; nodata centres stay nodata.
Grid slope_from_dem(const Grid& dem);

/// Clears water where slope > threshold. Nodata slope never clears.
Mask shadow_filter(const Mask& water, const Grid& slope, double slope_threshold_deg);

struct SnowIceResult {
    Mask water;
    Mask ice;
};

/// Moves water pixels with max(Blue,Green,Red) >= threshold into the ice mask.
SnowIceResult snow_ice_filter(const Mask& water, const ReflectanceScene& scene, double maxvis_threshold);

/// Cloud detection, water index, shadow removal and snow/ice separation.
/// Label precedence: NoData > Cloud > IceSnow > Water > Land.
ClassMap classify_scene(const ReflectanceScene& scene, const Grid& slope, const ClassifyConfig& cfg);

/// Cloud-labelled share of the ROI. Throws DegenerateError on an empty ROI.
double cloud_fraction(const ClassMap& map, const Mask& roi);

}  // namespace watermap
