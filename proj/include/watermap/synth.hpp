#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "watermap/core.hpp"

namespace watermap::synth {

/// Material painted by a feature. Water/Land/Vegetation/ShadowTerrain are surface
/// materials; Cloud and IceSnow cover whatever lies below.
enum class Material : std::uint8_t { Water, Land, Vegetation, Cloud, IceSnow, ShadowTerrain };

std::string_view material_name(Material m);
Material parse_material(std::string_view name);

// Geometry in continuous pixel coordinates: pixel (row r, col c) covers
// x in [c, c+1), y in [r, r+1).
struct Disk {
    double cx = 0, cy = 0, radius = 1;
};
struct Ellipse {
    double cx = 0, cy = 0, rx = 1, ry = 1, angle_deg = 0;
};
/// Segment of the given full width.
struct Line {
    double x0 = 0, y0 = 0, x1 = 0, y1 = 0, width = 1;
};
/// Disk whose radius is modulated by 1 + amplitude*sin(lobes*theta + phase).
struct Blob {
    double cx = 0, cy = 0, radius = 1, amplitude = 0.15;
    int lobes = 5;
    double phase = 0;
};
using Geometry = std::variant<Disk, Ellipse, Line, Blob>;

struct Feature {
    Geometry geometry;
    Material material = Material::Water;
    /// ShadowTerrain only: DEM slope under the feature.
    double ramp_deg = 20.0;
};

struct SpectralTemplate {
    Spectrum mean{};
    Spectrum noise_std{};
};

/// Default reflectance templates; every band has noise std 0.005.
std::map<Material, SpectralTemplate> default_templates(double noise_std = 0.005);

struct SceneSpec {
    std::string id = "synthetic";
    Date date{2013, 10, 31};
    SensorKind sensor = SensorKind::OLI;
    std::size_t width = 64;
    std::size_t height = 64;
    double pixel_size_m = kDefaultPixelSizeM;
    std::uint64_t seed = 1;
    /// Painted in order; later features win where they overlap.
    std::vector<Feature> features;
    std::map<Material, SpectralTemplate> templates = default_templates();
    Material background = Material::Land;
    /// Area-weighted spectra at feature edges (supersampled) instead of centre sampling.
    bool mixing = true;
    /// Supersampling factor per axis for edge pixels.
    int subsamples = 10;
    double base_elevation_m = 100.0;

    /// Throws ConfigError on inconsistent fields.
    void validate() const;
};

struct SyntheticScene {
    ReflectanceScene scene;
    /// Intended label per pixel (Cloud/IceSnow where covered).
    ClassMap truth;
    /// Water/Land beneath any cover.
    ClassMap surface;
    /// Surface water fraction per pixel.
    Grid water_fraction;
    Grid dem;
};

SyntheticScene generate(const SceneSpec& spec);

/// Area fraction of pixel (row, col) covered by the geometry, supersampled n x n.
double coverage(const Geometry& g, std::size_t row, std::size_t col, int n);

struct SeasonalSpec {
    SceneSpec base;
    int start_year = 1985;
    int years = 1;
    int scenes_per_year = 12;
    double mean_radius_px = 30.0;
    double amplitude_px = 10.0;
    /// Radius noise std as a fraction of the amplitude.
    double noise_fraction = 0.01;
    /// Cover the lake with ice in December, January and February.
    bool winter_ice = false;
};

struct SeasonalArchive {
    std::vector<SceneSpec> scenes;
    std::vector<double> radius_px;
    std::vector<double> true_area_km2;
};

/// Seasonal lake: radius follows a warped sinusoid with its peak on 15 September
/// and trough on 15 May (half-cosine rise over four months, fall over eight).
SeasonalArchive seasonal_stack(const SeasonalSpec& spec);

/// Seasonal shape in [-1, 1] for a day of year (0-based, 365-day convention).
double seasonal_shape(double day_of_year);

/// JSON scene spec. Throws FormatError with the line number on malformed JSON.
SceneSpec parse_scene_spec(std::string_view json_text);

/// A spec file is a single scene object, {"scenes": [...]}, or
/// {"seasonal": {..., "base": {...}}}.
std::vector<SceneSpec> parse_archive_spec(std::string_view json_text);

}  // namespace watermap::synth
