#pragma once

// File formats
// ------------
// Every raster is a raw little-endian, row-major data file with a JSON sidecar
// of the same stem and a `.json` extension (`scene.f32` + `scene.json`).
//
//   scene      `<prefix>.f32`   float32, band-sequential, bands in sidecar order
//   grid       `<name>.f32`     float32, one band
//   class map  `<name>.class`   uint8 label codes {0,1,2,3,255}
//   patches    `<name>.i32`     int32 patch ids, 0 = background
//
// Sidecar: {width, height, pixel_size_m, nodata_value, bands:[...], sensor, date, scene_id}.
// A NaN nodata value is written as null.

#include <filesystem>
#include <string>
#include <vector>

#include "watermap/core.hpp"

namespace watermap::io {

namespace fs = std::filesystem;

/// Sidecar path for a data file: same stem, `.json` extension.
fs::path sidecar_path(const fs::path& data_path);

void write_scene(const ReflectanceScene& scene, const fs::path& prefix);
/// Reads `<prefix>.f32` and `<prefix>.json`. An extra "coastal" band is skipped.
ReflectanceScene read_scene(const fs::path& prefix);

void write_grid(const Grid& grid, const fs::path& path, const std::string& band = "value");
Grid read_grid(const fs::path& path);

void write_classmap(const ClassMap& map, const fs::path& path);
ClassMap read_classmap(const fs::path& path);

void write_patch_ids(std::size_t width, std::size_t height, double pixel_size_m,
                     const std::vector<std::int32_t>& ids, const fs::path& path);

/// ROI raster: a float grid where any finite, non-nodata, non-zero sample is inside.
Mask read_roi(const fs::path& path);
void write_roi(const Mask& roi, double pixel_size_m, const fs::path& path);

struct ManifestEntry {
    std::string scene_id;
    Date date;
    SensorKind sensor = SensorKind::OLI;
    /// Scene prefix; relative paths in the CSV resolve against the manifest directory.
    fs::path path;
};

struct SceneManifest {
    std::vector<ManifestEntry> entries;  ///< ascending by date
};

/// CSV with header `scene_id,date,sensor,path`. Entries come back sorted by date;
/// duplicate scene ids are rejected.
SceneManifest read_manifest(const fs::path& csv);
/// Paths are written relative to the manifest directory when possible.
void write_manifest(const std::vector<ManifestEntry>& entries, const fs::path& csv);

/// Header `date,water_area_km2,division_index,valid_fraction`, six decimals,
/// ISO dates. An undefined division index is written as `nan`.
void write_area_csv(const std::vector<AreaRecord>& records, const fs::path& path);
std::vector<AreaRecord> read_area_csv(const fs::path& path);

struct Sample {
    std::size_t row = 0;
    std::size_t col = 0;
    ClassLabel truth = ClassLabel::Land;  ///< Water or Land
};
using SampleSet = std::vector<Sample>;

/// CSV `row,col,truth`; truth is water/land or 1/0.
SampleSet read_samples_csv(const fs::path& path);
void write_samples_csv(const SampleSet& samples, const fs::path& path);

/// Writes through a temporary sibling file and renames it into place.
void write_file_atomic(const fs::path& path, const std::string& bytes);
std::string read_file(const fs::path& path);

}  // namespace watermap::io
