#pragma once

// Batch commands behind the CLI. Each writes its artifacts under an output
// directory with deterministic names:
//
//   classify   {id}.class, skipped.csv
//   unmix      {id}.class, abundance/{id}.f32
//   interp     {id}.class
//   stats      areas.csv, coverage.f32, extrema.csv
//   landscape  patches.i32 (+ report on stdout)
//   synth      scenes/, truth/, surface/, samples/, dem.f32, roi.f32, manifest.csv
//   pipeline   class/, refined/, abundance/, interp/, skipped.csv, coverage.f32,
//              areas.csv, extrema.csv

#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "watermap/analytics.hpp"
#include "watermap/config.hpp"
#include "watermap/core.hpp"

namespace watermap::pipeline {

namespace fs = std::filesystem;

struct RunOptions {
    /// Worker threads for scene-level work; 0 = available processors.
    unsigned jobs = 0;
    /// Progress and warnings. Never data.
    std::ostream* log = nullptr;
};

/// Runs fn(0..n-1) on up to `jobs` threads. Every index runs even when others
/// fail; afterwards the exception of the lowest failing index is rethrown.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn);

struct SkippedScene {
    std::string scene_id;
    double cloud_fraction = 0.0;
};

struct ClassifyInputs {
    fs::path manifest;
    fs::path dem;
    fs::path roi;  ///< optional; whole frame when empty
    fs::path config;  ///< optional; defaults when empty
    fs::path out;
};

struct ClassifySummary {
    std::vector<std::string> written;  ///< scene ids, date order
    std::vector<SkippedScene> skipped;
};

ClassifySummary cmd_classify(const ClassifyInputs& in, const RunOptions& opt);

struct UnmixInputs {
    fs::path manifest;
    fs::path classes;  ///< directory of {id}.class
    fs::path config;
    fs::path out;
};

/// Returns the number of mixed pixels left unrefined for lack of endmembers.
std::size_t cmd_unmix(const UnmixInputs& in, const RunOptions& opt);

/// Reads every *.class file in a directory and orders them by date.
ClassStack load_stack(const fs::path& dir);

void cmd_interp(const fs::path& classes, const fs::path& out, const RunOptions& opt);

/// Area series, coverage grid and annual extrema of an interpolated stack.
void cmd_stats(const fs::path& classes, const fs::path& roi, const fs::path& out, const RunOptions& opt);

struct LandscapeReport {
    std::size_t patches = 0;
    std::uint64_t water_pixels = 0;
    std::optional<double> division_index;  ///< empty without water
};

LandscapeReport cmd_landscape(const fs::path& classmap, const fs::path& roi, const fs::path& out,
                              const RunOptions& opt);
std::string format_landscape(const LandscapeReport& r);

struct ValidationReport {
    ConfusionResult confusion;
    double overall_accuracy = 0.0;
    std::optional<double> precision;
    std::optional<double> recall;
};

ValidationReport validate(const ClassMap& map, const io::SampleSet& samples);
ValidationReport cmd_validate(const fs::path& classmap, const fs::path& samples);
/// Counts plus percentages with one decimal.
std::string format_validation(const ValidationReport& r);

/// Generates every scene of a spec file; returns the manifest path.
fs::path cmd_synth(const fs::path& spec_json, const fs::path& out, const RunOptions& opt);

struct PipelineInputs {
    fs::path manifest;
    fs::path dem;
    fs::path roi;
    fs::path config;
    fs::path out;
};

struct PipelineSummary {
    std::vector<SkippedScene> skipped;
    std::size_t scenes = 0;
    std::size_t unmix_failures = 0;
};

/// classify -> refine_boundary -> build_stack -> interpolate -> coverage/area series.
/// Throws DegenerateError("no usable scenes") when every scene is skipped.
PipelineSummary cmd_pipeline(const PipelineInputs& in, const RunOptions& opt);

/// Writes annual extrema per year and month histograms.
void write_extrema_csv(const AnnualExtrema& ex, const fs::path& path);

/// Writes the skipped-scene report.
void write_skipped_csv(const std::vector<SkippedScene>& skipped, const fs::path& path);

}  // namespace watermap::pipeline
