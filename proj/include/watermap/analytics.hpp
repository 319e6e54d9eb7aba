#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "watermap/core.hpp"
#include "watermap/io.hpp"
#include "watermap/timeseries.hpp"

namespace watermap {

/// Water pixels inside the ROI times the pixel area. Throws DegenerateError on an empty ROI.
double water_area(const ClassMap& map, const Mask& roi);

/// 8-connected patches of a binary landscape.
struct PatchLabeling {
    std::size_t width = 0;
    std::size_t height = 0;
    /// 0 = background, patches numbered 1..M in raster order of their first pixel.
    std::vector<std::int32_t> ids;
    /// sizes[k-1] is the pixel count of patch k.
    std::vector<std::uint64_t> sizes;

    std::size_t patch_count() const { return sizes.size(); }
};

/// Two-pass union-find labelling of water ∩ roi.
PatchLabeling connected_components(const Mask& water, const Mask& roi);

/// 1 - Σ S_k² / S². Throws DegenerateError when S = 0.
double division_index(std::span<const std::uint64_t> patch_sizes);
double division_index(const Mask& water, const Mask& roi);

/// One record per date: water area, division index (empty when no water), valid fraction.
std::vector<AreaRecord> area_series(const ClassStack& stack, const Mask& roi);

struct YearExtrema {
    int max_month = 0;
    int min_month = 0;
    Date max_date;
    Date min_date;
};

struct AnnualExtrema {
    std::map<int, YearExtrema> years;
    /// Index 0 = January.
    std::array<int, 12> max_counts{};
    std::array<int, 12> min_counts{};
};

/// Month of the largest and smallest water area per year; ties go to the earlier date.
/// Throws DegenerateError on empty input.
AnnualExtrema annual_extrema(std::vector<AreaRecord> records);

struct ConfusionResult {
    ConfusionMatrix matrix;
    /// Samples whose predicted label was neither Water nor Land.
    std::size_t excluded = 0;
};

/// Throws DimensionError for out-of-bounds samples and DegenerateError when
/// every sample is excluded.
ConfusionResult confusion(const ClassMap& map, const io::SampleSet& samples);

/// Percentages; throw DegenerateError on a zero denominator.
double overall_accuracy(const ConfusionMatrix& cm);
double precision(const ConfusionMatrix& cm);
double recall(const ConfusionMatrix& cm);

/// All-true mask over the frame.
Mask full_roi(RasterShape shape);

}  // namespace watermap
