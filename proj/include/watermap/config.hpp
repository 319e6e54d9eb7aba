#pragma once

#include <filesystem>
#include <string_view>

#include "watermap/classify.hpp"
#include "watermap/unmix.hpp"

namespace watermap {

struct PipelineConfig {
    ClassifyConfig classify;
    UnmixConfig unmix;
};

/// Flat `key = value` text. `#` starts a comment; blank lines are ignored.
/// Keys: tc4_threshold, per_scene_otsu, slope_threshold_deg, maxvis_threshold,
/// cloud_skip_fraction, window, abundance_threshold. Unknown keys are errors.
PipelineConfig parse_config(std::string_view text);
PipelineConfig load_config(const std::filesystem::path& path);

}  // namespace watermap
