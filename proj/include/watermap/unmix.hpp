#pragma once

#include <cstddef>
#include <utility>

#include "watermap/core.hpp"

namespace watermap {

struct UnmixConfig {
    /// Odd search-window edge length in pixels.
    std::size_t window = 5;
    /// Mixed pixels with water abundance >= this become Water.
    double abundance_threshold = 0.5;

    void validate() const;
};

/// Water and Land pixels 8-adjacent to at least one pixel of the other class.
Mask mixed_region(const ClassMap& map);

struct Endmembers {
    Spectrum water{};
    Spectrum land{};
};

/// Darkest (water) and brightest (land) spectra by six-band sum inside the window
/// centred at (row, col), clipped at the image border. Candidates are non-mixed
/// Water / non-mixed Land pixels; when a class has none, the extreme over every
/// Water or Land pixel with a valid spectrum is used instead. Throws
/// DegenerateError when the window holds no such pixel.
Endmembers find_endmembers(const ReflectanceScene& scene, const ClassMap& map, const Mask& mixed,
                           std::size_t row, std::size_t col, std::size_t window);
Endmembers find_endmembers(const ReflectanceScene& scene, const ClassMap& map, std::size_t row,
                           std::size_t col, std::size_t window);

/// Fully constrained two-endmember abundance of water:
/// clamp(<r - e_L, e_w - e_L> / |e_w - e_L|^2, 0, 1).
/// Throws DegenerateError when e_w == e_L.
double fcls2(const Spectrum& r, const Spectrum& e_water, const Spectrum& e_land);

struct RefineResult {
    ClassMap map;
    /// Water abundance on mixed pixels, nodata elsewhere.
    Grid abundance;
    /// Mixed pixels left unchanged because no endmember pair could be formed.
    std::size_t failures = 0;
};

/// Relabels every mixed-region pixel by thresholding its unmixed water abundance.
/// Reads only the input map, so results do not depend on visiting order.
RefineResult refine_boundary(const ReflectanceScene& scene, const ClassMap& map, const UnmixConfig& cfg);

}  // namespace watermap
