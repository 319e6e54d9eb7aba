#include "watermap/unmix.hpp"

#include <algorithm>
#include <vector>

#include "watermap/error.hpp"

namespace watermap {

namespace {

double band_sum(const Spectrum& s) {
    double acc = 0.0;
    for (double v : s) acc += v;
    return acc;
}

// Absorbs float32 storage error so an exact 50/50 mixture meets a 0.5 threshold.
constexpr double kAbundanceTolerance = 1e-6;

ClassLabel opposite(ClassLabel l) { return l == ClassLabel::Water ? ClassLabel::Land : ClassLabel::Water; }

}  // namespace

void UnmixConfig::validate() const {
    if (window < 3 || window % 2 == 0) throw ConfigError("window must be odd and >= 3");
    if (!(abundance_threshold > 0.0 && abundance_threshold < 1.0)) {
        throw ConfigError("abundance_threshold must lie in (0, 1)");
    }
}

Mask mixed_region(const ClassMap& map) {
    const std::size_t w = map.width();
    const std::size_t h = map.height();
    Mask mixed(w, h);
    for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t c = 0; c < w; ++c) {
            const ClassLabel self = map.at(r, c);
            if (!is_valid_observation(self)) continue;
            const ClassLabel other = opposite(self);
            const std::size_t r0 = r > 0 ? r - 1 : 0, r1 = std::min(r + 1, h - 1);
            const std::size_t c0 = c > 0 ? c - 1 : 0, c1 = std::min(c + 1, w - 1);
            bool hit = false;
            for (std::size_t rr = r0; rr <= r1 && !hit; ++rr) {
                for (std::size_t cc = c0; cc <= c1; ++cc) {
                    if (map.at(rr, cc) == other) {
                        hit = true;
                        break;
                    }
                }
            }
            if (hit) mixed.set(r * w + c, true);
        }
    }
    return mixed;
}

Endmembers find_endmembers(const ReflectanceScene& scene, const ClassMap& map, const Mask& mixed,
                           std::size_t row, std::size_t col, std::size_t window) {
    if (scene.shape() != map.shape() || mixed.shape() != map.shape()) {
        throw DimensionError("find_endmembers: scene, map and mixed mask are not aligned");
    }
    const std::size_t half = window / 2;
    const std::size_t r0 = row >= half ? row - half : 0;
    const std::size_t c0 = col >= half ? col - half : 0;
    const std::size_t r1 = std::min(row + half, map.height() - 1);
    const std::size_t c1 = std::min(col + half, map.width() - 1);

    struct Pick {
        std::size_t index = 0;
        double sum = 0.0;
        bool found = false;
    };
    Pick pure_water, pure_land, any_min, any_max;
    auto consider_min = [](Pick& p, std::size_t i, double s) {
        if (!p.found || s < p.sum) p = {i, s, true};
    };
    auto consider_max = [](Pick& p, std::size_t i, double s) {
        if (!p.found || s > p.sum) p = {i, s, true};
    };

    for (std::size_t r = r0; r <= r1; ++r) {
        for (std::size_t c = c0; c <= c1; ++c) {
            const std::size_t i = r * map.width() + c;
            const ClassLabel l = map[i];
            if (!is_valid_observation(l) || !scene.valid(i)) continue;
            const double s = band_sum(scene.spectrum(i));
            consider_min(any_min, i, s);
            consider_max(any_max, i, s);
            if (mixed[i]) continue;
            if (l == ClassLabel::Water) consider_min(pure_water, i, s);
            if (l == ClassLabel::Land) consider_max(pure_land, i, s);
        }
    }
    if (!any_min.found) {
        throw DegenerateError("find_endmembers: no valid pixel in window at (" + std::to_string(row) + ", " +
                              std::to_string(col) + ")");
    }
    return {scene.spectrum(pure_water.found ? pure_water.index : any_min.index),
            scene.spectrum(pure_land.found ? pure_land.index : any_max.index)};
}

Endmembers find_endmembers(const ReflectanceScene& scene, const ClassMap& map, std::size_t row,
                           std::size_t col, std::size_t window) {
    return find_endmembers(scene, map, mixed_region(map), row, col, window);
}

double fcls2(const Spectrum& r, const Spectrum& e_water, const Spectrum& e_land) {
    double num = 0.0, den = 0.0;
    for (std::size_t b = 0; b < r.size(); ++b) {
        const double d = e_water[b] - e_land[b];
        num += (r[b] - e_land[b]) * d;
        den += d * d;
    }
    if (den == 0.0) throw DegenerateError("fcls2: water and land endmembers coincide");
    return std::clamp(num / den, 0.0, 1.0);
}

RefineResult refine_boundary(const ReflectanceScene& scene, const ClassMap& map, const UnmixConfig& cfg) {
    cfg.validate();
    if (scene.shape() != map.shape()) throw DimensionError("refine_boundary: scene and map are not aligned");

    const Mask mixed = mixed_region(map);
    std::vector<ClassLabel> labels(map.labels().begin(), map.labels().end());
    const float nodata = kDefaultNodata;
    std::vector<float> abundance(map.size(), nodata);
    std::size_t failures = 0;

    for (std::size_t r = 0; r < map.height(); ++r) {
        for (std::size_t c = 0; c < map.width(); ++c) {
            const std::size_t i = r * map.width() + c;
            if (!mixed[i]) continue;
            try {
                const Endmembers e = find_endmembers(scene, map, mixed, r, c, cfg.window);
                const double cw = fcls2(scene.spectrum(i), e.water, e.land);
                abundance[i] = static_cast<float>(cw);
                const bool wet = cw >= cfg.abundance_threshold - kAbundanceTolerance;
                labels[i] = wet ? ClassLabel::Water : ClassLabel::Land;
            } catch (const DegenerateError&) {
                ++failures;
            }
        }
    }
    return {map.with_labels(std::move(labels)),
            Grid(map.width(), map.height(), map.pixel_size_m(), std::move(abundance), nodata), failures};
}

}  // namespace watermap
