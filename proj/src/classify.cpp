#include "watermap/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "watermap/error.hpp"

namespace watermap {

namespace {

void require_shape(RasterShape a, RasterShape b, const char* what) {
    if (a != b) {
        throw DimensionError(std::string(what) + ": rasters are not aligned (" +
                             std::to_string(a.width) + "x" + std::to_string(a.height) + " vs " +
                             std::to_string(b.width) + "x" + std::to_string(b.height) + ")");
    }
}

double max_visible(const ReflectanceScene& scene, std::size_t i) {
    return std::max({scene.reflectance(BandRole::Blue, i), scene.reflectance(BandRole::Green, i),
                     scene.reflectance(BandRole::Red, i)});
}

}  // namespace

void ClassifyConfig::validate() const {
    if (!std::isfinite(tc4_threshold)) throw ConfigError("tc4_threshold must be finite");
    if (!(slope_threshold_deg >= 0.0)) throw ConfigError("slope_threshold_deg must be >= 0");
    if (!(maxvis_threshold > 0.0)) throw ConfigError("maxvis_threshold must be > 0");
    if (!(cloud_skip_fraction > 0.0 && cloud_skip_fraction <= 1.0)) {
        throw ConfigError("cloud_skip_fraction must lie in (0, 1]");
    }
}

// ---------------------------------------------------------------- TC4

const std::array<double, 6>& tc4_coefficients(SensorKind sensor) {
    return sensor == SensorKind::TM ? kTc4CoefficientsTM : kTc4CoefficientsOLI;
}

double tc4_value(const Spectrum& s, SensorKind sensor) {
    const auto& c = tc4_coefficients(sensor);
    double acc = 0.0;
    for (std::size_t b = 0; b < 6; ++b) acc += c[b] * s[b];
    return acc;
}

Grid tc4(const ReflectanceScene& scene) {
    const float nodata = scene.band(BandRole::Blue).nodata_value();
    std::vector<float> out(scene.size());
    for (std::size_t i = 0; i < scene.size(); ++i) {
        out[i] = scene.valid(i) ? static_cast<float>(tc4_value(scene.spectrum(i), scene.sensor())) : nodata;
    }
    return Grid(scene.width(), scene.height(), scene.pixel_size_m(), std::move(out), nodata);
}

// ---------------------------------------------------------------- Otsu

double otsu_score(std::uint64_t n0, std::uint64_t s0, std::uint64_t n, std::uint64_t s) {
    const std::uint64_t n1 = n - n0;
    if (n0 == 0 || n1 == 0) return 0.0;
    // (n*s0 - n0*s)^2 / (n0*n1) is N^3 times the between-class variance in bin units.
    const auto diff = static_cast<std::int64_t>(n * s0) - static_cast<std::int64_t>(n0 * s);
    const double d = static_cast<double>(diff);
    return d * d / static_cast<double>(n0) / static_cast<double>(n1);
}

std::size_t otsu_split(std::span<const std::uint64_t> histogram) {
    const std::size_t bins = histogram.size();
    if (bins < 2) throw DegenerateError("otsu: need at least 2 bins");
    std::uint64_t n = 0, s = 0;
    for (std::size_t i = 0; i < bins; ++i) {
        n += histogram[i];
        s += histogram[i] * i;
    }
    std::uint64_t n0 = 0, s0 = 0;
    double best = -1.0;
    std::size_t best_k = 1;
    for (std::size_t k = 1; k < bins; ++k) {
        n0 += histogram[k - 1];
        s0 += histogram[k - 1] * (k - 1);
        const double score = otsu_score(n0, s0, n, s);
        if (score > best) {
            best = score;
            best_k = k;
        }
    }
    return best_k;
}

double otsu_threshold(std::span<const double> samples, std::size_t bins) {
    if (bins < 2) throw DegenerateError("otsu: need at least 2 bins");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (double v : samples) {
        if (!std::isfinite(v)) continue;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (!(hi > lo)) throw DegenerateError("otsu: fewer than two distinct finite samples");

    const double range = hi - lo;
    std::vector<std::uint64_t> hist(bins, 0);
    for (double v : samples) {
        if (!std::isfinite(v)) continue;
        auto idx = static_cast<std::size_t>(std::floor((v - lo) / range * static_cast<double>(bins)));
        hist[std::min(idx, bins - 1)]++;
    }
    const std::size_t k = otsu_split(hist);
    return lo + range * static_cast<double>(k) / static_cast<double>(bins);
}

// ---------------------------------------------------------------- masks

Mask cloud_mask(const Grid& tc4_grid, double threshold) {
    // Compared at sample precision so a stored threshold value classifies as cloud.
    const auto t = static_cast<float>(threshold);
    Mask m(tc4_grid.width(), tc4_grid.height());
    for (std::size_t i = 0; i < tc4_grid.size(); ++i) {
        if (!tc4_grid.is_nodata(i) && tc4_grid[i] <= t) m.set(i, true);
    }
    return m;
}

bool water_index_pixel(const Spectrum& s) {
    const double vis = std::max({s[0], s[1], s[2]});
    const double swir = std::max(s[4], s[5]);
    return vis > swir;
}

Mask water_index(const ReflectanceScene& scene) {
    Mask m(scene.width(), scene.height());
    for (std::size_t i = 0; i < scene.size(); ++i) {
        if (scene.valid(i) && water_index_pixel(scene.spectrum(i))) m.set(i, true);
    }
    return m;
}

// ---------------------------------------------------------------- terrain

Grid slope_from_dem(const Grid& dem) {
    const std::size_t w = dem.width();
    const std::size_t h = dem.height();
    const double cell = dem.pixel_size_m();
    std::vector<float> out(dem.size(), dem.nodata_value());

    for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t c = 0; c < w; ++c) {
            const std::size_t idx = r * w + c;
            if (dem.is_nodata(idx)) continue;
            const double centre = dem[idx];
            auto z = [&](long dr, long dc) {
                const long rr = std::clamp(static_cast<long>(r) + dr, 0L, static_cast<long>(h) - 1);
                const long cc = std::clamp(static_cast<long>(c) + dc, 0L, static_cast<long>(w) - 1);
                const std::size_t j = static_cast<std::size_t>(rr) * w + static_cast<std::size_t>(cc);
                return dem.is_nodata(j) ? centre : static_cast<double>(dem[j]);
            };
            // a b c / d e f / g h i
            const double a = z(-1, -1), b = z(-1, 0), cc = z(-1, 1);
            const double d = z(0, -1), f = z(0, 1);
            const double g = z(1, -1), hh = z(1, 0), i = z(1, 1);
            const double dzdx = ((cc + 2 * f + i) - (a + 2 * d + g)) / (8.0 * cell);
            const double dzdy = ((g + 2 * hh + i) - (a + 2 * b + cc)) / (8.0 * cell);
            const double rise = std::sqrt(dzdx * dzdx + dzdy * dzdy);
            out[idx] = static_cast<float>(std::atan(rise) * 180.0 / std::numbers::pi);
        }
    }
    return Grid(w, h, cell, std::move(out), dem.nodata_value());
}

Mask shadow_filter(const Mask& water, const Grid& slope, double slope_threshold_deg) {
    require_shape(water.shape(), slope.shape(), "shadow_filter");
    Mask out = water;
    for (std::size_t i = 0; i < water.size(); ++i) {
        if (water[i] && !slope.is_nodata(i) && slope[i] > slope_threshold_deg) out.set(i, false);
    }
    return out;
}

SnowIceResult snow_ice_filter(const Mask& water, const ReflectanceScene& scene, double maxvis_threshold) {
    require_shape(water.shape(), scene.shape(), "snow_ice_filter");
    SnowIceResult r{water, Mask(water.width(), water.height())};
    for (std::size_t i = 0; i < water.size(); ++i) {
        if (water[i] && max_visible(scene, i) >= maxvis_threshold) {
            r.water.set(i, false);
            r.ice.set(i, true);
        }
    }
    return r;
}

// ---------------------------------------------------------------- composition

ClassMap classify_scene(const ReflectanceScene& scene, const Grid& slope, const ClassifyConfig& cfg) {
    cfg.validate();
    require_shape(scene.shape(), slope.shape(), "classify_scene");

    const Grid tc = tc4(scene);
    double threshold = cfg.tc4_threshold;
    if (cfg.per_scene_otsu) {
        std::vector<double> samples;
        samples.reserve(tc.size());
        for (std::size_t i = 0; i < tc.size(); ++i) {
            if (!tc.is_nodata(i)) samples.push_back(tc[i]);
        }
        try {
            threshold = otsu_threshold(samples);
        } catch (const DegenerateError&) {
            // Flat TC4 histogram: keep the configured threshold.
        }
    }

    const Mask cloud = cloud_mask(tc, threshold);
    Mask wi = water_index(scene);
    for (std::size_t i = 0; i < wi.size(); ++i) {
        if (cloud[i]) wi.set(i, false);
    }
    const Mask water = shadow_filter(wi, slope, cfg.slope_threshold_deg);
    const SnowIceResult split = snow_ice_filter(water, scene, cfg.maxvis_threshold);

    std::vector<ClassLabel> labels(scene.size(), ClassLabel::Land);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (!scene.valid(i)) {
            labels[i] = ClassLabel::NoData;
        } else if (cloud[i]) {
            labels[i] = ClassLabel::Cloud;
        } else if (split.ice[i]) {
            labels[i] = ClassLabel::IceSnow;
        } else if (split.water[i]) {
            labels[i] = ClassLabel::Water;
        }
    }
    return ClassMap(scene.id(), scene.date(), scene.width(), scene.height(), scene.pixel_size_m(),
                    std::move(labels));
}

double cloud_fraction(const ClassMap& map, const Mask& roi) {
    require_shape(map.shape(), roi.shape(), "cloud_fraction");
    std::size_t inside = 0, cloudy = 0;
    for (std::size_t i = 0; i < map.size(); ++i) {
        if (!roi[i]) continue;
        ++inside;
        if (map[i] == ClassLabel::Cloud) ++cloudy;
    }
    if (inside == 0) throw DegenerateError("cloud_fraction: empty ROI");
    return static_cast<double>(cloudy) / static_cast<double>(inside);
}

}  // namespace watermap
