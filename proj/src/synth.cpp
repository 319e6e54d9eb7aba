#include "watermap/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <json.hpp>

#include "watermap/classify.hpp"
#include "watermap/error.hpp"
#include "watermap/rng.hpp"

namespace watermap::synth {

using nlohmann::json;

namespace {

constexpr std::array<Material, 6> kMaterials = {Material::Water,  Material::Land,    Material::Vegetation,
                                                Material::Cloud,  Material::IceSnow, Material::ShadowTerrain};
constexpr double kPixelHalfDiagonal = 0.7072;

std::size_t slot(Material m) { return static_cast<std::size_t>(m); }

struct Bounds {
    double x0, y0, x1, y1;
};

struct ShapeEval {
    // Approximate signed distance in pixels (negative inside). Exact sign; the
    // magnitude never overstates the true distance by more than `margin` allows.
    double sd(double x, double y) const { return std::visit([&](const auto& g) { return dist(g, x, y); }, geometry); }

    static double dist(const Disk& d, double x, double y) { return std::hypot(x - d.cx, y - d.cy) - d.radius; }

    static double dist(const Ellipse& e, double x, double y) {
        const double a = e.angle_deg * std::numbers::pi / 180.0;
        const double dx = x - e.cx, dy = y - e.cy;
        const double u = dx * std::cos(a) + dy * std::sin(a);
        const double v = -dx * std::sin(a) + dy * std::cos(a);
        const double rho = std::hypot(u / e.rx, v / e.ry);
        return (rho - 1.0) * std::min(e.rx, e.ry);
    }

    static double dist(const Line& l, double x, double y) {
        const double vx = l.x1 - l.x0, vy = l.y1 - l.y0;
        const double len2 = vx * vx + vy * vy;
        double t = len2 > 0 ? ((x - l.x0) * vx + (y - l.y0) * vy) / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        return std::hypot(x - (l.x0 + t * vx), y - (l.y0 + t * vy)) - l.width / 2.0;
    }

    static double dist(const Blob& b, double x, double y) {
        const double dx = x - b.cx, dy = y - b.cy;
        const double r = b.radius * (1.0 + b.amplitude * std::sin(b.lobes * std::atan2(dy, dx) + b.phase));
        return std::hypot(dx, dy) - r;
    }

    Geometry geometry;
    Bounds bounds;
    double margin;
};

ShapeEval make_eval(const Geometry& g) {
    return std::visit(
        [&](const auto& s) -> ShapeEval {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Disk>) {
                return {g, {s.cx - s.radius, s.cy - s.radius, s.cx + s.radius, s.cy + s.radius}, kPixelHalfDiagonal};
            } else if constexpr (std::is_same_v<T, Ellipse>) {
                const double r = std::max(s.rx, s.ry);
                return {g, {s.cx - r, s.cy - r, s.cx + r, s.cy + r}, kPixelHalfDiagonal};
            } else if constexpr (std::is_same_v<T, Line>) {
                const double h = s.width / 2.0;
                return {g,
                        {std::min(s.x0, s.x1) - h, std::min(s.y0, s.y1) - h, std::max(s.x0, s.x1) + h,
                         std::max(s.y0, s.y1) + h},
                        kPixelHalfDiagonal};
            } else {
                const double r = s.radius * (1.0 + std::abs(s.amplitude));
                const double slope = std::abs(s.amplitude) * s.lobes / std::max(1e-9, 1.0 - std::abs(s.amplitude));
                return {g, {s.cx - r, s.cy - r, s.cx + r, s.cy + r},
                        2.0 * kPixelHalfDiagonal * std::sqrt(1.0 + slope * slope)};
            }
        },
        g);
}

double supersample(const ShapeEval& e, std::size_t row, std::size_t col, int n) {
    int inside = 0;
    for (int i = 0; i < n; ++i) {
        const double y = static_cast<double>(row) + (i + 0.5) / n;
        for (int j = 0; j < n; ++j) {
            const double x = static_cast<double>(col) + (j + 0.5) / n;
            if (e.sd(x, y) < 0.0) ++inside;
        }
    }
    return static_cast<double>(inside) / (static_cast<double>(n) * n);
}

double pixel_coverage(const ShapeEval& e, std::size_t row, std::size_t col, bool mixing, int n) {
    const double x = static_cast<double>(col) + 0.5;
    const double y = static_cast<double>(row) + 0.5;
    if (x + 0.5 < e.bounds.x0 || x - 0.5 > e.bounds.x1 || y + 0.5 < e.bounds.y0 || y - 0.5 > e.bounds.y1) {
        return 0.0;
    }
    const double d = e.sd(x, y);
    if (!mixing) return d < 0.0 ? 1.0 : 0.0;
    if (d <= -e.margin) return 1.0;
    if (d >= e.margin) return 0.0;
    return supersample(e, row, col, n);
}

double max_vis(const Spectrum& s) { return std::max({s[0], s[1], s[2]}); }
double max_swir(const Spectrum& s) { return std::max(s[4], s[5]); }

Spectrum spectrum_from_json(const json& j, const char* what) {
    const auto v = j.get<std::vector<double>>();
    if (v.size() != 6) throw FormatError(std::string(what) + ": expected 6 values");
    Spectrum s{};
    std::copy(v.begin(), v.end(), s.begin());
    return s;
}

Geometry geometry_from_json(const json& j) {
    const std::string shape = j.at("shape").get<std::string>();
    if (shape == "disk") return Disk{j.at("cx"), j.at("cy"), j.at("radius")};
    if (shape == "ellipse") return Ellipse{j.at("cx"), j.at("cy"), j.at("rx"), j.at("ry"), j.value("angle_deg", 0.0)};
    if (shape == "line") return Line{j.at("x0"), j.at("y0"), j.at("x1"), j.at("y1"), j.at("width")};
    if (shape == "blob") {
        return Blob{j.at("cx"), j.at("cy"), j.at("radius"), j.value("amplitude", 0.15), j.value("lobes", 5),
                    j.value("phase", 0.0)};
    }
    throw FormatError("unknown feature shape '" + shape + "'");
}

SceneSpec spec_from_json(const json& j) {
    SceneSpec s;
    s.id = j.value("id", s.id);
    if (j.contains("date")) s.date = Date::parse(j.at("date").get<std::string>());
    if (j.contains("sensor")) s.sensor = parse_sensor(j.at("sensor").get<std::string>());
    s.width = j.value("width", s.width);
    s.height = j.value("height", s.height);
    s.pixel_size_m = j.value("pixel_size_m", s.pixel_size_m);
    s.seed = j.value("seed", s.seed);
    s.mixing = j.value("mixing", s.mixing);
    s.subsamples = j.value("subsamples", s.subsamples);
    s.base_elevation_m = j.value("base_elevation_m", s.base_elevation_m);
    if (j.contains("background")) s.background = parse_material(j.at("background").get<std::string>());
    if (j.contains("noise_std")) s.templates = default_templates(j.at("noise_std").get<double>());
    if (j.contains("spectra")) {
        for (const auto& [name, t] : j.at("spectra").items()) {
            SpectralTemplate& tpl = s.templates[parse_material(name)];
            if (t.contains("mean")) tpl.mean = spectrum_from_json(t.at("mean"), "spectra.mean");
            if (t.contains("noise_std")) {
                const json& n = t.at("noise_std");
                if (n.is_number()) {
                    tpl.noise_std.fill(n.get<double>());
                } else {
                    tpl.noise_std = spectrum_from_json(n, "spectra.noise_std");
                }
            }
        }
    }
    if (j.contains("features")) {
        for (const json& f : j.at("features")) {
            Feature feat;
            feat.geometry = geometry_from_json(f);
            feat.material = parse_material(f.at("class").get<std::string>());
            feat.ramp_deg = f.value("ramp_deg", feat.ramp_deg);
            s.features.push_back(feat);
        }
    }
    s.validate();
    return s;
}

json parse_json_with_lines(std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        const std::size_t upto = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
        const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
        throw FormatError("spec JSON parse error at line " + std::to_string(line) + ": " + e.what());
    }
}

template <typename F>
auto with_json_errors(F&& f) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw FormatError(std::string("invalid spec field: ") + e.what());
    }
}

}  // namespace

std::string_view material_name(Material m) {
    switch (m) {
        case Material::Water: return "water";
        case Material::Land: return "land";
        case Material::Vegetation: return "vegetation";
        case Material::Cloud: return "cloud";
        case Material::IceSnow: return "ice_snow";
        case Material::ShadowTerrain: return "shadow_terrain";
    }
    return "?";
}

Material parse_material(std::string_view name) {
    for (Material m : kMaterials) {
        if (material_name(m) == name) return m;
    }
    if (name == "soil") return Material::Land;
    if (name == "snow" || name == "ice") return Material::IceSnow;
    if (name == "shadow") return Material::ShadowTerrain;
    throw FormatError("unknown material '" + std::string(name) + "'");
}

std::map<Material, SpectralTemplate> default_templates(double noise_std) {
    Spectrum n{};
    n.fill(noise_std);
    return {
        {Material::Water, {{0.06, 0.08, 0.05, 0.03, 0.01, 0.008}, n}},
        {Material::Land, {{0.10, 0.14, 0.18, 0.25, 0.30, 0.28}, n}},
        {Material::Vegetation, {{0.04, 0.06, 0.04, 0.40, 0.22, 0.12}, n}},
        {Material::IceSnow, {{0.60, 0.55, 0.50, 0.40, 0.10, 0.08}, n}},
        {Material::Cloud, {{0.60, 0.60, 0.60, 0.60, 0.40, 0.30}, n}},
        {Material::ShadowTerrain, {{0.03, 0.035, 0.03, 0.025, 0.02, 0.018}, n}},
    };
}

void SceneSpec::validate() const {
    if (width == 0 || height == 0) throw ConfigError("scene spec: width and height must be positive");
    if (!(pixel_size_m > 0.0)) throw ConfigError("scene spec: pixel_size_m must be positive");
    if (subsamples < 1) throw ConfigError("scene spec: subsamples must be >= 1");
    if (!date.ok()) throw ConfigError("scene spec: invalid date");

    auto need = [&](Material m) -> const SpectralTemplate& {
        const auto it = templates.find(m);
        if (it == templates.end()) {
            throw ConfigError("scene spec: no spectral template for '" + std::string(material_name(m)) + "'");
        }
        return it->second;
    };
    need(background);
    for (const Feature& f : features) {
        need(f.material);
        if (f.material == Material::ShadowTerrain && !(f.ramp_deg > 0.0 && f.ramp_deg < 90.0)) {
            throw ConfigError("scene spec: ramp_deg must lie in (0, 90)");
        }
        std::visit(
            [](const auto& g) {
                using T = std::decay_t<decltype(g)>;
                bool ok = true;
                if constexpr (std::is_same_v<T, Disk>) ok = g.radius > 0;
                if constexpr (std::is_same_v<T, Ellipse>) ok = g.rx > 0 && g.ry > 0;
                if constexpr (std::is_same_v<T, Line>) ok = g.width > 0;
                if constexpr (std::is_same_v<T, Blob>) ok = g.radius > 0 && std::abs(g.amplitude) < 1 && g.lobes >= 0;
                if (!ok) throw ConfigError("scene spec: feature geometry has non-positive size");
            },
            f.geometry);
    }

    // Orderings the classification thresholds rely on, with a 0.01 margin.
    constexpr double margin = 0.01;
    for (const auto& [m, t] : templates) {
        for (double v : t.mean) {
            if (v < 0.0 || v > kMaxReflectance) throw ConfigError("scene spec: template reflectance out of range");
        }
        for (double v : t.noise_std) {
            if (v < 0.0) throw ConfigError("scene spec: negative noise std");
        }
        const std::string name(material_name(m));
        switch (m) {
            case Material::Water:
            case Material::ShadowTerrain:
                if (!(max_vis(t.mean) > max_swir(t.mean) + margin)) {
                    throw ConfigError("scene spec: " + name + " template needs maxVIS > maxSWIR");
                }
                break;
            case Material::Land:
            case Material::Vegetation:
                if (!(max_swir(t.mean) > max_vis(t.mean) + margin)) {
                    throw ConfigError("scene spec: " + name + " template needs maxSWIR > maxVIS");
                }
                break;
            case Material::IceSnow:
                if (!(max_vis(t.mean) >= 0.15 + margin)) {
                    throw ConfigError("scene spec: ice_snow template needs maxVIS >= 0.15");
                }
                break;
            case Material::Cloud:
                if (!(tc4_value(t.mean, SensorKind::TM) <= -0.046 - margin &&
                      tc4_value(t.mean, SensorKind::OLI) <= -0.046 - margin)) {
                    throw ConfigError("scene spec: cloud template needs TC4 <= -0.046");
                }
                break;
        }
    }
}

double coverage(const Geometry& g, std::size_t row, std::size_t col, int n) {
    return pixel_coverage(make_eval(g), row, col, true, n);
}

SyntheticScene generate(const SceneSpec& spec) {
    spec.validate();
    const std::size_t w = spec.width, h = spec.height, npx = w * h;

    std::vector<ShapeEval> evals;
    evals.reserve(spec.features.size());
    for (const Feature& f : spec.features) evals.push_back(make_eval(f.geometry));

    std::array<SpectralTemplate, 6> tpl{};
    for (const auto& [m, t] : spec.templates) tpl[slot(m)] = t;

    std::array<std::vector<float>, 6> bands;
    for (auto& b : bands) b.resize(npx);
    std::vector<ClassLabel> truth(npx), surface(npx);
    std::vector<float> water_fraction(npx);
    std::vector<std::vector<std::uint8_t>> footprints(spec.features.size());

    SplitMix64 rng(spec.seed);
    for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t c = 0; c < w; ++c) {
            const std::size_t i = r * w + c;
            std::array<double, 6> mix{};
            std::array<double, 6> ground{};
            mix[slot(spec.background)] = 1.0;
            ground[slot(spec.background)] = 1.0;

            for (std::size_t k = 0; k < evals.size(); ++k) {
                const double cov = pixel_coverage(evals[k], r, c, spec.mixing, spec.subsamples);
                if (cov <= 0.0) continue;
                const Material m = spec.features[k].material;
                for (double& v : mix) v *= 1.0 - cov;
                mix[slot(m)] += cov;
                if (m != Material::Cloud && m != Material::IceSnow) {
                    for (double& v : ground) v *= 1.0 - cov;
                    ground[slot(m)] += cov;
                }
                if (m == Material::ShadowTerrain) {
                    auto& fp = footprints[k];
                    if (fp.empty()) fp.assign(npx, 0);
                    fp[i] = 1;
                }
            }

            for (std::size_t b = 0; b < 6; ++b) {
                double mean = 0.0, sd = 0.0;
                for (std::size_t m = 0; m < 6; ++m) {
                    mean += mix[m] * tpl[m].mean[b];
                    sd += mix[m] * tpl[m].noise_std[b];
                }
                const double v = mean + sd * rng.normal();
                bands[b][i] = static_cast<float>(std::clamp(v, 0.0, static_cast<double>(kMaxReflectance)));
            }

            const double wf = ground[slot(Material::Water)];
            water_fraction[i] = static_cast<float>(wf);
            surface[i] = wf >= 0.5 ? ClassLabel::Water : ClassLabel::Land;

            // Dominant cover; ties resolve Cloud > IceSnow > Water > Land.
            const double cloud = mix[slot(Material::Cloud)];
            const double ice = mix[slot(Material::IceSnow)];
            const double water = mix[slot(Material::Water)];
            const double land = mix[slot(Material::Land)] + mix[slot(Material::Vegetation)] +
                                mix[slot(Material::ShadowTerrain)];
            ClassLabel label = ClassLabel::Cloud;
            double best = cloud;
            if (ice > best) label = ClassLabel::IceSnow, best = ice;
            if (water > best) label = ClassLabel::Water, best = water;
            if (land > best) label = ClassLabel::Land, best = land;
            truth[i] = label;
        }
    }

    // Terrain: flat base; each shadow feature sits on an eastward ramp covering its
    // footprint dilated by two pixels, so every footprint pixel sees pure ramp in Horn's kernel.
    std::vector<float> dem(npx, static_cast<float>(spec.base_elevation_m));
    for (std::size_t k = 0; k < spec.features.size(); ++k) {
        const auto& fp = footprints[k];
        if (fp.empty()) continue;
        std::size_t min_col = w;
        for (std::size_t i = 0; i < npx; ++i) {
            if (fp[i]) min_col = std::min(min_col, i % w);
        }
        const double rise = std::tan(spec.features[k].ramp_deg * std::numbers::pi / 180.0) * spec.pixel_size_m;
        const long origin = static_cast<long>(min_col) - 3;
        for (std::size_t r = 0; r < h; ++r) {
            for (std::size_t c = 0; c < w; ++c) {
                bool near = false;
                for (long dr = -2; dr <= 2 && !near; ++dr) {
                    for (long dc = -2; dc <= 2; ++dc) {
                        const long rr = static_cast<long>(r) + dr, cc = static_cast<long>(c) + dc;
                        if (rr < 0 || cc < 0 || rr >= static_cast<long>(h) || cc >= static_cast<long>(w)) continue;
                        if (fp[static_cast<std::size_t>(rr) * w + static_cast<std::size_t>(cc)]) {
                            near = true;
                            break;
                        }
                    }
                }
                if (near) {
                    dem[r * w + c] = static_cast<float>(spec.base_elevation_m +
                                                        rise * static_cast<double>(static_cast<long>(c) - origin));
                }
            }
        }
    }

    std::array<Grid, 6> grids;
    for (std::size_t b = 0; b < 6; ++b) grids[b] = Grid(w, h, spec.pixel_size_m, std::move(bands[b]));
    ClassMap truth_map(spec.id, spec.date, w, h, spec.pixel_size_m, std::move(truth));
    ClassMap surface_map(spec.id, spec.date, w, h, spec.pixel_size_m, std::move(surface));
    return SyntheticScene{ReflectanceScene(spec.id, spec.date, spec.sensor, std::move(grids)),
                          std::move(truth_map), std::move(surface_map),
                          Grid(w, h, spec.pixel_size_m, std::move(water_fraction)),
                          Grid(w, h, spec.pixel_size_m, std::move(dem))};
}

// ---------------------------------------------------------------- seasonal archive

double seasonal_shape(double day_of_year) {
    constexpr double kYear = 365.0;
    constexpr double kTrough = 134.0;  // 15 May
    constexpr double kPeak = 257.0;    // 15 September
    const double t = std::fmod(std::fmod(day_of_year, kYear) + kYear, kYear);
    if (t >= kTrough && t <= kPeak) {
        return -std::cos(std::numbers::pi * (t - kTrough) / (kPeak - kTrough));
    }
    const double elapsed = std::fmod(t - kPeak + kYear, kYear);
    return std::cos(std::numbers::pi * elapsed / (kYear - (kPeak - kTrough)));
}

SeasonalArchive seasonal_stack(const SeasonalSpec& spec) {
    if (spec.years < 1 || spec.scenes_per_year < 1) {
        throw ConfigError("seasonal: years and scenes_per_year must be >= 1");
    }
    if (spec.mean_radius_px - spec.amplitude_px <= 0.0) throw ConfigError("seasonal: radius would vanish");
    const double cx = static_cast<double>(spec.base.width) / 2.0;
    const double cy = static_cast<double>(spec.base.height) / 2.0;

    SeasonalArchive out;
    SplitMix64 noise(derive_seed(spec.base.seed, 0x5EA5));
    std::size_t index = 0;
    for (int y = 0; y < spec.years; ++y) {
        const int year = spec.start_year + y;
        const long jan1 = Date{year, 1, 1}.days_since_epoch();
        for (int k = 0; k < spec.scenes_per_year; ++k, ++index) {
            const int doy = static_cast<int>(std::floor((k + 0.5) * 365.0 / spec.scenes_per_year));
            const Date date = Date::from_days(jan1 + doy);
            const double radius = spec.mean_radius_px + spec.amplitude_px * seasonal_shape(doy) +
                                  spec.noise_fraction * spec.amplitude_px * noise.normal();

            SceneSpec s = spec.base;
            char id[32];
            std::snprintf(id, sizeof id, "S%04d%02d%02d", date.year, date.month, date.day);
            s.id = id;
            s.date = date;
            s.seed = derive_seed(spec.base.seed, index);
            s.features.insert(s.features.begin(), Feature{Disk{cx, cy, radius}, Material::Water});
            if (spec.winter_ice && (date.month == 12 || date.month <= 2)) {
                s.features.push_back(Feature{Disk{cx, cy, radius + 1.5}, Material::IceSnow});
            }
            out.scenes.push_back(std::move(s));
            out.radius_px.push_back(radius);
            out.true_area_km2.push_back(std::numbers::pi * radius * radius * pixel_area_km2(spec.base.pixel_size_m));
        }
    }
    return out;
}

// ---------------------------------------------------------------- JSON

SceneSpec parse_scene_spec(std::string_view json_text) {
    const json j = parse_json_with_lines(json_text);
    return with_json_errors([&] { return spec_from_json(j); });
}

std::vector<SceneSpec> parse_archive_spec(std::string_view json_text) {
    const json j = parse_json_with_lines(json_text);
    return with_json_errors([&] {
        if (!j.is_object()) throw FormatError("spec must be a JSON object");
        std::vector<SceneSpec> out;
        if (j.contains("scenes")) {
            for (const json& s : j.at("scenes")) out.push_back(spec_from_json(s));
        } else if (j.contains("seasonal")) {
            const json& sj = j.at("seasonal");
            SeasonalSpec ss;
            if (sj.contains("base")) ss.base = spec_from_json(sj.at("base"));
            ss.start_year = sj.value("start_year", ss.start_year);
            ss.years = sj.value("years", ss.years);
            ss.scenes_per_year = sj.value("scenes_per_year", ss.scenes_per_year);
            ss.mean_radius_px = sj.value("mean_radius_px", ss.mean_radius_px);
            ss.amplitude_px = sj.value("amplitude_px", ss.amplitude_px);
            ss.noise_fraction = sj.value("noise_fraction", ss.noise_fraction);
            ss.winter_ice = sj.value("winter_ice", ss.winter_ice);
            out = seasonal_stack(ss).scenes;
        } else {
            out.push_back(spec_from_json(j));
        }
        for (std::size_t a = 0; a < out.size(); ++a) {
            for (std::size_t b = a + 1; b < out.size(); ++b) {
                if (out[a].id == out[b].id) throw FormatError("duplicate scene id '" + out[a].id + "'");
            }
        }
        return out;
    });
}

}  // namespace watermap::synth
