#include "watermap/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "watermap/classify.hpp"
#include "watermap/error.hpp"
#include "watermap/io.hpp"
#include "watermap/rng.hpp"
#include "watermap/synth.hpp"
#include "watermap/timeseries.hpp"
#include "watermap/unmix.hpp"

namespace watermap::pipeline {

namespace {

void log_line(const RunOptions& opt, const std::string& msg) {
    if (!opt.log) return;
    static std::mutex mu;
    std::lock_guard lock(mu);
    *opt.log << msg << '\n';
}

unsigned resolve_jobs(unsigned jobs) {
    if (jobs > 0) return jobs;
    return std::max(1u, std::thread::hardware_concurrency());
}

PipelineConfig config_or_default(const fs::path& p) { return p.empty() ? PipelineConfig{} : load_config(p); }

Mask roi_or_full(const fs::path& p, RasterShape shape) {
    if (p.empty()) return full_roi(shape);
    Mask roi = io::read_roi(p);
    if (roi.shape() != shape) throw DimensionError("ROI " + p.string() + " does not match the raster grid");
    return roi;
}

// Rethrows with the scene named; keeps the original category where it matters.
[[noreturn]] void rethrow_for(const std::string& scene_id) {
    try {
        throw;
    } catch (const DegenerateError& e) {
        throw DegenerateError("scene " + scene_id + ": " + e.what());
    } catch (const DimensionError& e) {
        throw DimensionError("scene " + scene_id + ": " + e.what());
    } catch (const FormatError& e) {
        throw FormatError("scene " + scene_id + ": " + e.what());
    } catch (const std::exception& e) {
        throw Error("scene " + scene_id + ": " + e.what());
    }
}

Grid load_slope(const fs::path& dem_path) {
    if (dem_path.empty()) throw ConfigError("a DEM is required (--dem)");
    return slope_from_dem(io::read_grid(dem_path));
}

struct SceneResult {
    std::optional<ClassMap> map;
    double cloud_fraction = 0.0;
};

SceneResult classify_one(const io::ManifestEntry& e, const Grid& slope, const Mask* roi, const PipelineConfig& cfg) {
    const ReflectanceScene scene = io::read_scene(e.path);
    if (scene.shape() != slope.shape()) throw DimensionError("scene grid does not match the DEM");
    ClassMap map = classify_scene(scene, slope, cfg.classify);
    const Mask full = roi ? Mask() : full_roi(map.shape());
    SceneResult r;
    r.cloud_fraction = cloud_fraction(map, roi ? *roi : full);
    if (r.cloud_fraction <= cfg.classify.cloud_skip_fraction) r.map = std::move(map);
    return r;
}

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

}  // namespace

void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn) {
    std::vector<std::exception_ptr> errors(n);
    const unsigned workers =
        static_cast<unsigned>(std::min<std::size_t>(resolve_jobs(jobs), std::max<std::size_t>(n, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned t = 0; t < workers; ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

void write_skipped_csv(const std::vector<SkippedScene>& skipped, const fs::path& path) {
    std::string text = "scene_id,cloud_fraction,reason\n";
    for (const auto& s : skipped) {
        text += s.scene_id + "," + fixed6(s.cloud_fraction) + ",cloud fraction above skip threshold\n";
    }
    io::write_file_atomic(path, text);
}

void write_extrema_csv(const AnnualExtrema& ex, const fs::path& path) {
    std::string text = "year,max_month,max_date,min_month,min_date\n";
    for (const auto& [year, y] : ex.years) {
        text += std::to_string(year) + "," + std::to_string(y.max_month) + "," + y.max_date.iso() + "," +
                std::to_string(y.min_month) + "," + y.min_date.iso() + "\n";
    }
    io::write_file_atomic(path, text);
}

// ---------------------------------------------------------------- classify

ClassifySummary cmd_classify(const ClassifyInputs& in, const RunOptions& opt) {
    const PipelineConfig cfg = config_or_default(in.config);
    const io::SceneManifest manifest = io::read_manifest(in.manifest);
    const Grid slope = load_slope(in.dem);
    const std::optional<Mask> roi = in.roi.empty() ? std::nullopt : std::optional(roi_or_full(in.roi, slope.shape()));
    fs::create_directories(in.out);

    std::vector<SceneResult> results(manifest.entries.size());
    parallel_for(results.size(), opt.jobs, [&](std::size_t k) {
        const auto& e = manifest.entries[k];
        try {
            results[k] = classify_one(e, slope, roi ? &*roi : nullptr, cfg);
            if (results[k].map) io::write_classmap(*results[k].map, in.out / (e.scene_id + ".class"));
        } catch (...) {
            rethrow_for(e.scene_id);
        }
        log_line(opt, "classified " + e.scene_id);
    });

    ClassifySummary summary;
    for (std::size_t k = 0; k < results.size(); ++k) {
        const auto& id = manifest.entries[k].scene_id;
        if (results[k].map) {
            summary.written.push_back(id);
        } else {
            summary.skipped.push_back({id, results[k].cloud_fraction});
            log_line(opt, "skipped " + id + " (cloud fraction " + fixed6(results[k].cloud_fraction) + ")");
        }
    }
    write_skipped_csv(summary.skipped, in.out / "skipped.csv");
    return summary;
}

// ---------------------------------------------------------------- unmix

std::size_t cmd_unmix(const UnmixInputs& in, const RunOptions& opt) {
    const PipelineConfig cfg = config_or_default(in.config);
    const io::SceneManifest manifest = io::read_manifest(in.manifest);
    fs::create_directories(in.out / "abundance");

    std::vector<std::size_t> failures(manifest.entries.size(), 0);
    std::vector<char> present(manifest.entries.size(), 0);
    parallel_for(manifest.entries.size(), opt.jobs, [&](std::size_t k) {
        const auto& e = manifest.entries[k];
        const fs::path class_path = in.classes / (e.scene_id + ".class");
        if (!fs::exists(class_path)) return;  // skipped at classification
        present[k] = 1;
        try {
            const RefineResult r = refine_boundary(io::read_scene(e.path), io::read_classmap(class_path), cfg.unmix);
            io::write_classmap(r.map, in.out / (e.scene_id + ".class"));
            io::write_grid(r.abundance, in.out / "abundance" / (e.scene_id + ".f32"), "water_abundance");
            failures[k] = r.failures;
        } catch (...) {
            rethrow_for(e.scene_id);
        }
        log_line(opt, "refined " + e.scene_id);
    });
    if (std::none_of(present.begin(), present.end(), [](char c) { return c != 0; })) {
        throw DegenerateError("no class map in " + in.classes.string() + " matches the manifest");
    }
    std::size_t total = 0;
    for (std::size_t f : failures) total += f;
    return total;
}

// ---------------------------------------------------------------- interp / stats

ClassStack load_stack(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw FormatError("not a directory: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".class") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw DegenerateError("no .class files in " + dir.string());
    std::vector<ClassMap> maps;
    maps.reserve(files.size());
    for (const auto& f : files) maps.push_back(io::read_classmap(f));
    return build_stack(std::move(maps));
}

void cmd_interp(const fs::path& classes, const fs::path& out, const RunOptions& opt) {
    const ClassStack filled = interpolate(load_stack(classes));
    fs::create_directories(out);
    parallel_for(filled.size(), opt.jobs, [&](std::size_t t) {
        io::write_classmap(filled[t], out / (filled[t].scene_id() + ".class"));
    });
    log_line(opt, "interpolated " + std::to_string(filled.size()) + " maps");
}

namespace {

void write_stats(const ClassStack& stack, const Mask& roi, const fs::path& out) {
    io::write_grid(coverage_rate(stack), out / "coverage.f32", "coverage_rate");
    const std::vector<AreaRecord> records = area_series(stack, roi);
    io::write_area_csv(records, out / "areas.csv");
    write_extrema_csv(annual_extrema(records), out / "extrema.csv");
}

}  // namespace

void cmd_stats(const fs::path& classes, const fs::path& roi, const fs::path& out, const RunOptions& opt) {
    const ClassStack stack = load_stack(classes);
    if (!is_interpolated(stack)) {
        throw DegenerateError("stack still contains Cloud/IceSnow labels; run interp first");
    }
    fs::create_directories(out);
    write_stats(stack, roi_or_full(roi, stack.shape()), out);
    log_line(opt, "wrote statistics for " + std::to_string(stack.size()) + " dates");
}

// ---------------------------------------------------------------- landscape

LandscapeReport cmd_landscape(const fs::path& classmap, const fs::path& roi_path, const fs::path& out,
                              const RunOptions& opt) {
    const ClassMap map = io::read_classmap(classmap);
    const Mask roi = roi_or_full(roi_path, map.shape());
    const PatchLabeling p = connected_components(map.mask_of(ClassLabel::Water), roi);
    LandscapeReport r;
    r.patches = p.patch_count();
    for (auto s : p.sizes) r.water_pixels += s;
    if (r.water_pixels > 0) r.division_index = division_index(p.sizes);
    fs::create_directories(out);
    io::write_patch_ids(p.width, p.height, map.pixel_size_m(), p.ids, out / "patches.i32");
    log_line(opt, "labelled " + std::to_string(r.patches) + " patches");
    return r;
}

std::string format_landscape(const LandscapeReport& r) {
    std::ostringstream os;
    os << "patches " << r.patches << "\n";
    os << "water_pixels " << r.water_pixels << "\n";
    os << "division_index " << (r.division_index ? fixed6(*r.division_index) : std::string("nan")) << "\n";
    return os.str();
}

// ---------------------------------------------------------------- validate

ValidationReport validate(const ClassMap& map, const io::SampleSet& samples) {
    if (samples.empty()) throw DegenerateError("sample set is empty");
    ValidationReport r;
    r.confusion = confusion(map, samples);
    const ConfusionMatrix& cm = r.confusion.matrix;
    r.overall_accuracy = overall_accuracy(cm);
    if (cm.tp + cm.fp > 0) r.precision = precision(cm);
    if (cm.tp + cm.fn > 0) r.recall = recall(cm);
    return r;
}

ValidationReport cmd_validate(const fs::path& classmap, const fs::path& samples) {
    return validate(io::read_classmap(classmap), io::read_samples_csv(samples));
}

std::string format_validation(const ValidationReport& r) {
    const ConfusionMatrix& cm = r.confusion.matrix;
    auto pct = [](const std::optional<double>& v) {
        if (!v) return std::string("n/a");
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.1f", *v);
        return std::string(buf);
    };
    std::ostringstream os;
    os << "TP " << cm.tp << "\nFP " << cm.fp << "\nFN " << cm.fn << "\nTN " << cm.tn << "\n";
    os << "excluded " << r.confusion.excluded << "\n";
    os << "OA " << pct(r.overall_accuracy) << "\n";
    os << "precision " << pct(r.precision) << "\n";
    os << "recall " << pct(r.recall) << "\n";
    return os.str();
}

// ---------------------------------------------------------------- synth

fs::path cmd_synth(const fs::path& spec_json, const fs::path& out, const RunOptions& opt) {
    const std::vector<synth::SceneSpec> specs = synth::parse_archive_spec(io::read_file(spec_json));
    if (specs.empty()) throw FormatError("spec describes no scene");
    for (const char* sub : {"scenes", "truth", "surface", "samples"}) fs::create_directories(out / sub);

    std::vector<Grid> dems(specs.size());
    parallel_for(specs.size(), opt.jobs, [&](std::size_t k) {
        const synth::SceneSpec& s = specs[k];
        synth::SyntheticScene g = synth::generate(s);
        io::write_scene(g.scene, out / "scenes" / s.id);
        io::write_classmap(g.truth, out / "truth" / (s.id + ".class"));
        io::write_classmap(g.surface, out / "surface" / (s.id + ".class"));

        // 1000 seeded surface-truth points for the validate command.
        SplitMix64 rng(derive_seed(s.seed, 0x5A4D));
        io::SampleSet samples;
        const std::size_t n = std::min<std::size_t>(1000, s.width * s.height);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t r = static_cast<std::size_t>(rng.next() % s.height);
            const std::size_t c = static_cast<std::size_t>(rng.next() % s.width);
            samples.push_back({r, c, g.surface.at(r, c)});
        }
        io::write_samples_csv(samples, out / "samples" / (s.id + ".csv"));
        dems[k] = std::move(g.dem);
        log_line(opt, "generated " + s.id);
    });

    for (std::size_t k = 1; k < dems.size(); ++k) {
        if (dems[k].shape() != dems[0].shape() ||
            !std::equal(dems[k].values().begin(), dems[k].values().end(), dems[0].values().begin())) {
            throw ConfigError("scenes " + specs[0].id + " and " + specs[k].id + " imply different terrain");
        }
    }
    io::write_grid(dems[0], out / "dem.f32", "elevation");
    io::write_roi(full_roi(dems[0].shape()), dems[0].pixel_size_m(), out / "roi.f32");

    std::vector<io::ManifestEntry> entries;
    for (const auto& s : specs) entries.push_back({s.id, s.date, s.sensor, out / "scenes" / s.id});
    const fs::path manifest = out / "manifest.csv";
    io::write_manifest(entries, manifest);
    return manifest;
}

// ---------------------------------------------------------------- pipeline

PipelineSummary cmd_pipeline(const PipelineInputs& in, const RunOptions& opt) {
    const PipelineConfig cfg = config_or_default(in.config);
    const io::SceneManifest manifest = io::read_manifest(in.manifest);
    const Grid slope = load_slope(in.dem);
    const Mask roi = roi_or_full(in.roi, slope.shape());
    for (const char* sub : {"class", "refined", "abundance", "interp"}) fs::create_directories(in.out / sub);

    const std::size_t n = manifest.entries.size();
    std::vector<std::optional<ClassMap>> refined(n);
    std::vector<double> fractions(n, 0.0);
    std::vector<std::size_t> failures(n, 0);
    parallel_for(n, opt.jobs, [&](std::size_t k) {
        const auto& e = manifest.entries[k];
        try {
            const ReflectanceScene scene = io::read_scene(e.path);
            if (scene.shape() != slope.shape()) throw DimensionError("scene grid does not match the DEM");
            const ClassMap map = classify_scene(scene, slope, cfg.classify);
            fractions[k] = cloud_fraction(map, roi);
            if (fractions[k] > cfg.classify.cloud_skip_fraction) return;
            io::write_classmap(map, in.out / "class" / (e.scene_id + ".class"));
            RefineResult r = refine_boundary(scene, map, cfg.unmix);
            io::write_classmap(r.map, in.out / "refined" / (e.scene_id + ".class"));
            io::write_grid(r.abundance, in.out / "abundance" / (e.scene_id + ".f32"), "water_abundance");
            failures[k] = r.failures;
            refined[k] = std::move(r.map);
        } catch (...) {
            rethrow_for(e.scene_id);
        }
        log_line(opt, "processed " + e.scene_id);
    });

    PipelineSummary summary;
    std::vector<ClassMap> maps;
    for (std::size_t k = 0; k < n; ++k) {
        summary.unmix_failures += failures[k];
        if (refined[k]) {
            maps.push_back(std::move(*refined[k]));
        } else {
            summary.skipped.push_back({manifest.entries[k].scene_id, fractions[k]});
            log_line(opt, "skipped " + manifest.entries[k].scene_id + " (cloud fraction " + fixed6(fractions[k]) + ")");
        }
    }
    write_skipped_csv(summary.skipped, in.out / "skipped.csv");
    if (maps.empty()) throw DegenerateError("no usable scenes");
    summary.scenes = maps.size();

    const ClassStack filled = interpolate(build_stack(std::move(maps)));
    parallel_for(filled.size(), opt.jobs, [&](std::size_t t) {
        io::write_classmap(filled[t], in.out / "interp" / (filled[t].scene_id() + ".class"));
    });
    write_stats(filled, roi, in.out);
    log_line(opt, "pipeline done: " + std::to_string(summary.scenes) + " scenes, " +
                      std::to_string(summary.skipped.size()) + " skipped");
    return summary;
}

}  // namespace watermap::pipeline
