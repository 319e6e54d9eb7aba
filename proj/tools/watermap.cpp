#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "watermap/error.hpp"
#include "watermap/pipeline.hpp"

namespace wp = watermap::pipeline;

int main(int argc, char** argv) {
    CLI::App app{"Water mapping for multispectral scene archives"};
    app.require_subcommand(1);
    app.allow_windows_style_options(false);

    wp::RunOptions opt;
    opt.log = &std::cerr;
    bool quiet = false;
    app.add_option("--jobs", opt.jobs, "Worker threads (0 = all processors)");
    app.add_flag("--quiet", quiet, "Suppress progress messages");

    std::string manifest, dem, roi, config, out, input, samples, spec;

    auto* classify = app.add_subcommand("classify", "Cloud, water, shadow and snow/ice labels per scene");
    classify->add_option("--manifest", manifest, "Scene manifest CSV")->required();
    classify->add_option("--dem", dem, "DEM grid (.f32)")->required();
    classify->add_option("--roi", roi, "ROI grid for the cloud fraction");
    classify->add_option("--config", config, "key=value configuration file");
    classify->add_option("--out", out, "Output directory")->required();

    auto* unmix = app.add_subcommand("unmix", "Sub-pixel refinement of water/land boundaries");
    unmix->add_option("--manifest", manifest, "Scene manifest CSV")->required();
    unmix->add_option("--input", input, "Directory of class maps")->required();
    unmix->add_option("--config", config, "key=value configuration file");
    unmix->add_option("--out", out, "Output directory")->required();

    auto* interp = app.add_subcommand("interp", "Fill Cloud/IceSnow labels from the nearest clear date");
    interp->add_option("--input", input, "Directory of class maps")->required();
    interp->add_option("--out", out, "Output directory")->required();

    auto* stats = app.add_subcommand("stats", "Area series, coverage rate and annual extrema");
    stats->add_option("--input", input, "Directory of interpolated class maps")->required();
    stats->add_option("--roi", roi, "ROI grid");
    stats->add_option("--out", out, "Output directory")->required();

    auto* landscape = app.add_subcommand("landscape", "Water patches and division index of one map");
    landscape->add_option("--input", input, "Class map")->required();
    landscape->add_option("--roi", roi, "ROI grid");
    landscape->add_option("--out", out, "Output directory")->required();

    auto* validate = app.add_subcommand("validate", "Confusion counts and accuracy against samples");
    validate->add_option("--input", input, "Class map")->required();
    validate->add_option("--samples", samples, "Sample CSV (row,col,truth)")->required();

    auto* synth = app.add_subcommand("synth", "Generate a synthetic archive from a JSON spec");
    synth->add_option("--spec", spec, "Scene or archive spec (JSON)")->required();
    synth->add_option("--out", out, "Output directory")->required();

    auto* pipeline = app.add_subcommand("pipeline", "Full run: classify, refine, interpolate, statistics");
    pipeline->add_option("--manifest", manifest, "Scene manifest CSV")->required();
    pipeline->add_option("--dem", dem, "DEM grid (.f32)")->required();
    pipeline->add_option("--roi", roi, "ROI grid");
    pipeline->add_option("--config", config, "key=value configuration file");
    pipeline->add_option("--out", out, "Output directory")->required();

    CLI11_PARSE(app, argc, argv);
    if (quiet) opt.log = nullptr;

    try {
        if (*classify) {
            const auto s = wp::cmd_classify({manifest, dem, roi, config, out}, opt);
            std::cout << "classified " << s.written.size() << " skipped " << s.skipped.size() << "\n";
        } else if (*unmix) {
            const std::size_t failures = wp::cmd_unmix({manifest, input, config, out}, opt);
            if (failures > 0) std::cerr << "warning: " << failures << " mixed pixels had no endmembers\n";
        } else if (*interp) {
            wp::cmd_interp(input, out, opt);
        } else if (*stats) {
            wp::cmd_stats(input, roi, out, opt);
        } else if (*landscape) {
            std::cout << wp::format_landscape(wp::cmd_landscape(input, roi, out, opt));
        } else if (*validate) {
            std::cout << wp::format_validation(wp::cmd_validate(input, samples));
        } else if (*synth) {
            std::cout << wp::cmd_synth(spec, out, opt).string() << "\n";
        } else if (*pipeline) {
            const auto s = wp::cmd_pipeline({manifest, dem, roi, config, out}, opt);
            std::cout << "scenes " << s.scenes << " skipped " << s.skipped.size() << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
