#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <map>
#include <sys/wait.h>

#include "support.hpp"
#include "watermap/io.hpp"

using namespace watermap;
namespace fs = std::filesystem;
using testsupport::TempDir;

namespace {

struct CliResult {
    int code = -1;
    std::string out;
    std::string err;
};

std::string quote(const std::string& s) { return "'" + s + "'"; }

CliResult run_cli(const TempDir& dir, const std::string& args) {
    const fs::path out = dir / "stdout.txt", err = dir / "stderr.txt";
    const std::string cmd =
        quote(testsupport::cli_path().string()) + " " + args + " >" + quote(out.string()) + " 2>" + quote(err.string());
    const int status = std::system(cmd.c_str());
    CliResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = io::read_file(out);
    r.err = io::read_file(err);
    return r;
}

void write_text(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::size_t line_count(const fs::path& p) {
    const std::string s = io::read_file(p);
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (e.is_regular_file()) files[fs::relative(e.path(), root).generic_string()] = io::read_file(e.path());
    }
    return files;
}

// Five monthly scenes of a lake; `cloudy` gets a cloud blob over part of it.
std::string lake_archive(int cloudy_index, bool all_cloud = false) {
    std::string scenes;
    for (int k = 0; k < 5; ++k) {
        std::string features = R"([{"shape": "disk", "cx": 24, "cy": 24, "radius": 14, "class": "water"})";
        if (all_cloud) {
            features += R"(, {"shape": "disk", "cx": 24, "cy": 24, "radius": 60, "class": "cloud"})";
        } else if (k == cloudy_index) {
            features += R"(, {"shape": "blob", "cx": 30, "cy": 24, "radius": 9, "class": "cloud"})";
        }
        features += "]";
        if (!scenes.empty()) scenes += ",";
        scenes += R"({"id": "L)" + std::to_string(k) + R"(", "date": "2014-0)" + std::to_string(k + 3) +
                  R"(-10", "width": 48, "height": 48, "seed": )" + std::to_string(k + 1) +
                  R"(, "features": )" + features + "}";
    }
    return R"({"scenes": [)" + scenes + "]}";
}

}  // namespace

TEST(Cli, NoSubcommandIsAnError) {
    TempDir dir;
    EXPECT_NE(run_cli(dir, "").code, 0);
    EXPECT_NE(run_cli(dir, "frobnicate").code, 0);
}

TEST(Cli, SynthMinimalSpec) {
    TempDir dir;
    write_text(dir / "spec.json", R"({"id": "one", "width": 16, "height": 12,
        "features": [{"shape": "disk", "cx": 8, "cy": 6, "radius": 4, "class": "water"}]})");
    const CliResult r = run_cli(dir, "synth --spec " + quote((dir / "spec.json").string()) + " --out " +
                                   quote((dir / "syn").string()));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(dir / "syn" / "scenes" / "one.f32"));
    EXPECT_TRUE(fs::exists(dir / "syn" / "scenes" / "one.json"));
    EXPECT_TRUE(fs::exists(dir / "syn" / "truth" / "one.class"));
    EXPECT_TRUE(fs::exists(dir / "syn" / "dem.f32"));
    EXPECT_EQ(io::read_manifest(dir / "syn" / "manifest.csv").entries.size(), 1u);
    EXPECT_EQ(io::read_scene(dir / "syn" / "scenes" / "one").width(), 16u);
}

TEST(Cli, SynthSeasonalSpec) {
    TempDir dir;
    write_text(dir / "spec.json", R"({"seasonal": {"years": 1, "scenes_per_year": 12, "mean_radius_px": 10,
        "amplitude_px": 3, "base": {"width": 32, "height": 32}}})");
    const CliResult r = run_cli(dir, "synth --spec " + quote((dir / "spec.json").string()) + " --out " +
                                   quote((dir / "syn").string()));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(io::read_manifest(dir / "syn" / "manifest.csv").entries.size(), 12u);
}

TEST(Cli, SynthMalformedJsonReportsLine) {
    TempDir dir;
    write_text(dir / "spec.json", "{\n  \"id\": \"a\"\n  \"width\": 3\n}\n");
    const CliResult r = run_cli(dir, "synth --spec " + quote((dir / "spec.json").string()) + " --out " +
                                   quote((dir / "syn").string()));
    EXPECT_NE(r.code, 0);
    EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
}

TEST(Cli, ClassifyWritesOneMapPerSceneAndReportsSkips) {
    TempDir dir;
    write_text(dir / "spec.json", R"({"scenes": [
        {"id": "a", "date": "2010-01-01", "width": 10, "height": 10},
        {"id": "b", "date": "2010-02-01", "width": 10, "height": 10,
         "features": [{"shape": "disk", "cx": 5, "cy": 5, "radius": 3, "class": "water"}]},
        {"id": "c", "date": "2010-03-01", "width": 10, "height": 10},
        {"id": "cloudy", "date": "2010-04-01", "width": 10, "height": 10, "mixing": false, "background": "cloud",
         "features": [{"shape": "line", "x0": -1, "y0": 0.5, "x1": 11, "y1": 0.5, "width": 1, "class": "land"},
                      {"shape": "line", "x0": -1, "y0": 1.5, "x1": 8.5, "y1": 1.5, "width": 1, "class": "land"}]}]})");
    ASSERT_EQ(run_cli(dir, "synth --spec " + quote((dir / "spec.json").string()) + " --out " +
                               quote((dir / "syn").string()))
                  .code,
              0);
    const CliResult r = run_cli(dir, "classify --manifest " + quote((dir / "syn/manifest.csv").string()) + " --dem " +
                                   quote((dir / "syn/dem.f32").string()) + " --out " + quote((dir / "cls").string()));
    ASSERT_EQ(r.code, 0) << r.err;
    for (const char* id : {"a", "b", "c"}) EXPECT_TRUE(fs::exists(dir / "cls" / (std::string(id) + ".class")));
    EXPECT_FALSE(fs::exists(dir / "cls" / "cloudy.class"));
    const std::string skipped = io::read_file(dir / "cls" / "skipped.csv");
    EXPECT_NE(skipped.find("cloudy,0.810000"), std::string::npos) << skipped;
    EXPECT_NE(r.err.find("skipped cloudy"), std::string::npos);
    EXPECT_EQ(r.out, "classified 3 skipped 1\n");
}

TEST(Cli, MissingDemIsAnError) {
    TempDir dir;
    write_text(dir / "spec.json", R"({"id": "a", "width": 8, "height": 8})");
    run_cli(dir, "synth --spec " + quote((dir / "spec.json").string()) + " --out " + quote((dir / "syn").string()));
    const CliResult r = run_cli(dir, "classify --manifest " + quote((dir / "syn/manifest.csv").string()) +
                                   " --dem " + quote((dir / "nope.f32").string()) + " --out " +
                                   quote((dir / "cls").string()));
    EXPECT_NE(r.code, 0);
    EXPECT_NE(r.err.find("error:"), std::string::npos);
    EXPECT_NE(run_cli(dir, "classify --manifest x.csv --out y").code, 0);
}

TEST(Cli, PipelineProducesAllArtifactsDeterministically) {
    TempDir dir;
    write_text(dir / "spec.json", lake_archive(2));
    ASSERT_EQ(run_cli(dir, "synth --spec " + quote((dir / "spec.json").string()) + " --out " +
                               quote((dir / "syn").string()))
                  .code,
              0);
    const std::string inputs = " --manifest " + quote((dir / "syn/manifest.csv").string()) + " --dem " +
                               quote((dir / "syn/dem.f32").string()) + " --roi " +
                               quote((dir / "syn/roi.f32").string());
    const CliResult a = run_cli(dir, "--jobs 1 pipeline" + inputs + " --out " + quote((dir / "run1").string()));
    ASSERT_EQ(a.code, 0) << a.err;
    const CliResult b = run_cli(dir, "--jobs 4 pipeline" + inputs + " --out " + quote((dir / "run2").string()));
    ASSERT_EQ(b.code, 0) << b.err;
    const CliResult c = run_cli(dir, "--jobs 4 pipeline" + inputs + " --out " + quote((dir / "run2").string()));
    ASSERT_EQ(c.code, 0) << c.err;

    EXPECT_EQ(line_count(dir / "run1" / "areas.csv"), 6u);
    for (const char* f : {"coverage.f32", "areas.csv", "extrema.csv", "skipped.csv", "class/L0.class",
                          "refined/L4.class", "abundance/L1.f32", "interp/L2.class"}) {
        EXPECT_TRUE(fs::exists(dir / "run1" / f)) << f;
    }
    const auto s1 = snapshot(dir / "run1"), s2 = snapshot(dir / "run2");
    EXPECT_EQ(s1.size(), s2.size());
    EXPECT_TRUE(s1 == s2);
    EXPECT_EQ(io::read_classmap(dir / "run1" / "interp" / "L2.class").mask_of(ClassLabel::Cloud).count(), 0u);
}

TEST(Cli, PipelineWithEverySceneCloudyFails) {
    TempDir dir;
    write_text(dir / "spec.json", lake_archive(-1, true));
    run_cli(dir, "synth --spec " + quote((dir / "spec.json").string()) + " --out " + quote((dir / "syn").string()));
    const CliResult r = run_cli(dir, "pipeline --manifest " + quote((dir / "syn/manifest.csv").string()) + " --dem " +
                                   quote((dir / "syn/dem.f32").string()) + " --out " + quote((dir / "run").string()));
    EXPECT_NE(r.code, 0);
    EXPECT_NE(r.err.find("no usable scenes"), std::string::npos) << r.err;
}

TEST(Cli, StagewiseCommandsChain) {
    TempDir dir;
    write_text(dir / "spec.json", lake_archive(1));
    ASSERT_EQ(run_cli(dir, "synth --spec " + quote((dir / "spec.json").string()) + " --out " +
                               quote((dir / "syn").string()))
                  .code,
              0);
    const std::string manifest = quote((dir / "syn/manifest.csv").string());
    CliResult r = run_cli(dir, "classify --manifest " + manifest + " --dem " + quote((dir / "syn/dem.f32").string()) +
                             " --out " + quote((dir / "cls").string()));
    ASSERT_EQ(r.code, 0) << r.err;
    r = run_cli(dir, "unmix --manifest " + manifest + " --input " + quote((dir / "cls").string()) + " --out " +
                         quote((dir / "ref").string()));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(dir / "ref" / "abundance" / "L3.f32"));

    r = run_cli(dir, "stats --input " + quote((dir / "ref").string()) + " --out " + quote((dir / "st0").string()));
    EXPECT_NE(r.code, 0);  // still cloudy

    r = run_cli(dir, "interp --input " + quote((dir / "ref").string()) + " --out " + quote((dir / "int").string()));
    ASSERT_EQ(r.code, 0) << r.err;
    r = run_cli(dir, "stats --input " + quote((dir / "int").string()) + " --roi " +
                         quote((dir / "syn/roi.f32").string()) + " --out " + quote((dir / "st").string()));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(io::read_area_csv(dir / "st" / "areas.csv").size(), 5u);
    EXPECT_EQ(io::read_grid(dir / "st" / "coverage.f32").width(), 48u);

    r = run_cli(dir, "landscape --input " + quote((dir / "int/L0.class").string()) + " --out " +
                         quote((dir / "land").string()));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("patches 1\n"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("division_index 0.000000"), std::string::npos) << r.out;
    EXPECT_TRUE(fs::exists(dir / "land" / "patches.i32"));

    r = run_cli(dir, "validate --input " + quote((dir / "int/L1.class").string()) + " --samples " +
                         quote((dir / "syn/samples/L1.csv").string()));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("OA "), std::string::npos);
}

TEST(Cli, ValidateReferenceConfusionCounts) {
    TempDir dir;
    std::vector<ClassLabel> labels(1000, ClassLabel::Land);
    std::fill(labels.begin(), labels.begin() + 327, ClassLabel::Water);
    io::write_classmap(ClassMap("t5", {2015, 1, 1}, 1000, 1, 30.0, labels), dir / "t5.class");
    io::SampleSet samples;
    for (std::size_t i = 0; i < 1000; ++i) samples.push_back({0, i, i < 321 ? ClassLabel::Water : ClassLabel::Land});
    io::write_samples_csv(samples, dir / "s.csv");
    const CliResult r = run_cli(dir, "validate --input " + quote((dir / "t5.class").string()) + " --samples " +
                                   quote((dir / "s.csv").string()));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "TP 321\nFP 6\nFN 0\nTN 673\nexcluded 0\nOA 99.4\nprecision 98.2\nrecall 100.0\n");
}

TEST(Cli, ValidatePerfectTruthAndEmptySamples) {
    TempDir dir;
    const auto m = testsupport::map_from_string({"WWLL", "LWWL"});
    io::write_classmap(m, dir / "m.class");
    io::SampleSet all;
    for (std::size_t i = 0; i < m.size(); ++i) all.push_back({i / 4, i % 4, m[i]});
    io::write_samples_csv(all, dir / "s.csv");
    CliResult r = run_cli(dir, "validate --input " + quote((dir / "m.class").string()) + " --samples " +
                             quote((dir / "s.csv").string()));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("OA 100.0\n"), std::string::npos);

    write_text(dir / "empty.csv", "row,col,truth\n");
    r = run_cli(dir, "validate --input " + quote((dir / "m.class").string()) + " --samples " +
                         quote((dir / "empty.csv").string()));
    EXPECT_NE(r.code, 0);

    write_text(dir / "oob.csv", "row,col,truth\n9,9,water\n");
    r = run_cli(dir, "validate --input " + quote((dir / "m.class").string()) + " --samples " +
                         quote((dir / "oob.csv").string()));
    EXPECT_NE(r.code, 0);
}
