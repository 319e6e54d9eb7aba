#include "watermap/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "watermap/error.hpp"

namespace watermap::io {

using nlohmann::json;

namespace {

template <typename T>
T to_little_endian(T v) {
    if constexpr (std::endian::native == std::endian::little) {
        return v;
    } else {
        auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
        std::reverse(bytes.begin(), bytes.end());
        return std::bit_cast<T>(bytes);
    }
}

template <typename T>
void append_le(std::string& out, std::span<const T> values) {
    const std::size_t offset = out.size();
    out.resize(offset + values.size() * sizeof(T));
    char* dst = out.data() + offset;
    for (const T& v : values) {
        const T le = to_little_endian(v);
        std::memcpy(dst, &le, sizeof(T));
        dst += sizeof(T);
    }
}

template <typename T>
std::vector<T> decode_le(const std::string& bytes, std::size_t offset, std::size_t count) {
    std::vector<T> out(count);
    const char* src = bytes.data() + offset;
    for (std::size_t i = 0; i < count; ++i) {
        T v;
        std::memcpy(&v, src + i * sizeof(T), sizeof(T));
        out[i] = to_little_endian(v);
    }
    return out;
}

json nodata_json(float nodata) {
    if (std::isnan(nodata)) return nullptr;
    return nodata;
}

struct Header {
    std::size_t width = 0;
    std::size_t height = 0;
    double pixel_size_m = kDefaultPixelSizeM;
    float nodata = kDefaultNodata;
    std::vector<std::string> bands;
    std::string sensor;
    std::string date;
    std::string scene_id;
};

Header read_header(const fs::path& sidecar) {
    const std::string text = read_file(sidecar);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError(sidecar.string() + ": " + e.what());
    }
    Header h;
    try {
        const auto w = j.at("width").get<std::int64_t>();
        const auto ht = j.at("height").get<std::int64_t>();
        if (w <= 0 || ht <= 0) throw FormatError(sidecar.string() + ": width/height must be positive");
        h.width = static_cast<std::size_t>(w);
        h.height = static_cast<std::size_t>(ht);
        h.pixel_size_m = j.value("pixel_size_m", kDefaultPixelSizeM);
        if (j.contains("nodata_value")) {
            const json& nd = j.at("nodata_value");
            h.nodata = nd.is_null() ? std::nanf("") : nd.get<float>();
        }
        h.bands = j.at("bands").get<std::vector<std::string>>();
        if (j.contains("sensor") && !j.at("sensor").is_null()) h.sensor = j.at("sensor").get<std::string>();
        if (j.contains("date") && !j.at("date").is_null()) h.date = j.at("date").get<std::string>();
        if (j.contains("scene_id") && !j.at("scene_id").is_null()) {
            h.scene_id = j.at("scene_id").get<std::string>();
        }
    } catch (const json::exception& e) {
        throw FormatError(sidecar.string() + ": " + e.what());
    }
    if (h.bands.empty()) throw FormatError(sidecar.string() + ": no bands listed");
    return h;
}

std::string read_payload(const fs::path& data_path, std::size_t expected_bytes) {
    std::string bytes = read_file(data_path);
    if (bytes.size() != expected_bytes) {
        throw FormatError(data_path.string() + ": holds " + std::to_string(bytes.size()) +
                          " bytes, header implies " + std::to_string(expected_bytes));
    }
    return bytes;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

std::vector<std::string> read_lines(const fs::path& path) {
    std::istringstream in(read_file(path));
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

std::string format6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

double parse_double(const std::string& s, const std::string& where) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw FormatError(where + ": trailing characters in '" + s + "'");
        return v;
    } catch (const std::logic_error&) {
        throw FormatError(where + ": not a number '" + s + "'");
    }
}

long long parse_int(const std::string& s, const std::string& where) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(s, &used);
        if (used != s.size()) throw FormatError(where + ": trailing characters in '" + s + "'");
        return v;
    } catch (const std::logic_error&) {
        throw FormatError(where + ": not an integer '" + s + "'");
    }
}

}  // namespace

fs::path sidecar_path(const fs::path& data_path) {
    fs::path p = data_path;
    p.replace_extension(".json");
    return p;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const fs::path& path, const std::string& bytes) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw FormatError("cannot write " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw FormatError("short write to " + tmp.string());
    }
    fs::rename(tmp, path);
}

// ---------------------------------------------------------------- scenes

void write_scene(const ReflectanceScene& scene, const fs::path& prefix) {
    fs::path data = prefix;
    data += ".f32";
    std::string bytes;
    bytes.reserve(scene.size() * 6 * sizeof(float));
    json bands = json::array();
    for (BandRole r : kBandRoles) {
        append_le(bytes, scene.band(r).values());
        bands.push_back(std::string(band_name(r)));
    }
    const Grid& ref = scene.band(BandRole::Blue);
    const json header = {{"width", scene.width()},
                         {"height", scene.height()},
                         {"pixel_size_m", scene.pixel_size_m()},
                         {"nodata_value", nodata_json(ref.nodata_value())},
                         {"bands", bands},
                         {"sensor", std::string(sensor_name(scene.sensor()))},
                         {"date", scene.date().iso()},
                         {"scene_id", scene.id()}};
    write_file_atomic(data, bytes);
    write_file_atomic(sidecar_path(data), dump(header));
}

ReflectanceScene read_scene(const fs::path& prefix) {
    fs::path data = prefix;
    data += ".f32";
    const fs::path side = sidecar_path(data);
    const Header h = read_header(side);

    std::array<int, 6> slot;
    slot.fill(-1);
    for (std::size_t i = 0; i < h.bands.size(); ++i) {
        const auto role = parse_band_role(h.bands[i]);
        if (!role) {
            if (h.bands[i] == "coastal") continue;
            throw FormatError(side.string() + ": unknown band '" + h.bands[i] + "'");
        }
        auto& s = slot[static_cast<std::size_t>(*role)];
        if (s >= 0) throw FormatError(side.string() + ": band '" + h.bands[i] + "' listed twice");
        s = static_cast<int>(i);
    }
    for (BandRole r : kBandRoles) {
        if (slot[static_cast<std::size_t>(r)] < 0) {
            throw FormatError(side.string() + ": missing band role '" + std::string(band_name(r)) + "'");
        }
    }
    if (h.sensor.empty()) throw FormatError(side.string() + ": missing sensor");
    const SensorKind sensor = parse_sensor(h.sensor);
    if (h.date.empty()) throw FormatError(side.string() + ": missing date");
    const Date date = Date::parse(h.date);

    const std::size_t n = h.width * h.height;
    const std::string bytes = read_payload(data, n * h.bands.size() * sizeof(float));
    std::array<Grid, 6> grids;
    for (BandRole r : kBandRoles) {
        const auto s = static_cast<std::size_t>(slot[static_cast<std::size_t>(r)]);
        grids[static_cast<std::size_t>(r)] =
            Grid(h.width, h.height, h.pixel_size_m, decode_le<float>(bytes, s * n * sizeof(float), n),
                 h.nodata);
    }
    return ReflectanceScene(h.scene_id.empty() ? prefix.filename().string() : h.scene_id, date, sensor,
                            std::move(grids));
}

// ---------------------------------------------------------------- grids

void write_grid(const Grid& grid, const fs::path& path, const std::string& band) {
    std::string bytes;
    append_le(bytes, grid.values());
    const json header = {{"width", grid.width()},
                         {"height", grid.height()},
                         {"pixel_size_m", grid.pixel_size_m()},
                         {"nodata_value", nodata_json(grid.nodata_value())},
                         {"bands", json::array({band})}};
    write_file_atomic(path, bytes);
    write_file_atomic(sidecar_path(path), dump(header));
}

Grid read_grid(const fs::path& path) {
    const Header h = read_header(sidecar_path(path));
    if (h.bands.size() != 1) throw FormatError(path.string() + ": expected a single-band grid");
    if (h.bands[0] == "class" || h.bands[0] == "patch") {
        throw FormatError(path.string() + ": band '" + h.bands[0] + "' is not a float grid");
    }
    const std::size_t n = h.width * h.height;
    const std::string bytes = read_payload(path, n * sizeof(float));
    return Grid(h.width, h.height, h.pixel_size_m, decode_le<float>(bytes, 0, n), h.nodata);
}

// ---------------------------------------------------------------- class maps

void write_classmap(const ClassMap& map, const fs::path& path) {
    std::string bytes(map.size(), '\0');
    for (std::size_t i = 0; i < map.size(); ++i) bytes[i] = static_cast<char>(label_code(map[i]));
    const json header = {{"width", map.width()},
                         {"height", map.height()},
                         {"pixel_size_m", map.pixel_size_m()},
                         {"nodata_value", label_code(ClassLabel::NoData)},
                         {"bands", json::array({"class"})},
                         {"date", map.date().iso()},
                         {"scene_id", map.scene_id()}};
    write_file_atomic(path, bytes);
    write_file_atomic(sidecar_path(path), dump(header));
}

ClassMap read_classmap(const fs::path& path) {
    const Header h = read_header(sidecar_path(path));
    if (h.bands.size() != 1 || h.bands[0] != "class") {
        throw FormatError(path.string() + ": sidecar does not describe a class map");
    }
    const std::size_t n = h.width * h.height;
    const std::string bytes = read_payload(path, n);
    std::vector<ClassLabel> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto code = static_cast<std::uint8_t>(bytes[i]);
        const auto l = label_from_code(code);
        if (!l) {
            throw FormatError(path.string() + ": unknown class code " + std::to_string(code) +
                              " at offset " + std::to_string(i));
        }
        labels[i] = *l;
    }
    const Date date = h.date.empty() ? Date{} : Date::parse(h.date);
    return ClassMap(h.scene_id.empty() ? path.stem().string() : h.scene_id, date, h.width, h.height,
                    h.pixel_size_m, std::move(labels));
}

void write_patch_ids(std::size_t width, std::size_t height, double pixel_size_m,
                     const std::vector<std::int32_t>& ids, const fs::path& path) {
    if (ids.size() != width * height) throw DimensionError("patch id buffer length mismatch");
    std::string bytes;
    append_le(bytes, std::span<const std::int32_t>(ids));
    const json header = {{"width", width},
                         {"height", height},
                         {"pixel_size_m", pixel_size_m},
                         {"nodata_value", 0},
                         {"bands", json::array({"patch"})}};
    write_file_atomic(path, bytes);
    write_file_atomic(sidecar_path(path), dump(header));
}

// ---------------------------------------------------------------- ROI

Mask read_roi(const fs::path& path) {
    const Grid g = read_grid(path);
    std::vector<std::uint8_t> bits(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        bits[i] = (!g.is_nodata(i) && std::isfinite(g[i]) && g[i] != 0.0f) ? 1 : 0;
    }
    return Mask(g.width(), g.height(), std::move(bits));
}

void write_roi(const Mask& roi, double pixel_size_m, const fs::path& path) {
    std::vector<float> v(roi.size());
    for (std::size_t i = 0; i < roi.size(); ++i) v[i] = roi[i] ? 1.0f : 0.0f;
    write_grid(Grid(roi.width(), roi.height(), pixel_size_m, std::move(v)), path, "roi");
}

// ---------------------------------------------------------------- manifest

SceneManifest read_manifest(const fs::path& csv) {
    const auto lines = read_lines(csv);
    if (lines.empty() || lines[0] != "scene_id,date,sensor,path") {
        throw FormatError(csv.string() + ": expected header 'scene_id,date,sensor,path'");
    }
    const fs::path base = csv.parent_path();
    SceneManifest m;
    std::set<std::string> ids;
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        if (lines[ln].empty()) continue;
        const std::string where = csv.string() + ":" + std::to_string(ln + 1);
        const auto f = split_csv_line(lines[ln]);
        if (f.size() != 4) throw FormatError(where + ": expected 4 fields");
        ManifestEntry e;
        e.scene_id = f[0];
        if (e.scene_id.empty()) throw FormatError(where + ": empty scene_id");
        e.date = Date::parse(f[1]);
        e.sensor = parse_sensor(f[2]);
        e.path = fs::path(f[3]).is_absolute() ? fs::path(f[3]) : base / f[3];
        if (!ids.insert(e.scene_id).second) throw FormatError(where + ": duplicate scene_id " + e.scene_id);
        m.entries.push_back(std::move(e));
    }
    std::stable_sort(m.entries.begin(), m.entries.end(),
                     [](const ManifestEntry& a, const ManifestEntry& b) { return a.date < b.date; });
    return m;
}

void write_manifest(const std::vector<ManifestEntry>& entries, const fs::path& csv) {
    std::string out = "scene_id,date,sensor,path\n";
    const fs::path base = csv.parent_path().empty() ? fs::path(".") : csv.parent_path();
    for (const auto& e : entries) {
        const fs::path p = fs::absolute(e.path).lexically_proximate(fs::absolute(base));
        out += e.scene_id + "," + e.date.iso() + "," + std::string(sensor_name(e.sensor)) + "," +
               p.generic_string() + "\n";
    }
    write_file_atomic(csv, out);
}

// ---------------------------------------------------------------- area series

void write_area_csv(const std::vector<AreaRecord>& records, const fs::path& path) {
    for (std::size_t i = 1; i < records.size(); ++i) {
        if (records[i].date < records[i - 1].date) {
            throw FormatError("area records not sorted by date at " + records[i].date.iso());
        }
    }
    std::string out = "date,water_area_km2,division_index,valid_fraction\n";
    for (const auto& r : records) {
        out += r.date.iso() + "," + format6(r.water_area_km2) + "," +
               (r.division_index ? format6(*r.division_index) : std::string("nan")) + "," +
               format6(r.valid_fraction) + "\n";
    }
    write_file_atomic(path, out);
}

std::vector<AreaRecord> read_area_csv(const fs::path& path) {
    const auto lines = read_lines(path);
    if (lines.empty() || lines[0] != "date,water_area_km2,division_index,valid_fraction") {
        throw FormatError(path.string() + ": unexpected header");
    }
    std::vector<AreaRecord> out;
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        const std::string where = path.string() + ":" + std::to_string(ln + 1);
        const auto f = split_csv_line(lines[ln]);
        if (f.size() != 4) throw FormatError(where + ": expected 4 fields");
        AreaRecord r;
        r.date = Date::parse(f[0]);
        r.water_area_km2 = parse_double(f[1], where);
        if (f[2] != "nan") r.division_index = parse_double(f[2], where);
        r.valid_fraction = parse_double(f[3], where);
        out.push_back(r);
    }
    return out;
}

// ---------------------------------------------------------------- samples

SampleSet read_samples_csv(const fs::path& path) {
    const auto lines = read_lines(path);
    if (lines.empty() || lines[0] != "row,col,truth") {
        throw FormatError(path.string() + ": expected header 'row,col,truth'");
    }
    SampleSet out;
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        if (lines[ln].empty()) continue;
        const std::string where = path.string() + ":" + std::to_string(ln + 1);
        const auto f = split_csv_line(lines[ln]);
        if (f.size() != 3) throw FormatError(where + ": expected 3 fields");
        const long long row = parse_int(f[0], where);
        const long long col = parse_int(f[1], where);
        if (row < 0 || col < 0) throw FormatError(where + ": negative coordinate");
        std::string t = f[2];
        std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
        Sample s{static_cast<std::size_t>(row), static_cast<std::size_t>(col), ClassLabel::Land};
        if (t == "water" || t == "1") {
            s.truth = ClassLabel::Water;
        } else if (t == "land" || t == "0") {
            s.truth = ClassLabel::Land;
        } else {
            throw FormatError(where + ": truth must be water/land or 1/0, got '" + f[2] + "'");
        }
        out.push_back(s);
    }
    return out;
}

void write_samples_csv(const SampleSet& samples, const fs::path& path) {
    std::string out = "row,col,truth\n";
    for (const auto& s : samples) {
        out += std::to_string(s.row) + "," + std::to_string(s.col) + "," +
               (s.truth == ClassLabel::Water ? "water" : "land") + "\n";
    }
    write_file_atomic(path, out);
}

}  // namespace watermap::io
