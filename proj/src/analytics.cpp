#include "watermap/analytics.hpp"

#include <algorithm>
#include <numeric>

#include "watermap/error.hpp"

namespace watermap {

namespace {

void require_shape(RasterShape a, RasterShape b, const char* what) {
    if (a != b) throw DimensionError(std::string(what) + ": rasters are not aligned");
}

class DisjointSet {
public:
    std::int32_t make() {
        parent_.push_back(static_cast<std::int32_t>(parent_.size()));
        return parent_.back();
    }
    std::int32_t find(std::int32_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    void unite(std::int32_t a, std::int32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (b < a) std::swap(a, b);
        parent_[b] = a;  // smaller label stays root
    }

private:
    std::vector<std::int32_t> parent_;
};

}  // namespace

Mask full_roi(RasterShape shape) { return Mask(shape.width, shape.height, true); }

double water_area(const ClassMap& map, const Mask& roi) {
    require_shape(map.shape(), roi.shape(), "water_area");
    std::size_t inside = 0, water = 0;
    for (std::size_t i = 0; i < map.size(); ++i) {
        if (!roi[i]) continue;
        ++inside;
        if (map[i] == ClassLabel::Water) ++water;
    }
    if (inside == 0) throw DegenerateError("water_area: empty ROI");
    return static_cast<double>(water) * pixel_area_km2(map.pixel_size_m());
}

PatchLabeling connected_components(const Mask& water, const Mask& roi) {
    require_shape(water.shape(), roi.shape(), "connected_components");
    const std::size_t w = water.width();
    const std::size_t h = water.height();
    PatchLabeling out{w, h, std::vector<std::int32_t>(w * h, 0), {}};

    // First pass: provisional labels (1-based, 0 = background) merged through the disjoint set.
    DisjointSet sets;
    sets.make();  // slot 0 reserved for background
    std::vector<std::int32_t>& lab = out.ids;
    for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t c = 0; c < w; ++c) {
            const std::size_t i = r * w + c;
            if (!water[i] || !roi[i]) continue;
            std::int32_t neighbours[4];
            int k = 0;
            if (c > 0 && lab[i - 1]) neighbours[k++] = lab[i - 1];
            if (r > 0) {
                const std::size_t up = i - w;
                if (c > 0 && lab[up - 1]) neighbours[k++] = lab[up - 1];
                if (lab[up]) neighbours[k++] = lab[up];
                if (c + 1 < w && lab[up + 1]) neighbours[k++] = lab[up + 1];
            }
            if (k == 0) {
                lab[i] = sets.make();
                continue;
            }
            std::int32_t m = *std::min_element(neighbours, neighbours + k);
            for (int j = 0; j < k; ++j) sets.unite(m, neighbours[j]);
            lab[i] = m;
        }
    }

    // Second pass: dense ids in raster order of first appearance.
    std::vector<std::int32_t> dense;
    for (std::size_t i = 0; i < lab.size(); ++i) {
        if (!lab[i]) continue;
        const std::int32_t root = sets.find(lab[i]);
        if (static_cast<std::size_t>(root) >= dense.size()) dense.resize(root + 1, 0);
        if (!dense[root]) {
            out.sizes.push_back(0);
            dense[root] = static_cast<std::int32_t>(out.sizes.size());
        }
        lab[i] = dense[root];
        out.sizes[lab[i] - 1]++;
    }
    return out;
}

double division_index(std::span<const std::uint64_t> patch_sizes) {
    std::uint64_t total = 0, sum_sq = 0;
    for (std::uint64_t s : patch_sizes) {
        total += s;
        sum_sq += s * s;
    }
    if (total == 0) throw DegenerateError("division_index: landscape has no water (S = 0)");
    const double t = static_cast<double>(total);
    return 1.0 - static_cast<double>(sum_sq) / (t * t);
}

double division_index(const Mask& water, const Mask& roi) {
    return division_index(connected_components(water, roi).sizes);
}

std::vector<AreaRecord> area_series(const ClassStack& stack, const Mask& roi) {
    std::vector<AreaRecord> out;
    out.reserve(stack.size());
    const std::size_t inside = roi.count();
    for (const ClassMap& m : stack.maps()) {
        require_shape(m.shape(), roi.shape(), "area_series");
        AreaRecord rec;
        rec.date = m.date();
        std::size_t water = 0, valid = 0;
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (!roi[i]) continue;
            if (m[i] == ClassLabel::Water) ++water;
            if (is_valid_observation(m[i])) ++valid;
        }
        rec.water_area_km2 = static_cast<double>(water) * pixel_area_km2(m.pixel_size_m());
        rec.valid_fraction = inside ? static_cast<double>(valid) / static_cast<double>(inside) : 0.0;
        if (water > 0) rec.division_index = division_index(m.mask_of(ClassLabel::Water), roi);
        out.push_back(rec);
    }
    return out;
}

AnnualExtrema annual_extrema(std::vector<AreaRecord> records) {
    if (records.empty()) throw DegenerateError("annual_extrema: no records");
    std::stable_sort(records.begin(), records.end(),
                     [](const AreaRecord& a, const AreaRecord& b) { return a.date < b.date; });
    AnnualExtrema out;
    std::map<int, std::pair<const AreaRecord*, const AreaRecord*>> best;  // year -> (max, min)
    for (const AreaRecord& r : records) {
        auto [it, fresh] = best.try_emplace(r.date.year, &r, &r);
        if (fresh) continue;
        if (r.water_area_km2 > it->second.first->water_area_km2) it->second.first = &r;
        if (r.water_area_km2 < it->second.second->water_area_km2) it->second.second = &r;
    }
    for (const auto& [year, pair] : best) {
        YearExtrema y{pair.first->date.month, pair.second->date.month, pair.first->date, pair.second->date};
        out.years.emplace(year, y);
        out.max_counts[y.max_month - 1]++;
        out.min_counts[y.min_month - 1]++;
    }
    return out;
}

ConfusionResult confusion(const ClassMap& map, const io::SampleSet& samples) {
    ConfusionResult out;
    for (const auto& s : samples) {
        if (s.row >= map.height() || s.col >= map.width()) {
            throw DimensionError("sample (" + std::to_string(s.row) + ", " + std::to_string(s.col) +
                                 ") lies outside the " + std::to_string(map.width()) + "x" +
                                 std::to_string(map.height()) + " map");
        }
        const ClassLabel predicted = map.at(s.row, s.col);
        if (!is_valid_observation(predicted)) {
            ++out.excluded;
            continue;
        }
        const bool p = predicted == ClassLabel::Water;
        const bool t = s.truth == ClassLabel::Water;
        if (p && t) ++out.matrix.tp;
        else if (p) ++out.matrix.fp;
        else if (t) ++out.matrix.fn;
        else ++out.matrix.tn;
    }
    if (out.matrix.total() == 0) throw DegenerateError("confusion: no usable sample");
    return out;
}

double overall_accuracy(const ConfusionMatrix& cm) {
    if (cm.total() == 0) throw DegenerateError("overall accuracy undefined: no samples");
    return 100.0 * static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
}

double precision(const ConfusionMatrix& cm) {
    if (cm.tp + cm.fp == 0) throw DegenerateError("precision undefined: TP + FP = 0");
    return 100.0 * static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fp);
}

double recall(const ConfusionMatrix& cm) {
    if (cm.tp + cm.fn == 0) throw DegenerateError("recall undefined: TP + FN = 0");
    return 100.0 * static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
}

}  // namespace watermap
