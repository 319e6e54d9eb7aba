#include "watermap/timeseries.hpp"

#include <algorithm>
#include <limits>

#include "watermap/error.hpp"

namespace watermap {

std::vector<Date> ClassStack::dates() const {
    std::vector<Date> out;
    out.reserve(maps_.size());
    for (const auto& m : maps_) out.push_back(m.date());
    return out;
}

ClassStack build_stack(std::vector<ClassMap> maps) {
    for (const auto& m : maps) {
        if (m.shape() != maps.front().shape() || m.pixel_size_m() != maps.front().pixel_size_m()) {
            throw DimensionError("build_stack: map '" + m.scene_id() + "' is not aligned with '" +
                                 maps.front().scene_id() + "'");
        }
    }
    std::stable_sort(maps.begin(), maps.end(),
                     [](const ClassMap& a, const ClassMap& b) { return a.date() < b.date(); });
    for (std::size_t t = 1; t < maps.size(); ++t) {
        if (maps[t].date() == maps[t - 1].date()) {
            throw FormatError("build_stack: duplicate date " + maps[t].date().iso() + " ('" +
                              maps[t - 1].scene_id() + "', '" + maps[t].scene_id() + "')");
        }
    }
    ClassStack s;
    s.maps_ = std::move(maps);
    return s;
}

ClassStack interpolate(const ClassStack& stack) {
    const std::size_t n = stack.size();
    ClassStack out;
    if (n == 0) return out;
    const std::size_t pixels = stack.shape().size();

    std::vector<long> day(n);
    for (std::size_t t = 0; t < n; ++t) day[t] = stack[t].date().days_since_epoch();

    std::vector<std::vector<ClassLabel>> labels(n);
    for (std::size_t t = 0; t < n; ++t) labels[t].assign(stack[t].labels().begin(), stack[t].labels().end());

    constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> prev(n), next(n);
    for (std::size_t p = 0; p < pixels; ++p) {
        std::size_t last = kNone;
        for (std::size_t t = 0; t < n; ++t) {
            if (is_valid_observation(stack[t][p])) last = t;
            prev[t] = last;
        }
        if (last == kNone) {
            for (std::size_t t = 0; t < n; ++t) labels[t][p] = ClassLabel::NoData;
            continue;
        }
        std::size_t upcoming = kNone;
        for (std::size_t t = n; t-- > 0;) {
            if (is_valid_observation(stack[t][p])) upcoming = t;
            next[t] = upcoming;
        }
        for (std::size_t t = 0; t < n; ++t) {
            if (!is_obscured(stack[t][p])) continue;
            std::size_t src;
            if (prev[t] == kNone) {
                src = next[t];
            } else if (next[t] == kNone) {
                src = prev[t];
            } else {
                src = (day[next[t]] - day[t] < day[t] - day[prev[t]]) ? next[t] : prev[t];
            }
            labels[t][p] = stack[src][p];
        }
    }

    out.maps_.reserve(n);
    for (std::size_t t = 0; t < n; ++t) out.maps_.push_back(stack[t].with_labels(std::move(labels[t])));
    return out;
}

bool is_interpolated(const ClassStack& stack) {
    for (const auto& m : stack.maps()) {
        for (ClassLabel l : m.labels()) {
            if (is_obscured(l)) return false;
        }
    }
    return true;
}

Grid coverage_rate(const ClassStack& stack) {
    if (!is_interpolated(stack)) throw DegenerateError("coverage_rate: stack still holds cloud or ice/snow labels");
    const RasterShape shape = stack.shape();
    std::vector<std::uint32_t> water(shape.size(), 0), valid(shape.size(), 0);
    for (const auto& m : stack.maps()) {
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (m[i] == ClassLabel::Water) ++water[i];
            if (is_valid_observation(m[i])) ++valid[i];
        }
    }
    std::vector<float> out(shape.size(), kDefaultNodata);
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (valid[i] > 0) out[i] = static_cast<float>(static_cast<double>(water[i]) / valid[i]);
    }
    return Grid(shape.width, shape.height, stack.pixel_size_m(), std::move(out), kDefaultNodata);
}

}  // namespace watermap
