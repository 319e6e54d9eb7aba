#pragma once

#include <vector>

#include "watermap/core.hpp"

namespace watermap {

/// Date-ordered class maps on one grid.
class ClassStack {
public:
    ClassStack() = default;

    std::size_t size() const { return maps_.size(); }
    bool empty() const { return maps_.empty(); }
    RasterShape shape() const { return maps_.empty() ? RasterShape{} : maps_.front().shape(); }
    double pixel_size_m() const { return maps_.empty() ? kDefaultPixelSizeM : maps_.front().pixel_size_m(); }

    const std::vector<ClassMap>& maps() const { return maps_; }
    const ClassMap& operator[](std::size_t t) const { return maps_[t]; }
    std::vector<Date> dates() const;

private:
    friend ClassStack build_stack(std::vector<ClassMap> maps);
    friend ClassStack interpolate(const ClassStack& stack);
    std::vector<ClassMap> maps_;
};

/// Sorts maps by date. Maps are moved, never copied.
/// Throws DimensionError on misaligned maps and FormatError on a repeated date.
ClassStack build_stack(std::vector<ClassMap> maps);

/// Replaces every Cloud/IceSnow label with the Water/Land label of the valid
/// observation nearest in calendar days (earlier wins a tie). A pixel with no
/// valid observation becomes NoData at every date.
ClassStack interpolate(const ClassStack& stack);

/// True when no Cloud or IceSnow label remains.
bool is_interpolated(const ClassStack& stack);

/// Water / (Water + Land) per pixel; nodata where a pixel has no valid observation.
/// Throws DegenerateError when Cloud/IceSnow labels remain.
Grid coverage_rate(const ClassStack& stack);

}  // namespace watermap
