#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "support.hpp"
#include "watermap/core.hpp"
#include "watermap/error.hpp"

using namespace watermap;

TEST(Date, ParsesAndFormatsIso) {
    const Date d = Date::parse("2013-10-31");
    EXPECT_EQ(d.year, 2013);
    EXPECT_EQ(d.month, 10);
    EXPECT_EQ(d.day, 31);
    EXPECT_EQ(d.iso(), "2013-10-31");
}

TEST(Date, RejectsMalformedAndImpossibleDates) {
    EXPECT_THROW(Date::parse("2013/10/31"), FormatError);
    EXPECT_THROW(Date::parse("2013-02-30"), FormatError);
    EXPECT_THROW(Date::parse(""), FormatError);
    EXPECT_THROW(Date::parse("2013-10-31x"), FormatError);
}

TEST(Date, DayCountRoundTrips) {
    EXPECT_EQ(Date::parse("1970-01-01").days_since_epoch(), 0);
    EXPECT_EQ(Date::parse("2000-03-01").days_since_epoch() - Date::parse("2000-02-28").days_since_epoch(), 2);
    for (long d = -1000; d < 30000; d += 37) EXPECT_EQ(Date::from_days(d).days_since_epoch(), d);
}

TEST(Date, OrdersChronologically) {
    EXPECT_LT(Date::parse("1999-12-31"), Date::parse("2000-01-01"));
    EXPECT_LT(Date::parse("2000-01-31"), Date::parse("2000-02-01"));
}

TEST(Grid, RejectsWrongBufferLength) {
    EXPECT_THROW(Grid(3, 2, 30.0, std::vector<float>(5)), DimensionError);
    EXPECT_THROW(Grid(2, 2, 0.0, std::vector<float>(4)), DimensionError);
}

TEST(Grid, NodataCoversSentinelAndNaN) {
    const Grid g(3, 1, 30.0, {1.0f, kDefaultNodata, std::numeric_limits<float>::quiet_NaN()});
    EXPECT_FALSE(g.is_nodata(0));
    EXPECT_TRUE(g.is_nodata(1));
    EXPECT_TRUE(g.is_nodata(2));
}

TEST(Grid, RowMajorAccess) {
    const Grid g(3, 2, 30.0, {0, 1, 2, 3, 4, 5});
    EXPECT_EQ(g.at(1, 0), 3.0f);
    EXPECT_EQ(g.at(0, 2), 2.0f);
}

TEST(Mask, CountsSetBits) {
    Mask m(4, 4);
    EXPECT_EQ(m.count(), 0u);
    m.set(3, true);
    m.set(7, true);
    EXPECT_EQ(m.count(), 2u);
    EXPECT_TRUE(m.at(1, 3));
}

TEST(BandRole, NamesRoundTrip) {
    for (BandRole r : kBandRoles) EXPECT_EQ(parse_band_role(band_name(r)), r);
    EXPECT_FALSE(parse_band_role("coastal").has_value());
}

TEST(Sensor, ParsesCaseInsensitively) {
    EXPECT_EQ(parse_sensor("oli"), SensorKind::OLI);
    EXPECT_EQ(parse_sensor("TM"), SensorKind::TM);
    EXPECT_THROW(parse_sensor("MSS"), FormatError);
}

TEST(ReflectanceScene, RejectsMisalignedBands) {
    std::array<Grid, 6> bands;
    for (auto& b : bands) b = Grid::filled(4, 4, 30.0, 0.1f);
    bands[3] = Grid::filled(4, 5, 30.0, 0.1f);
    EXPECT_THROW(ReflectanceScene("x", {}, SensorKind::TM, bands), DimensionError);
}

TEST(ReflectanceScene, ValidityNeedsAllSixBandsInRange) {
    std::vector<Spectrum> px(4, Spectrum{0.1, 0.1, 0.1, 0.1, 0.1, 0.1});
    px[1][4] = kDefaultNodata;
    px[2][0] = 1.6;
    px[3][5] = -0.01;
    const auto s = testsupport::scene_from_spectra(2, 2, px);
    EXPECT_TRUE(s.valid(0));
    EXPECT_FALSE(s.valid(1));
    EXPECT_FALSE(s.valid(2));
    EXPECT_FALSE(s.valid(3));
}

TEST(ClassLabel, CodesRoundTrip) {
    for (auto l : {ClassLabel::Land, ClassLabel::Water, ClassLabel::Cloud, ClassLabel::IceSnow, ClassLabel::NoData}) {
        EXPECT_EQ(label_from_code(label_code(l)), l);
    }
    EXPECT_FALSE(label_from_code(4).has_value());
    EXPECT_TRUE(is_valid_observation(ClassLabel::Water));
    EXPECT_FALSE(is_valid_observation(ClassLabel::NoData));
    EXPECT_TRUE(is_obscured(ClassLabel::IceSnow));
}

TEST(ClassMap, RejectsWrongLabelCount) {
    EXPECT_THROW(ClassMap("x", {}, 3, 3, 30.0, std::vector<ClassLabel>(8)), DimensionError);
}

TEST(ClassMap, MaskOfSelectsOneLabel) {
    const auto m = testsupport::map_from_string({"WLC", "IWN"});
    EXPECT_EQ(m.mask_of(ClassLabel::Water).count(), 2u);
    EXPECT_TRUE(m.mask_of(ClassLabel::NoData)[5]);
}

TEST(PixelArea, ThirtyMetrePixel) {
    EXPECT_DOUBLE_EQ(pixel_area_km2(30.0), 0.0009);
    EXPECT_DOUBLE_EQ(pixel_area_km2(Grid::filled(1, 1, 10.0, 0.0f)), 0.0001);
}
