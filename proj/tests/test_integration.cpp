#include <gtest/gtest.h>

#include "scenarios.hpp"

TEST(EndToEnd, ClearSceneMatchesTruth) {
    const auto r = scenario::clear_scene(256);
    EXPECT_GE(r.oa, 98.0);
    EXPECT_GT(r.water_share, 0.1);
}

TEST(EndToEnd, CloudyDateIsFilledFromNeighbours) {
    const auto r = scenario::cloudy_archive(128);
    EXPECT_NEAR(r.cover_share, 0.3, 0.05);
    EXPECT_TRUE(r.interpolated);
    EXPECT_GE(r.oa, 90.0);
}

TEST(EndToEnd, SnowNeverBecomesWater) {
    for (const bool thin : {false, true}) {
        const auto r = scenario::snowy_archive(128, thin);
        EXPECT_GT(r.snow_pixels, 0u);
        EXPECT_EQ(r.snow_as_water, 0u) << "thin ice " << thin;
        EXPECT_GE(r.oa, 95.0) << "thin ice " << thin;
    }
}

TEST(EndToEnd, TerrainShadowIsRemoved) {
    const auto r = scenario::shadow_scene(128);
    EXPECT_GT(r.wi_wet, r.shadow_pixels / 2);
    EXPECT_EQ(r.residual, 0u);
    EXPECT_EQ(r.lake_detected, r.lake_pixels);
}

TEST(EndToEnd, SubPixelChannelSurvivesRefinement) {
    const auto r = scenario::channel_scene(128);
    EXPECT_GT(r.line_pixels, 100u);
    EXPECT_EQ(r.retained, r.line_pixels);
    EXPECT_GE(r.min_abundance, 0.5);
}

TEST(EndToEnd, SeasonalExtremaLandInSeptemberAndMay) {
    const auto r = scenario::seasonal_archive(3, 96, 26, 9);
    EXPECT_TRUE(r.interpolated);
    EXPECT_EQ(r.extrema.max_counts[8], 3);
    EXPECT_EQ(r.extrema.min_counts[4], 3);
}
