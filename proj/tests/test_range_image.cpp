#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "rangeseg/range_image.hpp"
#include "rangeseg/sensor.hpp"

using namespace rangeseg;

namespace {

// 64 channels from +2 deg down in 0.4 deg steps; row 5 is the 0 deg channel.
const SensorModel& model() {
    static const SensorModel m = SensorModel::hdl64_default();
    return m;
}

PointCloud random_cloud(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> az(0.0, 2.0 * kPi), el(deg_to_rad(-24.0), deg_to_rad(3.0)),
        rng_d(0.5, 80.0);
    PointCloud cloud;
    for (int i = 0; i < n; ++i) {
        const double a = az(rng), e = el(rng), d = rng_d(rng);
        cloud.push_back({static_cast<float>(d * std::cos(e) * std::cos(a)), static_cast<float>(d * std::cos(e) * std::sin(a)),
                         static_cast<float>(d * std::sin(e))});
    }
    return cloud;
}

}  // namespace

TEST(Projection, OnAxisPoint) {
    const PointCloud cloud{{10.0f, 0.0f, 0.0f}};
    const auto ri = project(cloud, model());
    ASSERT_EQ(ri.rows(), 64);
    ASSERT_EQ(ri.cols(), 4000);
    EXPECT_FLOAT_EQ(ri.ranges(5, 0), 10.0f);
    EXPECT_EQ(ri.point_index(5, 0), 0);
    EXPECT_EQ(nearest_channel(model(), 0.0), 5);
}

TEST(Projection, CollisionKeepsNearest) {
    const PointCloud cloud{{7.0f, 0.0f, 0.0f}, {5.0f, 0.0f, 0.0f}, {6.0f, 0.0f, 0.0f}};
    ProjectionStats stats;
    const auto ri = project(cloud, model(), &stats);
    EXPECT_FLOAT_EQ(ri.ranges(5, 0), 5.0f);
    EXPECT_EQ(ri.point_index(5, 0), 1);
    EXPECT_EQ(stats.total, 3u);
    EXPECT_EQ(stats.projected, 1u);
    EXPECT_EQ(stats.overwritten, 2u);
    EXPECT_EQ(stats.dropped, 0u);
}

TEST(Projection, DropsOutOfFovOriginAndNonFinite) {
    const float nan = std::numeric_limits<float>::quiet_NaN();
    const PointCloud cloud{{1.0f, 0.0f, 1.0f}, {0.0f, 0.0f, 0.0f}, {nan, 0.0f, 0.0f}, {10.0f, 0.0f, -10.0f}};
    ProjectionStats stats;
    const auto ri = project(cloud, model(), &stats);
    EXPECT_EQ(stats.dropped, 4u);
    EXPECT_EQ(stats.projected, 0u);
    const auto labels = labels_to_points(Grid<std::int32_t>(64, 4000, 7), ri);
    EXPECT_EQ(labels, (std::vector<std::int32_t>{0, 0, 0, 0}));
}

TEST(Projection, AzimuthWrapsIntoColumns) {
    // Just clockwise of +x lands in the last column.
    const double a = -0.5 * deg_to_rad(0.09);
    const PointCloud cloud{{static_cast<float>(10 * std::cos(a)), static_cast<float>(10 * std::sin(a)), 0.0f}};
    const auto ri = project(cloud, model());
    EXPECT_GT(ri.ranges(5, 3999), 0.0f);
}

TEST(Projection, EmptyCloud) {
    ProjectionStats stats;
    const auto ri = project(PointCloud{}, model(), &stats);
    EXPECT_EQ(ri.rows(), 64);
    EXPECT_EQ(stats.total, 0u);
    for (float v : ri.ranges.data()) EXPECT_EQ(v, 0.0f);
}

TEST(Projection, BookkeepingAndMinRuleOnRandomClouds) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        const auto cloud = random_cloud(rng, 20000);
        ProjectionStats stats;
        const auto ri = project(cloud, model(), &stats);
        EXPECT_EQ(stats.dropped + stats.projected + stats.overwritten, stats.total);
        // Every projected point's cell holds a range no larger than that point's range.
        std::size_t filled = 0;
        for (float v : ri.ranges.data()) filled += v > 0.0f;
        EXPECT_EQ(filled, stats.projected);
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            const auto& p = cloud[i];
            const double d = std::sqrt(double(p.x) * p.x + double(p.y) * p.y + double(p.z) * p.z);
            const int row = nearest_channel(model(), std::asin(p.z / d));
            if (row < 0) continue;
            double az = std::atan2(double(p.y), double(p.x));
            if (az < 0) az += 2 * kPi;
            const int col = static_cast<int>(std::floor(az / model().azimuth_step())) % model().width();
            EXPECT_LE(ri.ranges(row, col), static_cast<float>(d) * (1 + 1e-6f));
        }
    }
}

TEST(Projection, ReprojectionOfWinnersIsIdentical) {
    std::mt19937_64 rng(12);
    const auto cloud = random_cloud(rng, 30000);
    const auto ri = project(cloud, model());
    PointCloud winners;
    for (auto idx : ri.point_index.data()) {
        if (idx != kNoPoint) winners.push_back(cloud[idx]);
    }
    const auto again = project(winners, model());
    EXPECT_TRUE(again.ranges == ri.ranges);
    EXPECT_TRUE(project(cloud, model()) == ri);
}

TEST(Projection, BeamPointRoundTrip) {
    for (int r : {0, 5, 30, 63}) {
        for (int c : {0, 1, 1999, 3999}) {
            const PointCloud cloud{beam_point(model(), r, c, 23.5)};
            const auto ri = project(cloud, model());
            EXPECT_NEAR(ri.ranges(r, c), 23.5f, 1e-4f) << r << "," << c;
        }
    }
}

TEST(HeightImage, Frames) {
    const SensorModel m({deg_to_rad(0.0), deg_to_rad(-30.0)}, deg_to_rad(1.0), 360, 1.73);
    Grid<float> g(2, 360, 0.0f);
    g(1, 0) = 10.0f;
    g(0, 0) = 5.0f;
    const auto ri = make_range_image(g);
    const auto sensor = height_image(ri, m, HeightFrame::kSensor);
    const auto ground = height_image(ri, m, HeightFrame::kGround);
    EXPECT_NEAR(sensor(1, 0), -5.0f, 1e-5f);
    EXPECT_NEAR(ground(1, 0), -3.27f, 1e-5f);
    EXPECT_NEAR(sensor(0, 0), 0.0f, 1e-6f);
    EXPECT_TRUE(std::isnan(sensor(0, 1)));
    EXPECT_TRUE(std::isnan(ground(1, 1)));
}

TEST(BackProjection, LabelsFollowWinningPoints) {
    const PointCloud cloud{{10.0f, 0.0f, 0.0f}, {12.0f, 0.0f, 0.0f}, {0.0f, 0.0f, 0.0f}};
    const auto ri = project(cloud, model());
    Grid<std::int32_t> labels(64, 4000, 0);
    labels(5, 0) = 7;
    EXPECT_EQ(labels_to_points(labels, ri), (std::vector<std::int32_t>{7, 0, 0}));
}

TEST(BackProjection, CountsMatchWithoutCollisions) {
    Grid<std::int32_t> labels(64, 4000, 0);
    PointCloud cloud;
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> row(0, 63), col(0, 3999), lab(0, 4);
    std::set<std::pair<int, int>> used;
    while (cloud.size() < 500) {
        const int r = row(rng), c = col(rng);
        if (!used.insert({r, c}).second) continue;
        cloud.push_back(beam_point(model(), r, c, 15.0));
        labels(r, c) = lab(rng);
    }
    const auto ri = project(cloud, model());
    const auto pl = labels_to_points(labels, ri);
    std::size_t cells = 0, points = 0;
    for (auto v : labels.data()) cells += v != 0;
    for (auto v : pl) points += v != 0;
    EXPECT_EQ(points, cells);
}

TEST(BackProjection, NativeImageHasNoIndex) {
    const auto ri = make_range_image(Grid<float>(2, 2, 1.0f));
    EXPECT_FALSE(ri.has_point_index());
    EXPECT_THROW(labels_to_points(Grid<std::int32_t>(2, 2, 0), ri), std::logic_error);
}
