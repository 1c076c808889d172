#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rangeseg/grid.hpp"
#include "rangeseg/sensor.hpp"

namespace rangeseg {

struct Point3f {
    float x = 0.0f;
    float y = 0.0f;
    float z = 0.0f;

    bool operator==(const Point3f&) const = default;
};

using PointCloud = std::vector<Point3f>;

constexpr std::int32_t kNoPoint = -1;

/// H x W ranges in metres, 0 = no return. `point_index` maps each filled cell to the
/// source point that won it; empty when the frame arrived natively as a range image.
struct RangeImage {
    Grid<float> ranges;
    Grid<std::int32_t> point_index;
    std::size_t source_points = 0;

    int rows() const { return ranges.rows(); }
    int cols() const { return ranges.cols(); }
    bool has_point_index() const { return !point_index.empty(); }

    bool operator==(const RangeImage&) const = default;
};

/// Where each source point went during projection.
/// dropped + projected + overwritten == total.
struct ProjectionStats {
    std::size_t total = 0;
    std::size_t projected = 0;
    std::size_t overwritten = 0;
    std::size_t dropped = 0;
};

/// Spherical projection: row = nearest channel by elevation, col = floor(azimuth / step)
/// mod W with azimuth in [0, 2*pi) from +x. Points at the origin, non-finite points and
/// points more than half a channel spacing outside the vertical FOV are dropped. On a
/// collision the smaller range wins (earlier point on ties).
RangeImage project(std::span<const Point3f> points, const SensorModel& model, ProjectionStats* stats = nullptr);
void project_into(std::span<const Point3f> points, const SensorModel& model, RangeImage& out,
                  ProjectionStats* stats = nullptr);

/// Row of the channel whose elevation is closest to `elevation_rad`, or -1 when outside the FOV.
int nearest_channel(const SensorModel& model, double elevation_rad);

enum class HeightFrame {
    kSensor,  ///< z relative to the sensor origin
    kGround,  ///< z relative to the wheel-contact plane (sensor z + mount height)
};

/// z per cell: range * sin(delta_row), plus mount height in the ground frame. NaN where range is 0.
using HeightImage = Grid<float>;

HeightImage height_image(const RangeImage& ri, const SensorModel& model, HeightFrame frame = HeightFrame::kGround);
void height_image_into(const RangeImage& ri, const SensorModel& model, HeightImage& out,
                       HeightFrame frame = HeightFrame::kGround);

/// Copy every cell label back onto the point that filled it; dropped and overwritten points get 0.
/// Throws std::logic_error if the image has no point index.
std::vector<std::int32_t> labels_to_points(const Grid<std::int32_t>& labels, const RangeImage& ri);
void labels_to_points_into(const Grid<std::int32_t>& labels, const RangeImage& ri, std::vector<std::int32_t>& out);

/// Wrap a native range grid (no source points).
RangeImage make_range_image(Grid<float> ranges);

/// Point for cell (row, col) at `range` along that cell's beam.
Point3f beam_point(const SensorModel& model, int row, int col, double range);

}  // namespace rangeseg
