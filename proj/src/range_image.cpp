#include "rangeseg/range_image.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rangeseg {

int nearest_channel(const SensorModel& model, double elevation_rad) {
    const auto angles = model.channel_angles();
    const int h = model.height();
    const bool descending = angles[0] > angles[1];

    // Search over an ascending view of the table.
    auto at = [&](int i) { return descending ? angles[h - 1 - i] : angles[i]; };
    int lo = 0, hi = h;
    while (lo < hi) {
        const int mid = (lo + hi) / 2;
        if (at(mid) < elevation_rad) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    int best;
    if (lo == 0) {
        const double half = 0.5 * (at(1) - at(0));
        if (at(0) - elevation_rad > half) return -1;
        best = 0;
    } else if (lo == h) {
        const double half = 0.5 * (at(h - 1) - at(h - 2));
        if (elevation_rad - at(h - 1) > half) return -1;
        best = h - 1;
    } else {
        best = (elevation_rad - at(lo - 1) <= at(lo) - elevation_rad) ? lo - 1 : lo;
    }
    return descending ? h - 1 - best : best;
}

void project_into(std::span<const Point3f> points, const SensorModel& model, RangeImage& out,
                  ProjectionStats* stats) {
    const int h = model.height();
    const int w = model.width();
    out.ranges.reset(h, w, 0.0f);
    out.point_index.reset(h, w, kNoPoint);
    out.source_points = points.size();

    constexpr double kTwoPi = 2.0 * kPi;
    std::size_t accepted = 0;
    std::size_t dropped = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const Point3f& p = points[i];
        const double x = p.x, y = p.y, z = p.z;
        const double range = std::sqrt(x * x + y * y + z * z);
        if (!std::isfinite(range) || range <= 0.0) {
            ++dropped;
            continue;
        }
        const int row = nearest_channel(model, std::atan2(z, std::hypot(x, y)));
        double azimuth = std::atan2(y, x);
        if (azimuth < 0.0) azimuth += kTwoPi;
        int col = static_cast<int>(std::floor(azimuth / model.azimuth_step()));
        if (model.wraps()) {
            col %= w;
        } else if (col >= w) {
            col = -1;
        }
        if (row < 0 || col < 0) {
            ++dropped;
            continue;
        }
        ++accepted;
        const float r = static_cast<float>(range);
        float& cell = out.ranges(row, col);
        if (cell == 0.0f || r < cell) {
            cell = r;
            out.point_index(row, col) = static_cast<std::int32_t>(i);
        }
    }

    if (stats) {
        std::size_t filled = 0;
        for (float r : out.ranges.data()) filled += r > 0.0f;
        stats->total = points.size();
        stats->dropped = dropped;
        stats->projected = filled;
        stats->overwritten = accepted - filled;
    }
}

RangeImage project(std::span<const Point3f> points, const SensorModel& model, ProjectionStats* stats) {
    RangeImage out;
    project_into(points, model, out, stats);
    return out;
}

void height_image_into(const RangeImage& ri, const SensorModel& model, HeightImage& out, HeightFrame frame) {
    const int h = ri.rows(), w = ri.cols();
    out.reset(h, w, std::numeric_limits<float>::quiet_NaN());
    const double offset = frame == HeightFrame::kGround ? model.mount_height() : 0.0;
    for (int r = 0; r < h; ++r) {
        const double s = model.channel_sin(r);
        const auto in_row = ri.ranges.row(r);
        auto out_row = out.row(r);
        for (int c = 0; c < w; ++c) {
            if (in_row[c] > 0.0f) out_row[c] = static_cast<float>(in_row[c] * s + offset);
        }
    }
}

HeightImage height_image(const RangeImage& ri, const SensorModel& model, HeightFrame frame) {
    HeightImage out;
    height_image_into(ri, model, out, frame);
    return out;
}

void labels_to_points_into(const Grid<std::int32_t>& labels, const RangeImage& ri, std::vector<std::int32_t>& out) {
    if (!ri.has_point_index()) {
        throw std::logic_error("labels_to_points needs a range image projected from points");
    }
    out.assign(ri.source_points, 0);
    const auto index = ri.point_index.data();
    const auto lab = labels.data();
    for (std::size_t cell = 0; cell < index.size(); ++cell) {
        if (index[cell] != kNoPoint) out[static_cast<std::size_t>(index[cell])] = lab[cell];
    }
}

std::vector<std::int32_t> labels_to_points(const Grid<std::int32_t>& labels, const RangeImage& ri) {
    std::vector<std::int32_t> out;
    labels_to_points_into(labels, ri, out);
    return out;
}

RangeImage make_range_image(Grid<float> ranges) {
    RangeImage ri;
    ri.ranges = std::move(ranges);
    return ri;
}

Point3f beam_point(const SensorModel& model, int row, int col, double range) {
    const double el = model.channel_angle(row);
    const double az = model.column_azimuth(col);
    const double horiz = range * std::cos(el);
    return {static_cast<float>(horiz * std::cos(az)), static_cast<float>(horiz * std::sin(az)),
            static_cast<float>(range * std::sin(el))};
}

}  // namespace rangeseg
