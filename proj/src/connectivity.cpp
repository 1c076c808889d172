#include "rangeseg/connectivity.hpp"

#include <cmath>

#include "rangeseg/errors.hpp"

namespace rangeseg {

DistanceThreshold::DistanceThreshold(double d_max) : d_max_(d_max), d_max_sq_(d_max * d_max) {
    if (!(d_max > 0.0) || !std::isfinite(d_max)) throw ConfigError("distance threshold must be positive");
}

double max_connectable_range(double angle_rad, const DistanceThreshold& threshold) {
    return threshold.d_max() / (2.0 * std::sin(0.5 * angle_rad));
}

void build_connectivity_into(const RangeImage& ri, const GroundMask& gm, const SensorModel& model,
                             const DistanceThreshold& threshold, ConnectivityImages& out) {
    const int h = ri.rows(), w = ri.cols();
    const double limit = threshold.d_max_sq();
    out.horizontal.reset(h, w, 0);
    out.vertical.reset(h > 0 ? h - 1 : 0, w, 0);

    const auto horizontal_k = model.pair_constants({0, 1});
    const auto vertical_k = model.pair_constants({1, 0});
    const int last = model.wraps() ? w : w - 1;

    for (int r = 0; r < h; ++r) {
        const auto ranges = ri.ranges.row(r);
        const auto mask = gm.row(r);
        const double k = horizontal_k[r];
        auto conn = out.horizontal.row(r);
        for (int c = 0; c < last; ++c) {
            const int c2 = c + 1 == w ? 0 : c + 1;
            if (mask[c] || mask[c2] || ranges[c] <= 0.0f || ranges[c2] <= 0.0f) continue;
            conn[c] = pair_distance_sq(ranges[c], ranges[c2], k) <= limit;
        }
    }
    for (int r = 0; r + 1 < h; ++r) {
        const auto upper = ri.ranges.row(r);
        const auto lower = ri.ranges.row(r + 1);
        const auto mask_u = gm.row(r);
        const auto mask_l = gm.row(r + 1);
        const double k = vertical_k[r];
        auto conn = out.vertical.row(r);
        for (int c = 0; c < w; ++c) {
            if (mask_u[c] || mask_l[c] || upper[c] <= 0.0f || lower[c] <= 0.0f) continue;
            conn[c] = pair_distance_sq(upper[c], lower[c], k) <= limit;
        }
    }
}

ConnectivityImages build_connectivity(const RangeImage& ri, const GroundMask& gm, const SensorModel& model,
                                      const DistanceThreshold& threshold) {
    ConnectivityImages out;
    build_connectivity_into(ri, gm, model, threshold, out);
    return out;
}

}  // namespace rangeseg
