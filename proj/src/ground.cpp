#include "rangeseg/ground.hpp"

#include <cmath>
#include <limits>

#include "rangeseg/errors.hpp"

namespace rangeseg {

namespace {

constexpr double kVerticalEps = 1e-12;

double guarded_divide(double num, double den) {
    if (std::abs(den) <= kVerticalEps) {
        return std::copysign(std::numeric_limits<double>::infinity(), num == 0.0 ? 1.0 : num);
    }
    return num / den;
}

}  // namespace

void GroundParams::validate() const {
    if (!(theta_deg > 0.0 && theta_deg < 90.0)) throw ConfigError("ground theta must lie in (0, 90) degrees");
    if (!std::isfinite(keep_above_z)) throw ConfigError("keep_above_z must be finite");
}

double surface_tangent(double d1, double d2, double sin_a, double cos_a) {
    return guarded_divide(d2 * sin_a, d1 - d2 * cos_a);
}

double surface_slope_tangent(double d1, double d2, double sin_a, double cos_a, double tan_delta_upper) {
    const double n = d2 * sin_a;
    const double dn = d1 - d2 * cos_a;
    return guarded_divide(n + dn * tan_delta_upper, dn - n * tan_delta_upper);
}

void invalid_mask_into(const RangeImage& ri, GroundMask& out) {
    out.reset(ri.rows(), ri.cols(), 0);
    const auto ranges = ri.ranges.data();
    auto mask = out.data();
    for (std::size_t i = 0; i < ranges.size(); ++i) mask[i] = ranges[i] <= 0.0f;
}

void extract_ground_into(const RangeImage& ri, const HeightImage& hi, const SensorModel& model,
                         const GroundParams& params, GroundMask& out) {
    const int h = ri.rows(), w = ri.cols();
    const double tan_theta = std::tan(deg_to_rad(params.theta_deg));
    const double keep_above = params.keep_above_z;
    out.reset(h, w, 1);

    // Slope of the segment between rows (upper, upper + 1) at column c.
    auto segment_slope = [&](int upper, int c) {
        return surface_slope_tangent(ri.ranges(upper, c), ri.ranges(upper + 1, c), model.vertical_sin(upper),
                                     model.vertical_cos(upper), model.channel_tan(upper));
    };

    for (int r = 0; r < h; ++r) {
        const auto range_row = ri.ranges.row(r);
        const auto z_row = hi.row(r);
        auto mask_row = out.row(r);
        for (int c = 0; c < w; ++c) {
            if (range_row[c] <= 0.0f) continue;
            const bool has_above = r > 0 && ri.ranges(r - 1, c) > 0.0f;
            const bool has_below = r + 1 < h && ri.ranges(r + 1, c) > 0.0f;
            double slope;
            if (has_above) {
                slope = segment_slope(r - 1, c);
            } else if (has_below) {
                slope = segment_slope(r, c);
            } else {
                mask_row[c] = 0;
                continue;
            }
            mask_row[c] = std::abs(slope) <= tan_theta && z_row[c] <= keep_above;
        }
    }
}

GroundMask extract_ground(const RangeImage& ri, const HeightImage& hi, const SensorModel& model,
                          const GroundParams& params) {
    GroundMask out;
    extract_ground_into(ri, hi, model, params, out);
    return out;
}

}  // namespace rangeseg
