#pragma once

#include <cstdint>

#include "rangeseg/grid.hpp"
#include "rangeseg/range_image.hpp"
#include "rangeseg/sensor.hpp"

namespace rangeseg {

struct GroundParams {
    /// Slope tolerance from horizontal, degrees, 0 < theta < 90.
    double theta_deg = 10.0;
    /// Ground-frame height (m) above which horizontal surfaces are kept (roofs, hoods).
    double keep_above_z = 0.7;

    /// Throws ConfigError on out-of-range values.
    void validate() const;
};

/// true = ground or invalid (range 0).
using GroundMask = Grid<std::uint8_t>;

/// tan(beta) = d2*sin(a) / (d1 - d2*cos(a)), the angle at the upper return between the
/// beam back to the sensor and the segment to the lower return. A denominator within
/// 1e-12 of zero yields a signed infinity.
double surface_tangent(double d1, double d2, double sin_a, double cos_a);

/// Tangent of the segment's inclination from horizontal: tan(beta + delta_upper), where
/// `tan_delta_upper` is the tangent of the upper beam's elevation. Same inputs as
/// surface_tangent with no arctangent.
double surface_slope_tangent(double d1, double d2, double sin_a, double cos_a, double tan_delta_upper);

/// Cell (r,c) is ground iff range > 0, the segment to its upper neighbour (r-1,c) is within
/// theta of horizontal and its ground-frame height is <= keep_above_z. Row 0, and any cell
/// whose upper neighbour has no return, uses the segment to the row below instead; a
/// cell with neither neighbour is kept. Range-0 cells are always marked.
GroundMask extract_ground(const RangeImage& ri, const HeightImage& hi, const SensorModel& model,
                          const GroundParams& params);
void extract_ground_into(const RangeImage& ri, const HeightImage& hi, const SensorModel& model,
                         const GroundParams& params, GroundMask& out);

/// Mask with only the range-0 cells set (ground removal disabled).
void invalid_mask_into(const RangeImage& ri, GroundMask& out);

}  // namespace rangeseg
