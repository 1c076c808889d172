#pragma once

#include <cstdint>

#include "rangeseg/ground.hpp"
#include "rangeseg/grid.hpp"
#include "rangeseg/range_image.hpp"
#include "rangeseg/sensor.hpp"

namespace rangeseg {

/// Maximum Euclidean distance (m) between two returns of the same cluster.
class DistanceThreshold {
public:
    /// Throws ConfigError unless d_max is finite and > 0.
    explicit DistanceThreshold(double d_max = 0.8);

    double d_max() const { return d_max_; }
    double d_max_sq() const { return d_max_sq_; }

private:
    double d_max_;
    double d_max_sq_;
};

/// horizontal(r,c): (r,c) joins (r,c+1 mod W); vertical(r,c): (r,c) joins (r+1,c).
struct ConnectivityImages {
    Grid<std::uint8_t> horizontal;  // H x W
    Grid<std::uint8_t> vertical;    // (H-1) x W
};

/// Cosine law in squared form: d1^2 + d2^2 - 2cos(a) * d1 * d2, clamped at 0.
/// Symmetric in (d1, d2) bit for bit.
inline double pair_distance_sq(double d1, double d2, double two_cos_a) {
    const double dsq = d1 * d1 + d2 * d2 - two_cos_a * (d1 * d2);
    return dsq > 0.0 ? dsq : 0.0;
}

/// Largest range at which two returns on a surface facing the sensor, `angle` apart,
/// stay within `threshold`: d_max / (2 sin(angle / 2)).
double max_connectable_range(double angle_rad, const DistanceThreshold& threshold);

/// All-pairs threshold test against the direct neighbours. Ground-masked and range-0
/// cells never connect. Horizontal pairs wrap across the seam only for full-revolution sensors.
ConnectivityImages build_connectivity(const RangeImage& ri, const GroundMask& gm, const SensorModel& model,
                                      const DistanceThreshold& threshold);
void build_connectivity_into(const RangeImage& ri, const GroundMask& gm, const SensorModel& model,
                             const DistanceThreshold& threshold, ConnectivityImages& out);

}  // namespace rangeseg
