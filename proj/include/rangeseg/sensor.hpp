#pragma once

#include <compare>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace rangeseg {

constexpr double kPi = 3.14159265358979323846;

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Cell offset (rows, columns) between the two endpoints of a pair test.
struct PixelOffset {
    int dy = 0;
    int dx = 0;

    auto operator<=>(const PixelOffset&) const = default;
};

/// The pair (a, a+o) equals the pair (a+o, a) reached with -o; canonical form has
/// dy > 0, or dy == 0 and dx > 0.
PixelOffset canonical(PixelOffset offset);

/// Geometry of a rotating multi-beam scanner and every trigonometric constant derived
/// from it. Immutable after construction.
///
/// Rows follow the channel table order (row 0 = first entry, normally the top beam).
/// Column c looks along azimuth (c + 0.5) * azimuth_step, counter-clockwise from the
/// vehicle forward (+x) axis.
class SensorModel {
public:
    /// Throws ConfigError if fewer than two channels, channel angles not strictly
    /// monotonic, azimuth_step <= 0, width < 1 or width * azimuth_step > 2*pi.
    /// Pair constants for the direct neighbours (0,1) and (1,0) are always present.
    SensorModel(std::vector<double> channel_angles_rad, double azimuth_step_rad, int width,
                double mount_height_m);

    /// Evenly spaced channels from `top_deg` to `bottom_deg` inclusive. `width` of 0
    /// means a full revolution, round(360 / azimuth_step_deg).
    static SensorModel uniform(int channels, double top_deg, double bottom_deg, double azimuth_step_deg,
                               double mount_height_m, int width = 0);

    /// 64 channels at 0.4 deg spacing (+2.0 .. -23.2 deg), 0.09 deg azimuth step, 1.73 m mount.
    static SensorModel hdl64_default();

    int height() const { return static_cast<int>(channel_angles_.size()); }
    int width() const { return width_; }
    double azimuth_step() const { return azimuth_step_; }
    double mount_height() const { return mount_height_; }
    /// True when the columns cover a full revolution, so column W-1 neighbours column 0.
    bool wraps() const { return wraps_; }

    std::span<const double> channel_angles() const { return channel_angles_; }
    double channel_angle(int row) const { return channel_angles_[row]; }
    double column_azimuth(int col) const { return (col + 0.5) * azimuth_step_; }

    /// |delta_r - delta_{r+1}|, length H-1.
    std::span<const double> vertical_alpha() const { return vertical_alpha_; }
    /// sin/cos of the signed angle delta_r - delta_{r+1}; sin is negative for ascending tables.
    double vertical_sin(int row) const { return vertical_sin_[row]; }
    double vertical_cos(int row) const { return vertical_cos_[row]; }
    double channel_tan(int row) const { return channel_tan_[row]; }
    double channel_sin(int row) const { return channel_sin_[row]; }

    /// Angle between the beams of (r, c) and (r + dy, c + dx); column independent.
    double combined_angle(int row, PixelOffset offset) const;

    bool has_pair_constants(PixelOffset offset) const;
    /// 2*cos(combined angle) indexed by the start row r of the pair (r, r+dy); length H-dy.
    /// Throws std::out_of_range when the offset was not precomputed.
    std::span<const double> pair_constants(PixelOffset offset) const;
    std::vector<PixelOffset> offsets() const;

    /// Copy of this model with constants for `offsets` added. Throws ConfigError for
    /// (0,0) or an offset with |dy| >= H or |dx| >= W.
    SensorModel with_pair_constants(std::span<const PixelOffset> offsets) const;

    bool operator==(const SensorModel&) const = default;

private:
    void add_offset(PixelOffset offset);

    std::vector<double> channel_angles_;
    double azimuth_step_ = 0.0;
    int width_ = 0;
    double mount_height_ = 0.0;
    bool wraps_ = false;

    std::vector<double> vertical_alpha_;
    std::vector<double> vertical_sin_;
    std::vector<double> vertical_cos_;
    std::vector<double> channel_tan_;
    std::vector<double> channel_sin_;
    std::map<PixelOffset, std::vector<double>> two_cos_;
};

/// Free-function form of SensorModel::with_pair_constants.
SensorModel precompute_pair_constants(const SensorModel& model, std::span<const PixelOffset> offsets);

/// Parse a sensor config (JSON text). Keys: `channels`, `vertical_angles` (degrees,
/// top row first) or `vertical_fov` ([top, bottom] degrees), `azimuth_step_deg`,
/// `mount_height_m`, optional `width` and `offsets` ([[dy, dx], ...]). The exact
/// radian keys `vertical_angles_rad` / `azimuth_step_rad` take precedence when present.
SensorModel parse_sensor_model(const std::string& text);
SensorModel load_sensor_model(const std::filesystem::path& path);

/// Serialises with radian keys so that parse_sensor_model reproduces every table bit for bit.
std::string serialize_sensor_model(const SensorModel& model);

}  // namespace rangeseg
