#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <variant>
#include <vector>

#include "rangeseg/grid.hpp"
#include "rangeseg/io_formats.hpp"
#include "rangeseg/range_image.hpp"
#include "rangeseg/sensor.hpp"

// Ray-cast scene fixtures with golden labels. All coordinates are ground frame: z = 0
// is the road, the sensor sits at (0, 0, mount_height).
namespace rangeseg::synth {

inline constexpr std::uint16_t kRoad = 40;
inline constexpr std::uint16_t kCar = 10;
inline constexpr std::uint16_t kPerson = 30;
inline constexpr std::uint16_t kBuilding = 50;
inline constexpr std::uint16_t kPole = 80;

/// Infinite horizontal plane at height z.
struct HorizontalPlane {
    double z = 0.0;
};

/// Axis-aligned solid box.
struct Box {
    std::array<double, 3> lo{};
    std::array<double, 3> hi{};
};

/// Solid annular sector around the sensor axis: azimuth in [phi_min, phi_max] (radians,
/// may cross 0 when phi_min > phi_max), horizontal distance in [r_min, r_max], height in
/// [z_min, z_max]. Its faces are cylinders and horizontal annuli, so every ray sees it
/// as a rectangle in (distance, height).
struct PolarBox {
    double phi_min = 0.0;
    double phi_max = 0.0;
    double r_min = 0.0;
    double r_max = 0.0;
    double z_min = 0.0;
    double z_max = 0.0;
};

using Shape = std::variant<HorizontalPlane, Box, PolarBox>;

struct SceneObject {
    Shape shape;
    GtLabel label;
};

struct Scene {
    std::vector<SceneObject> objects;
    double max_range = 120.0;
    /// Probability that a hit is lost (no return), applied with `dropout_seed`.
    double dropout = 0.0;
    std::uint64_t dropout_seed = 0;
};

struct SynthFrame {
    RangeImage image;           ///< native: no point index
    Grid<std::uint32_t> golden; ///< SemanticKITTI word per cell, 0 where there is no return
    PointCloud cloud;           ///< one point per return, row-major cell order
    std::vector<GtLabel> point_labels;
};

/// Distance along the ray (unit `dir` from the sensor) to the first hit, or +inf.
double intersect(const Shape& shape, const std::array<double, 3>& dir, double mount_height);

SynthFrame render(const Scene& scene, const SensorModel& model);

/// Horizontal distance at which the beam of `row` meets the road, +inf for beams at or above the horizon.
double ground_hit_distance(const SensorModel& model, int row);

Scene plane_scene();
/// Cylindrical wall of radius `radius` around the sensor, no ground.
Scene wall_scene(double radius = 10.0);
/// Single horizontal plane at ground-frame height z (a car-roof surrogate), no road.
Scene elevated_plane_scene(double z);
/// Road plus two polar boxes about 1.5 m tall: car 1 straddling the azimuth seam, car 2 at 90 deg.
/// Each box's near face sits just inside a beam's road hit so its base meets the road cleanly.
Scene boxes_scene(const SensorModel& model);
/// boxes_scene plus a 3 m pole (instance 3) at 5 m that hides exactly one column of car 2.
Scene occluder_scene(const SensorModel& model);
/// Road, building walls and randomly placed cars, pedestrians and poles, with 2% dropout.
Scene street_scene(std::uint64_t seed);

/// "plane", "wall", "elevated", "boxes", "occluder" or "street"; throws ConfigError otherwise.
Scene fixture(std::string_view kind, const SensorModel& model, std::uint64_t seed = 0);

}  // namespace rangeseg::synth
