#include "rangeseg/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "rangeseg/errors.hpp"

namespace rangeseg::synth {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kParallel = 1e-15;
constexpr double kTwoPi = 2.0 * kPi;

double wrap_angle(double a) {
    a = std::fmod(a, kTwoPi);
    return a < 0.0 ? a + kTwoPi : a;
}

bool in_azimuth(double phi, double lo, double hi) {
    if (hi - lo >= kTwoPi) return true;
    phi = wrap_angle(phi);
    lo = wrap_angle(lo);
    hi = wrap_angle(hi);
    return lo <= hi ? (phi >= lo && phi <= hi) : (phi >= lo || phi <= hi);
}

// Clips [t_near, t_far] against one slab o + t*d in [lo, hi]; false when empty.
bool clip_slab(double o, double d, double lo, double hi, double& t_near, double& t_far) {
    if (std::abs(d) < kParallel) return o >= lo && o <= hi;
    double t1 = (lo - o) / d, t2 = (hi - o) / d;
    if (t1 > t2) std::swap(t1, t2);
    t_near = std::max(t_near, t1);
    t_far = std::min(t_far, t2);
    return t_near <= t_far;
}

double entry_distance(double t_near, double t_far) { return (t_near > 0.0 && t_near <= t_far) ? t_near : kInf; }

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

int row_hitting_ground_near(const SensorModel& model, double distance) {
    int best = -1;
    double best_err = kInf;
    for (int r = 0; r < model.height(); ++r) {
        const double err = std::abs(ground_hit_distance(model, r) - distance);
        if (err < best_err) {
            best_err = err;
            best = r;
        }
    }
    return best;
}

SceneObject car_on_beam(const SensorModel& model, double target_distance, double phi_lo_deg, double phi_hi_deg,
                        std::uint16_t instance) {
    const double near = ground_hit_distance(model, row_hitting_ground_near(model, target_distance)) * (1.0 - 1e-3);
    const double far = near + 2.0;
    // Top sits just under the beam that clears the far edge, so no beam lands on the roof.
    double top = kInf;
    for (int r = 0; r < model.height(); ++r) {
        const double z = model.mount_height() + far * std::tan(model.channel_angle(r));
        if (z >= 1.5 && z < top) top = z;
    }
    return {PolarBox{deg_to_rad(phi_lo_deg), deg_to_rad(phi_hi_deg), near, far, 0.0, top - 1e-3},
            GtLabel{kCar, instance}};
}

}  // namespace

double intersect(const Shape& shape, const std::array<double, 3>& dir, double mount_height) {
    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, HorizontalPlane>) {
                if (std::abs(dir[2]) < kParallel) return kInf;
                const double t = (s.z - mount_height) / dir[2];
                return t > 0.0 ? t : kInf;
            } else if constexpr (std::is_same_v<T, Box>) {
                const std::array<double, 3> origin{0.0, 0.0, mount_height};
                double t_near = -kInf, t_far = kInf;
                for (int a = 0; a < 3; ++a) {
                    if (!clip_slab(origin[a], dir[a], s.lo[a], s.hi[a], t_near, t_far)) return kInf;
                }
                return entry_distance(t_near, t_far);
            } else {
                if (!in_azimuth(std::atan2(dir[1], dir[0]), s.phi_min, s.phi_max)) return kInf;
                double t_near = -kInf, t_far = kInf;
                if (!clip_slab(0.0, std::hypot(dir[0], dir[1]), s.r_min, s.r_max, t_near, t_far)) return kInf;
                if (!clip_slab(mount_height, dir[2], s.z_min, s.z_max, t_near, t_far)) return kInf;
                return entry_distance(t_near, t_far);
            }
        },
        shape);
}

double ground_hit_distance(const SensorModel& model, int row) {
    const double el = model.channel_angle(row);
    if (el >= 0.0) return kInf;
    return model.mount_height() / std::tan(-el);
}

SynthFrame render(const Scene& scene, const SensorModel& model) {
    const int h = model.height(), w = model.width();
    SynthFrame frame;
    Grid<float> ranges(h, w, 0.0f);
    frame.golden.reset(h, w, 0);

    std::vector<double> col_cos(w), col_sin(w);
    for (int c = 0; c < w; ++c) {
        col_cos[c] = std::cos(model.column_azimuth(c));
        col_sin[c] = std::sin(model.column_azimuth(c));
    }
    for (int r = 0; r < h; ++r) {
        const double ce = std::cos(model.channel_angle(r)), se = std::sin(model.channel_angle(r));
        for (int c = 0; c < w; ++c) {
            const std::array<double, 3> dir{ce * col_cos[c], ce * col_sin[c], se};
            double best = kInf;
            const SceneObject* hit = nullptr;
            for (const auto& obj : scene.objects) {
                const double t = intersect(obj.shape, dir, model.mount_height());
                if (t < best) {
                    best = t;
                    hit = &obj;
                }
            }
            if (!hit || best > scene.max_range) continue;
            if (scene.dropout > 0.0) {
                const std::uint64_t key = splitmix64(scene.dropout_seed ^ splitmix64(static_cast<std::uint64_t>(r) * w + c));
                if (static_cast<double>(key >> 11) * 0x1.0p-53 < scene.dropout) continue;
            }
            ranges(r, c) = static_cast<float>(best);
            frame.golden(r, c) = hit->label.word();
        }
    }

    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (ranges(r, c) <= 0.0f) continue;
            frame.cloud.push_back(beam_point(model, r, c, ranges(r, c)));
            frame.point_labels.push_back(GtLabel::from_word(frame.golden(r, c)));
        }
    }
    frame.image = make_range_image(std::move(ranges));
    return frame;
}

Scene plane_scene() { return Scene{{{HorizontalPlane{0.0}, GtLabel{kRoad, 0}}}}; }

Scene wall_scene(double radius) {
    return Scene{{{PolarBox{0.0, kTwoPi, radius, radius + 1.0, -1e6, 1e6}, GtLabel{kBuilding, 0}}}};
}

Scene elevated_plane_scene(double z) { return Scene{{{HorizontalPlane{z}, GtLabel{kCar, 1}}}}; }

Scene boxes_scene(const SensorModel& model) {
    Scene scene = plane_scene();
    scene.objects.push_back(car_on_beam(model, 10.0, -10.0, 10.0, 1));
    scene.objects.push_back(car_on_beam(model, 12.0, 80.0, 100.0, 2));
    return scene;
}

Scene occluder_scene(const SensorModel& model) {
    Scene scene = boxes_scene(model);
    const double step = model.azimuth_step();
    const int col = static_cast<int>(std::floor(0.5 * kPi / step));
    const double centre = model.column_azimuth(col);
    scene.objects.push_back(
        {PolarBox{centre - 0.3 * step, centre + 0.3 * step, 5.0, 5.05, 0.0, 3.0}, GtLabel{kPole, 3}});
    return scene;
}

Scene street_scene(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    auto count = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };

    Scene scene = plane_scene();
    scene.dropout = 0.02;
    scene.dropout_seed = seed;

    // Building rows on both sides, with gaps between blocks.
    for (double side : {-1.0, 1.0}) {
        const double setback = uniform(9.0, 14.0);
        for (double x = -70.0; x < 70.0;) {
            const double length = uniform(8.0, 25.0);
            scene.objects.push_back({Box{{x, side * setback - (side > 0 ? 0.0 : 6.0), 0.0},
                                         {x + length, side * setback + (side > 0 ? 6.0 : 0.0), uniform(4.0, 12.0)}},
                                     GtLabel{kBuilding, 0}});
            x += length + uniform(2.0, 8.0);
        }
    }

    std::uint16_t instance = 1;
    auto place = [&](double half_x, double half_y, double z_lo, double z_hi, double max_abs_y, std::uint16_t semantic) {
        for (int attempt = 0; attempt < 20; ++attempt) {
            const double cx = uniform(-45.0, 45.0), cy = uniform(-max_abs_y, max_abs_y);
            if (std::abs(cx) < half_x + 3.0 && std::abs(cy) < half_y + 2.0) continue;
            scene.objects.push_back(
                {Box{{cx - half_x, cy - half_y, z_lo}, {cx + half_x, cy + half_y, z_hi}}, GtLabel{semantic, instance++}});
            return;
        }
    };
    for (int i = count(8, 16); i > 0; --i) place(2.25, 0.9, 0.25, uniform(1.4, 1.9), 7.0, kCar);
    for (int i = count(3, 8); i > 0; --i) place(0.25, 0.25, 0.0, uniform(1.6, 1.9), 8.5, kPerson);
    for (int i = count(4, 8); i > 0; --i) place(0.08, 0.08, 0.0, 4.0, 8.5, kPole);
    return scene;
}

Scene fixture(std::string_view kind, const SensorModel& model, std::uint64_t seed) {
    if (kind == "plane") return plane_scene();
    if (kind == "wall") return wall_scene();
    if (kind == "elevated") return elevated_plane_scene(1.2);
    if (kind == "boxes") return boxes_scene(model);
    if (kind == "occluder") return occluder_scene(model);
    if (kind == "street") return street_scene(seed);
    throw ConfigError("unknown synthetic fixture '" + std::string(kind) +
                      "' (expected plane, wall, elevated, boxes, occluder, street)");
}

}  // namespace rangeseg::synth
