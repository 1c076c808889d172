#include "rangeseg/sensor.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "rangeseg/errors.hpp"

namespace rangeseg {

namespace {

constexpr double kTwoPi = 2.0 * kPi;
constexpr double kRevolutionEps = 1e-6;

using json = nlohmann::json;

}  // namespace

PixelOffset canonical(PixelOffset offset) {
    if (offset.dy < 0 || (offset.dy == 0 && offset.dx < 0)) {
        return {-offset.dy, -offset.dx};
    }
    return offset;
}

SensorModel::SensorModel(std::vector<double> channel_angles_rad, double azimuth_step_rad, int width,
                         double mount_height_m)
    : channel_angles_(std::move(channel_angles_rad)),
      azimuth_step_(azimuth_step_rad),
      width_(width),
      mount_height_(mount_height_m) {
    const int h = height();
    if (h < 2) {
        throw ConfigError("sensor needs at least 2 channels to define vertical pairs, got " + std::to_string(h));
    }
    for (double a : channel_angles_) {
        if (!std::isfinite(a)) throw ConfigError("channel angle is not finite");
    }
    const bool descending = channel_angles_[0] > channel_angles_[1];
    for (int r = 0; r + 1 < h; ++r) {
        const bool ok = descending ? channel_angles_[r] > channel_angles_[r + 1]
                                   : channel_angles_[r] < channel_angles_[r + 1];
        if (!ok) {
            throw ConfigError("channel angles are not strictly monotonic at row " + std::to_string(r + 1));
        }
    }
    if (!(azimuth_step_ > 0.0) || !std::isfinite(azimuth_step_)) {
        throw ConfigError("azimuth step must be positive");
    }
    if (width_ < 1) throw ConfigError("sensor width must be at least 1 column");
    const double span = width_ * azimuth_step_;
    if (span > kTwoPi + kRevolutionEps) {
        throw ConfigError("width * azimuth_step exceeds a full revolution");
    }
    if (!std::isfinite(mount_height_)) throw ConfigError("mount height is not finite");
    wraps_ = std::abs(span - kTwoPi) <= std::max(kRevolutionEps, 0.5 * azimuth_step_);

    vertical_alpha_.resize(h - 1);
    vertical_sin_.resize(h - 1);
    vertical_cos_.resize(h - 1);
    for (int r = 0; r + 1 < h; ++r) {
        const double signed_alpha = channel_angles_[r] - channel_angles_[r + 1];
        vertical_alpha_[r] = std::abs(signed_alpha);
        vertical_sin_[r] = std::sin(signed_alpha);
        vertical_cos_[r] = std::cos(signed_alpha);
    }
    channel_tan_.resize(h);
    channel_sin_.resize(h);
    for (int r = 0; r < h; ++r) {
        channel_tan_[r] = std::tan(channel_angles_[r]);
        channel_sin_[r] = std::sin(channel_angles_[r]);
    }

    add_offset({0, 1});
    add_offset({1, 0});
}

SensorModel SensorModel::uniform(int channels, double top_deg, double bottom_deg, double azimuth_step_deg,
                                 double mount_height_m, int width) {
    if (channels < 2) {
        throw ConfigError("sensor needs at least 2 channels to define vertical pairs, got " +
                          std::to_string(channels));
    }
    std::vector<double> angles(channels);
    const double spacing = (bottom_deg - top_deg) / (channels - 1);
    for (int r = 0; r < channels; ++r) angles[r] = deg_to_rad(top_deg + spacing * r);
    if (azimuth_step_deg <= 0.0) throw ConfigError("azimuth step must be positive");
    if (width == 0) width = static_cast<int>(std::lround(360.0 / azimuth_step_deg));
    return SensorModel(std::move(angles), deg_to_rad(azimuth_step_deg), width, mount_height_m);
}

SensorModel SensorModel::hdl64_default() { return uniform(64, 2.0, -23.2, 0.09, 1.73); }

double SensorModel::combined_angle(int row, PixelOffset offset) const {
    const double d1 = channel_angles_[row];
    const double d2 = channel_angles_[row + offset.dy];
    const double dphi = offset.dx * azimuth_step_;
    // Unit beam vectors u(delta, phi); the angle is taken with atan2 for accuracy at small angles.
    const double c1 = std::cos(d1), c2 = std::cos(d2);
    const double ux = c1, uy = 0.0, uz = std::sin(d1);
    const double vx = c2 * std::cos(dphi), vy = c2 * std::sin(dphi), vz = std::sin(d2);
    const double dot = ux * vx + uy * vy + uz * vz;
    const double cx = uy * vz - uz * vy;
    const double cy = uz * vx - ux * vz;
    const double cz = ux * vy - uy * vx;
    return std::atan2(std::sqrt(cx * cx + cy * cy + cz * cz), dot);
}

void SensorModel::add_offset(PixelOffset offset) {
    offset = canonical(offset);
    if (offset.dy == 0 && offset.dx == 0) throw ConfigError("offset (0,0) pairs a cell with itself");
    if (offset.dy >= height() || std::abs(offset.dx) >= width_) {
        throw ConfigError("offset (" + std::to_string(offset.dy) + "," + std::to_string(offset.dx) +
                          ") exceeds the " + std::to_string(height()) + "x" + std::to_string(width_) + " image");
    }
    if (two_cos_.contains(offset)) return;
    std::vector<double> table(height() - offset.dy);
    for (int r = 0; r < static_cast<int>(table.size()); ++r) {
        table[r] = 2.0 * std::cos(combined_angle(r, offset));
    }
    two_cos_.emplace(offset, std::move(table));
}

bool SensorModel::has_pair_constants(PixelOffset offset) const { return two_cos_.contains(canonical(offset)); }

std::span<const double> SensorModel::pair_constants(PixelOffset offset) const {
    const auto it = two_cos_.find(canonical(offset));
    if (it == two_cos_.end()) {
        throw std::out_of_range("no pair constants for offset (" + std::to_string(offset.dy) + "," +
                                std::to_string(offset.dx) + ")");
    }
    return it->second;
}

std::vector<PixelOffset> SensorModel::offsets() const {
    std::vector<PixelOffset> out;
    out.reserve(two_cos_.size());
    for (const auto& [offset, table] : two_cos_) out.push_back(offset);
    return out;
}

SensorModel SensorModel::with_pair_constants(std::span<const PixelOffset> offsets) const {
    SensorModel copy = *this;
    for (PixelOffset o : offsets) copy.add_offset(o);
    return copy;
}

SensorModel precompute_pair_constants(const SensorModel& model, std::span<const PixelOffset> offsets) {
    if (offsets.empty()) throw ConfigError("precompute_pair_constants needs at least one offset");
    return model.with_pair_constants(offsets);
}

SensorModel parse_sensor_model(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("sensor config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("sensor config must be a JSON object");

    try {
        std::vector<double> angles;
        if (doc.contains("vertical_angles_rad")) {
            angles = doc.at("vertical_angles_rad").get<std::vector<double>>();
        } else if (doc.contains("vertical_angles")) {
            for (double deg : doc.at("vertical_angles").get<std::vector<double>>()) angles.push_back(deg_to_rad(deg));
        } else if (doc.contains("vertical_fov")) {
            const auto fov = doc.at("vertical_fov").get<std::vector<double>>();
            if (fov.size() != 2) throw ConfigError("vertical_fov must be a [top, bottom] pair");
            if (!doc.contains("channels")) throw ConfigError("vertical_fov requires `channels`");
            const int channels = doc.at("channels").get<int>();
            if (channels < 2) {
                throw ConfigError("sensor needs at least 2 channels to define vertical pairs, got " +
                                  std::to_string(channels));
            }
            const double spacing = (fov[1] - fov[0]) / (channels - 1);
            for (int r = 0; r < channels; ++r) angles.push_back(deg_to_rad(fov[0] + spacing * r));
        } else {
            throw ConfigError("sensor config needs `vertical_angles` or `vertical_fov`");
        }
        if (doc.contains("channels") && doc.at("channels").get<int>() != static_cast<int>(angles.size())) {
            throw ConfigError("`channels` is " + std::to_string(doc.at("channels").get<int>()) + " but " +
                              std::to_string(angles.size()) + " vertical angles were given");
        }

        double step = 0.0;
        if (doc.contains("azimuth_step_rad")) {
            step = doc.at("azimuth_step_rad").get<double>();
        } else if (doc.contains("azimuth_step_deg")) {
            step = deg_to_rad(doc.at("azimuth_step_deg").get<double>());
        } else {
            throw ConfigError("sensor config needs `azimuth_step_deg`");
        }
        if (!(step > 0.0)) throw ConfigError("azimuth step must be positive");

        int width = doc.value("width", 0);
        if (width == 0) width = static_cast<int>(std::lround(2.0 * kPi / step));
        const double mount = doc.value("mount_height_m", 0.0);

        SensorModel model(std::move(angles), step, width, mount);
        if (doc.contains("offsets")) {
            std::vector<PixelOffset> offsets;
            for (const auto& pair : doc.at("offsets")) {
                if (!pair.is_array() || pair.size() != 2) throw ConfigError("offsets entries must be [dy, dx]");
                offsets.push_back({pair[0].get<int>(), pair[1].get<int>()});
            }
            model = model.with_pair_constants(offsets);
        }
        return model;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed sensor config: ") + e.what());
    }
}

SensorModel load_sensor_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open sensor config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_sensor_model(ss.str());
}

std::string serialize_sensor_model(const SensorModel& model) {
    json doc;
    doc["channels"] = model.height();
    doc["vertical_angles_rad"] = std::vector<double>(model.channel_angles().begin(), model.channel_angles().end());
    doc["azimuth_step_rad"] = model.azimuth_step();
    doc["width"] = model.width();
    doc["mount_height_m"] = model.mount_height();
    json offsets = json::array();
    for (PixelOffset o : model.offsets()) offsets.push_back({o.dy, o.dx});
    doc["offsets"] = offsets;
    return doc.dump(2);
}

}  // namespace rangeseg
