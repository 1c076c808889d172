#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "rangeseg/range_image.hpp"

namespace rangeseg {

/// One SemanticKITTI label word: low 16 bits semantic class, high 16 bits instance id.
struct GtLabel {
    std::uint16_t semantic = 0;
    std::uint16_t instance = 0;

    static GtLabel from_word(std::uint32_t word) {
        return {static_cast<std::uint16_t>(word & 0xFFFFu), static_cast<std::uint16_t>(word >> 16)};
    }
    std::uint32_t word() const { return static_cast<std::uint32_t>(semantic) | (static_cast<std::uint32_t>(instance) << 16); }

    bool operator==(const GtLabel&) const = default;
};

struct FrameRecord {
    PointCloud cloud;
    std::optional<std::vector<GtLabel>> gt_labels;
    int frame_id = 0;
};

/// KITTI velodyne scan: little-endian float32 (x, y, z, intensity) records, no header.
/// Intensity is discarded. An empty file yields an empty cloud. Throws DataError on an
/// unreadable file or a trailing partial record (message names the byte offset).
PointCloud read_velodyne_bin(const std::filesystem::path& path);
/// Writes intensity 0 for every point.
void write_velodyne_bin(const std::filesystem::path& path, std::span<const Point3f> cloud);

/// One little-endian uint32 per point. Throws DataError if the file is truncated or its
/// point count differs from `expected_count`.
std::vector<GtLabel> read_semantickitti_label(const std::filesystem::path& path, std::size_t expected_count);
void write_semantickitti_label(const std::filesystem::path& path, std::span<const GtLabel> labels);

/// Instance labels in the SemanticKITTI encoding (label in the high 16 bits, semantic 0).
/// Throws DataError if a label does not fit 16 bits or is negative.
void write_instance_labels(const std::filesystem::path& path, std::span<const std::int32_t> labels);
std::vector<std::int32_t> read_instance_labels(const std::filesystem::path& path, std::size_t expected_count);

using Rgb = std::array<std::uint8_t, 3>;
inline constexpr Rgb kBackgroundColor{128, 128, 128};

/// Deterministic colour of a cluster label; background (0) is gray.
Rgb label_color(std::int32_t label);

/// ASCII PLY with x y z and per-vertex RGB. Throws DataError on a length mismatch or an
/// unwritable path.
void write_colored_ply(const std::filesystem::path& path, std::span<const Point3f> cloud,
                       std::span<const std::int32_t> labels);

/// Semantic ids treated as ground when evaluating with GT ground removal. The file is JSON:
/// {"ground_classes": {"road": 40, ...}}.
std::set<std::uint16_t> load_ground_classes(const std::filesystem::path& path);
std::filesystem::path default_ground_classes_path();

/// sequences/NN/velodyne/*.bin sorted by name, with the matching labels/*.label when present.
struct SequenceFiles {
    std::vector<std::filesystem::path> scans;
    std::vector<std::optional<std::filesystem::path>> labels;
};
SequenceFiles list_sequence(const std::filesystem::path& dataset_root, const std::string& sequence);

}  // namespace rangeseg
