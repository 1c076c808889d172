#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rangeseg/io_formats.hpp"

namespace rangeseg {

enum class GroundMode {
    kGtGroundRemoved,  ///< ground-class points removed using GT semantics before clustering
    kAlgorithmic,      ///< full cloud, ground removed by extract_ground
};

struct EvalConfig {
    int min_gt_points = 100;
    /// 0.50, 0.55, ..., 0.95
    std::vector<double> iou_bins = default_iou_bins();
    GroundMode ground_mode = GroundMode::kGtGroundRemoved;

    static std::vector<double> default_iou_bins();
    /// Throws ConfigError unless bins are strictly increasing within (0, 1].
    void validate() const;
};

/// Scored GT instance. cluster == 0 means not found (no overlap, or lost a duplicate claim).
struct InstanceMatch {
    std::uint32_t gt_id = 0;
    std::int32_t cluster = 0;
    std::int64_t gt_points = 0;
    double iou = 0.0;

    bool operator==(const InstanceMatch&) const = default;
};

/// |A n B| / |A u B| over point index sets (duplicates ignored).
double instance_iou(std::span<const std::uint32_t> gt_points, std::span<const std::uint32_t> cluster_points);

/// GT instance key per point: the full label word when the instance id is nonzero, else 0.
std::vector<std::uint32_t> gt_instance_ids(std::span<const GtLabel> labels);

/// Matches each GT instance with at least `min_gt_points` points to the predicted cluster
/// sharing the most points with it (lower cluster id on ties). When several GT instances
/// pick the same cluster only the one with the highest IoU keeps it (lower GT id on ties);
/// the rest score 0. Results are ordered by GT id.
///
/// Throws std::logic_error if any GT instance has IoU > 0.5 with two clusters, which the
/// Jaccard index rules out.
std::vector<InstanceMatch> match_instances(std::span<const std::uint32_t> gt, std::span<const std::int32_t> pred,
                                           const EvalConfig& cfg);

/// Fraction of matches with IoU >= x; nullopt when there are no matches.
std::optional<double> precision_at(std::span<const InstanceMatch> matches, double x);

struct EvalReport {
    std::optional<double> iou_mean;
    std::optional<double> precision_mean;
    std::vector<std::pair<double, double>> precision_at;  // (bin, P_bin), bins ascending
    std::vector<InstanceMatch> per_instance;
    std::size_t frames = 0;
    std::size_t frames_without_instances = 0;

    /// P at the bin closest to x, if any bin lies within 1e-9.
    std::optional<double> precision_for(double x) const;
};

/// Pools per-instance results over frames and sequences.
class EvalAccumulator {
public:
    explicit EvalAccumulator(EvalConfig cfg);

    void add_frame(std::span<const InstanceMatch> matches);
    EvalReport report() const;

private:
    EvalConfig cfg_;
    std::vector<InstanceMatch> pooled_;
    std::size_t frames_ = 0;
    std::size_t empty_frames_ = 0;
};

EvalReport summarize(std::span<const InstanceMatch> matches, const EvalConfig& cfg);

std::string report_to_json(const EvalReport& report, bool include_instances = false);

}  // namespace rangeseg
