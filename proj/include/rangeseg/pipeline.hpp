#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "rangeseg/ccl.hpp"
#include "rangeseg/connectivity.hpp"
#include "rangeseg/ground.hpp"
#include "rangeseg/io_formats.hpp"
#include "rangeseg/map_connections.hpp"
#include "rangeseg/range_image.hpp"
#include "rangeseg/sensor.hpp"

namespace rangeseg {

struct PipelineConfig {
    SensorModel sensor = SensorModel::hdl64_default();
    GroundParams ground;
    bool ground_removal = true;
    DistanceThreshold threshold;
    MCPattern pattern;
    int min_cluster_points = 100;

    /// Throws ConfigError when a parameter is out of range or an MC offset does not fit the sensor.
    void validate() const;
};

enum class Stage : int { kProject, kGround, kConnectivity, kCcl, kMc, kFilter, kBackproject };
inline constexpr int kStageCount = 7;
std::string_view stage_name(Stage stage);

/// Wall time per stage of one frame, milliseconds.
struct TimingRecord {
    std::array<double, kStageCount> stage_ms{};
    double total_ms = 0.0;

    double& operator[](Stage s) { return stage_ms[static_cast<int>(s)]; }
    double operator[](Stage s) const { return stage_ms[static_cast<int>(s)]; }
    /// connectivity + ccl + mc + filter
    double clustering_ms() const;
    double stage_sum_ms() const;
};

struct SegOutput {
    /// Instance label per source point, 0 = background. Empty for native range images.
    std::vector<std::int32_t> point_labels;
    LabelImage label_image;

    int cluster_count() const { return label_image.cluster_count; }
};

class StageClock;

/// One frame at a time: project -> ground -> connectivity -> lattice + CCL -> map
/// connections -> small-cluster filter -> back-projection. Every stage buffer is owned
/// by the instance and reused across frames. Not thread safe; use one instance per thread.
class Pipeline {
public:
    explicit Pipeline(PipelineConfig cfg);

    const PipelineConfig& config() const { return cfg_; }
    /// The configured sensor with pair constants for every MC offset.
    const SensorModel& sensor() const { return cfg_.sensor; }

    const SegOutput& segment(std::span<const Point3f> cloud, TimingRecord* timing = nullptr);
    /// Skips projection and back-projection.
    const SegOutput& segment_range_image(const RangeImage& ri, TimingRecord* timing = nullptr);

    const RangeImage& range_image() const { return range_image_; }
    const GroundMask& ground_mask() const { return ground_mask_; }
    const ConnectivityImages& connectivity() const { return connectivity_; }
    const LatticeImage& lattice() const { return lattice_; }
    const ProjectionStats& projection_stats() const { return projection_stats_; }

private:
    void run_stages(const RangeImage& ri, StageClock& clock);

    PipelineConfig cfg_;
    RangeImage range_image_;
    ProjectionStats projection_stats_;
    HeightImage height_;
    GroundMask ground_mask_;
    ConnectivityImages connectivity_;
    Grid<std::uint8_t> presence_;
    LatticeImage lattice_;
    CclScratch ccl_scratch_;
    MapConnectionScratch mc_scratch_;
    std::vector<std::int32_t> filter_scratch_;
    SegOutput output_;
};

SegOutput segment_frame(const FrameRecord& frame, const PipelineConfig& cfg, TimingRecord* timing = nullptr);

/// Segments independent clouds on `threads` worker threads (one Pipeline each).
/// The result does not depend on the thread count.
std::vector<SegOutput> segment_batch(std::span<const PointCloud> clouds, const PipelineConfig& cfg, int threads = 1);

}  // namespace rangeseg
