#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rangeseg/pipeline.hpp"

namespace rangeseg {

/// A benchmark input, decoded before timing starts. Frames with a native range image
/// skip projection.
struct BenchFrame {
    PointCloud cloud;
    std::optional<RangeImage> native;
};

struct BenchOptions {
    int repetitions = 1;  ///< passes over the frame set
    int warmup = 5;       ///< untimed frame executions before measuring
    int threads = 1;      ///< >1 runs disjoint frames concurrently; not a headline figure
    bool pin_core = true; ///< pin the single-threaded run to one CPU where supported
};

struct BenchSummary {
    std::size_t frames = 0;
    double mean_ms = 0.0;
    double median_ms = 0.0;
    double p99_ms = 0.0;
    double min_ms = 0.0;
    double max_ms = 0.0;
    double clustering_mean_ms = 0.0;
    std::array<double, kStageCount> stage_mean_ms{};
    // Per-frame rates, for box plots.
    double mean_hz = 0.0;  ///< 1000 / mean_ms
    double min_hz = 0.0;
    double q1_hz = 0.0;
    double median_hz = 0.0;
    double q3_hz = 0.0;
    double max_hz = 0.0;
    /// p99 / median frame time.
    double stability_ratio = 0.0;
};

struct BenchResult {
    std::vector<TimingRecord> records;
    BenchSummary summary;
    bool parallel = false;
};

/// Nearest-rank percentile, q in [0, 1]. `sorted` must be ascending and non-empty.
double percentile(std::span<const double> sorted, double q);

BenchSummary summarize_timings(std::span<const TimingRecord> records);

BenchResult bench_run(std::span<const BenchFrame> frames, const PipelineConfig& cfg, const BenchOptions& options);

/// Street scenes rendered natively at the sensor's resolution, seeds base_seed .. base_seed + count - 1.
std::vector<BenchFrame> synthetic_bench_frames(const SensorModel& model, int count, std::uint64_t base_seed = 1);

/// Every *.bin under `dir` (recursively, sorted), at most `limit` when > 0.
std::vector<BenchFrame> load_bench_frames(const std::filesystem::path& dir, int limit = 0);

std::string summary_to_json(const BenchSummary& summary);

}  // namespace rangeseg
