#include "rangeseg/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <thread>

#include "rangeseg/errors.hpp"

namespace rangeseg {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point from, Clock::time_point to) {
    return std::chrono::duration<double, std::milli>(to - from).count();
}

}  // namespace

// Accumulates the time since the previous mark into one stage.
class StageClock {
public:
    explicit StageClock(TimingRecord& record) : record_(record), start_(Clock::now()), last_(start_) {}

    void mark(Stage stage) {
        const auto now = Clock::now();
        record_[stage] += elapsed_ms(last_, now);
        last_ = now;
    }
    void finish() { record_.total_ms += elapsed_ms(start_, Clock::now()); }

private:
    TimingRecord& record_;
    Clock::time_point start_;
    Clock::time_point last_;
};

void PipelineConfig::validate() const {
    ground.validate();
    if (min_cluster_points < 1) throw ConfigError("min_cluster_points must be >= 1");
    pattern.validate_for(sensor.height(), sensor.width());
}

std::string_view stage_name(Stage stage) {
    switch (stage) {
        case Stage::kProject: return "project";
        case Stage::kGround: return "ground";
        case Stage::kConnectivity: return "connectivity";
        case Stage::kCcl: return "ccl";
        case Stage::kMc: return "mc";
        case Stage::kFilter: return "filter";
        case Stage::kBackproject: return "backproject";
    }
    return "?";
}

double TimingRecord::clustering_ms() const {
    return (*this)[Stage::kConnectivity] + (*this)[Stage::kCcl] + (*this)[Stage::kMc] + (*this)[Stage::kFilter];
}

double TimingRecord::stage_sum_ms() const {
    double sum = 0.0;
    for (double v : stage_ms) sum += v;
    return sum;
}

Pipeline::Pipeline(PipelineConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    if (!cfg_.pattern.empty()) cfg_.sensor = cfg_.sensor.with_pair_constants(cfg_.pattern.offsets());
}

void Pipeline::run_stages(const RangeImage& ri, StageClock& clock) {
    if (cfg_.ground_removal) {
        height_image_into(ri, cfg_.sensor, height_, HeightFrame::kGround);
        extract_ground_into(ri, height_, cfg_.sensor, cfg_.ground, ground_mask_);
    } else {
        invalid_mask_into(ri, ground_mask_);
    }
    clock.mark(Stage::kGround);

    build_connectivity_into(ri, ground_mask_, cfg_.sensor, cfg_.threshold, connectivity_);
    clock.mark(Stage::kConnectivity);

    presence_mask_into(ri, ground_mask_, presence_);
    build_lattice_into(presence_, connectivity_, lattice_);
    label_components_into(lattice_, output_.label_image, ccl_scratch_);
    clock.mark(Stage::kCcl);

    apply_map_connections_inplace(ri, output_.label_image, cfg_.sensor, cfg_.threshold, cfg_.pattern, mc_scratch_);
    clock.mark(Stage::kMc);

    filter_small_inplace(output_.label_image, cfg_.min_cluster_points, filter_scratch_);
    clock.mark(Stage::kFilter);
}

const SegOutput& Pipeline::segment(std::span<const Point3f> cloud, TimingRecord* timing) {
    TimingRecord local;
    TimingRecord& t = timing ? *timing : local;
    t = TimingRecord{};

    StageClock clock(t);
    project_into(cloud, cfg_.sensor, range_image_, &projection_stats_);
    clock.mark(Stage::kProject);
    run_stages(range_image_, clock);
    labels_to_points_into(output_.label_image.labels, range_image_, output_.point_labels);
    clock.mark(Stage::kBackproject);
    clock.finish();
    return output_;
}

const SegOutput& Pipeline::segment_range_image(const RangeImage& ri, TimingRecord* timing) {
    TimingRecord local;
    TimingRecord& t = timing ? *timing : local;
    t = TimingRecord{};

    StageClock clock(t);
    output_.point_labels.clear();
    run_stages(ri, clock);
    clock.finish();
    return output_;
}

SegOutput segment_frame(const FrameRecord& frame, const PipelineConfig& cfg, TimingRecord* timing) {
    Pipeline pipeline(cfg);
    return pipeline.segment(frame.cloud, timing);
}

std::vector<SegOutput> segment_batch(std::span<const PointCloud> clouds, const PipelineConfig& cfg, int threads) {
    cfg.validate();
    std::vector<SegOutput> out(clouds.size());
    threads = std::max(1, std::min<int>(threads, static_cast<int>(clouds.size())));
    auto work = [&](int worker) {
        Pipeline pipeline(cfg);
        for (std::size_t i = worker; i < clouds.size(); i += threads) out[i] = pipeline.segment(clouds[i]);
    };
    if (threads == 1) {
        work(0);
        return out;
    }
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(work, i);
    for (auto& th : pool) th.join();
    return out;
}

}  // namespace rangeseg
