#include "rangeseg/bench.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#ifdef __linux__
#include <pthread.h>
#include <sched.h>
#endif

#include <json.hpp>

#include "rangeseg/io_formats.hpp"
#include "rangeseg/synth.hpp"

namespace rangeseg {

namespace {

void pin_current_thread() {
#ifdef __linux__
    cpu_set_t allowed;
    CPU_ZERO(&allowed);
    if (sched_getaffinity(0, sizeof(allowed), &allowed) != 0) return;
    for (int cpu = 0; cpu < CPU_SETSIZE; ++cpu) {
        if (!CPU_ISSET(cpu, &allowed)) continue;
        cpu_set_t one;
        CPU_ZERO(&one);
        CPU_SET(cpu, &one);
        pthread_setaffinity_np(pthread_self(), sizeof(one), &one);
        return;
    }
#endif
}

void run_frame(Pipeline& pipeline, const BenchFrame& frame, TimingRecord* timing) {
    if (frame.native) {
        pipeline.segment_range_image(*frame.native, timing);
    } else {
        pipeline.segment(frame.cloud, timing);
    }
}

}  // namespace

double percentile(std::span<const double> sorted, double q) {
    const auto n = sorted.size();
    const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
    return sorted[std::clamp<std::size_t>(rank, 1, n) - 1];
}

BenchSummary summarize_timings(std::span<const TimingRecord> records) {
    BenchSummary s;
    s.frames = records.size();
    if (records.empty()) return s;

    std::vector<double> ms;
    ms.reserve(records.size());
    double total = 0.0, clustering = 0.0;
    for (const auto& r : records) {
        ms.push_back(r.total_ms);
        total += r.total_ms;
        clustering += r.clustering_ms();
        for (int i = 0; i < kStageCount; ++i) s.stage_mean_ms[i] += r.stage_ms[i];
    }
    const double n = static_cast<double>(records.size());
    for (double& v : s.stage_mean_ms) v /= n;
    std::sort(ms.begin(), ms.end());
    s.mean_ms = total / n;
    s.clustering_mean_ms = clustering / n;
    s.median_ms = percentile(ms, 0.5);
    s.p99_ms = percentile(ms, 0.99);
    s.min_ms = ms.front();
    s.max_ms = ms.back();
    s.stability_ratio = s.median_ms > 0.0 ? s.p99_ms / s.median_ms : 0.0;

    auto hz = [](double frame_ms) { return frame_ms > 0.0 ? 1000.0 / frame_ms : 0.0; };
    s.mean_hz = hz(s.mean_ms);
    s.max_hz = hz(s.min_ms);
    s.min_hz = hz(s.max_ms);
    s.median_hz = hz(s.median_ms);
    // Slow quartile of frame time is the low quartile of rate.
    s.q1_hz = hz(percentile(ms, 0.75));
    s.q3_hz = hz(percentile(ms, 0.25));
    return s;
}

BenchResult bench_run(std::span<const BenchFrame> frames, const PipelineConfig& cfg, const BenchOptions& options) {
    BenchResult result;
    if (frames.empty() || options.repetitions <= 0) return result;

    if (options.threads <= 1) {
        if (options.pin_core) pin_current_thread();
        Pipeline pipeline(cfg);
        for (int i = 0; i < options.warmup; ++i) run_frame(pipeline, frames[i % frames.size()], nullptr);
        result.records.reserve(frames.size() * options.repetitions);
        for (int rep = 0; rep < options.repetitions; ++rep) {
            for (const auto& frame : frames) {
                TimingRecord t;
                run_frame(pipeline, frame, &t);
                result.records.push_back(t);
            }
        }
    } else {
        result.parallel = true;
        const int threads = options.threads;
        std::vector<std::vector<TimingRecord>> per_thread(threads);
        auto work = [&](int worker) {
            Pipeline pipeline(cfg);
            for (int i = 0; i < options.warmup; ++i) run_frame(pipeline, frames[i % frames.size()], nullptr);
            for (int rep = 0; rep < options.repetitions; ++rep) {
                for (std::size_t i = worker; i < frames.size(); i += threads) {
                    TimingRecord t;
                    run_frame(pipeline, frames[i], &t);
                    per_thread[worker].push_back(t);
                }
            }
        };
        std::vector<std::thread> pool;
        for (int i = 0; i < threads; ++i) pool.emplace_back(work, i);
        for (auto& th : pool) th.join();
        for (auto& recs : per_thread) result.records.insert(result.records.end(), recs.begin(), recs.end());
    }
    result.summary = summarize_timings(result.records);
    return result;
}

std::vector<BenchFrame> synthetic_bench_frames(const SensorModel& model, int count, std::uint64_t base_seed) {
    std::vector<BenchFrame> frames;
    frames.reserve(std::max(count, 0));
    for (int i = 0; i < count; ++i) {
        auto rendered = synth::render(synth::street_scene(base_seed + i), model);
        frames.push_back({std::move(rendered.cloud), std::move(rendered.image)});
    }
    return frames;
}

std::vector<BenchFrame> load_bench_frames(const std::filesystem::path& dir, int limit) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".bin") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (limit > 0 && files.size() > static_cast<std::size_t>(limit)) files.resize(limit);
    std::vector<BenchFrame> frames;
    frames.reserve(files.size());
    for (const auto& f : files) frames.push_back({read_velodyne_bin(f), std::nullopt});
    return frames;
}

std::string summary_to_json(const BenchSummary& s) {
    nlohmann::json doc;
    doc["frames"] = s.frames;
    doc["mean_ms"] = s.mean_ms;
    doc["median_ms"] = s.median_ms;
    doc["p99_ms"] = s.p99_ms;
    doc["min_ms"] = s.min_ms;
    doc["max_ms"] = s.max_ms;
    doc["clustering_mean_ms"] = s.clustering_mean_ms;
    doc["stability_ratio"] = s.stability_ratio;
    doc["hz"] = {{"mean", s.mean_hz}, {"min", s.min_hz},  {"q1", s.q1_hz},
                 {"median", s.median_hz}, {"q3", s.q3_hz}, {"max", s.max_hz}};
    nlohmann::json stages;
    for (int i = 0; i < kStageCount; ++i) stages[std::string(stage_name(static_cast<Stage>(i)))] = s.stage_mean_ms[i];
    doc["stage_mean_ms"] = stages;
    return doc.dump(2);
}

}  // namespace rangeseg
