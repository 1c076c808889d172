#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rangeseg/bench.hpp"
#include "rangeseg/errors.hpp"
#include "rangeseg/eval.hpp"
#include "rangeseg/io_formats.hpp"
#include "rangeseg/pipeline.hpp"
#include "rangeseg/synth.hpp"

namespace fs = std::filesystem;
using namespace rangeseg;

namespace {

struct CommonArgs {
    std::string sensor;
    double ground_theta_deg = 10.0;
    double keep_above_z = 0.7;
    bool no_ground_removal = false;
    double distance_threshold_m = 0.8;
    int min_cluster_points = 100;
    std::string mc_preset = "none";
    std::string mc_offsets;
};

PipelineConfig make_config(const CommonArgs& a) {
    PipelineConfig cfg;
    if (!a.sensor.empty()) cfg.sensor = load_sensor_model(a.sensor);
    cfg.ground.theta_deg = a.ground_theta_deg;
    cfg.ground.keep_above_z = a.keep_above_z;
    cfg.ground_removal = !a.no_ground_removal;
    cfg.threshold = DistanceThreshold(a.distance_threshold_m);
    cfg.min_cluster_points = a.min_cluster_points;
    cfg.pattern = a.mc_offsets.empty() ? preset_pattern(a.mc_preset) : parse_offsets(a.mc_offsets);
    cfg.validate();
    return cfg;
}

std::vector<fs::path> scan_inputs(const fs::path& in) {
    if (!fs::exists(in)) throw DataError("input not found: " + in.string());
    if (!fs::is_directory(in)) return {in};
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(in)) {
        if (e.is_regular_file() && e.path().extension() == ".bin") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

// "00-10", "00,02,05" or a mix such as "00-03,08".
std::vector<std::string> parse_sequences(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string part;
    auto fmt = [](int v) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%02d", v);
        return std::string(buf);
    };
    while (std::getline(ss, part, ',')) {
        if (part.empty()) continue;
        try {
            const auto dash = part.find('-');
            if (dash == std::string::npos) {
                out.push_back(fmt(std::stoi(part)));
            } else {
                const int lo = std::stoi(part.substr(0, dash));
                const int hi = std::stoi(part.substr(dash + 1));
                if (hi < lo) throw ConfigError("bad sequence range: " + part);
                for (int s = lo; s <= hi; ++s) out.push_back(fmt(s));
            }
        } catch (const std::logic_error&) {
            throw ConfigError("bad sequence list: " + text);
        }
    }
    if (out.empty()) throw ConfigError("empty sequence list");
    return out;
}

std::string fmt_metric(const std::optional<double>& v) {
    if (!v) return "n/a";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", 100.0 * *v);
    return buf;
}

int run_segment(const CommonArgs& common, const std::string& input, const std::string& output, bool ply) {
    const auto cfg = make_config(common);
    const auto inputs = scan_inputs(input);
    const bool dir_mode = fs::is_directory(input);
    if (dir_mode) fs::create_directories(output);

    Pipeline pipeline(cfg);
    for (const auto& in : inputs) {
        const auto cloud = read_velodyne_bin(in);
        TimingRecord t;
        const auto& out = pipeline.segment(cloud, &t);
        fs::path label_path = dir_mode ? fs::path(output) / in.filename().replace_extension(".label") : fs::path(output);
        write_instance_labels(label_path, out.point_labels);
        if (ply) write_colored_ply(fs::path(label_path).replace_extension(".ply"), cloud, out.point_labels);
        std::printf("%s: %zu points, %d clusters, %.2f ms\n", in.filename().c_str(), cloud.size(), out.cluster_count(),
                    t.total_ms);
    }
    return 0;
}

int run_evaluate(const CommonArgs& common, const std::string& dataset, const std::string& sequences,
                 const std::string& ground_mode, const std::string& report_path, const std::string& ground_classes,
                 int max_frames) {
    auto cfg = make_config(common);
    EvalConfig ecfg;
    if (ground_mode == "gt") {
        ecfg.ground_mode = GroundMode::kGtGroundRemoved;
        cfg.ground_removal = false;
    } else {
        ecfg.ground_mode = GroundMode::kAlgorithmic;
    }
    const auto ground_ids = load_ground_classes(ground_classes.empty() ? default_ground_classes_path() : fs::path(ground_classes));
    if (!fs::is_directory(dataset)) throw DataError("dataset directory not found: " + dataset);

    Pipeline pipeline(cfg);
    EvalAccumulator acc(ecfg);
    PointCloud kept;
    std::vector<GtLabel> kept_labels;
    for (const auto& seq : parse_sequences(sequences)) {
        const auto files = list_sequence(dataset, seq);
        std::size_t n = files.scans.size();
        if (max_frames > 0) n = std::min<std::size_t>(n, max_frames);
        std::size_t used = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!files.labels[i]) continue;
            const auto cloud = read_velodyne_bin(files.scans[i]);
            const auto labels = read_semantickitti_label(*files.labels[i], cloud.size());
            kept.clear();
            kept_labels.clear();
            for (std::size_t p = 0; p < cloud.size(); ++p) {
                if (ecfg.ground_mode == GroundMode::kGtGroundRemoved && ground_ids.count(labels[p].semantic)) continue;
                kept.push_back(cloud[p]);
                kept_labels.push_back(labels[p]);
            }
            const auto& out = pipeline.segment(kept);
            const auto gt = gt_instance_ids(kept_labels);
            acc.add_frame(match_instances(gt, out.point_labels, ecfg));
            ++used;
        }
        std::fprintf(stderr, "sequence %s: %zu labelled frames\n", seq.c_str(), used);
    }
    const auto report = acc.report();
    if (report.frames == 0) throw DataError("no labelled frames found under " + dataset);

    std::printf("%-10s %8s %8s %8s %8s %8s\n", "config", "IoU_mu", "P_mu", "P_0.5", "P_0.75", "P_0.95");
    const std::string name = common.mc_offsets.empty() ? common.mc_preset : "custom";
    std::printf("%-10s %8s %8s %8s %8s %8s\n", name.c_str(), fmt_metric(report.iou_mean).c_str(),
                fmt_metric(report.precision_mean).c_str(), fmt_metric(report.precision_for(0.5)).c_str(),
                fmt_metric(report.precision_for(0.75)).c_str(), fmt_metric(report.precision_for(0.95)).c_str());
    std::printf("%zu instances over %zu frames\n", report.per_instance.size(), report.frames);
    if (!report_path.empty()) {
        std::ofstream f(report_path);
        if (!f) throw DataError("cannot write report: " + report_path);
        f << report_to_json(report, true) << '\n';
    }
    return 0;
}

int run_bench(const CommonArgs& common, const std::string& dataset, int frames, const BenchOptions& options,
              const std::string& json_path) {
    const auto cfg = make_config(common);
    const auto corpus = dataset.empty() ? synthetic_bench_frames(cfg.sensor, frames) : load_bench_frames(dataset, frames);
    if (corpus.empty()) throw DataError("no frames to benchmark");
    const auto result = bench_run(corpus, cfg, options);
    const auto& s = result.summary;
    std::printf("frames %zu%s\n", s.frames, result.parallel ? " (parallel, not a single-core figure)" : "");
    std::printf("frame ms  mean %.3f  median %.3f  p99 %.3f  min %.3f  max %.3f\n", s.mean_ms, s.median_ms, s.p99_ms,
                s.min_ms, s.max_ms);
    std::printf("rate Hz   mean %.1f  min %.1f  q1 %.1f  median %.1f  q3 %.1f  max %.1f\n", s.mean_hz, s.min_hz,
                s.q1_hz, s.median_hz, s.q3_hz, s.max_hz);
    std::printf("clustering-only mean %.3f ms, p99/median %.3f\n", s.clustering_mean_ms, s.stability_ratio);
    for (int i = 0; i < kStageCount; ++i) {
        std::printf("  %-13s %.3f ms\n", std::string(stage_name(static_cast<Stage>(i))).c_str(), s.stage_mean_ms[i]);
    }
    if (!json_path.empty()) {
        std::ofstream f(json_path);
        if (!f) throw DataError("cannot write " + json_path);
        f << summary_to_json(s) << '\n';
    }
    return 0;
}

int run_synth(const CommonArgs& common, const std::string& kind, const std::string& out_dir, int frames,
              std::uint64_t seed) {
    const auto cfg = make_config(common);
    const fs::path seq = fs::path(out_dir) / "sequences" / "00";
    fs::create_directories(seq / "velodyne");
    fs::create_directories(seq / "labels");
    for (int i = 0; i < frames; ++i) {
        const auto frame = synth::render(synth::fixture(kind, cfg.sensor, seed + i), cfg.sensor);
        char name[16];
        std::snprintf(name, sizeof name, "%06d", i);
        write_velodyne_bin(seq / "velodyne" / (std::string(name) + ".bin"), frame.cloud);
        write_semantickitti_label(seq / "labels" / (std::string(name) + ".label"), frame.point_labels);
    }
    std::ofstream(fs::path(out_dir) / "sensor.json") << serialize_sensor_model(cfg.sensor) << '\n';
    std::printf("wrote %d %s frame(s) to %s\n", frames, kind.c_str(), seq.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Range-image instance segmentation for rotating Lidar scans"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "TOML/INI file holding any of the options below");

    CommonArgs common;
    app.add_option("--sensor", common.sensor, "Sensor model JSON (default: 64 channels, 0.09 deg azimuth)");
    app.add_option("--ground-theta-deg", common.ground_theta_deg, "Max ground slope, degrees")->capture_default_str();
    app.add_option("--keep-above-z", common.keep_above_z, "Cells above this ground-frame height are never ground, m")
        ->capture_default_str();
    app.add_flag("--no-ground-removal", common.no_ground_removal, "Skip ground extraction");
    app.add_option("--distance-threshold-m", common.distance_threshold_m, "Connection distance, m")->capture_default_str();
    app.add_option("--min-cluster-points", common.min_cluster_points, "Smallest kept cluster")->capture_default_str();
    app.add_option("--mc-preset", common.mc_preset, "Map-connection preset")
        ->check(CLI::IsMember({"none", "mc1", "mc6", "mc14"}))
        ->capture_default_str();
    app.add_option("--mc-offsets", common.mc_offsets, "Custom offsets \"dy,dx;dy,dx;...\" (overrides the preset)");

    auto* seg = app.add_subcommand("segment", "Segment a .bin scan or a directory of scans");
    std::string seg_in, seg_out;
    bool seg_ply = false;
    seg->add_option("input", seg_in, "Velodyne .bin file or directory")->required();
    seg->add_option("-o,--output", seg_out, "Label file (or directory for directory input)")->required();
    seg->add_flag("--ply", seg_ply, "Also write a coloured PLY next to each label file");

    auto* ev = app.add_subcommand("evaluate", "Score against SemanticKITTI instance labels");
    std::string ev_dataset, ev_sequences = "00-10", ev_mode = "gt", ev_report, ev_classes;
    int ev_max = 0;
    ev->add_option("--dataset", ev_dataset, "Dataset root containing sequences/")->required();
    ev->add_option("--sequences", ev_sequences, "e.g. 00-10 or 00,02")->capture_default_str();
    ev->add_option("--ground-mode", ev_mode, "gt: drop GT ground classes; algo: extract ground")
        ->check(CLI::IsMember({"gt", "algo"}))
        ->capture_default_str();
    ev->add_option("--report", ev_report, "Write a JSON report");
    ev->add_option("--ground-classes", ev_classes, "JSON with the ground semantic classes");
    ev->add_option("--max-frames", ev_max, "Frames per sequence, 0 = all");

    auto* bench = app.add_subcommand("bench", "Time the pipeline");
    std::string bench_dataset, bench_json;
    int bench_frames = 100;
    BenchOptions bench_opts;
    bool bench_no_pin = false;
    bench->add_option("--dataset", bench_dataset, "Directory of .bin scans (default: synthetic street scenes)");
    bench->add_option("--frames", bench_frames, "Frames to load or synthesize")->capture_default_str();
    bench->add_option("--repetitions", bench_opts.repetitions, "Passes over the frames")->capture_default_str();
    bench->add_option("--warmup", bench_opts.warmup, "Untimed frames")->capture_default_str();
    bench->add_option("--threads", bench_opts.threads, "Concurrent pipelines")->capture_default_str();
    bench->add_flag("--no-pin", bench_no_pin, "Do not pin to one core");
    bench->add_option("--json", bench_json, "Write the summary as JSON");

    auto* syn = app.add_subcommand("synth", "Write synthetic scenes with golden labels");
    std::string syn_kind = "boxes", syn_out;
    int syn_frames = 1;
    std::uint64_t syn_seed = 1;
    syn->add_option("--kind", syn_kind, "plane, wall, elevated, boxes, occluder or street")->capture_default_str();
    syn->add_option("-o,--output", syn_out, "Output dataset root")->required();
    syn->add_option("--frames", syn_frames, "Number of frames")->capture_default_str();
    syn->add_option("--seed", syn_seed, "Seed of the first frame")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (seg->parsed()) return run_segment(common, seg_in, seg_out, seg_ply);
        if (ev->parsed()) return run_evaluate(common, ev_dataset, ev_sequences, ev_mode, ev_report, ev_classes, ev_max);
        if (bench->parsed()) {
            bench_opts.pin_core = !bench_no_pin;
            return run_bench(common, bench_dataset, bench_frames, bench_opts, bench_json);
        }
        if (syn->parsed()) return run_synth(common, syn_kind, syn_out, syn_frames, syn_seed);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
