#include "rangeseg/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "rangeseg/errors.hpp"

namespace rangeseg {

std::vector<double> EvalConfig::default_iou_bins() {
    std::vector<double> bins;
    for (int k = 10; k <= 19; ++k) bins.push_back(k / 20.0);
    return bins;
}

void EvalConfig::validate() const {
    if (min_gt_points < 1) throw ConfigError("min_gt_points must be >= 1");
    if (iou_bins.empty()) throw ConfigError("at least one IoU bin is required");
    for (std::size_t i = 0; i < iou_bins.size(); ++i) {
        if (!(iou_bins[i] > 0.0 && iou_bins[i] <= 1.0)) throw ConfigError("IoU bins must lie in (0, 1]");
        if (i > 0 && !(iou_bins[i] > iou_bins[i - 1])) throw ConfigError("IoU bins must be strictly increasing");
    }
}

double instance_iou(std::span<const std::uint32_t> gt_points, std::span<const std::uint32_t> cluster_points) {
    std::vector<std::uint32_t> a(gt_points.begin(), gt_points.end());
    std::vector<std::uint32_t> b(cluster_points.begin(), cluster_points.end());
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    std::size_t inter = 0;
    for (std::size_t i = 0, j = 0; i < a.size() && j < b.size();) {
        if (a[i] < b[j]) {
            ++i;
        } else if (b[j] < a[i]) {
            ++j;
        } else {
            ++inter;
            ++i;
            ++j;
        }
    }
    const std::size_t uni = a.size() + b.size() - inter;
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<std::uint32_t> gt_instance_ids(std::span<const GtLabel> labels) {
    std::vector<std::uint32_t> ids(labels.size());
    std::transform(labels.begin(), labels.end(), ids.begin(),
                   [](const GtLabel& l) { return l.instance != 0 ? l.word() : 0u; });
    return ids;
}

std::vector<InstanceMatch> match_instances(std::span<const std::uint32_t> gt, std::span<const std::int32_t> pred,
                                           const EvalConfig& cfg) {
    if (gt.size() != pred.size()) {
        throw DataError("match_instances: " + std::to_string(gt.size()) + " GT labels but " +
                        std::to_string(pred.size()) + " predictions");
    }
    std::map<std::uint32_t, std::int64_t> gt_size;
    std::unordered_map<std::int32_t, std::int64_t> cluster_size;
    // (gt id, cluster) -> shared point count
    std::map<std::pair<std::uint32_t, std::int32_t>, std::int64_t> overlap;
    for (std::size_t i = 0; i < gt.size(); ++i) {
        if (gt[i] != 0) ++gt_size[gt[i]];
        if (pred[i] != 0) ++cluster_size[pred[i]];
        if (gt[i] != 0 && pred[i] != 0) ++overlap[{gt[i], pred[i]}];
    }

    auto iou_of = [&](std::uint32_t g, std::int32_t c, std::int64_t inter) {
        const std::int64_t uni = gt_size.at(g) + cluster_size.at(c) - inter;
        return static_cast<double>(inter) / static_cast<double>(uni);
    };

    std::vector<InstanceMatch> matches;
    auto it = overlap.begin();
    for (const auto& [g, size] : gt_size) {
        while (it != overlap.end() && it->first.first < g) ++it;
        InstanceMatch m{g, 0, size, 0.0};
        std::int64_t best_inter = 0;
        int above_half = 0;
        for (; it != overlap.end() && it->first.first == g; ++it) {
            const auto [c, inter] = std::pair{it->first.second, it->second};
            if (iou_of(g, c, inter) > 0.5) ++above_half;
            if (inter > best_inter || (inter == best_inter && c < m.cluster)) {
                best_inter = inter;
                m.cluster = c;
            }
        }
        if (above_half > 1) {
            throw std::logic_error("GT instance " + std::to_string(g) + " has IoU > 0.5 with " +
                                   std::to_string(above_half) + " clusters");
        }
        if (size < cfg.min_gt_points) continue;
        if (m.cluster != 0) m.iou = iou_of(g, m.cluster, best_inter);
        matches.push_back(m);
    }

    // Duplicate claims: the highest IoU keeps the cluster, the others are not found.
    std::unordered_map<std::int32_t, std::size_t> owner;
    for (std::size_t i = 0; i < matches.size(); ++i) {
        const std::int32_t c = matches[i].cluster;
        if (c == 0) continue;
        const auto [pos, inserted] = owner.try_emplace(c, i);
        if (inserted) continue;
        InstanceMatch& holder = matches[pos->second];
        // matches are in ascending GT id, so an equal IoU keeps the earlier (lower) id.
        if (matches[i].iou > holder.iou) {
            holder.cluster = 0;
            holder.iou = 0.0;
            pos->second = i;
        } else {
            matches[i].cluster = 0;
            matches[i].iou = 0.0;
        }
    }
    return matches;
}

std::optional<double> precision_at(std::span<const InstanceMatch> matches, double x) {
    if (matches.empty()) return std::nullopt;
    const auto hits = std::count_if(matches.begin(), matches.end(), [x](const InstanceMatch& m) { return m.iou >= x; });
    return static_cast<double>(hits) / static_cast<double>(matches.size());
}

std::optional<double> EvalReport::precision_for(double x) const {
    for (const auto& [bin, p] : precision_at) {
        if (std::abs(bin - x) < 1e-9) return p;
    }
    return std::nullopt;
}

EvalReport summarize(std::span<const InstanceMatch> matches, const EvalConfig& cfg) {
    EvalReport report;
    report.per_instance.assign(matches.begin(), matches.end());
    if (matches.empty()) {
        std::cerr << "warning: no GT instance reached " << cfg.min_gt_points << " points; metrics undefined\n";
        return report;
    }
    double iou_sum = 0.0;
    for (const auto& m : matches) iou_sum += m.iou;
    report.iou_mean = iou_sum / static_cast<double>(matches.size());
    double p_sum = 0.0;
    for (double bin : cfg.iou_bins) {
        const double p = *precision_at(matches, bin);
        report.precision_at.emplace_back(bin, p);
        p_sum += p;
    }
    report.precision_mean = p_sum / static_cast<double>(cfg.iou_bins.size());
    return report;
}

EvalAccumulator::EvalAccumulator(EvalConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

void EvalAccumulator::add_frame(std::span<const InstanceMatch> matches) {
    ++frames_;
    if (matches.empty()) ++empty_frames_;
    pooled_.insert(pooled_.end(), matches.begin(), matches.end());
}

EvalReport EvalAccumulator::report() const {
    EvalReport r = summarize(pooled_, cfg_);
    r.frames = frames_;
    r.frames_without_instances = empty_frames_;
    return r;
}

std::string report_to_json(const EvalReport& report, bool include_instances) {
    nlohmann::json doc;
    doc["frames"] = report.frames;
    doc["frames_without_instances"] = report.frames_without_instances;
    doc["instances"] = report.per_instance.size();
    doc["iou_mean"] = report.iou_mean ? nlohmann::json(*report.iou_mean) : nlohmann::json(nullptr);
    doc["precision_mean"] = report.precision_mean ? nlohmann::json(*report.precision_mean) : nlohmann::json(nullptr);
    nlohmann::json bins = nlohmann::json::array();
    for (const auto& [bin, p] : report.precision_at) bins.push_back({{"iou", bin}, {"precision", p}});
    doc["precision_at"] = bins;
    if (include_instances) {
        nlohmann::json inst = nlohmann::json::array();
        for (const auto& m : report.per_instance) {
            inst.push_back({{"gt_id", m.gt_id}, {"cluster", m.cluster}, {"gt_points", m.gt_points}, {"iou", m.iou}});
        }
        doc["per_instance"] = inst;
    }
    return doc.dump(2);
}

}  // namespace rangeseg
