#include "rangeseg/map_connections.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <set>

#include "rangeseg/errors.hpp"

namespace rangeseg {

MCPattern::MCPattern(std::vector<PixelOffset> offsets) {
    std::set<PixelOffset> seen;
    for (PixelOffset o : offsets) {
        const PixelOffset c = canonical(o);
        if (c.dy == 0 && c.dx == 0) throw ConfigError("map connection offset (0,0) is not allowed");
        if (!seen.insert(c).second) {
            throw ConfigError("duplicate map connection offset (" + std::to_string(c.dy) + "," +
                              std::to_string(c.dx) + ")");
        }
        offsets_.push_back(c);
    }
}

void MCPattern::validate_for(int h, int w) const {
    for (PixelOffset o : offsets_) {
        if (o.dy >= h || std::abs(o.dx) >= w) {
            throw ConfigError("map connection offset (" + std::to_string(o.dy) + "," + std::to_string(o.dx) +
                              ") does not fit a " + std::to_string(h) + "x" + std::to_string(w) + " image");
        }
    }
}

MCPattern preset_pattern(std::string_view name) {
    if (name == "none") return MCPattern{};
    if (name == "mc1") return MCPattern({{0, 2}, {2, 0}});
    if (name == "mc6") return MCPattern({{0, 2}, {2, 0}, {0, 3}, {3, 0}, {2, 2}, {3, 3}});
    if (name == "mc14") {
        std::vector<PixelOffset> diagonal;
        for (int k = 2; k <= 15; ++k) diagonal.push_back({k, k});
        return MCPattern(std::move(diagonal));
    }
    throw ConfigError("unknown map connection preset '" + std::string(name) + "' (expected none, mc1, mc6, mc14)");
}

MCPattern parse_offsets(std::string_view text) {
    std::vector<PixelOffset> offsets;
    auto parse_int = [&](std::string_view s) {
        while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
        while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
        int v = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
            throw ConfigError("bad map connection offset list '" + std::string(text) + "'");
        }
        return v;
    };
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find(';', pos);
        if (end == std::string_view::npos) end = text.size();
        const std::string_view item = text.substr(pos, end - pos);
        if (item.find_first_not_of(' ') != std::string_view::npos) {
            const std::size_t comma = item.find(',');
            if (comma == std::string_view::npos) {
                throw ConfigError("bad map connection offset list '" + std::string(text) + "'");
            }
            offsets.push_back({parse_int(item.substr(0, comma)), parse_int(item.substr(comma + 1))});
        }
        pos = end + 1;
    }
    return MCPattern(std::move(offsets));
}

void ClusterUnion::reset(int n) {
    parent_.resize(static_cast<std::size_t>(n) + 1);
    rank_size_.assign(static_cast<std::size_t>(n) + 1, 1);
    for (int i = 0; i <= n; ++i) parent_[i] = i;
    merged_ = 0;
}

std::int32_t ClusterUnion::find(std::int32_t label) {
    while (parent_[label] != label) {
        parent_[label] = parent_[parent_[label]];
        label = parent_[label];
    }
    return label;
}

bool ClusterUnion::unite(std::int32_t a, std::int32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_size_[a] < rank_size_[b] || (rank_size_[a] == rank_size_[b] && b < a)) std::swap(a, b);
    parent_[b] = a;
    rank_size_[a] += rank_size_[b];
    ++merged_;
    return true;
}

void apply_map_connections_inplace(const RangeImage& ri, LabelImage& li, const SensorModel& model,
                                   const DistanceThreshold& threshold, const MCPattern& pattern,
                                   MapConnectionScratch& scratch) {
    const int h = li.labels.rows(), w = li.labels.cols();
    for (PixelOffset o : pattern.offsets()) {
        if (o.dy < h && std::abs(o.dx) < w) model.pair_constants(o);
    }
    if (pattern.empty() || li.cluster_count < 2) return;
    const double limit = threshold.d_max_sq();
    auto& forest = scratch.forest;
    forest.reset(li.cluster_count);

    for (PixelOffset o : pattern.offsets()) {
        if (o.dy >= h || std::abs(o.dx) >= w) continue;
        const auto constants = model.pair_constants(o);
        for (int r = 0; r + o.dy < h; ++r) {
            const auto labels_a = li.labels.row(r);
            const auto labels_b = li.labels.row(r + o.dy);
            const auto ranges_a = ri.ranges.row(r);
            const auto ranges_b = ri.ranges.row(r + o.dy);
            const double k = constants[r];
            for (int c = 0; c < w; ++c) {
                const std::int32_t la = labels_a[c];
                if (la == 0) continue;
                int c2 = c + o.dx;
                if (c2 < 0 || c2 >= w) {
                    if (!model.wraps()) continue;
                    c2 = c2 < 0 ? c2 + w : c2 - w;
                }
                const std::int32_t lb = labels_b[c2];
                if (lb == 0 || lb == la) continue;
                if (pair_distance_sq(ranges_a[c], ranges_b[c2], k) > limit) continue;
                forest.unite(la, lb);
            }
        }
    }
    if (forest.merged_count() == 0) return;

    auto& roots = scratch.roots;
    roots.resize(static_cast<std::size_t>(li.cluster_count) + 1);
    roots[0] = 0;
    for (int l = 1; l <= li.cluster_count; ++l) roots[l] = forest.find(l);
    remap_labels(li, roots, scratch.renumber);
}

LabelImage apply_map_connections(const RangeImage& ri, const LabelImage& li, const SensorModel& model,
                                 const DistanceThreshold& threshold, const MCPattern& pattern) {
    LabelImage out = li;
    MapConnectionScratch scratch;
    apply_map_connections_inplace(ri, out, model, threshold, pattern, scratch);
    return out;
}

}  // namespace rangeseg
