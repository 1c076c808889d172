#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rangeseg/ccl.hpp"
#include "rangeseg/connectivity.hpp"
#include "rangeseg/sensor.hpp"

namespace rangeseg {

/// Extra pair offsets tested on top of the direct neighbours. Offsets are stored in
/// canonical form (see canonical()), unique, never (0,0).
class MCPattern {
public:
    MCPattern() = default;
    /// Throws ConfigError on (0,0) or duplicates after canonicalisation.
    explicit MCPattern(std::vector<PixelOffset> offsets);

    std::span<const PixelOffset> offsets() const { return offsets_; }
    bool empty() const { return offsets_.empty(); }
    std::size_t size() const { return offsets_.size(); }

    /// Throws ConfigError if any offset does not fit an h x w image.
    void validate_for(int h, int w) const;

private:
    std::vector<PixelOffset> offsets_;
};

/// "none", "mc1", "mc6" or "mc14"; throws ConfigError otherwise.
MCPattern preset_pattern(std::string_view name);

/// Parses "dy,dx;dy,dx;..." as used by --mc-offsets.
MCPattern parse_offsets(std::string_view text);

/// Disjoint-set forest over cluster labels 1..n, with path halving and union by size.
class ClusterUnion {
public:
    explicit ClusterUnion(int n = 0) { reset(n); }

    void reset(int n);
    std::int32_t find(std::int32_t label);
    /// Returns true if two distinct sets were joined.
    bool unite(std::int32_t a, std::int32_t b);
    int merged_count() const { return merged_; }
    int size() const { return static_cast<int>(parent_.size()) - 1; }

private:
    std::vector<std::int32_t> parent_;
    std::vector<std::int32_t> rank_size_;
    int merged_ = 0;
};

struct MapConnectionScratch {
    ClusterUnion forest;
    std::vector<std::int32_t> roots;
    std::vector<std::int32_t> renumber;
};

/// For every offset (dy,dx) and every cell pair ((r,c), (r+dy, c+dx)) whose cells both
/// carry labels from different sets and lie within the threshold, unite the two labels.
/// Columns wrap for full-revolution sensors; otherwise out-of-range pairs are skipped.
/// Background cells are never touched. Output is renumbered densely in scan order.
/// `model` must hold pair constants for every offset in `pattern`.
LabelImage apply_map_connections(const RangeImage& ri, const LabelImage& li, const SensorModel& model,
                                 const DistanceThreshold& threshold, const MCPattern& pattern);
void apply_map_connections_inplace(const RangeImage& ri, LabelImage& li, const SensorModel& model,
                                   const DistanceThreshold& threshold, const MCPattern& pattern,
                                   MapConnectionScratch& scratch);

}  // namespace rangeseg
