#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rangeseg/connectivity.hpp"
#include "rangeseg/grid.hpp"

namespace rangeseg {

/// (2H-1) x 2W interleaving of presence and connection bits:
///   (2r, 2c)   presence of (r, c)
///   (2r, 2c+1) horizontal connection (r,c)-(r,c+1); column 2W-1 is the seam connector to column 0
///   (2r+1, 2c) vertical connection (r,c)-(r+1,c)
///   odd/odd    always 0
/// Rows are circular: (i, 2W-1) and (i, 0) are 4-neighbours.
using LatticeImage = Grid<std::uint8_t>;

/// Cells with a return that survived ground removal.
Grid<std::uint8_t> presence_mask(const RangeImage& ri, const GroundMask& gm);
void presence_mask_into(const RangeImage& ri, const GroundMask& gm, Grid<std::uint8_t>& out);

LatticeImage build_lattice(const Grid<std::uint8_t>& presence, const ConnectivityImages& conn);
void build_lattice_into(const Grid<std::uint8_t>& presence, const ConnectivityImages& conn, LatticeImage& out);

/// Instance labels per range-image cell; 0 = background, clusters numbered 1..cluster_count.
struct LabelImage {
    Grid<std::int32_t> labels;
    int cluster_count = 0;
    /// cluster_sizes[l] = cell count of label l; cluster_sizes[0] is always 0.
    std::vector<std::int32_t> cluster_sizes{0};

    bool operator==(const LabelImage&) const = default;
};

/// Reusable work buffers for label_components_into.
struct CclScratch {
    LatticeImage unvisited;
    std::vector<std::int32_t> stack;
};

/// 4-connected flood fill on the lattice, one component at a time, with an explicit
/// stack. Labels are read off the presence cells and numbered in row-major order of
/// first encounter.
LabelImage label_components(const LatticeImage& lattice);
void label_components_into(const LatticeImage& lattice, LabelImage& out, CclScratch& scratch);

/// Send clusters smaller than `min_points` to background and renumber the rest densely,
/// preserving their relative order.
LabelImage filter_small(const LabelImage& li, int min_points = 100);
void filter_small_inplace(LabelImage& li, int min_points, std::vector<std::int32_t>& scratch);

/// Rewrite every label l to group_of[l] (0 = background) and renumber the groups densely in
/// row-major order of first appearance. group_of must have cluster_count + 1 entries with
/// group_of[0] == 0; `scratch` is reused between calls.
void remap_labels(LabelImage& li, std::span<const std::int32_t> group_of, std::vector<std::int32_t>& scratch);

}  // namespace rangeseg
