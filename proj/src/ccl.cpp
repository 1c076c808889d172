#include "rangeseg/ccl.hpp"

#include <algorithm>
#include <cassert>

namespace rangeseg {

void presence_mask_into(const RangeImage& ri, const GroundMask& gm, Grid<std::uint8_t>& out) {
    out.reset(ri.rows(), ri.cols(), 0);
    const auto ranges = ri.ranges.data();
    const auto mask = gm.data();
    auto p = out.data();
    for (std::size_t i = 0; i < ranges.size(); ++i) p[i] = ranges[i] > 0.0f && !mask[i];
}

Grid<std::uint8_t> presence_mask(const RangeImage& ri, const GroundMask& gm) {
    Grid<std::uint8_t> out;
    presence_mask_into(ri, gm, out);
    return out;
}

void build_lattice_into(const Grid<std::uint8_t>& presence, const ConnectivityImages& conn, LatticeImage& out) {
    const int h = presence.rows(), w = presence.cols();
    out.reset(h > 0 ? 2 * h - 1 : 0, 2 * w, 0);
    for (int r = 0; r < h; ++r) {
        const auto p = presence.row(r);
        const auto hz = conn.horizontal.row(r);
        auto even = out.row(2 * r);
        for (int c = 0; c < w; ++c) {
            even[2 * c] = p[c];
            even[2 * c + 1] = hz[c];
        }
        if (r + 1 < h) {
            const auto vt = conn.vertical.row(r);
            auto odd = out.row(2 * r + 1);
            for (int c = 0; c < w; ++c) odd[2 * c] = vt[c];
        }
    }
}

LatticeImage build_lattice(const Grid<std::uint8_t>& presence, const ConnectivityImages& conn) {
    LatticeImage out;
    build_lattice_into(presence, conn, out);
    return out;
}

void label_components_into(const LatticeImage& lattice, LabelImage& out, CclScratch& scratch) {
    const int lh = lattice.rows(), lw = lattice.cols();
    const int h = (lh + 1) / 2, w = lw / 2;
    out.labels.reset(h, w, 0);
    out.cluster_count = 0;
    out.cluster_sizes.assign(1, 0);
    if (lh == 0 || lw == 0) return;

    scratch.unvisited = lattice;
    auto open = scratch.unvisited.data();
    auto& stack = scratch.stack;
    stack.clear();

    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const std::int32_t seed = (2 * r) * lw + 2 * c;
            if (!open[seed]) continue;

            const std::int32_t label = ++out.cluster_count;
            std::int32_t size = 0;
            open[seed] = 0;
            stack.push_back(seed);
            while (!stack.empty()) {
                const std::int32_t cell = stack.back();
                stack.pop_back();
                const int i = cell / lw, j = cell % lw;
                if ((i & 1) == 0 && (j & 1) == 0) {
                    out.labels(i / 2, j / 2) = label;
                    ++size;
                }
                const std::int32_t row_base = cell - j;
                const std::int32_t left = row_base + (j == 0 ? lw - 1 : j - 1);
                const std::int32_t right = row_base + (j == lw - 1 ? 0 : j + 1);
                if (open[left]) {
                    open[left] = 0;
                    stack.push_back(left);
                }
                if (open[right]) {
                    open[right] = 0;
                    stack.push_back(right);
                }
                if (i > 0 && open[cell - lw]) {
                    open[cell - lw] = 0;
                    stack.push_back(cell - lw);
                }
                if (i + 1 < lh && open[cell + lw]) {
                    open[cell + lw] = 0;
                    stack.push_back(cell + lw);
                }
            }
            out.cluster_sizes.push_back(size);
        }
    }
}

LabelImage label_components(const LatticeImage& lattice) {
    LabelImage out;
    CclScratch scratch;
    label_components_into(lattice, out, scratch);
    return out;
}

void remap_labels(LabelImage& li, std::span<const std::int32_t> group_of, std::vector<std::int32_t>& scratch) {
    assert(group_of.size() == static_cast<std::size_t>(li.cluster_count) + 1 && group_of[0] == 0);
    const std::int32_t max_group = group_of.empty() ? 0 : *std::max_element(group_of.begin(), group_of.end());
    // scratch[g] = new dense id of group g, 0 until first seen.
    scratch.assign(static_cast<std::size_t>(max_group) + 1, 0);
    std::int32_t next = 0;
    li.cluster_sizes.assign(1, 0);
    for (std::int32_t& l : li.labels.data()) {
        if (l == 0) continue;
        const std::int32_t g = group_of[l];
        if (g == 0) {
            l = 0;
            continue;
        }
        std::int32_t& id = scratch[g];
        if (id == 0) {
            id = ++next;
            li.cluster_sizes.push_back(0);
        }
        l = id;
        ++li.cluster_sizes[id];
    }
    li.cluster_count = next;
}

void filter_small_inplace(LabelImage& li, int min_points, std::vector<std::int32_t>& scratch) {
    std::vector<std::int32_t> keep(static_cast<std::size_t>(li.cluster_count) + 1, 0);
    for (int l = 1; l <= li.cluster_count; ++l) keep[l] = li.cluster_sizes[l] >= min_points ? l : 0;
    remap_labels(li, keep, scratch);
}

LabelImage filter_small(const LabelImage& li, int min_points) {
    LabelImage out = li;
    std::vector<std::int32_t> scratch;
    filter_small_inplace(out, min_points, scratch);
    return out;
}

}  // namespace rangeseg
