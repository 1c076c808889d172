#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace rangeseg {

/// Dense row-major 2D buffer.
template <typename T>
class Grid {
public:
    Grid() = default;
    Grid(int rows, int cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    T& operator()(int r, int c) {
        assert(r >= 0 && r < rows_ && c >= 0 && c < cols_);
        return data_[static_cast<std::size_t>(r) * cols_ + c];
    }
    const T& operator()(int r, int c) const {
        assert(r >= 0 && r < rows_ && c >= 0 && c < cols_);
        return data_[static_cast<std::size_t>(r) * cols_ + c];
    }

    std::span<T> row(int r) { return {data_.data() + static_cast<std::size_t>(r) * cols_, static_cast<std::size_t>(cols_)}; }
    std::span<const T> row(int r) const {
        return {data_.data() + static_cast<std::size_t>(r) * cols_, static_cast<std::size_t>(cols_)};
    }

    std::span<T> data() { return data_; }
    std::span<const T> data() const { return data_; }

    /// Reshape and overwrite every element; keeps capacity so per-frame reuse does not allocate.
    void reset(int rows, int cols, T fill = T{}) {
        rows_ = rows;
        cols_ = cols;
        data_.assign(static_cast<std::size_t>(rows) * cols, fill);
    }

    bool operator==(const Grid&) const = default;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<T> data_;
};

}  // namespace rangeseg
