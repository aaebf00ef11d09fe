#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "csistat/error.hpp"

namespace csistat {

/**
 * @brief Dense row-major matrix.
 *
 * Rows are frames, columns are sub-carriers everywhere in this toolkit.
 * Storage is a single contiguous vector so rows can be handed out as spans.
 */
template <typename T>
class Matrix {
public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    Matrix(std::size_t rows, std::size_t cols, std::vector<T> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (data_.size() != rows_ * cols_) {
            throw ValidationError("matrix: data size does not match rows*cols");
        }
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return data_.empty(); }

    T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const T& operator()(std::size_t r, std::size_t c) const {
        return data_[r * cols_ + c];
    }

    std::span<T> row(std::size_t r) {
        return std::span<T>(data_.data() + r * cols_, cols_);
    }
    std::span<const T> row(std::size_t r) const {
        return std::span<const T>(data_.data() + r * cols_, cols_);
    }

    std::vector<T>& data() noexcept { return data_; }
    const std::vector<T>& data() const noexcept { return data_; }

    bool operator==(const Matrix& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

/**
 * @brief Pairwise (cascade) summation.
 *
 * Keeps the accumulated rounding error logarithmic in the input length,
 * which is what lets the normalization stages promise 1e-12 absolute
 * tolerances on experiments as large as 20k x 1024.
 */
inline double pairwise_sum(std::span<const double> values) {
    if (values.size() <= 16) {
        double acc = 0.0;
        for (double v : values) acc += v;
        return acc;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace csistat
