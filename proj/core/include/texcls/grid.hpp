#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <texcls/error.hpp>

namespace texcls {

/// Dense row-major 2-D array.
template <typename T>
class Grid {
public:
    Grid() = default;
    Grid(std::size_t rows, std::size_t cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Grid(std::size_t rows, std::size_t cols, std::vector<T> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (data_.size() != rows_ * cols_) {
            throw ContractError("grid data size does not match its dimensions");
        }
    }

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
    [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

    T& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    const T& operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    /// Element at (r, c) with coordinates clamped into range (edge replication).
    [[nodiscard]] const T& clamped(std::ptrdiff_t r, std::ptrdiff_t c) const noexcept {
        const auto last_r = static_cast<std::ptrdiff_t>(rows_) - 1;
        const auto last_c = static_cast<std::ptrdiff_t>(cols_) - 1;
        r = r < 0 ? 0 : (r > last_r ? last_r : r);
        c = c < 0 ? 0 : (c > last_c ? last_c : c);
        return data_[static_cast<std::size_t>(r) * cols_ + static_cast<std::size_t>(c)];
    }

    [[nodiscard]] std::span<T> values() noexcept { return data_; }
    [[nodiscard]] std::span<const T> values() const noexcept { return data_; }
    [[nodiscard]] std::span<const T> row(std::size_t r) const noexcept {
        return std::span<const T>(data_).subspan(r * cols_, cols_);
    }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using IntensityGrid = Grid<double>;

} // namespace texcls
