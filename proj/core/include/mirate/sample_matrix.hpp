#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace mirate {

/// Dense row-major real matrix. Rows are samples, columns are dimensions.
/// Also used for weight matrices inside the network.
class SampleMatrix {
public:
    SampleMatrix() = default;
    SampleMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    SampleMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);
    SampleMatrix(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return rows_ == 0; }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const noexcept {
        return {data_.data() + r * cols_, cols_};
    }

    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }

    bool all_finite() const noexcept;

    /// New matrix made of the given rows, in the given order.
    SampleMatrix select_rows(std::span<const std::size_t> indices) const;

    friend bool operator==(const SampleMatrix&, const SampleMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

}  // namespace mirate
