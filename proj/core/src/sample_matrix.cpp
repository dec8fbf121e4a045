#include "mirate/sample_matrix.hpp"

#include <algorithm>
#include <cmath>

#include "mirate/errors.hpp"

namespace mirate {

SampleMatrix::SampleMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

SampleMatrix::SampleMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw ContractError("SampleMatrix: data size does not match rows x cols");
    }
}

SampleMatrix::SampleMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw ContractError("SampleMatrix: ragged initializer");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

bool SampleMatrix::all_finite() const noexcept {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

SampleMatrix SampleMatrix::select_rows(std::span<const std::size_t> indices) const {
    SampleMatrix out(indices.size(), cols_);
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] >= rows_) throw ContractError("select_rows: index out of range");
        const auto src = row(indices[i]);
        std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
}

}  // namespace mirate
