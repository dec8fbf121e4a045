#pragma once

#include <vector>

#include "mirate/sample_matrix.hpp"

namespace mirate {

/// Train/test split with features scaled into [0, 1].
struct Dataset {
    SampleMatrix train_x;
    std::vector<int> train_labels;
    SampleMatrix test_x;
    std::vector<int> test_labels;
    int class_count = 0;

    /// Throws ContractError if counts, labels or feature ranges are inconsistent.
    void validate() const;
};

}  // namespace mirate
