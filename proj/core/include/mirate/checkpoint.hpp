#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mirate/network.hpp"
#include "mirate/scheduler.hpp"

namespace mirate {

/// Everything needed to continue a run after `completed_epochs` epochs.
struct RunCheckpoint {
    int completed_epochs = 0;
    std::string policy;
    PolicyConstants constants;
    std::vector<SchedulerState> states;  // one, or one per layer
    double ixy = 0.0;
    OptimizerConfig optimizer;
    Network network;
};

/// Binary, little-endian, with a trailing FNV-1a checksum. Identical inputs
/// produce identical bytes.
void save_checkpoint(const std::filesystem::path& path, const RunCheckpoint& ckpt);

/// Throws ParseError (io, bad_magic, truncated or corrupt) on any damage.
RunCheckpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace mirate
