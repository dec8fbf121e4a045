#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "mirate/dataset.hpp"
#include "mirate/records.hpp"
#include "mirate/run_config.hpp"

namespace mirate {

struct RunResult {
    std::vector<EpochRecord> records;
    std::vector<DecisionRow> decisions;
    double ixy = 0.0;
    std::filesystem::path final_checkpoint;
};

/// Loads MNIST or synthesises blobs as configured.
Dataset load_dataset(const RunConfig& cfg);

/// Network spec implied by the configuration and the dataset shape.
NetworkSpec network_spec_for(const RunConfig& cfg, const Dataset& data);

/// Full training run. Per epoch: train every mini-batch at the current rate(s),
/// evaluate, measure IHYLL (and per-layer IHY when needed) on the fixed probe
/// subset, then step the configured policy; the new rate applies to the next
/// epoch. IXY is estimated once before epoch 0.
///
/// Writes epochs.csv, decisions.csv, timing.csv, config.txt and checkpoints
/// (ckpt_<completed>.bin every `checkpoint_every` epochs plus final.bin) to
/// cfg.out_dir. Pass a preloaded dataset to skip loading.
RunResult run_experiment(const RunConfig& cfg, const Dataset* data = nullptr);

/// Continues a run from a checkpoint. Restores network, momentum buffers and
/// scheduler state; applies cfg.bs_change (new batch size and value-only
/// window) if given, then trains the remaining epochs up to cfg.epochs.
/// Throws ContractError if the checkpoint does not match the configuration.
RunResult resume_with_batch_size(const RunConfig& cfg, const std::filesystem::path& checkpoint,
                                 const Dataset* data = nullptr);

}  // namespace mirate
