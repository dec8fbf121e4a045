#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mirate/scheduler.hpp"

namespace mirate {

/// One completed epoch. `lr` is the rate used during the epoch (the output
/// layer's rate in layer-wise runs); `lr_next` and `branch` describe the
/// decision taken after it.
struct EpochRecord {
    int epoch = 0;
    double lr = 0.0;
    double lr_next = 0.0;
    std::string branch;
    double train_loss = 0.0;
    double train_acc = 0.0;
    double test_loss = 0.0;
    double test_acc = 0.0;
    double ihyll = 0.0;
    double ixy = 0.0;
    std::vector<double> layer_lrs;
    std::vector<double> ihy_per_layer;
    // Wall-clock bookkeeping; written to the timing CSV only, so that metric
    // CSVs stay byte-identical across runs.
    double train_ms = 0.0;
    double eval_ms = 0.0;
    double probe_ms = 0.0;
};

/// One scheduler decision. layer = -1 for network-wide decisions.
struct DecisionRow {
    int epoch = 0;
    int layer = -1;
    std::string policy;
    LrDecision decision;
};

/// Metric CSV: header then one row per epoch, reals at 9 significant digits.
/// Columns: epoch,lr,lr_next,branch,train_loss,train_acc,test_loss,test_acc,
/// ihyll,ixy, then lr_layer<i> and ihy_layer<i> when present.
void emit_csv(std::ostream& os, std::span<const EpochRecord> records);
void emit_csv(const std::filesystem::path& path, std::span<const EpochRecord> records);

/// Parses a metric CSV written by emit_csv. Throws ParseError on malformed input.
std::vector<EpochRecord> read_csv(std::istream& is);
std::vector<EpochRecord> read_csv(const std::filesystem::path& path);

/// epoch,train_ms,eval_ms,probe_ms
void emit_timing_csv(std::ostream& os, std::span<const EpochRecord> records);

/// epoch,layer,policy,branch,d1,d2,lr_next at 17 significant digits, so that
/// decisions replay exactly.
void emit_decisions_csv(std::ostream& os, std::span<const DecisionRow> rows);
std::vector<DecisionRow> read_decisions_csv(std::istream& is);

/// Metrics exported by emit_comparison, in output order.
const std::vector<std::string>& comparison_metrics();

/// Long-format merge of several runs' epochs.csv: run_name,epoch,metric,value.
/// Every run gets a row for every epoch seen in any run; missing values are NA.
void emit_comparison(std::ostream& os, std::span<const std::filesystem::path> run_dirs);

}  // namespace mirate
