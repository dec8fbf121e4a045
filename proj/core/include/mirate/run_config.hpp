#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mirate/network.hpp"
#include "mirate/scheduler.hpp"

namespace mirate {

enum class PolicyKind { fixed, warmup, decay, dynamic_change, dynamic_change_value, layerwise };
enum class DatasetKind { blobs, mnist };

std::string_view policy_name(PolicyKind p) noexcept;
bool is_dynamic(PolicyKind p) noexcept;

struct BlobsConfig {
    std::size_t n_per_class = 500;
    int classes = 8;
    std::size_t dim = 10;
    double separation = 4.0;
};

struct BatchSizeChange {
    std::size_t batch_size = 0;
    int window = 3;
};

/// Every experimental knob of a run. Built from a key = value file plus overrides
/// through `resolve_config`; the fields below hold already-validated values.
struct RunConfig {
    DatasetKind dataset = DatasetKind::blobs;
    std::filesystem::path mnist_dir;
    BlobsConfig blobs;

    std::vector<std::size_t> hidden{256, 128};
    Activation activation = Activation::relu;
    OptimizerConfig optimizer;

    PolicyKind policy = PolicyKind::dynamic_change_value;
    DatasetPreset preset = DatasetPreset::mnist;
    double lr = 0.01;  // the desired (fixed) learning rate
    double warmup_start = 0.001;
    int warmup_epochs = 5;
    double decay_rate = 0.95;
    PolicyConstants constants;

    std::size_t probe_size = 1000;
    int k = 4;
    int tiling = 1;
    double jitter = 1e-10;
    bool redraw_probe = false;
    bool record_layer_mi = false;

    int epochs = 30;
    std::uint64_t seed = 1;
    std::filesystem::path out_dir = "run";
    int checkpoint_every = 5;

    std::optional<BatchSizeChange> bs_change;
};

using ConfigMap = std::map<std::string, std::string>;

struct ConfigKey {
    std::string_view name;
    std::string_view default_value;
    std::string_view help;
};

/// All recognised keys with their defaults, in documentation order.
const std::vector<ConfigKey>& config_keys();

/// Reads `key = value` lines; `#` starts a comment. Unknown keys raise ConfigError.
ConfigMap parse_config_text(std::istream& is);
ConfigMap parse_config_file(const std::filesystem::path& path);

/// Applies defaults, resolves preset-dependent constants and validates.
/// Throws ConfigError naming the offending key.
RunConfig resolve_config(const ConfigMap& values);

/// Inverse of resolve_config for the keys that matter to reproduce a run.
std::string format_config(const RunConfig& cfg);

}  // namespace mirate
