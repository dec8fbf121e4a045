#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace mirate {

/// Bounds and gains of the MI-driven learning-rate rules.
struct PolicyConstants {
    double lr_min = 0.001;
    double lr_max = 0.1;
    double epsilon = 0.01;
    double gamma1 = 0.1;
    double gamma2 = 0.1;
    double gamma3 = 0.1;

    /// Throws ParameterError on lr_min > lr_max, non-positive bounds/epsilon,
    /// or negative gains.
    void validate() const;

    friend bool operator==(const PolicyConstants&, const PolicyConstants&) = default;
};

enum class DatasetPreset { mnist, cifar10 };

inline constexpr double kDefaultEpsilon = 0.01;
inline constexpr double kDefaultGamma3 = 0.1;

/// Gains for the change-only rule: MNIST (0.1, 1), CIFAR-10 (0.003, 0.003).
/// Bounds default to desired_lr / 10 and desired_lr * 10.
PolicyConstants change_policy_defaults(DatasetPreset preset, double desired_lr);

/// Gains for the change-and-value rule: MNIST (0.1, 0.1), CIFAR-10 (0.001, 0.001),
/// gamma3 = 0.1 for both.
PolicyConstants change_value_policy_defaults(DatasetPreset preset, double desired_lr);

/// Last two observed IHYLL (or per-layer IHY) values, in nats.
struct MiHistory {
    std::size_t count = 0;  // 0, 1 or 2
    double latest = 0.0;    // value at t-1
    double previous = 0.0;  // value at t-2

    void push(double value) noexcept;
    bool full() const noexcept { return count >= 2; }

    friend bool operator==(const MiHistory&, const MiHistory&) = default;
};

struct SchedulerState {
    double lr = 0.0;
    MiHistory history;
    std::optional<double> ixy;
    int epoch = 0;
    int value_only_window = 0;

    friend bool operator==(const SchedulerState&, const SchedulerState&) = default;
};

enum class Branch {
    warm_hold,                        // history not yet full: hold at lr_min
    degenerate_hold,                  // zero/invalid denominator: hold at current lr
    increase_on_change,
    decrease_on_saturation,
    decrease_on_violation,            // d1 <= 0 with d2 > epsilon
    decrease_on_violation_saturated,  // d1 <= 0 with d2 <= epsilon
    clamped_min,
    clamped_max,
    scheduled,                        // fixed / warm-up / decay baselines
};

std::string_view branch_name(Branch b) noexcept;
std::optional<Branch> parse_branch(std::string_view name) noexcept;

struct LrDecision {
    double lr_next = 0.0;
    Branch branch = Branch::warm_hold;
    /// 1 - IHYLL/IXY; NaN when the rule does not use it.
    double d1 = std::numeric_limits<double>::quiet_NaN();
    /// Relative change |IHYLL_{t-1} - IHYLL_{t-2}| / IHYLL_{t-1}; NaN before the
    /// history fills.
    double d2 = std::numeric_limits<double>::quiet_NaN();
    /// Set when the change condition was forced by the value-only window.
    bool value_only = false;

    friend bool operator==(const LrDecision&, const LrDecision&) = default;
};

/// Values at or below this are substituted before any ratio is formed.
inline constexpr double kMiFloor = 1e-12;

/// Relative-change rule:
///   delta = |h1 - h2| / h1
///   delta >  eps -> min(lr_max, lr + gamma1 * delta)
///   delta <= eps -> max(lr_min, lr - gamma2 * delta)
/// Requires lr within [lr_min, lr_max] (ContractError otherwise).
LrDecision policy1_step(const SchedulerState& state, const PolicyConstants& c);

/// Change-and-value rule against the reference IXY:
///   d1 = 1 - h1 / IXY, d2 = |h1 - h2| / h1
///   d1 > 0, d2 >  eps -> min(lr_max, lr + gamma1 * d1)
///   d1 > 0, d2 <= eps -> max(lr_min, lr - gamma2 * d1)
///   d1 <= 0           -> max(lr_min, lr + gamma3 * d1)
/// Throws ContractError if IXY is unset or lr is out of bounds.
LrDecision policy2_step(const SchedulerState& state, const PolicyConstants& c);

/// Change-and-value rule with the change condition forced true while the
/// value-only window is open; plain policy2_step once it is exhausted.
LrDecision bs_change_step(const SchedulerState& state, const PolicyConstants& c);

/// One change-and-value decision per layer, each driven by that layer's IHY.
/// `ihy_per_layer` are the newest observations; states are not modified.
std::vector<LrDecision> layerwise_step(std::span<const SchedulerState> states,
                                       std::span<const double> ihy_per_layer,
                                       const PolicyConstants& c);

/// State with `value` appended to its MI history.
SchedulerState observe(SchedulerState state, double value);

/// State after applying a decision: lr = lr_next, epoch + 1, and the
/// value-only window shortened if the decision consumed it.
SchedulerState advance(SchedulerState state, const LrDecision& d);

LrDecision baseline_fixed(double lr0, int epoch);

/// Linear ramp from lr0 at epoch 0 to lr_target at warmup_epochs, flat after.
LrDecision baseline_warmup(double lr0, double lr_target, int warmup_epochs, int epoch);

/// lr0 * decay_rate^epoch.
LrDecision baseline_decay(double lr0, double decay_rate, int epoch);

}  // namespace mirate
