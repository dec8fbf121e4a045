#include "mirate/scheduler.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

#include "mirate/errors.hpp"

namespace mirate {

void PolicyConstants::validate() const {
    if (!(lr_min > 0.0)) throw ParameterError("lr_min must be positive");
    if (!(lr_max > 0.0)) throw ParameterError("lr_max must be positive");
    if (lr_min > lr_max) throw ParameterError("lr_min must not exceed lr_max");
    if (!(epsilon > 0.0)) throw ParameterError("epsilon must be positive");
    if (!(gamma1 >= 0.0) || !(gamma2 >= 0.0) || !(gamma3 >= 0.0)) {
        throw ParameterError("gamma constants must be nonnegative");
    }
}

PolicyConstants change_policy_defaults(DatasetPreset preset, double desired_lr) {
    PolicyConstants c;
    c.lr_min = desired_lr / 10.0;
    c.lr_max = desired_lr * 10.0;
    c.epsilon = kDefaultEpsilon;
    c.gamma3 = kDefaultGamma3;
    switch (preset) {
        case DatasetPreset::mnist:
            c.gamma1 = 0.1;
            c.gamma2 = 1.0;
            break;
        case DatasetPreset::cifar10:
            c.gamma1 = 0.003;
            c.gamma2 = 0.003;
            break;
    }
    return c;
}

PolicyConstants change_value_policy_defaults(DatasetPreset preset, double desired_lr) {
    PolicyConstants c;
    c.lr_min = desired_lr / 10.0;
    c.lr_max = desired_lr * 10.0;
    c.epsilon = kDefaultEpsilon;
    c.gamma3 = kDefaultGamma3;
    switch (preset) {
        case DatasetPreset::mnist:
            c.gamma1 = 0.1;
            c.gamma2 = 0.1;
            break;
        case DatasetPreset::cifar10:
            c.gamma1 = 0.001;
            c.gamma2 = 0.001;
            break;
    }
    return c;
}

void MiHistory::push(double value) noexcept {
    previous = latest;
    latest = value;
    count = std::min<std::size_t>(count + 1, 2);
}

namespace {

constexpr std::array<std::pair<Branch, std::string_view>, 9> kBranchNames{{
    {Branch::warm_hold, "warm-hold"},
    {Branch::degenerate_hold, "degenerate-hold"},
    {Branch::increase_on_change, "increase-on-change"},
    {Branch::decrease_on_saturation, "decrease-on-saturation"},
    {Branch::decrease_on_violation, "decrease-on-violation"},
    {Branch::decrease_on_violation_saturated, "decrease-on-violation-saturated"},
    {Branch::clamped_min, "clamped-min"},
    {Branch::clamped_max, "clamped-max"},
    {Branch::scheduled, "scheduled"},
}};

void check_bounds(const SchedulerState& s, const PolicyConstants& c) {
    if (!(s.lr >= c.lr_min && s.lr <= c.lr_max)) {
        throw ContractError("scheduler: current lr lies outside [lr_min, lr_max]");
    }
}

double floored(double v) noexcept { return std::max(v, kMiFloor); }

LrDecision hold(Branch b, double lr, double d1 = std::nan(""), double d2 = std::nan("")) {
    LrDecision d;
    d.lr_next = lr;
    d.branch = b;
    d.d1 = d1;
    d.d2 = d2;
    return d;
}

LrDecision raise(double lr, double step, const PolicyConstants& c) {
    const double proposed = lr + step;
    if (proposed > c.lr_max) return hold(Branch::clamped_max, c.lr_max);
    return hold(Branch::increase_on_change, proposed);
}

LrDecision lower(double proposed, Branch b, const PolicyConstants& c) {
    if (proposed < c.lr_min) return hold(Branch::clamped_min, c.lr_min);
    return hold(b, proposed);
}

// Exact zeros (or NaN) in a denominator carry no signal.
bool degenerate(double v) noexcept { return !std::isfinite(v) || v == 0.0; }

double relative_change(const MiHistory& h) noexcept {
    const double latest = floored(h.latest);
    return std::abs(latest - floored(h.previous)) / latest;
}

LrDecision change_value_rule(const SchedulerState& s, const PolicyConstants& c,
                             bool force_change) {
    if (!s.ixy) throw ContractError("policy2_step: reference IXY not set");
    check_bounds(s, c);
    if (!s.history.full()) return hold(Branch::warm_hold, c.lr_min);
    if (degenerate(s.history.latest) || !std::isfinite(s.history.previous) || !(*s.ixy > 0.0)) {
        return hold(Branch::degenerate_hold, s.lr);
    }

    const double d1 = 1.0 - floored(s.history.latest) / *s.ixy;
    const double d2 = relative_change(s.history);
    const bool changing = force_change || d2 > c.epsilon;

    LrDecision d;
    if (d1 > 0.0 && changing) {
        d = raise(s.lr, c.gamma1 * d1, c);
    } else if (d1 > 0.0) {
        d = lower(s.lr - c.gamma2 * d1, Branch::decrease_on_saturation, c);
    } else {
        d = lower(s.lr + c.gamma3 * d1,
                  d2 > c.epsilon ? Branch::decrease_on_violation
                                 : Branch::decrease_on_violation_saturated,
                  c);
    }
    d.d1 = d1;
    d.d2 = d2;
    d.value_only = force_change;
    return d;
}

}  // namespace

std::string_view branch_name(Branch b) noexcept {
    for (const auto& [branch, name] : kBranchNames) {
        if (branch == b) return name;
    }
    return "unknown";
}

std::optional<Branch> parse_branch(std::string_view name) noexcept {
    for (const auto& [branch, n] : kBranchNames) {
        if (n == name) return branch;
    }
    return std::nullopt;
}

LrDecision policy1_step(const SchedulerState& s, const PolicyConstants& c) {
    check_bounds(s, c);
    if (!s.history.full()) return hold(Branch::warm_hold, c.lr_min);
    if (degenerate(s.history.latest) || !std::isfinite(s.history.previous)) {
        return hold(Branch::degenerate_hold, s.lr);
    }

    const double delta = relative_change(s.history);
    LrDecision d = delta > c.epsilon
                       ? raise(s.lr, c.gamma1 * delta, c)
                       : lower(s.lr - c.gamma2 * delta, Branch::decrease_on_saturation, c);
    d.d2 = delta;
    return d;
}

LrDecision policy2_step(const SchedulerState& s, const PolicyConstants& c) {
    return change_value_rule(s, c, false);
}

LrDecision bs_change_step(const SchedulerState& s, const PolicyConstants& c) {
    return change_value_rule(s, c, s.value_only_window > 0);
}

std::vector<LrDecision> layerwise_step(std::span<const SchedulerState> states,
                                       std::span<const double> ihy_per_layer,
                                       const PolicyConstants& c) {
    if (states.size() != ihy_per_layer.size()) {
        throw ContractError("layerwise_step: one IHY value per layer state is required");
    }
    std::vector<LrDecision> out;
    out.reserve(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
        out.push_back(bs_change_step(observe(states[i], ihy_per_layer[i]), c));
    }
    return out;
}

SchedulerState observe(SchedulerState state, double value) {
    state.history.push(value);
    return state;
}

SchedulerState advance(SchedulerState state, const LrDecision& d) {
    state.lr = d.lr_next;
    ++state.epoch;
    if (d.value_only && state.value_only_window > 0) --state.value_only_window;
    return state;
}

LrDecision baseline_fixed(double lr0, int /*epoch*/) {
    return hold(Branch::scheduled, lr0);
}

LrDecision baseline_warmup(double lr0, double lr_target, int warmup_epochs, int epoch) {
    if (warmup_epochs < 1) throw ParameterError("warm-up length must be >= 1 epoch");
    if (epoch >= warmup_epochs) return hold(Branch::scheduled, lr_target);
    const double t = static_cast<double>(std::max(epoch, 0)) / warmup_epochs;
    return hold(Branch::scheduled, lr0 + (lr_target - lr0) * t);
}

LrDecision baseline_decay(double lr0, double decay_rate, int epoch) {
    if (!(decay_rate > 0.0 && decay_rate <= 1.0)) {
        throw ParameterError("decay rate must lie in (0, 1]");
    }
    return hold(Branch::scheduled, lr0 * std::pow(decay_rate, epoch));
}

}  // namespace mirate
