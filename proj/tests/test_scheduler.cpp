#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "mirate/errors.hpp"
#include "mirate/rng.hpp"
#include "mirate/scheduler.hpp"
#include "oracles/scheduler_cases.hpp"

namespace mirate {
namespace {

PolicyConstants bounds(double lo, double hi) {
    PolicyConstants c;
    c.lr_min = lo;
    c.lr_max = hi;
    return c;
}

SchedulerState with_history(double lr, double latest, double previous,
                            std::optional<double> ixy = std::nullopt) {
    SchedulerState s;
    s.lr = lr;
    s.history.push(previous);
    s.history.push(latest);
    s.ixy = ixy;
    return s;
}

TEST(MiHistory, KeepsLastTwo) {
    MiHistory h;
    h.push(1.0);
    EXPECT_FALSE(h.full());
    h.push(2.0);
    h.push(3.0);
    EXPECT_TRUE(h.full());
    EXPECT_EQ(h.count, 2U);
    EXPECT_EQ(h.latest, 3.0);
    EXPECT_EQ(h.previous, 2.0);
}

TEST(Policy1, IncreaseWithMnistGains) {
    PolicyConstants c = bounds(0.001, 0.1);
    c.gamma1 = 0.1;
    c.gamma2 = 1.0;
    const auto d = policy1_step(with_history(0.01, 2.0, 1.0), c);
    EXPECT_DOUBLE_EQ(d.d2, 0.5);
    EXPECT_DOUBLE_EQ(d.lr_next, 0.06);
    EXPECT_EQ(d.branch, Branch::increase_on_change);
}

TEST(Policy1, ZeroChangeKeepsRate) {
    PolicyConstants c = bounds(0.001, 0.1);
    c.gamma2 = 5.0;
    const auto d = policy1_step(with_history(0.05, 2.0, 2.0), c);
    EXPECT_EQ(d.lr_next, 0.05);
    EXPECT_EQ(d.branch, Branch::decrease_on_saturation);
}

TEST(Policy1, UpperClamp) {
    PolicyConstants c = bounds(0.001, 0.1);
    c.gamma1 = 100.0;
    const auto d = policy1_step(with_history(0.1, 1.0, 0.1), c);
    EXPECT_DOUBLE_EQ(d.d2, 0.9);
    EXPECT_EQ(d.lr_next, 0.1);
    EXPECT_EQ(d.branch, Branch::clamped_max);
}

TEST(Policy1, WarmHoldBeforeHistoryFills) {
    SchedulerState s;
    s.lr = 0.05;
    const auto c = bounds(0.001, 0.1);
    EXPECT_EQ(policy1_step(s, c).lr_next, 0.001);
    EXPECT_EQ(policy1_step(s, c).branch, Branch::warm_hold);
    s.history.push(1.0);
    EXPECT_EQ(policy1_step(s, c).branch, Branch::warm_hold);
}

TEST(Policy1, ZeroLatestIsDegenerateHold) {
    const auto d = policy1_step(with_history(0.02, 0.0, 1.0), bounds(0.001, 0.1));
    EXPECT_EQ(d.branch, Branch::degenerate_hold);
    EXPECT_EQ(d.lr_next, 0.02);
}

TEST(Policy1, NegativeEstimatesAreFloored) {
    const auto d = policy1_step(with_history(0.02, -0.3, 0.5), bounds(0.001, 0.1));
    EXPECT_TRUE(std::isfinite(d.d2));
    EXPECT_GE(d.lr_next, 0.001);
    EXPECT_LE(d.lr_next, 0.1);
}

TEST(Policy1, RejectsOutOfBoundsRate) {
    EXPECT_THROW(policy1_step(with_history(0.5, 1.0, 2.0), bounds(0.001, 0.1)), ContractError);
}

TEST(Policy2, IncreaseOnChange) {
    const auto d = policy2_step(with_history(0.01, 1.5, 1.0, 3.0), bounds(0.001, 0.1));
    EXPECT_DOUBLE_EQ(d.d1, 0.5);
    EXPECT_NEAR(d.d2, 1.0 / 3.0, 1e-15);
    EXPECT_DOUBLE_EQ(d.lr_next, 0.06);
    EXPECT_EQ(d.branch, Branch::increase_on_change);
}

TEST(Policy2, ViolationReducesRate) {
    const auto d = policy2_step(with_history(0.06, 3.3, 3.3, 3.0), bounds(0.001, 0.1));
    EXPECT_NEAR(d.d1, -0.1, 1e-12);
    EXPECT_NEAR(d.lr_next, 0.05, 1e-12);
    EXPECT_EQ(d.branch, Branch::decrease_on_violation_saturated);
}

TEST(Policy2, BoundaryLeavesRateFixed) {
    const auto d = policy2_step(with_history(0.03, 3.0, 2.0, 3.0), bounds(0.001, 0.1));
    EXPECT_EQ(d.d1, 0.0);
    EXPECT_EQ(d.lr_next, 0.03);
    EXPECT_EQ(d.branch, Branch::decrease_on_violation);
}

TEST(Policy2, SaturationDecreases) {
    const auto d = policy2_step(with_history(0.08, 1.5, 1.5, 3.0), bounds(0.001, 0.1));
    EXPECT_DOUBLE_EQ(d.lr_next, 0.08 - 0.1 * 0.5);
    EXPECT_EQ(d.branch, Branch::decrease_on_saturation);
}

TEST(Policy2, LowerClamp) {
    PolicyConstants c = bounds(0.001, 0.1);
    c.gamma2 = 1.0;
    const auto d = policy2_step(with_history(0.002, 0.3, 0.3, 3.0), c);
    EXPECT_EQ(d.lr_next, 0.001);
    EXPECT_EQ(d.branch, Branch::clamped_min);
}

TEST(Policy2, DegenerateReferenceHolds) {
    const auto c = bounds(0.001, 0.1);
    EXPECT_EQ(policy2_step(with_history(0.02, 1.0, 0.5, 0.0), c).branch, Branch::degenerate_hold);
    EXPECT_EQ(policy2_step(with_history(0.02, 0.0, 0.5, 2.0), c).branch, Branch::degenerate_hold);
    EXPECT_THROW(policy2_step(with_history(0.02, 1.0, 0.5), c), ContractError);
}

TEST(BsChange, ForcedIncreaseWhileWindowOpen) {
    auto s = with_history(0.06, 1.8, 1.8018, 3.0);  // d1 = 0.4, d2 = 0.001
    s.value_only_window = 3;
    const auto c = bounds(0.001, 1.0);
    const auto d = bs_change_step(s, c);
    EXPECT_EQ(d.branch, Branch::increase_on_change);
    EXPECT_TRUE(d.value_only);
    EXPECT_NEAR(d.lr_next, 0.06 + 0.1 * 0.4, 1e-12);
    EXPECT_EQ(policy2_step(s, c).branch, Branch::decrease_on_saturation);
}

TEST(BsChange, WindowExhaustion) {
    auto s = with_history(0.01, 1.8, 1.0, 3.0);
    s.value_only_window = 1;
    const auto c = bounds(0.001, 0.1);
    const auto next = advance(s, bs_change_step(s, c));
    EXPECT_EQ(next.value_only_window, 0);
    EXPECT_EQ(next.epoch, 1);
    const auto later = observe(next, 1.8);
    EXPECT_EQ(bs_change_step(later, c), policy2_step(later, c));
}

TEST(BsChange, ViolationStillDecreases) {
    auto s = with_history(0.06, 3.3, 2.0, 3.0);
    s.value_only_window = 2;
    const auto d = bs_change_step(s, bounds(0.001, 0.1));
    EXPECT_NEAR(d.lr_next, 0.05, 1e-12);
    EXPECT_EQ(d.branch, Branch::decrease_on_violation);
}

TEST(Layerwise, IdenticalInputsGiveIdenticalDecisions) {
    std::vector<SchedulerState> states(3, with_history(0.01, 1.0, 0.8, 3.0));
    const std::vector<double> ihy(3, 1.2);
    const auto ds = layerwise_step(states, ihy, bounds(0.001, 0.1));
    ASSERT_EQ(ds.size(), 3U);
    EXPECT_EQ(ds[0], ds[1]);
    EXPECT_EQ(ds[1], ds[2]);
}

TEST(Layerwise, SaturatedAndChangingLayersDiverge) {
    std::vector<SchedulerState> states{with_history(0.08, 1.5, 0.0, 3.0),
                                       with_history(0.08, 1.0, 0.0, 3.0)};
    const std::vector<double> ihy{1.5, 1.5};
    const auto ds = layerwise_step(states, ihy, bounds(0.001, 1.0));
    EXPECT_EQ(ds[0].branch, Branch::decrease_on_saturation);
    EXPECT_EQ(ds[1].branch, Branch::increase_on_change);
    EXPECT_LT(ds[0].lr_next, 0.08);
    EXPECT_GT(ds[1].lr_next, 0.08);
}

TEST(Layerwise, SingleLayerMatchesPolicy2) {
    const auto s = with_history(0.02, 1.1, 0.7, 2.5);
    const std::vector<SchedulerState> states{s};
    const std::vector<double> ihy{1.4};
    const auto c = bounds(0.001, 0.1);
    EXPECT_EQ(layerwise_step(states, ihy, c).front(), policy2_step(observe(s, 1.4), c));
}

TEST(Layerwise, LengthMismatch) {
    std::vector<SchedulerState> states(2, with_history(0.01, 1.0, 0.8, 3.0));
    const std::vector<double> ihy(3, 1.0);
    EXPECT_THROW(layerwise_step(states, ihy, bounds(0.001, 0.1)), ContractError);
}

TEST(Baselines, Fixed) {
    for (int e : {0, 1, 100}) EXPECT_EQ(baseline_fixed(0.01, e).lr_next, 0.01);
    EXPECT_EQ(baseline_fixed(0.01, 3).branch, Branch::scheduled);
}

TEST(Baselines, WarmupIsLinear) {
    EXPECT_EQ(baseline_warmup(0.001, 0.01, 5, 0).lr_next, 0.001);
    EXPECT_EQ(baseline_warmup(0.001, 0.01, 5, 5).lr_next, 0.01);
    EXPECT_EQ(baseline_warmup(0.001, 0.01, 5, 9).lr_next, 0.01);
    for (int e = 0; e < 5; ++e) {
        EXPECT_NEAR(baseline_warmup(0.001, 0.01, 5, e + 1).lr_next -
                        baseline_warmup(0.001, 0.01, 5, e).lr_next,
                    0.0018, 1e-15);
    }
}

TEST(Baselines, Decay) {
    EXPECT_EQ(baseline_decay(0.01, 1.0, 7).lr_next, 0.01);
    EXPECT_DOUBLE_EQ(baseline_decay(0.01, 0.5, 2).lr_next, 0.0025);
    for (int e = 0; e < 20; ++e) {
        EXPECT_LT(baseline_decay(0.01, 0.9, e + 1).lr_next, baseline_decay(0.01, 0.9, e).lr_next);
    }
    EXPECT_THROW(baseline_decay(0.01, 0.0, 1), ParameterError);
    EXPECT_THROW(baseline_decay(0.01, 1.5, 1), ParameterError);
}

TEST(Constants, Presets) {
    const auto p1m = change_policy_defaults(DatasetPreset::mnist, 0.01);
    EXPECT_EQ(p1m.gamma1, 0.1);
    EXPECT_EQ(p1m.gamma2, 1.0);
    EXPECT_EQ(p1m.epsilon, 0.01);
    EXPECT_DOUBLE_EQ(p1m.lr_min, 0.001);
    EXPECT_DOUBLE_EQ(p1m.lr_max, 0.1);
    const auto p1c = change_policy_defaults(DatasetPreset::cifar10, 0.01);
    EXPECT_EQ(p1c.gamma1, 0.003);
    EXPECT_EQ(p1c.gamma2, 0.003);
    const auto p2m = change_value_policy_defaults(DatasetPreset::mnist, 0.01);
    EXPECT_EQ(p2m.gamma1, 0.1);
    EXPECT_EQ(p2m.gamma2, 0.1);
    EXPECT_EQ(p2m.gamma3, 0.1);
    const auto p2c = change_value_policy_defaults(DatasetPreset::cifar10, 0.01);
    EXPECT_EQ(p2c.gamma1, 0.001);
    EXPECT_EQ(p2c.gamma2, 0.001);
    EXPECT_EQ(p2c.gamma3, 0.1);
    EXPECT_EQ(p2c.epsilon, 0.01);
}

TEST(Constants, Validation) {
    EXPECT_THROW(bounds(0.1, 0.01).validate(), ParameterError);
    PolicyConstants c;
    c.epsilon = 0.0;
    EXPECT_THROW(c.validate(), ParameterError);
    c = PolicyConstants{};
    c.gamma3 = -1.0;
    EXPECT_THROW(c.validate(), ParameterError);
    EXPECT_NO_THROW(PolicyConstants{}.validate());
}

TEST(BranchNames, RoundTrip) {
    for (Branch b : {Branch::warm_hold, Branch::degenerate_hold, Branch::increase_on_change,
                     Branch::decrease_on_saturation, Branch::decrease_on_violation,
                     Branch::decrease_on_violation_saturated, Branch::clamped_min,
                     Branch::clamped_max, Branch::scheduled}) {
        EXPECT_EQ(parse_branch(branch_name(b)), b);
    }
    EXPECT_EQ(branch_name(Branch::increase_on_change), "increase-on-change");
    EXPECT_FALSE(parse_branch("sideways").has_value());
}

using oracle::draw_case;

TEST(OracleEquivalence, Policy1) {
    CounterRng rng(11);
    for (int i = 0; i < 1000; ++i) {
        const auto rc = draw_case(rng);
        EXPECT_EQ(policy1_step(rc.state, rc.c).lr_next, oracle::rule1(rc.in)) << "case " << i;
    }
}

TEST(OracleEquivalence, Policy2) {
    CounterRng rng(12);
    for (int i = 0; i < 1000; ++i) {
        const auto rc = draw_case(rng);
        EXPECT_EQ(policy2_step(rc.state, rc.c).lr_next, oracle::rule2(rc.in)) << "case " << i;
    }
}

TEST(OracleEquivalence, BsChange) {
    CounterRng rng(13);
    for (int i = 0; i < 1000; ++i) {
        auto rc = draw_case(rng);
        rc.in.force_change = rc.state.value_only_window > 0;
        EXPECT_EQ(bs_change_step(rc.state, rc.c).lr_next, oracle::rule2(rc.in)) << "case " << i;
    }
}

TEST(OracleEquivalence, Layerwise) {
    CounterRng rng(14);
    for (int i = 0; i < 1000; ++i) {
        const auto lc = oracle::draw_layerwise_case(rng);
        const auto ds = layerwise_step(lc.states, lc.ihy, lc.c);
        for (std::size_t l = 0; l < ds.size(); ++l) {
            EXPECT_EQ(ds[l].lr_next, lc.expected[l]) << "case " << i << " layer " << l;
        }
    }
}

TEST(Properties, BoundsAndPurity) {
    CounterRng rng(15);
    for (int i = 0; i < 1000; ++i) {
        auto rc = draw_case(rng);
        for (const auto& d : {policy1_step(rc.state, rc.c), policy2_step(rc.state, rc.c),
                              bs_change_step(rc.state, rc.c)}) {
            EXPECT_GE(d.lr_next, rc.c.lr_min);
            EXPECT_LE(d.lr_next, rc.c.lr_max);
        }
        EXPECT_EQ(policy1_step(rc.state, rc.c).lr_next, policy1_step(rc.state, rc.c).lr_next);
        EXPECT_EQ(policy2_step(rc.state, rc.c).lr_next, policy2_step(rc.state, rc.c).lr_next);
    }
}

TEST(Properties, ViolationAlwaysReduces) {
    CounterRng rng(16);
    for (int i = 0; i < 1000; ++i) {
        PolicyConstants c = bounds(0.001, 0.1);
        c.gamma3 = 0.01 + rng.uniform();
        const double ixy = 0.1 + 3.0 * rng.uniform();
        const double h1 = ixy * (1.0 + 1e-3 + rng.uniform());
        const double h2 = 4.0 * rng.uniform();
        const double lr = 0.001 + 0.099 * (1e-3 + rng.uniform() * (1.0 - 1e-3));
        auto s = with_history(lr, h1, h2, ixy);
        s.value_only_window = static_cast<int>(rng.below(3));
        EXPECT_LT(policy2_step(s, c).lr_next, lr);
        EXPECT_LT(bs_change_step(s, c).lr_next, lr);
    }
}

TEST(Properties, MonotoneDriveInD1) {
    const auto c = bounds(1e-6, 1e6);
    double prev_step = -1.0;
    for (int i = 1; i <= 100; ++i) {
        const double d1 = i / 100.0;
        const double ixy = 2.0;
        const double h1 = ixy * (1.0 - d1) + 1e-9;
        auto s = with_history(0.01, h1, h1 * 3.0 + 1.0, ixy);
        const auto d = policy2_step(s, c);
        const double step = d.lr_next - 0.01;
        EXPECT_GE(step, prev_step);
        prev_step = step;
    }
}

TEST(Properties, LogisticWarmupThenCooldown) {
    const auto c = change_policy_defaults(DatasetPreset::mnist, 0.01);
    SchedulerState s;
    s.lr = c.lr_min;
    std::vector<double> lrs;
    for (int t = 0; t < 40; ++t) {
        s = observe(s, 2.3 / (1.0 + std::exp(-(t - 10) / 2.0)));
        const auto d = policy1_step(s, c);
        lrs.push_back(d.lr_next);
        s = advance(s, d);
    }
    EXPECT_EQ(lrs.front(), c.lr_min);
    const auto peak = std::max_element(lrs.begin(), lrs.end());
    EXPECT_GT(*peak, c.lr_min);
    for (auto it = lrs.begin(); it != peak; ++it) EXPECT_LE(*it, *(it + 1));
    for (auto it = peak; it + 1 != lrs.end(); ++it) EXPECT_GE(*it, *(it + 1));
}

}  // namespace
}  // namespace mirate
