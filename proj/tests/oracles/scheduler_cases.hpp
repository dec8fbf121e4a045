#pragma once

#include <algorithm>
#include <vector>

#include "mirate/rng.hpp"
#include "mirate/scheduler.hpp"
#include "oracles/scheduler_oracle.hpp"

namespace mirate::oracle {

/// One randomized scheduler input, expressed both as library state and as
/// oracle input. Draws include zero, negative and above-reference MI values,
/// short histories and open value-only windows.
struct RandomCase {
    RuleInput in{};
    SchedulerState state;
    PolicyConstants c;
};

inline RandomCase draw_case(CounterRng& rng) {
    RandomCase rc;
    auto mi = [&] {
        const double u = rng.uniform();
        if (u < 0.05) return 0.0;
        if (u < 0.15) return -0.2 * rng.uniform();
        return 3.0 * rng.uniform();
    };
    rc.c.lr_min = 1e-4 + 0.01 * rng.uniform();
    rc.c.lr_max = rc.c.lr_min * (1.0 + 50.0 * rng.uniform());
    rc.c.epsilon = 0.001 + 0.1 * rng.uniform();
    rc.c.gamma1 = rng.uniform();
    rc.c.gamma2 = rng.uniform() < 0.5 ? rng.uniform() : 2.0 * rng.uniform();
    rc.c.gamma3 = 0.5 * rng.uniform();
    const double lr = rc.c.lr_min + (rc.c.lr_max - rc.c.lr_min) * rng.uniform();
    const int history = rng.uniform() < 0.1 ? static_cast<int>(rng.below(2)) : 2;
    const double h2 = mi();
    const double h1 = rng.uniform() < 0.1 ? h2 : mi();
    const double ixy = rng.uniform() < 0.05 ? 0.0 : 0.1 + 3.0 * rng.uniform();
    const int window = rng.uniform() < 0.4 ? static_cast<int>(rng.below(4)) : 0;

    rc.state.lr = lr;
    if (history >= 1) rc.state.history.push(history == 2 ? h2 : h1);
    if (history == 2) rc.state.history.push(h1);
    rc.state.ixy = ixy;
    rc.state.value_only_window = window;

    rc.in = {lr,         history,    h1,         h2,         ixy,  rc.c.lr_min, rc.c.lr_max,
             rc.c.epsilon, rc.c.gamma1, rc.c.gamma2, rc.c.gamma3, false};
    return rc;
}

/// Per-layer states sharing one IXY and one set of constants, the newest IHY
/// per layer, and the oracle's expected next rates.
struct LayerwiseCase {
    std::vector<SchedulerState> states;
    std::vector<double> ihy;
    PolicyConstants c;
    std::vector<double> expected;
};

inline LayerwiseCase draw_layerwise_case(CounterRng& rng) {
    LayerwiseCase lc;
    const std::size_t layers = 1 + rng.below(4);
    const RandomCase shared = draw_case(rng);
    lc.c = shared.c;
    for (std::size_t l = 0; l < layers; ++l) {
        RandomCase rc = draw_case(rng);
        rc.state.ixy = shared.state.ixy;
        rc.state.lr = std::clamp(rc.state.lr, lc.c.lr_min, lc.c.lr_max);
        const double fresh = 3.0 * rng.uniform() - 0.1;

        RuleInput in = shared.in;
        in.lr = rc.state.lr;
        in.history = std::min<int>(static_cast<int>(rc.state.history.count) + 1, 2);
        in.ihyll_1 = fresh;
        in.ihyll_2 = rc.state.history.latest;
        in.force_change = rc.state.value_only_window > 0;

        lc.states.push_back(rc.state);
        lc.ihy.push_back(fresh);
        lc.expected.push_back(rule2(in));
    }
    return lc;
}

}  // namespace mirate::oracle
