#include "mirate/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "mirate/checkpoint.hpp"
#include "mirate/errors.hpp"
#include "mirate/mnist.hpp"
#include "mirate/probe.hpp"
#include "mirate/rng.hpp"
#include "mirate/synthetic.hpp"

namespace mirate {

Dataset load_dataset(const RunConfig& cfg) {
    if (cfg.dataset == DatasetKind::mnist) return load_mnist(cfg.mnist_dir);
    return gen_blobs(cfg.blobs.n_per_class, cfg.blobs.classes, cfg.blobs.dim,
                     cfg.blobs.separation, derive_seed(cfg.seed, "dataset"));
}

NetworkSpec network_spec_for(const RunConfig& cfg, const Dataset& data) {
    NetworkSpec spec;
    spec.layer_sizes.push_back(data.train_x.cols());
    spec.layer_sizes.insert(spec.layer_sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
    spec.layer_sizes.push_back(static_cast<std::size_t>(data.class_count));
    spec.activation = cfg.activation;
    spec.seed = derive_seed(cfg.seed, "network");
    spec.validate();
    return spec;
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

PolicyKind parse_policy(const std::string& name) {
    for (PolicyKind p : {PolicyKind::fixed, PolicyKind::warmup, PolicyKind::decay,
                         PolicyKind::dynamic_change, PolicyKind::dynamic_change_value,
                         PolicyKind::layerwise}) {
        if (policy_name(p) == name) return p;
    }
    throw ParseError(ParseErrorKind::corrupt, "checkpoint names unknown policy '" + name + "'");
}

/// Owns the learning-rate state for one run and turns per-epoch MI readings
/// into the next epoch's rates.
class LrController {
public:
    LrController(const RunConfig& cfg, std::size_t layers, double ixy)
        : cfg_(cfg), policy_(cfg.policy), constants_(cfg.constants) {
        const std::size_t n = policy_ == PolicyKind::layerwise ? layers : 1;
        SchedulerState s;
        s.lr = constants_.lr_min;
        s.ixy = ixy;
        states_.assign(n, s);
    }

    LrController(const RunConfig& cfg, const RunCheckpoint& ckpt)
        : cfg_(cfg), policy_(parse_policy(ckpt.policy)), constants_(ckpt.constants),
          states_(ckpt.states) {}

    PolicyKind policy() const { return policy_; }
    const PolicyConstants& constants() const { return constants_; }
    const std::vector<SchedulerState>& states() const { return states_; }

    void open_value_only_window(int window) {
        if (window > 0 && policy_ != PolicyKind::dynamic_change_value &&
            policy_ != PolicyKind::layerwise) {
            throw ContractError("value-only window needs a change-and-value policy");
        }
        for (auto& s : states_) s.value_only_window = window;
    }

    std::vector<double> rates(int epoch) const {
        switch (policy_) {
            case PolicyKind::fixed: return {baseline_fixed(cfg_.lr, epoch).lr_next};
            case PolicyKind::warmup:
                return {baseline_warmup(cfg_.warmup_start, cfg_.lr, cfg_.warmup_epochs, epoch).lr_next};
            case PolicyKind::decay: return {baseline_decay(cfg_.lr, cfg_.decay_rate, epoch).lr_next};
            default: break;
        }
        std::vector<double> out;
        for (const auto& s : states_) out.push_back(s.lr);
        return out;
    }

    /// Consumes this epoch's MI readings; returns the decisions taken.
    std::vector<LrDecision> step(int epoch, double ihyll, const std::vector<double>& ihy_layers) {
        switch (policy_) {
            case PolicyKind::fixed: return {baseline_fixed(cfg_.lr, epoch + 1)};
            case PolicyKind::warmup:
                return {baseline_warmup(cfg_.warmup_start, cfg_.lr, cfg_.warmup_epochs, epoch + 1)};
            case PolicyKind::decay: return {baseline_decay(cfg_.lr, cfg_.decay_rate, epoch + 1)};
            case PolicyKind::dynamic_change: {
                states_[0] = observe(states_[0], ihyll);
                const LrDecision d = policy1_step(states_[0], constants_);
                states_[0] = advance(states_[0], d);
                return {d};
            }
            case PolicyKind::dynamic_change_value: {
                states_[0] = observe(states_[0], ihyll);
                const LrDecision d = bs_change_step(states_[0], constants_);
                states_[0] = advance(states_[0], d);
                return {d};
            }
            case PolicyKind::layerwise: {
                auto ds = layerwise_step(states_, ihy_layers, constants_);
                for (std::size_t i = 0; i < states_.size(); ++i) {
                    states_[i] = advance(observe(states_[i], ihy_layers[i]), ds[i]);
                }
                return ds;
            }
        }
        return {};
    }

private:
    const RunConfig& cfg_;
    PolicyKind policy_;
    PolicyConstants constants_;
    std::vector<SchedulerState> states_;
};

struct Session {
    const RunConfig& cfg;
    const Dataset& data;
    Network net;
    OptimizerConfig optimizer;
    double ixy = 0.0;
    LrController controller;
    ProbeSubset probe;
};

ProbeSubset probe_for_epoch(const RunConfig& cfg, const Dataset& data, int epoch) {
    const std::uint64_t seed = cfg.redraw_probe
                                   ? derive_seed(cfg.seed, "probe-epoch", static_cast<std::uint64_t>(epoch))
                                   : derive_seed(cfg.seed, "probe");
    const std::size_t size = std::min(cfg.probe_size, data.train_x.rows());
    return make_probe_subset(data.train_x, data.train_labels, size, seed, cfg.jitter);
}

void train_epoch(Session& s, const std::vector<double>& lrs, int epoch) {
    const std::size_t n = s.data.train_x.rows();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    CounterRng rng(derive_seed(s.cfg.seed, "shuffle", static_cast<std::uint64_t>(epoch)));
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

    const std::size_t bs = s.optimizer.batch_size;
    std::vector<int> labels;
    for (std::size_t start = 0; start < n; start += bs) {
        const std::size_t stop = std::min(n, start + bs);
        const std::span<const std::size_t> idx(order.data() + start, stop - start);
        labels.clear();
        for (std::size_t i : idx) labels.push_back(s.data.train_labels[i]);
        const auto lg = loss_and_grad(s.net, s.data.train_x.select_rows(idx), labels);
        sgd_step(s.net, lg.grad, lrs, s.optimizer);
    }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw ParseError(ParseErrorKind::io, "cannot write " + path.string());
}

std::filesystem::path checkpoint_path(const std::filesystem::path& dir, int completed) {
    char name[32];
    std::snprintf(name, sizeof name, "ckpt_%04d.bin", completed);
    return dir / "checkpoints" / name;
}

RunCheckpoint snapshot(const Session& s, int completed) {
    RunCheckpoint c;
    c.completed_epochs = completed;
    c.policy = std::string(policy_name(s.controller.policy()));
    c.constants = s.controller.constants();
    c.states = s.controller.states();
    c.ixy = s.ixy;
    c.optimizer = s.optimizer;
    c.network = s.net;
    return c;
}

void flush_outputs(const RunConfig& cfg, const RunResult& res) {
    emit_csv(cfg.out_dir / "epochs.csv", res.records);
    std::ofstream dec(cfg.out_dir / "decisions.csv", std::ios::binary);
    emit_decisions_csv(dec, res.decisions);
    std::ofstream timing(cfg.out_dir / "timing.csv", std::ios::binary);
    emit_timing_csv(timing, res.records);
    if (!dec || !timing) throw ParseError(ParseErrorKind::io, "cannot write run outputs");
}

RunResult run_epochs(Session& s, int first_epoch) {
    const RunConfig& cfg = s.cfg;
    std::filesystem::create_directories(cfg.out_dir / "checkpoints");
    write_text(cfg.out_dir / "config.txt", format_config(cfg));

    const bool per_layer = s.controller.policy() == PolicyKind::layerwise || cfg.record_layer_mi;
    RunResult res;
    res.ixy = s.ixy;

    try {
        for (int epoch = first_epoch; epoch < cfg.epochs; ++epoch) {
            EpochRecord rec;
            rec.epoch = epoch;
            const std::vector<double> lrs = s.controller.rates(epoch);
            rec.lr = lrs.back();
            if (lrs.size() > 1) rec.layer_lrs = lrs;

            auto t0 = Clock::now();
            train_epoch(s, lrs, epoch);
            rec.train_ms = ms_since(t0);

            t0 = Clock::now();
            const Evaluation train_eval = evaluate(s.net, s.data.train_x, s.data.train_labels);
            rec.train_loss = train_eval.loss;
            rec.train_acc = train_eval.accuracy;
            if (!s.data.test_x.empty()) {
                const Evaluation test_eval = evaluate(s.net, s.data.test_x, s.data.test_labels);
                rec.test_loss = test_eval.loss;
                rec.test_acc = test_eval.accuracy;
            }
            rec.eval_ms = ms_since(t0);

            t0 = Clock::now();
            if (cfg.redraw_probe) s.probe = probe_for_epoch(cfg, s.data, epoch);
            const auto fwd = forward(s.net, s.probe.x_probe, true);
            const std::uint64_t jitter_seed =
                derive_seed(cfg.seed, "ihy-jitter", static_cast<std::uint64_t>(epoch));
            rec.ihyll = compute_ihy(fwd.activations.back(), s.probe.y_probe, cfg.k, jitter_seed,
                                    cfg.jitter)
                            .value;
            if (per_layer) {
                for (std::size_t l = 0; l < fwd.activations.size(); ++l) {
                    if (l + 1 == fwd.activations.size()) {
                        rec.ihy_per_layer.push_back(rec.ihyll);
                    } else {
                        rec.ihy_per_layer.push_back(
                            compute_ihy(fwd.activations[l], s.probe.y_probe, cfg.k,
                                        derive_seed(jitter_seed, "layer", l), cfg.jitter)
                                .value);
                    }
                }
            }
            rec.ixy = s.ixy;
            rec.probe_ms = ms_since(t0);

            const auto decisions = s.controller.step(epoch, rec.ihyll, rec.ihy_per_layer);
            rec.lr_next = decisions.back().lr_next;
            rec.branch = std::string(branch_name(decisions.back().branch));
            for (std::size_t i = 0; i < decisions.size(); ++i) {
                res.decisions.push_back({epoch, decisions.size() > 1 ? static_cast<int>(i) : -1,
                                         std::string(policy_name(s.controller.policy())),
                                         decisions[i]});
            }
            res.records.push_back(std::move(rec));

            const int completed = epoch + 1;
            if (completed % cfg.checkpoint_every == 0) {
                save_checkpoint(checkpoint_path(cfg.out_dir, completed), snapshot(s, completed));
            }
        }
        res.final_checkpoint = cfg.out_dir / "checkpoints" / "final.bin";
        save_checkpoint(res.final_checkpoint, snapshot(s, std::max(cfg.epochs, first_epoch)));
    } catch (...) {
        flush_outputs(cfg, res);
        throw;
    }
    flush_outputs(cfg, res);
    return res;
}

}  // namespace

RunResult run_experiment(const RunConfig& cfg, const Dataset* data) {
    Dataset owned;
    if (data == nullptr) {
        owned = load_dataset(cfg);
        data = &owned;
    }
    data->validate();
    const NetworkSpec spec = network_spec_for(cfg, *data);

    ProbeSubset probe = probe_for_epoch(cfg, *data, 0);
    const ReferenceBound ref = compute_reference(probe.x_probe, probe.labels, cfg.k, cfg.tiling,
                                                 derive_seed(cfg.seed, "ixy"), cfg.jitter);
    Session s{cfg, *data, init_network(spec), cfg.optimizer, ref.ixy.value,
              LrController(cfg, spec.layer_count(), ref.ixy.value), std::move(probe)};
    return run_epochs(s, 0);
}

RunResult resume_with_batch_size(const RunConfig& cfg, const std::filesystem::path& checkpoint,
                                 const Dataset* data) {
    RunCheckpoint ckpt = load_checkpoint(checkpoint);
    Dataset owned;
    if (data == nullptr) {
        owned = load_dataset(cfg);
        data = &owned;
    }
    data->validate();
    if (!(network_spec_for(cfg, *data) == ckpt.network.spec)) {
        throw ContractError("resume: checkpoint network does not match the configuration");
    }
    const PolicyKind policy = parse_policy(ckpt.policy);
    const std::size_t expected_states =
        policy == PolicyKind::layerwise ? ckpt.network.spec.layer_count() : 1;
    if (ckpt.states.size() != expected_states) {
        throw ContractError("resume: scheduler state count does not match the network");
    }

    RunConfig effective = cfg;
    effective.policy = policy;
    effective.constants = ckpt.constants;
    Session s{effective, *data, std::move(ckpt.network), ckpt.optimizer, ckpt.ixy,
              LrController(effective, ckpt), probe_for_epoch(effective, *data, 0)};
    if (cfg.bs_change) {
        if (cfg.bs_change->batch_size > 0) s.optimizer.batch_size = cfg.bs_change->batch_size;
        s.controller.open_value_only_window(cfg.bs_change->window);
    }
    return run_epochs(s, ckpt.completed_epochs);
}

}  // namespace mirate
