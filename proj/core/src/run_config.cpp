#include "mirate/run_config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mirate/errors.hpp"

namespace mirate {

std::string_view policy_name(PolicyKind p) noexcept {
    switch (p) {
        case PolicyKind::fixed: return "fixed";
        case PolicyKind::warmup: return "warmup";
        case PolicyKind::decay: return "decay";
        case PolicyKind::dynamic_change: return "dynamic-change";
        case PolicyKind::dynamic_change_value: return "dynamic-change-value";
        case PolicyKind::layerwise: return "layerwise";
    }
    return "unknown";
}

bool is_dynamic(PolicyKind p) noexcept {
    return p == PolicyKind::dynamic_change || p == PolicyKind::dynamic_change_value ||
           p == PolicyKind::layerwise;
}

const std::vector<ConfigKey>& config_keys() {
    static const std::vector<ConfigKey> keys{
        {"dataset", "blobs", "blobs | mnist"},
        {"mnist_dir", "", "directory holding the four MNIST IDX files (optionally .gz)"},
        {"blobs_per_class", "500", "samples per class for the blobs dataset (80/20 split)"},
        {"blobs_classes", "8", "number of blob classes"},
        {"blobs_dim", "10", "blob feature dimension"},
        {"blobs_separation", "4", "distance scale between blob centres, in noise std units"},
        {"hidden", "256,128", "hidden layer widths, comma separated (`none` for a linear model)"},
        {"activation", "relu", "relu | tanh"},
        {"momentum", "0.9", "SGD momentum in [0, 1)"},
        {"nesterov", "true", "Nesterov acceleration"},
        {"batch_size", "32", "mini-batch size"},
        {"policy", "dynamic-change-value",
         "fixed | warmup | decay | dynamic-change | dynamic-change-value | layerwise"},
        {"preset", "mnist", "gain preset for the dynamic policies: mnist | cifar10"},
        {"lr", "0.01", "desired learning rate (fixed rate, warm-up target, decay start)"},
        {"warmup_start", "lr/10", "warm-up starting rate"},
        {"warmup_epochs", "5", "warm-up length in epochs"},
        {"decay_rate", "0.95", "per-epoch multiplicative decay in (0, 1]"},
        {"lr_min", "lr/10", "lower learning-rate bound of dynamic policies"},
        {"lr_max", "lr*10", "upper learning-rate bound of dynamic policies"},
        {"epsilon", "0.01", "saturation threshold on the relative IHYLL change"},
        {"gamma1", "preset", "gain for increases"},
        {"gamma2", "preset", "gain for decreases on saturation"},
        {"gamma3", "0.1", "gain for decreases when IHYLL exceeds IXY"},
        {"probe_size", "1000", "training samples in the MI probe subset"},
        {"k", "4", "KSG neighbour count"},
        {"tiling", "1", "feature tiling factor for the IXY reference"},
        {"jitter", "1e-10", "uniform jitter scale added before MI estimation"},
        {"redraw_probe", "false", "draw a fresh probe subset every epoch"},
        {"record_layer_mi", "false", "also record per-layer IHY for non-layerwise policies"},
        {"epochs", "30", "total epochs"},
        {"seed", "1", "run seed (network init, shuffling, probe, jitter)"},
        {"out_dir", "run", "output directory"},
        {"checkpoint_every", "5", "checkpoint cadence in epochs (a final checkpoint is always written)"},
        {"bs_change_batch_size", "0", "resume only: new batch size (0 keeps the checkpoint's)"},
        {"bs_change_window", "3", "resume only: epochs of value-only tracking after the change"},
    };
    return keys;
}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

bool known_key(const std::string& key) {
    for (const auto& k : config_keys()) {
        if (k.name == key) return true;
    }
    return false;
}

class Reader {
public:
    explicit Reader(const ConfigMap& m) : m_(m) {}

    const std::string* raw(const std::string& key) const {
        auto it = m_.find(key);
        return it == m_.end() ? nullptr : &it->second;
    }

    double real(const std::string& key, double def) const {
        const auto* v = raw(key);
        if (!v) return def;
        double out = 0.0;
        const auto* end = v->data() + v->size();
        auto [p, ec] = std::from_chars(v->data(), end, out);
        if (ec != std::errc{} || p != end) throw ConfigError(key, "expected a number, got '" + *v + "'");
        return out;
    }

    long long integer(const std::string& key, long long def) const {
        const auto* v = raw(key);
        if (!v) return def;
        long long out = 0;
        const auto* end = v->data() + v->size();
        auto [p, ec] = std::from_chars(v->data(), end, out);
        if (ec != std::errc{} || p != end) throw ConfigError(key, "expected an integer, got '" + *v + "'");
        return out;
    }

    bool boolean(const std::string& key, bool def) const {
        const auto* v = raw(key);
        if (!v) return def;
        if (*v == "true" || *v == "1" || *v == "yes") return true;
        if (*v == "false" || *v == "0" || *v == "no") return false;
        throw ConfigError(key, "expected true/false, got '" + *v + "'");
    }

    std::string text(const std::string& key, const std::string& def) const {
        const auto* v = raw(key);
        return v ? *v : def;
    }

private:
    const ConfigMap& m_;
};

void require(bool ok, const std::string& key, const std::string& what) {
    if (!ok) throw ConfigError(key, what);
}

std::string fmt_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

ConfigMap parse_config_text(std::istream& is) {
    ConfigMap out;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno), "expected key = value");
        }
        std::string key = trim(std::string_view(t).substr(0, eq));
        std::string value = trim(std::string_view(t).substr(eq + 1));
        if (!known_key(key)) throw ConfigError(key, "unknown configuration key");
        out[key] = value;
    }
    return out;
}

ConfigMap parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open " + path.string());
    return parse_config_text(in);
}

RunConfig resolve_config(const ConfigMap& values) {
    for (const auto& [key, _] : values) {
        if (!known_key(key)) throw ConfigError(key, "unknown configuration key");
    }
    const Reader r(values);
    RunConfig c;

    const std::string dataset = r.text("dataset", "blobs");
    if (dataset == "blobs") {
        c.dataset = DatasetKind::blobs;
    } else if (dataset == "mnist") {
        c.dataset = DatasetKind::mnist;
    } else {
        throw ConfigError("dataset", "expected blobs or mnist");
    }
    c.mnist_dir = r.text("mnist_dir", "");
    require(c.dataset != DatasetKind::mnist || !c.mnist_dir.empty(), "mnist_dir",
            "required when dataset = mnist");

    const long long per_class = r.integer("blobs_per_class", 500);
    require(per_class >= 5, "blobs_per_class", "must be >= 5");
    c.blobs.n_per_class = static_cast<std::size_t>(per_class);
    const long long classes = r.integer("blobs_classes", 8);
    require(classes >= 2 && classes <= 1024, "blobs_classes", "must lie in [2, 1024]");
    c.blobs.classes = static_cast<int>(classes);
    const long long dim = r.integer("blobs_dim", 10);
    require(dim >= 1 && dim <= 4096, "blobs_dim", "must lie in [1, 4096]");
    c.blobs.dim = static_cast<std::size_t>(dim);
    require(dim >= 63 || (1LL << dim) >= classes, "blobs_classes",
            "more classes than hypercube vertices of blobs_dim");
    c.blobs.separation = r.real("blobs_separation", 4.0);
    require(c.blobs.separation >= 0.0, "blobs_separation", "must be >= 0");

    const std::string hidden = r.text("hidden", "256,128");
    c.hidden.clear();
    if (hidden != "none" && !hidden.empty()) {
        std::stringstream ss(hidden);
        std::string item;
        while (std::getline(ss, item, ',')) {
            std::size_t w = 0;
            const std::string t = trim(item);
            auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), w);
            require(ec == std::errc{} && p == t.data() + t.size() && w > 0, "hidden",
                    "expected positive comma-separated widths");
            c.hidden.push_back(w);
        }
    }
    const std::string act = r.text("activation", "relu");
    require(act == "relu" || act == "tanh", "activation", "expected relu or tanh");
    c.activation = act == "relu" ? Activation::relu : Activation::tanh;

    c.optimizer.momentum = r.real("momentum", 0.9);
    require(c.optimizer.momentum >= 0.0 && c.optimizer.momentum < 1.0, "momentum",
            "must lie in [0, 1)");
    c.optimizer.nesterov = r.boolean("nesterov", true);
    const long long bs = r.integer("batch_size", 32);
    require(bs >= 1, "batch_size", "must be >= 1");
    c.optimizer.batch_size = static_cast<std::size_t>(bs);

    const std::string policy = r.text("policy", "dynamic-change-value");
    bool matched = false;
    for (PolicyKind p : {PolicyKind::fixed, PolicyKind::warmup, PolicyKind::decay,
                         PolicyKind::dynamic_change, PolicyKind::dynamic_change_value,
                         PolicyKind::layerwise}) {
        if (policy == policy_name(p)) {
            c.policy = p;
            matched = true;
        }
    }
    require(matched, "policy", "unknown policy '" + policy + "'");

    const std::string preset = r.text("preset", "mnist");
    require(preset == "mnist" || preset == "cifar10", "preset", "expected mnist or cifar10");
    c.preset = preset == "mnist" ? DatasetPreset::mnist : DatasetPreset::cifar10;

    c.lr = r.real("lr", 0.01);
    require(c.lr > 0.0, "lr", "must be positive");
    c.warmup_start = r.real("warmup_start", c.lr / 10.0);
    require(c.warmup_start > 0.0, "warmup_start", "must be positive");
    const long long warm = r.integer("warmup_epochs", 5);
    require(warm >= 1, "warmup_epochs", "must be >= 1");
    c.warmup_epochs = static_cast<int>(warm);
    c.decay_rate = r.real("decay_rate", 0.95);
    require(c.decay_rate > 0.0 && c.decay_rate <= 1.0, "decay_rate", "must lie in (0, 1]");

    c.constants = c.policy == PolicyKind::dynamic_change
                      ? change_policy_defaults(c.preset, c.lr)
                      : change_value_policy_defaults(c.preset, c.lr);
    c.constants.lr_min = r.real("lr_min", c.constants.lr_min);
    c.constants.lr_max = r.real("lr_max", c.constants.lr_max);
    c.constants.epsilon = r.real("epsilon", c.constants.epsilon);
    c.constants.gamma1 = r.real("gamma1", c.constants.gamma1);
    c.constants.gamma2 = r.real("gamma2", c.constants.gamma2);
    c.constants.gamma3 = r.real("gamma3", c.constants.gamma3);
    require(c.constants.lr_min > 0.0, "lr_min", "must be positive");
    require(c.constants.lr_max >= c.constants.lr_min, "lr_max", "must be >= lr_min");
    require(c.constants.epsilon > 0.0, "epsilon", "must be positive");
    require(c.constants.gamma1 >= 0.0, "gamma1", "must be >= 0");
    require(c.constants.gamma2 >= 0.0, "gamma2", "must be >= 0");
    require(c.constants.gamma3 >= 0.0, "gamma3", "must be >= 0");

    const long long probe = r.integer("probe_size", 1000);
    require(probe >= 2, "probe_size", "must be >= 2");
    c.probe_size = static_cast<std::size_t>(probe);
    const long long k = r.integer("k", 4);
    require(k >= 1 && k < probe, "k", "must lie in [1, probe_size)");
    c.k = static_cast<int>(k);
    const long long tiling = r.integer("tiling", 1);
    require(tiling >= 1 && tiling <= 1024, "tiling", "must lie in [1, 1024]");
    c.tiling = static_cast<int>(tiling);
    c.jitter = r.real("jitter", 1e-10);
    require(c.jitter >= 0.0, "jitter", "must be >= 0");
    c.redraw_probe = r.boolean("redraw_probe", false);
    c.record_layer_mi = r.boolean("record_layer_mi", false);

    const long long epochs = r.integer("epochs", 30);
    require(epochs >= 1, "epochs", "must be >= 1");
    c.epochs = static_cast<int>(epochs);
    const long long seed = r.integer("seed", 1);
    require(seed >= 0, "seed", "must be >= 0");
    c.seed = static_cast<std::uint64_t>(seed);
    c.out_dir = r.text("out_dir", "run");
    const long long every = r.integer("checkpoint_every", 5);
    require(every >= 1, "checkpoint_every", "must be >= 1");
    c.checkpoint_every = static_cast<int>(every);

    const long long new_bs = r.integer("bs_change_batch_size", 0);
    require(new_bs >= 0, "bs_change_batch_size", "must be >= 0");
    const long long window = r.integer("bs_change_window", 3);
    require(window >= 0, "bs_change_window", "must be >= 0");
    if (r.raw("bs_change_batch_size") || r.raw("bs_change_window")) {
        c.bs_change = BatchSizeChange{static_cast<std::size_t>(new_bs), static_cast<int>(window)};
    }
    return c;
}

std::string format_config(const RunConfig& c) {
    std::ostringstream os;
    os << "dataset = " << (c.dataset == DatasetKind::mnist ? "mnist" : "blobs") << '\n';
    if (!c.mnist_dir.empty()) os << "mnist_dir = " << c.mnist_dir.string() << '\n';
    os << "blobs_per_class = " << c.blobs.n_per_class << '\n'
       << "blobs_classes = " << c.blobs.classes << '\n'
       << "blobs_dim = " << c.blobs.dim << '\n'
       << "blobs_separation = " << fmt_real(c.blobs.separation) << '\n';
    os << "hidden = ";
    if (c.hidden.empty()) os << "none";
    for (std::size_t i = 0; i < c.hidden.size(); ++i) os << (i ? "," : "") << c.hidden[i];
    os << '\n'
       << "activation = " << (c.activation == Activation::relu ? "relu" : "tanh") << '\n'
       << "momentum = " << fmt_real(c.optimizer.momentum) << '\n'
       << "nesterov = " << (c.optimizer.nesterov ? "true" : "false") << '\n'
       << "batch_size = " << c.optimizer.batch_size << '\n'
       << "policy = " << policy_name(c.policy) << '\n'
       << "preset = " << (c.preset == DatasetPreset::mnist ? "mnist" : "cifar10") << '\n'
       << "lr = " << fmt_real(c.lr) << '\n'
       << "warmup_start = " << fmt_real(c.warmup_start) << '\n'
       << "warmup_epochs = " << c.warmup_epochs << '\n'
       << "decay_rate = " << fmt_real(c.decay_rate) << '\n'
       << "lr_min = " << fmt_real(c.constants.lr_min) << '\n'
       << "lr_max = " << fmt_real(c.constants.lr_max) << '\n'
       << "epsilon = " << fmt_real(c.constants.epsilon) << '\n'
       << "gamma1 = " << fmt_real(c.constants.gamma1) << '\n'
       << "gamma2 = " << fmt_real(c.constants.gamma2) << '\n'
       << "gamma3 = " << fmt_real(c.constants.gamma3) << '\n'
       << "probe_size = " << c.probe_size << '\n'
       << "k = " << c.k << '\n'
       << "tiling = " << c.tiling << '\n'
       << "jitter = " << fmt_real(c.jitter) << '\n'
       << "redraw_probe = " << (c.redraw_probe ? "true" : "false") << '\n'
       << "record_layer_mi = " << (c.record_layer_mi ? "true" : "false") << '\n'
       << "epochs = " << c.epochs << '\n'
       << "seed = " << c.seed << '\n'
       << "out_dir = " << c.out_dir.string() << '\n'
       << "checkpoint_every = " << c.checkpoint_every << '\n';
    if (c.bs_change) {
        os << "bs_change_batch_size = " << c.bs_change->batch_size << '\n'
           << "bs_change_window = " << c.bs_change->window << '\n';
    }
    return os.str();
}

}  // namespace mirate
