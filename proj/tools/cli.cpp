#include "cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "mirate/errors.hpp"
#include "mirate/experiment.hpp"
#include "mirate/probe.hpp"
#include "mirate/rng.hpp"
#include "mirate/synthetic.hpp"

namespace mirate {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct CommonRunFlags {
    std::string config;
    std::vector<std::string> sets;
    std::optional<long long> seed;
    std::optional<long long> epochs;
    std::optional<std::string> policy;
    std::optional<double> lr_min;
    std::optional<double> lr_max;
    std::optional<long long> probe_size;
    std::optional<long long> k;
    std::optional<std::string> out;

    void attach(CLI::App* app) {
        app->add_option("-c,--config", config, "key = value configuration file");
        app->add_option("--set", sets, "override any configuration key (key=value)");
        app->add_option("--seed", seed, "run seed");
        app->add_option("--epochs", epochs, "total epochs");
        app->add_option("--policy", policy,
                        "fixed | warmup | decay | dynamic-change | dynamic-change-value | layerwise");
        app->add_option("--lr-min", lr_min, "lower learning-rate bound");
        app->add_option("--lr-max", lr_max, "upper learning-rate bound");
        app->add_option("--probe-size", probe_size, "MI probe subset size");
        app->add_option("--k", k, "KSG neighbour count");
        app->add_option("-o,--out", out, "output directory");
    }

    ConfigMap build() const {
        ConfigMap m = config.empty() ? ConfigMap{} : parse_config_file(config);
        for (const auto& kv : sets) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw ConfigError(kv, "--set expects key=value");
            m[kv.substr(0, eq)] = kv.substr(eq + 1);
        }
        auto put = [&m](const char* key, const auto& v) {
            if (!v) return;
            std::ostringstream os;
            os.precision(17);
            os << *v;
            m[key] = os.str();
        };
        put("seed", seed);
        put("epochs", epochs);
        put("policy", policy);
        put("lr_min", lr_min);
        put("lr_max", lr_max);
        put("probe_size", probe_size);
        put("k", k);
        put("out_dir", out);
        return m;
    }
};

std::vector<std::size_t> parse_sizes(const std::string& text) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t pos = 0;
            const long long v = std::stoll(item, &pos);
            if (pos != item.size() || v <= 0) throw std::invalid_argument(item);
            out.push_back(static_cast<std::size_t>(v));
        } catch (const std::exception&) {
            throw ConfigError("sizes", "expected positive comma-separated integers");
        }
    }
    if (out.empty()) throw ConfigError("sizes", "no sample sizes given");
    return out;
}

void summarize(std::ostream& out, const RunResult& res, const RunConfig& cfg) {
    out << "epochs written: " << res.records.size() << " -> " << (cfg.out_dir / "epochs.csv").string()
        << '\n';
    if (!res.records.empty()) {
        const auto& last = res.records.back();
        out << "IXY " << res.ixy << " nats; final IHYLL " << last.ihyll << "; test acc "
            << last.test_acc << '\n';
    }
}

}  // namespace

int cli_main(int argc, const char* const* argv) { return cli_main(argc, argv, std::cout, std::cerr); }

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"mirate: mutual-information driven learning-rate experiments"};
    app.name("mirate");
    app.require_subcommand(1);

    CommonRunFlags run_flags;
    auto* run = app.add_subcommand("run", "train with the configured learning-rate policy");
    run_flags.attach(run);

    CommonRunFlags resume_flags;
    std::string checkpoint;
    std::optional<long long> new_batch;
    std::optional<long long> window;
    auto* resume = app.add_subcommand("resume", "continue from a checkpoint, optionally changing batch size");
    resume_flags.attach(resume);
    resume->add_option("--checkpoint", checkpoint, "checkpoint file to resume from")->required();
    resume->add_option("--batch-size", new_batch, "new mini-batch size");
    resume->add_option("--window", window, "epochs of value-only tracking after the change");

    std::string source = "gaussian";
    double rho = 0.9;
    long long pool = 10000;
    std::string sizes_text = "100,500,1000,2000";
    int repeats = 10;
    int curve_k = 4;
    long long curve_seed = 1;
    std::string curve_out = "mi_curve.csv";
    CommonRunFlags curve_data;
    auto* curve = app.add_subcommand("mi-curve", "MI-vs-sample-size curve of inputs and labels");
    curve->add_option("--source", source, "gaussian | dataset")->check(CLI::IsMember({"gaussian", "dataset"}));
    curve->add_option("--rho", rho, "correlation of the Gaussian pair");
    curve->add_option("--n", pool, "Gaussian pool size");
    curve->add_option("--sizes", sizes_text, "comma-separated subset sizes");
    curve->add_option("--repeats", repeats, "subsets per size (>= 2)");
    curve->add_option("--k", curve_k, "KSG neighbour count");
    curve->add_option("--seed", curve_seed, "seed");
    curve->add_option("-o,--out", curve_out, "output CSV");
    curve->add_option("-c,--config", curve_data.config, "dataset configuration (source = dataset)");
    curve->add_option("--set", curve_data.sets, "configuration override (key=value)");

    std::vector<std::string> run_dirs;
    std::string compare_out = "comparison.csv";
    auto* compare = app.add_subcommand("compare", "merge run directories into a long-format table");
    compare->add_option("runs", run_dirs, "run output directories")->required();
    compare->add_option("-o,--out", compare_out, "output CSV");

    auto* keys = app.add_subcommand("config-keys", "list configuration keys and defaults");

    if (argc <= 1) {
        err << app.help();
        return kExitUsage;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    RunConfig cfg;
    try {
        if (*run) {
            cfg = resolve_config(run_flags.build());
        } else if (*resume) {
            ConfigMap m = resume_flags.build();
            if (new_batch) m["bs_change_batch_size"] = std::to_string(*new_batch);
            if (window) m["bs_change_window"] = std::to_string(*window);
            cfg = resolve_config(m);
        } else if (*curve && source == "dataset") {
            cfg = resolve_config(curve_data.build());
        }
        if (*curve && repeats < 2) throw ConfigError("repeats", "must be >= 2");
        if (*curve && !(rho > -1.0 && rho < 1.0)) throw ConfigError("rho", "must lie in (-1, 1)");
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (*run) {
            summarize(out, run_experiment(cfg), cfg);
        } else if (*resume) {
            summarize(out, resume_with_batch_size(cfg, checkpoint), cfg);
        } else if (*curve) {
            std::vector<std::size_t> sizes;
            try {
                sizes = parse_sizes(sizes_text);
            } catch (const ConfigError& e) {
                err << "config error: " << e.what() << '\n';
                return kExitUsage;
            }
            SampleMatrix x;
            SampleMatrix y;
            if (source == "gaussian") {
                std::tie(x, y) = gen_gaussian_pair(static_cast<std::size_t>(pool), rho,
                                                   static_cast<std::uint64_t>(curve_seed));
            } else {
                Dataset data = load_dataset(cfg);
                x = std::move(data.train_x);
                y = labels_to_real(data.train_labels, 0.0, 0);
            }
            const auto points = mi_vs_sample_size(x, y, sizes, repeats, curve_k,
                                                  static_cast<std::uint64_t>(curve_seed));
            std::ofstream os(curve_out, std::ios::binary);
            if (!os) throw ParseError(ParseErrorKind::io, "cannot write " + curve_out);
            write_curve_csv(os, points);
            out << "wrote " << points.size() << " curve points to " << curve_out << '\n';
        } else if (*compare) {
            std::vector<std::filesystem::path> dirs(run_dirs.begin(), run_dirs.end());
            std::ofstream os(compare_out, std::ios::binary);
            if (!os) throw ParseError(ParseErrorKind::io, "cannot write " + compare_out);
            emit_comparison(os, dirs);
            out << "wrote " << compare_out << '\n';
        } else if (*keys) {
            for (const auto& k : config_keys()) {
                out << k.name << " = " << k.default_value << "    # " << k.help << '\n';
            }
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitOk;
}

}  // namespace mirate
