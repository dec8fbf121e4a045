#include "mirate/records.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "mirate/errors.hpp"

namespace mirate {

namespace {

std::string real9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string real17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double to_real(const std::string& s) {
    if (s == "nan") return std::nan("");
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) {
        throw ParseError(ParseErrorKind::corrupt, "bad number '" + s + "'");
    }
    return v;
}

int to_int(const std::string& s) {
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) {
        throw ParseError(ParseErrorKind::corrupt, "bad integer '" + s + "'");
    }
    return v;
}

const char* kFixedColumns[] = {"epoch",    "lr",       "lr_next",   "branch", "train_loss",
                               "train_acc", "test_loss", "test_acc", "ihyll",  "ixy"};
constexpr std::size_t kFixedCount = std::size(kFixedColumns);

}  // namespace

void emit_csv(std::ostream& os, std::span<const EpochRecord> records) {
    const std::size_t lr_cols = records.empty() ? 0 : records.front().layer_lrs.size();
    const std::size_t ihy_cols = records.empty() ? 0 : records.front().ihy_per_layer.size();
    for (std::size_t i = 0; i < kFixedCount; ++i) os << (i ? "," : "") << kFixedColumns[i];
    for (std::size_t i = 0; i < lr_cols; ++i) os << ",lr_layer" << i;
    for (std::size_t i = 0; i < ihy_cols; ++i) os << ",ihy_layer" << i;
    os << '\n';
    for (const auto& r : records) {
        if (r.layer_lrs.size() != lr_cols || r.ihy_per_layer.size() != ihy_cols) {
            throw ContractError("emit_csv: records disagree on per-layer column counts");
        }
        os << r.epoch << ',' << real9(r.lr) << ',' << real9(r.lr_next) << ',' << r.branch << ','
           << real9(r.train_loss) << ',' << real9(r.train_acc) << ',' << real9(r.test_loss) << ','
           << real9(r.test_acc) << ',' << real9(r.ihyll) << ',' << real9(r.ixy);
        for (double v : r.layer_lrs) os << ',' << real9(v);
        for (double v : r.ihy_per_layer) os << ',' << real9(v);
        os << '\n';
    }
}

void emit_csv(const std::filesystem::path& path, std::span<const EpochRecord> records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError(ParseErrorKind::io, "cannot write " + path.string());
    emit_csv(out, records);
    out.flush();
    if (!out) throw ParseError(ParseErrorKind::io, "write failed: " + path.string());
}

std::vector<EpochRecord> read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ParseError(ParseErrorKind::truncated, "missing CSV header");
    const auto header = split(line);
    if (header.size() < kFixedCount) throw ParseError(ParseErrorKind::corrupt, "short CSV header");
    for (std::size_t i = 0; i < kFixedCount; ++i) {
        if (header[i] != kFixedColumns[i]) {
            throw ParseError(ParseErrorKind::corrupt, "unexpected column '" + header[i] + "'");
        }
    }
    std::size_t lr_cols = 0;
    std::size_t ihy_cols = 0;
    for (std::size_t i = kFixedCount; i < header.size(); ++i) {
        if (header[i].rfind("lr_layer", 0) == 0) {
            ++lr_cols;
        } else if (header[i].rfind("ihy_layer", 0) == 0) {
            ++ihy_cols;
        } else {
            throw ParseError(ParseErrorKind::corrupt, "unexpected column '" + header[i] + "'");
        }
    }

    std::vector<EpochRecord> out;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != header.size()) {
            throw ParseError(ParseErrorKind::corrupt, "row width does not match header");
        }
        EpochRecord r;
        r.epoch = to_int(cells[0]);
        r.lr = to_real(cells[1]);
        r.lr_next = to_real(cells[2]);
        r.branch = cells[3];
        r.train_loss = to_real(cells[4]);
        r.train_acc = to_real(cells[5]);
        r.test_loss = to_real(cells[6]);
        r.test_acc = to_real(cells[7]);
        r.ihyll = to_real(cells[8]);
        r.ixy = to_real(cells[9]);
        for (std::size_t i = 0; i < lr_cols; ++i) r.layer_lrs.push_back(to_real(cells[kFixedCount + i]));
        for (std::size_t i = 0; i < ihy_cols; ++i) {
            r.ihy_per_layer.push_back(to_real(cells[kFixedCount + lr_cols + i]));
        }
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<EpochRecord> read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(ParseErrorKind::io, "cannot open " + path.string());
    return read_csv(in);
}

void emit_timing_csv(std::ostream& os, std::span<const EpochRecord> records) {
    os << "epoch,train_ms,eval_ms,probe_ms\n";
    for (const auto& r : records) {
        os << r.epoch << ',' << real9(r.train_ms) << ',' << real9(r.eval_ms) << ','
           << real9(r.probe_ms) << '\n';
    }
}

void emit_decisions_csv(std::ostream& os, std::span<const DecisionRow> rows) {
    os << "epoch,layer,policy,branch,d1,d2,lr_next\n";
    for (const auto& r : rows) {
        os << r.epoch << ',' << r.layer << ',' << r.policy << ',' << branch_name(r.decision.branch)
           << ',' << real17(r.decision.d1) << ',' << real17(r.decision.d2) << ','
           << real17(r.decision.lr_next) << '\n';
    }
}

std::vector<DecisionRow> read_decisions_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "epoch,layer,policy,branch,d1,d2,lr_next") {
        throw ParseError(ParseErrorKind::corrupt, "not a decision log");
    }
    std::vector<DecisionRow> out;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto c = split(line);
        if (c.size() != 7) throw ParseError(ParseErrorKind::corrupt, "bad decision row");
        DecisionRow r;
        r.epoch = to_int(c[0]);
        r.layer = to_int(c[1]);
        r.policy = c[2];
        const auto b = parse_branch(c[3]);
        if (!b) throw ParseError(ParseErrorKind::corrupt, "unknown branch '" + c[3] + "'");
        r.decision.branch = *b;
        r.decision.d1 = to_real(c[4]);
        r.decision.d2 = to_real(c[5]);
        r.decision.lr_next = to_real(c[6]);
        out.push_back(std::move(r));
    }
    return out;
}

const std::vector<std::string>& comparison_metrics() {
    static const std::vector<std::string> metrics{"lr",        "train_loss", "train_acc", "test_loss",
                                                  "test_acc", "ihyll",      "ixy"};
    return metrics;
}

void emit_comparison(std::ostream& os, std::span<const std::filesystem::path> run_dirs) {
    struct Run {
        std::string name;
        std::map<int, EpochRecord> by_epoch;
    };
    std::vector<Run> runs;
    std::set<int> epochs;
    for (const auto& dir : run_dirs) {
        Run run;
        run.name = dir.filename().empty() ? dir.parent_path().filename().string()
                                          : dir.filename().string();
        for (auto& r : read_csv(dir / "epochs.csv")) {
            epochs.insert(r.epoch);
            run.by_epoch.emplace(r.epoch, std::move(r));
        }
        runs.push_back(std::move(run));
    }

    auto metric = [](const EpochRecord& r, const std::string& m) {
        if (m == "lr") return r.lr;
        if (m == "train_loss") return r.train_loss;
        if (m == "train_acc") return r.train_acc;
        if (m == "test_loss") return r.test_loss;
        if (m == "test_acc") return r.test_acc;
        if (m == "ihyll") return r.ihyll;
        return r.ixy;
    };

    os << "run_name,epoch,metric,value\n";
    for (const auto& run : runs) {
        for (int e : epochs) {
            const auto it = run.by_epoch.find(e);
            for (const auto& m : comparison_metrics()) {
                os << run.name << ',' << e << ',' << m << ',';
                if (it == run.by_epoch.end()) {
                    os << "NA";
                } else {
                    os << real9(metric(it->second, m));
                }
                os << '\n';
            }
        }
    }
}

}  // namespace mirate
