#include "mirate/checkpoint.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "mirate/errors.hpp"
#include "mirate/serialize.hpp"

namespace mirate {

namespace {

constexpr char kMagic[8] = {'M', 'I', 'R', 'A', 'T', 'E', 'C', 'K'};
constexpr std::uint64_t kVersion = 1;

void put_state(BinaryWriter& w, const SchedulerState& s) {
    w.put_double(s.lr);
    w.put_u64(s.history.count);
    w.put_double(s.history.latest);
    w.put_double(s.history.previous);
    w.put_u64(s.ixy.has_value());
    w.put_double(s.ixy.value_or(0.0));
    w.put_i64(s.epoch);
    w.put_i64(s.value_only_window);
}

SchedulerState get_state(BinaryReader& r) {
    SchedulerState s;
    s.lr = r.get_double();
    s.history.count = r.get_u64();
    if (s.history.count > 2) throw ParseError(ParseErrorKind::corrupt, "bad history length");
    s.history.latest = r.get_double();
    s.history.previous = r.get_double();
    const bool has_ixy = r.get_u64() != 0;
    const double ixy = r.get_double();
    if (has_ixy) s.ixy = ixy;
    s.epoch = static_cast<int>(r.get_i64());
    s.value_only_window = static_cast<int>(r.get_i64());
    return s;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const RunCheckpoint& c) {
    std::ostringstream body(std::ios::binary);
    BinaryWriter w(body);
    w.put_raw(kMagic, sizeof kMagic);
    w.put_u64(kVersion);
    w.put_i64(c.completed_epochs);
    w.put_string(c.policy);
    for (double v : {c.constants.lr_min, c.constants.lr_max, c.constants.epsilon,
                     c.constants.gamma1, c.constants.gamma2, c.constants.gamma3}) {
        w.put_double(v);
    }
    w.put_u64(c.states.size());
    for (const auto& s : c.states) put_state(w, s);
    w.put_double(c.ixy);
    w.put_double(c.optimizer.momentum);
    w.put_u64(c.optimizer.nesterov);
    w.put_u64(c.optimizer.batch_size);
    save_network(body, c.network);

    const std::string bytes = body.str();
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char ch : bytes) {
        hash ^= ch;
        hash *= 0x100000001b3ULL;
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ParseError(ParseErrorKind::io, "cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    BinaryWriter tail(out);
    tail.put_u64(hash);
}

RunCheckpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(ParseErrorKind::io, "cannot open " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() < sizeof kMagic + 16) {
        throw ParseError(ParseErrorKind::truncated, "checkpoint too short");
    }
    if (std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
        throw ParseError(ParseErrorKind::bad_magic, "not a checkpoint file");
    }

    const std::string body = bytes.substr(0, bytes.size() - 8);
    std::istringstream tail_in(bytes.substr(bytes.size() - 8), std::ios::binary);
    const std::uint64_t stored = BinaryReader(tail_in).get_u64();
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char ch : body) {
        hash ^= ch;
        hash *= 0x100000001b3ULL;
    }
    if (hash != stored) throw ParseError(ParseErrorKind::corrupt, "checkpoint checksum mismatch");

    std::istringstream is(body, std::ios::binary);
    BinaryReader r(is);
    char magic[sizeof kMagic];
    r.get_raw(magic, sizeof magic);
    if (r.get_u64() != kVersion) throw ParseError(ParseErrorKind::corrupt, "unsupported version");

    RunCheckpoint c;
    c.completed_epochs = static_cast<int>(r.get_i64());
    c.policy = r.get_string(64);
    c.constants.lr_min = r.get_double();
    c.constants.lr_max = r.get_double();
    c.constants.epsilon = r.get_double();
    c.constants.gamma1 = r.get_double();
    c.constants.gamma2 = r.get_double();
    c.constants.gamma3 = r.get_double();
    const std::uint64_t n_states = r.get_u64();
    if (n_states > 64) throw ParseError(ParseErrorKind::corrupt, "bad scheduler state count");
    for (std::uint64_t i = 0; i < n_states; ++i) c.states.push_back(get_state(r));
    c.ixy = r.get_double();
    c.optimizer.momentum = r.get_double();
    c.optimizer.nesterov = r.get_u64() != 0;
    c.optimizer.batch_size = r.get_u64();
    c.network = load_network(is);
    if (is.peek() != std::char_traits<char>::eof()) {
        throw ParseError(ParseErrorKind::corrupt, "trailing bytes in checkpoint");
    }
    return c;
}

}  // namespace mirate
