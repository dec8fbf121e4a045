#pragma once

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>

#include "mirate/errors.hpp"

namespace mirate {

/// Little-endian binary writer that keeps a running FNV-1a checksum.
class BinaryWriter {
public:
    explicit BinaryWriter(std::ostream& os) : os_(os) {}

    void put_u64(std::uint64_t v) {
        unsigned char b[8];
        for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
        write(b, 8);
    }
    void put_i64(std::int64_t v) { put_u64(static_cast<std::uint64_t>(v)); }
    void put_double(double v) { put_u64(std::bit_cast<std::uint64_t>(v)); }
    void put_doubles(std::span<const double> vs) {
        put_u64(vs.size());
        for (double v : vs) put_double(v);
    }
    void put_string(const std::string& s) {
        put_u64(s.size());
        write(reinterpret_cast<const unsigned char*>(s.data()), s.size());
    }
    void put_raw(const char* data, std::size_t n) {
        write(reinterpret_cast<const unsigned char*>(data), n);
    }

    std::uint64_t checksum() const noexcept { return hash_; }

private:
    void write(const unsigned char* p, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) {
            hash_ ^= p[i];
            hash_ *= 0x100000001b3ULL;
        }
        os_.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n));
        if (!os_) throw ParseError(ParseErrorKind::io, "write failed");
    }

    std::ostream& os_;
    std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

class BinaryReader {
public:
    explicit BinaryReader(std::istream& is) : is_(is) {}

    std::uint64_t get_u64() {
        unsigned char b[8];
        read(b, 8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
        return v;
    }
    std::int64_t get_i64() { return static_cast<std::int64_t>(get_u64()); }
    double get_double() { return std::bit_cast<double>(get_u64()); }
    void get_doubles(std::span<double> out) {
        if (get_u64() != out.size()) {
            throw ParseError(ParseErrorKind::corrupt, "array length does not match shape");
        }
        for (double& v : out) v = get_double();
    }
    std::string get_string(std::size_t max_len = 4096) {
        const std::uint64_t n = get_u64();
        if (n > max_len) throw ParseError(ParseErrorKind::corrupt, "string too long");
        std::string s(n, '\0');
        read(reinterpret_cast<unsigned char*>(s.data()), n);
        return s;
    }
    void get_raw(char* data, std::size_t n) { read(reinterpret_cast<unsigned char*>(data), n); }

    std::uint64_t checksum() const noexcept { return hash_; }

private:
    void read(unsigned char* p, std::size_t n) {
        is_.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(is_.gcount()) != n) {
            throw ParseError(ParseErrorKind::truncated, "unexpected end of data");
        }
        for (std::size_t i = 0; i < n; ++i) {
            hash_ ^= p[i];
            hash_ *= 0x100000001b3ULL;
        }
    }

    std::istream& is_;
    std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

}  // namespace mirate
