#include "mirate/mnist.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <fstream>
#include <ostream>
#include <string>

#include "mirate/errors.hpp"

namespace mirate {

void Dataset::validate() const {
    if (class_count < 2) throw ContractError("dataset: need at least two classes");
    if (train_x.rows() != train_labels.size() || test_x.rows() != test_labels.size()) {
        throw ContractError("dataset: row counts do not match label counts");
    }
    if (train_x.cols() != test_x.cols() && !test_x.empty()) {
        throw ContractError("dataset: train and test widths differ");
    }
    auto check_labels = [&](const std::vector<int>& ls) {
        for (int y : ls) {
            if (y < 0 || y >= class_count) throw ContractError("dataset: label out of range");
        }
    };
    check_labels(train_labels);
    check_labels(test_labels);
    auto check_range = [](const SampleMatrix& m) {
        for (double v : m.values()) {
            if (!(v >= 0.0 && v <= 1.0)) throw ContractError("dataset: feature outside [0, 1]");
        }
    };
    check_range(train_x);
    check_range(test_x);
}

namespace {

// Reads a whole file, inflating it when it starts with the gzip magic.
std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(ParseErrorKind::io, "cannot open " + path.string());
    std::vector<std::uint8_t> raw((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
    if (raw.size() < 2 || raw[0] != 0x1f || raw[1] != 0x8b) return raw;

    gzFile gz = gzopen(path.string().c_str(), "rb");
    if (gz == nullptr) throw ParseError(ParseErrorKind::io, "cannot open " + path.string());
    std::vector<std::uint8_t> out;
    std::array<std::uint8_t, 1 << 16> buf{};
    int got = 0;
    while ((got = gzread(gz, buf.data(), static_cast<unsigned>(buf.size()))) > 0) {
        out.insert(out.end(), buf.begin(), buf.begin() + got);
    }
    int err = Z_OK;
    gzerror(gz, &err);
    gzclose(gz);
    if (got < 0 || (err != Z_OK && err != Z_STREAM_END)) {
        throw ParseError(ParseErrorKind::truncated, "corrupt gzip stream in " + path.string());
    }
    return out;
}

std::uint32_t be32(const std::vector<std::uint8_t>& b, std::size_t off) {
    return (std::uint32_t{b[off]} << 24) | (std::uint32_t{b[off + 1]} << 16) |
           (std::uint32_t{b[off + 2]} << 8) | std::uint32_t{b[off + 3]};
}

void put_be32(std::ostream& os, std::uint32_t v) {
    const char b[4] = {static_cast<char>(v >> 24), static_cast<char>(v >> 16),
                       static_cast<char>(v >> 8), static_cast<char>(v)};
    os.write(b, 4);
}

}  // namespace

LabeledImages load_mnist_idx(const std::filesystem::path& images_path,
                             const std::filesystem::path& labels_path) {
    const auto img = read_file(images_path);
    if (img.size() < 4) throw ParseError(ParseErrorKind::truncated, "image file too short");
    if (be32(img, 0) != kIdxImageMagic) {
        throw ParseError(ParseErrorKind::bad_magic,
                         "not an IDX image file (magic " + std::to_string(be32(img, 0)) + ")");
    }
    if (img.size() < 16) throw ParseError(ParseErrorKind::truncated, "image header truncated");
    const std::size_t count = be32(img, 4);
    const std::size_t rows = be32(img, 8);
    const std::size_t cols = be32(img, 12);
    const std::size_t width = rows * cols;
    if (img.size() - 16 < count * width) {
        throw ParseError(ParseErrorKind::truncated, "image data truncated");
    }

    const auto lab = read_file(labels_path);
    if (lab.size() < 4) throw ParseError(ParseErrorKind::truncated, "label file too short");
    if (be32(lab, 0) != kIdxLabelMagic) {
        throw ParseError(ParseErrorKind::bad_magic,
                         "not an IDX label file (magic " + std::to_string(be32(lab, 0)) + ")");
    }
    if (lab.size() < 8) throw ParseError(ParseErrorKind::truncated, "label header truncated");
    const std::size_t label_count = be32(lab, 4);
    if (label_count != count) {
        throw ParseError(ParseErrorKind::count_mismatch,
                         "image count " + std::to_string(count) + " != label count " +
                             std::to_string(label_count));
    }
    if (lab.size() - 8 < label_count) {
        throw ParseError(ParseErrorKind::truncated, "label data truncated");
    }

    LabeledImages out;
    out.images = SampleMatrix(count, width);
    auto px = out.images.values();
    for (std::size_t i = 0; i < count * width; ++i) px[i] = img[16 + i] / 255.0;
    out.labels.assign(lab.begin() + 8, lab.begin() + 8 + static_cast<std::ptrdiff_t>(count));
    return out;
}

Dataset load_mnist(const std::filesystem::path& dir) {
    auto pick = [&](const std::string& stem) {
        const auto plain = dir / stem;
        if (std::filesystem::exists(plain)) return plain;
        const auto gz = dir / (stem + ".gz");
        if (std::filesystem::exists(gz)) return gz;
        throw ParseError(ParseErrorKind::io, "missing " + plain.string() + "[.gz]");
    };
    auto train = load_mnist_idx(pick("train-images-idx3-ubyte"), pick("train-labels-idx1-ubyte"));
    auto test = load_mnist_idx(pick("t10k-images-idx3-ubyte"), pick("t10k-labels-idx1-ubyte"));
    Dataset ds;
    ds.train_x = std::move(train.images);
    ds.train_labels = std::move(train.labels);
    ds.test_x = std::move(test.images);
    ds.test_labels = std::move(test.labels);
    ds.class_count = 10;
    ds.validate();
    return ds;
}

void write_idx_images(std::ostream& os, std::uint32_t rows, std::uint32_t cols,
                      std::span<const std::uint8_t> pixels) {
    const std::size_t width = std::size_t{rows} * cols;
    if (width == 0 || pixels.size() % width != 0) {
        throw ContractError("write_idx_images: pixel count is not a multiple of rows*cols");
    }
    put_be32(os, kIdxImageMagic);
    put_be32(os, static_cast<std::uint32_t>(pixels.size() / width));
    put_be32(os, rows);
    put_be32(os, cols);
    os.write(reinterpret_cast<const char*>(pixels.data()),
             static_cast<std::streamsize>(pixels.size()));
}

void write_idx_labels(std::ostream& os, std::span<const std::uint8_t> labels) {
    put_be32(os, kIdxLabelMagic);
    put_be32(os, static_cast<std::uint32_t>(labels.size()));
    os.write(reinterpret_cast<const char*>(labels.data()),
             static_cast<std::streamsize>(labels.size()));
}

}  // namespace mirate
