#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "mirate/dataset.hpp"
#include "mirate/sample_matrix.hpp"

namespace mirate {

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;  // 2051
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;  // 2049

struct LabeledImages {
    SampleMatrix images;  // one flattened image per row, pixels / 255
    std::vector<int> labels;
};

/// Parses an IDX image file and its label file. Either may be gzip-compressed
/// (detected by the 0x1f 0x8b magic). Throws ParseError with kind bad_magic,
/// truncated, count_mismatch or io.
LabeledImages load_mnist_idx(const std::filesystem::path& images_path,
                             const std::filesystem::path& labels_path);

/// Loads train-images-idx3-ubyte / train-labels-idx1-ubyte / t10k-* from `dir`,
/// with or without a .gz suffix.
Dataset load_mnist(const std::filesystem::path& dir);

/// Writes the big-endian IDX containers (uncompressed).
void write_idx_images(std::ostream& os, std::uint32_t rows, std::uint32_t cols,
                      std::span<const std::uint8_t> pixels);
void write_idx_labels(std::ostream& os, std::span<const std::uint8_t> labels);

}  // namespace mirate
