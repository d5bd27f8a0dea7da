#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "cbo/objectives.hpp"

namespace cbo::harness {

inline constexpr std::uint32_t kIdxImageMagic = 2051;
inline constexpr std::uint32_t kIdxLabelMagic = 2049;

/// Images scaled to [0, 1] with their class labels.
struct IdxDataset {
  std::size_t rows = 0;
  std::size_t cols = 0;
  LabeledData data;
};

/// Reads an IDX image file (magic 2051, count, rows, cols, then bytes) and an IDX label
/// file (magic 2049, count, then bytes). All header fields are big-endian 32-bit.
/// Pixels are divided by 255. `limit` keeps only the first `limit` items when nonzero.
IdxDataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels,
                    std::size_t limit = 0);

/// Writers for the same format; pixels are given as raw bytes.
void write_idx_images(const std::filesystem::path& path, std::size_t rows, std::size_t cols,
                      const std::vector<std::uint8_t>& pixels);
void write_idx_labels(const std::filesystem::path& path, const std::vector<std::uint8_t>& labels);

}  // namespace cbo::harness
