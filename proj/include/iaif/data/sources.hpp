// SPDX-FileCopyrightText: 2026 The iaif Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "iaif/data/dataset.hpp"

namespace iaif::data {

/// Unsigned-byte IDX tensor (the MNIST container format).
struct IdxTensor {
  std::vector<std::uint32_t> dims;
  std::vector<std::uint8_t> values;

  std::size_t element_count() const;
  friend bool operator==(const IdxTensor&, const IdxTensor&) = default;
};

inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;
inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;

/// Parses big-endian IDX bytes. Accepts the label (rank 1) and image (rank 3)
/// magics only. Throws FormatError on a bad magic and LengthError when the
/// header or payload is truncated or has trailing bytes.
IdxTensor load_idx(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> serialize_idx(const IdxTensor& tensor);
IdxTensor read_idx_file(const std::filesystem::path& path);

/// Flattens an image tensor into rows scaled by `pixel_scale`; keeps the
/// first `max_count` examples when given.
Dataset dataset_from_idx(const IdxTensor& images, const IdxTensor& labels, int n_classes,
                         double pixel_scale = 1.0 / 255.0,
                         std::optional<std::size_t> max_count = std::nullopt);

/// Regression table with a header row. `target_column` may be negative to
/// count from the end (default: last column).
Dataset load_regression_csv(const std::filesystem::path& path, int target_column = -1);
Dataset parse_regression_csv(const std::string& text, int target_column = -1);

struct SyntheticConfig {
  int n_classes = 2;
  int n_per_class = 50;
  int dim = 2;
  /// Class centers are uniform in [-center_scale, center_scale]^dim.
  double center_scale = 10.0;
  double noise_std = 1.0;
  /// Class c uses noise_std * class_std_ratio^(c / (C - 1)); 1 keeps all
  /// classes equally spread.
  double class_std_ratio = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Gaussian blobs: centers drawn once as center_scale * N(0, I), then
/// n_per_class points per class around them, class-major order.
Dataset make_synthetic_blobs(const SyntheticConfig& config);

}  // namespace iaif::data
