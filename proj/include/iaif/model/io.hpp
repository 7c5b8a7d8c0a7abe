// SPDX-FileCopyrightText: 2026 The iaif Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "iaif/model/arch.hpp"

namespace iaif::model {

/// Binary layout: "IAIFPRM1", u32 arch kind, u32 flags, u32 ndims, ndims x u64
/// dims, u64 p, then p little-endian doubles.
std::vector<std::uint8_t> serialize_params(const ModelParams& params);
ModelParams deserialize_params(std::span<const std::uint8_t> bytes);

void save_params(const std::filesystem::path& path, const ModelParams& params);
ModelParams load_params(const std::filesystem::path& path);

}  // namespace iaif::model
