// SPDX-FileCopyrightText: 2026 The iaif Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "iaif/data/dataset.hpp"

namespace iaif::data {

enum class GroupConstruction { similar_softmax, random };

struct GroupSpec {
  std::vector<std::size_t> indices;  // sorted, unique
  std::size_t anchor = 0;
  GroupConstruction construction = GroupConstruction::similar_softmax;

  std::size_t size() const { return indices.size(); }
  /// Throws SizeError when empty, out of [0, n), unsorted/duplicated, or the
  /// anchor is not a member.
  void validate(std::size_t n) const;
};

/// Each group is an anchor (sampled without replacement across groups) plus
/// the group_size - 1 rows of `probe_outputs` nearest to it in L2, ties to the
/// lower index. Throws SizeError if group_size or n_groups exceed N.
std::vector<GroupSpec> build_similar_groups(const Matrix& probe_outputs, std::size_t group_size,
                                            std::size_t n_groups, std::uint64_t seed);

/// Anchor plus group_size - 1 uniformly drawn other rows.
std::vector<GroupSpec> build_random_groups(std::size_t n, std::size_t group_size,
                                           std::size_t n_groups, std::uint64_t seed);

/// Fraction of members carrying the group's most common class.
double label_purity(const GroupSpec& group, const Dataset& dataset);

}  // namespace iaif::data
