// SPDX-FileCopyrightText: 2026 The iaif Authors
// SPDX-License-Identifier: Apache-2.0

#include "iaif/data/groups.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <utility>

#include "iaif/simd/kernels.hpp"
#include "iaif/util/error.hpp"
#include "iaif/util/random.hpp"

namespace iaif::data {

void GroupSpec::validate(std::size_t n) const {
  if (indices.empty()) throw SizeError("group is empty");
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] >= n) throw SizeError("group index " + std::to_string(indices[k]) + " >= N");
    if (k > 0 && indices[k] <= indices[k - 1]) {
      throw SizeError("group indices must be sorted and unique");
    }
  }
  if (!std::binary_search(indices.begin(), indices.end(), anchor)) {
    throw SizeError("group anchor is not a member");
  }
}

std::vector<GroupSpec> build_similar_groups(const Matrix& probe_outputs, std::size_t group_size,
                                            std::size_t n_groups, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(probe_outputs.rows());
  if (group_size == 0) throw SizeError("group_size must be positive");
  if (group_size > n) {
    throw SizeError("group_size " + std::to_string(group_size) + " exceeds N = " +
                    std::to_string(n));
  }
  if (n_groups > n) throw SizeError("more groups than available anchors");

  Rng rng(seed);
  const std::vector<std::size_t> anchors = [&] {
    auto perm = rng.permutation(n);
    perm.resize(n_groups);
    return perm;
  }();

  const auto& k = simd::kernels();
  const auto width = static_cast<std::size_t>(probe_outputs.cols());
  std::vector<GroupSpec> groups;
  groups.reserve(n_groups);
  std::vector<std::pair<double, std::size_t>> ranked;
  for (std::size_t anchor : anchors) {
    const double* a = probe_outputs.data() + anchor * width;
    ranked.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (i == anchor) continue;
      ranked.emplace_back(k.squared_distance(a, probe_outputs.data() + i * width, width), i);
    }
    const std::size_t take = group_size - 1;
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(take),
                      ranked.end());
    GroupSpec g;
    g.anchor = anchor;
    g.construction = GroupConstruction::similar_softmax;
    g.indices.push_back(anchor);
    for (std::size_t t = 0; t < take; ++t) g.indices.push_back(ranked[t].second);
    std::sort(g.indices.begin(), g.indices.end());
    groups.push_back(std::move(g));
  }
  return groups;
}

std::vector<GroupSpec> build_random_groups(std::size_t n, std::size_t group_size,
                                           std::size_t n_groups, std::uint64_t seed) {
  if (group_size == 0 || group_size > n) throw SizeError("group_size out of range");
  if (n_groups > n) throw SizeError("more groups than available anchors");
  Rng rng(seed);
  auto anchors = rng.permutation(n);
  anchors.resize(n_groups);
  std::vector<GroupSpec> groups;
  for (std::size_t anchor : anchors) {
    std::vector<std::size_t> others;
    others.reserve(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
      if (i != anchor) others.push_back(i);
    }
    rng.shuffle(std::span<std::size_t>(others));
    GroupSpec g;
    g.anchor = anchor;
    g.construction = GroupConstruction::random;
    g.indices.push_back(anchor);
    g.indices.insert(g.indices.end(), others.begin(),
                     others.begin() + static_cast<std::ptrdiff_t>(group_size - 1));
    std::sort(g.indices.begin(), g.indices.end());
    groups.push_back(std::move(g));
  }
  return groups;
}

double label_purity(const GroupSpec& group, const Dataset& dataset) {
  if (group.indices.empty()) throw SizeError("label_purity of an empty group");
  std::map<int, std::size_t> counts;
  for (std::size_t i : group.indices) ++counts[dataset.class_of(i)];
  std::size_t best = 0;
  for (const auto& [label, count] : counts) best = std::max(best, count);
  return static_cast<double>(best) / static_cast<double>(group.indices.size());
}

}  // namespace iaif::data
