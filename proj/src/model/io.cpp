// SPDX-FileCopyrightText: 2026 The iaif Authors
// SPDX-License-Identifier: Apache-2.0

#include "iaif/model/io.hpp"

#include <cstring>
#include <iterator>
#include <string>

#include "iaif/util/bytes.hpp"
#include "iaif/util/error.hpp"

namespace iaif::model {
namespace {

constexpr char kMagic[8] = {'I', 'A', 'I', 'F', 'P', 'R', 'M', '1'};

}  // namespace

std::vector<std::uint8_t> serialize_params(const ModelParams& params) {
  params.validate();
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  std::uint32_t kind = 0;
  std::uint32_t flags = 0;
  std::vector<std::uint64_t> dims;
  std::visit(
      [&](const auto& a) {
        using A = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<A, LogisticBinary>) {
          kind = 0;
          dims = {a.dim};
        } else if constexpr (std::is_same_v<A, LogisticMulticlass>) {
          kind = 1;
          dims = {a.dim, a.classes};
        } else if constexpr (std::is_same_v<A, LinearRegression>) {
          kind = 2;
          dims = {a.dim};
        } else {
          kind = 3;
          flags = a.regression ? 1u : 0u;
          dims.push_back(a.dim);
          dims.insert(dims.end(), a.hidden.begin(), a.hidden.end());
          dims.push_back(a.outputs);
        }
      },
      params.arch);
  put_le(out, kind);
  put_le(out, flags);
  put_le(out, static_cast<std::uint32_t>(dims.size()));
  for (auto d : dims) put_le(out, d);
  put_le(out, static_cast<std::uint64_t>(params.size()));
  for (Eigen::Index k = 0; k < params.theta.size(); ++k) put_le(out, params.theta[k]);
  return out;
}

ModelParams deserialize_params(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < sizeof(kMagic) || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw FormatError("not a parameter file (bad magic)");
  }
  ByteReader in(bytes.subspan(sizeof(kMagic)), "parameter file");
  const auto kind = in.get<std::uint32_t>();
  const auto flags = in.get<std::uint32_t>();
  const auto ndims = in.get<std::uint32_t>();
  if (ndims > 64) throw FormatError("implausible dimension count " + std::to_string(ndims));
  std::vector<std::size_t> dims(ndims);
  for (auto& d : dims) d = static_cast<std::size_t>(in.get<std::uint64_t>());

  Arch arch;
  auto need = [&](std::size_t n) {
    if (dims.size() != n) throw FormatError("wrong dimension count for architecture");
  };
  switch (kind) {
    case 0:
      need(1);
      arch = LogisticBinary{dims[0]};
      break;
    case 1:
      need(2);
      arch = LogisticMulticlass{dims[0], dims[1]};
      break;
    case 2:
      need(1);
      arch = LinearRegression{dims[0]};
      break;
    case 3: {
      if (dims.size() < 2) throw FormatError("mlp needs input and output widths");
      Mlp m;
      m.dim = dims.front();
      m.outputs = dims.back();
      m.hidden.assign(dims.begin() + 1, dims.end() - 1);
      m.regression = (flags & 1u) != 0;
      arch = m;
      break;
    }
    default:
      throw FormatError("unknown architecture kind " + std::to_string(kind));
  }
  const auto p = in.get<std::uint64_t>();
  if (p != parameter_count(arch)) throw FormatError("parameter count does not match architecture");
  ModelParams params{arch, Vector(static_cast<Eigen::Index>(p))};
  for (Eigen::Index k = 0; k < params.theta.size(); ++k) params.theta[k] = in.get<double>();
  if (in.remaining() != 0) throw LengthError("trailing bytes after parameters");
  params.validate();
  return params;
}

void save_params(const std::filesystem::path& path, const ModelParams& params) {
  write_file_bytes(path, serialize_params(params));
}

ModelParams load_params(const std::filesystem::path& path) {
  return deserialize_params(read_file_bytes(path));
}

}  // namespace iaif::model
