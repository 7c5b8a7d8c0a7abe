// SPDX-FileCopyrightText: 2026 The iaif Authors
// SPDX-License-Identifier: Apache-2.0

#include "iaif/data/sources.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "iaif/util/error.hpp"
#include "iaif/util/random.hpp"

namespace iaif::data {
namespace {

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

void write_be32(std::vector<std::uint8_t>& out, std::uint32_t value) {
  out.push_back(static_cast<std::uint8_t>(value >> 24));
  out.push_back(static_cast<std::uint8_t>(value >> 16));
  out.push_back(static_cast<std::uint8_t>(value >> 8));
  out.push_back(static_cast<std::uint8_t>(value));
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_cell(const std::string& cell, std::size_t line, std::size_t column) {
  const std::string t = trim(cell);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
    throw FormatError("csv line " + std::to_string(line) + ", column " + std::to_string(column) +
                      ": not a number: '" + t + "'");
  }
  return value;
}

}  // namespace

std::size_t IdxTensor::element_count() const {
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

IdxTensor load_idx(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4) throw LengthError("idx: truncated magic");
  const std::uint32_t magic = read_be32(bytes, 0);
  if (magic != kIdxLabelMagic && magic != kIdxImageMagic) {
    throw FormatError("idx: bad magic 0x" + [&] {
      std::ostringstream s;
      s << std::hex << magic;
      return s.str();
    }());
  }
  const std::size_t rank = magic & 0xFF;
  const std::size_t header = 4 + 4 * rank;
  if (bytes.size() < header) throw LengthError("idx: truncated dimension header");
  IdxTensor tensor;
  for (std::size_t k = 0; k < rank; ++k) tensor.dims.push_back(read_be32(bytes, 4 + 4 * k));
  const std::size_t payload = tensor.element_count();
  if (bytes.size() - header != payload) {
    throw LengthError("idx: payload has " + std::to_string(bytes.size() - header) +
                      " bytes, header promises " + std::to_string(payload));
  }
  tensor.values.assign(bytes.begin() + static_cast<std::ptrdiff_t>(header), bytes.end());
  return tensor;
}

std::vector<std::uint8_t> serialize_idx(const IdxTensor& tensor) {
  if (tensor.dims.size() != 1 && tensor.dims.size() != 3) {
    throw SizeError("idx: only rank-1 and rank-3 tensors are supported");
  }
  if (tensor.values.size() != tensor.element_count()) throw SizeError("idx: value count mismatch");
  std::vector<std::uint8_t> out;
  out.reserve(4 + 4 * tensor.dims.size() + tensor.values.size());
  write_be32(out, tensor.dims.size() == 1 ? kIdxLabelMagic : kIdxImageMagic);
  for (auto d : tensor.dims) write_be32(out, d);
  out.insert(out.end(), tensor.values.begin(), tensor.values.end());
  return out;
}

IdxTensor read_idx_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open idx file " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return load_idx(bytes);
}

Dataset dataset_from_idx(const IdxTensor& images, const IdxTensor& labels, int n_classes,
                         double pixel_scale, std::optional<std::size_t> max_count) {
  if (images.dims.size() != 3 || labels.dims.size() != 1) {
    throw SizeError("idx: expected rank-3 images and rank-1 labels");
  }
  if (images.dims[0] != labels.dims[0]) throw SizeError("idx: image and label counts differ");
  std::size_t n = images.dims[0];
  if (max_count) n = std::min(n, *max_count);
  const std::size_t d = std::size_t{images.dims[1]} * images.dims[2];
  Dataset out;
  out.task = Task::classification(n_classes);
  out.name = "idx";
  out.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  out.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      out.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          pixel_scale * images.values[i * d + j];
    }
    out.labels[i] = labels.values[i];
  }
  out.validate();
  return out;
}

Dataset parse_regression_csv(const std::string& text, int target_column) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw FormatError("csv: missing header row");
  std::size_t columns = 1;
  for (char c : line) columns += (c == ',');
  if (columns < 2) throw FormatError("csv: need at least one feature and one target column");
  const int resolved = target_column < 0 ? static_cast<int>(columns) + target_column : target_column;
  if (resolved < 0 || resolved >= static_cast<int>(columns)) {
    throw ConfigError("dataset.target_column", "out of range for " + std::to_string(columns) +
                                                   " columns");
  }

  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    std::string cell;
    std::istringstream cells(line);
    while (std::getline(cells, cell, ',')) row.push_back(parse_cell(cell, line_no, row.size()));
    if (!line.empty() && line.back() == ',') row.push_back(parse_cell("", line_no, row.size()));
    if (row.size() != columns) {
      throw FormatError("csv line " + std::to_string(line_no) + ": expected " +
                        std::to_string(columns) + " cells, got " + std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }

  Dataset out;
  out.task = Task::regression();
  out.name = "csv";
  out.features.resize(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(columns - 1));
  out.labels.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    Eigen::Index j_out = 0;
    for (std::size_t j = 0; j < columns; ++j) {
      if (static_cast<int>(j) == resolved) {
        out.labels[i] = rows[i][j];
      } else {
        out.features(static_cast<Eigen::Index>(i), j_out++) = rows[i][j];
      }
    }
  }
  out.validate();
  return out;
}

Dataset load_regression_csv(const std::filesystem::path& path, int target_column) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open csv file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  Dataset out = parse_regression_csv(buffer.str(), target_column);
  out.name = path.stem().string();
  return out;
}

void SyntheticConfig::validate() const {
  if (n_classes < 1) throw ConfigError("synthetic.n_classes", "must be positive");
  if (n_per_class < 1) throw ConfigError("synthetic.n_per_class", "must be positive");
  if (dim < 1) throw ConfigError("synthetic.dim", "must be positive");
  if (!(noise_std > 0.0)) throw ConfigError("synthetic.noise_std", "must be positive");
  if (!(center_scale >= 0.0)) throw ConfigError("synthetic.center_scale", "must be non-negative");
  if (!(class_std_ratio > 0.0)) throw ConfigError("synthetic.class_std_ratio", "must be positive");
}

Dataset make_synthetic_blobs(const SyntheticConfig& config) {
  config.validate();
  Rng rng(derive_seed(config.seed, Stream::synthetic_data));
  const auto C = static_cast<std::size_t>(config.n_classes);
  const auto d = static_cast<std::size_t>(config.dim);
  const auto per = static_cast<std::size_t>(config.n_per_class);

  Matrix centers(static_cast<Eigen::Index>(C), static_cast<Eigen::Index>(d));
  for (std::size_t c = 0; c < C; ++c) {
    for (std::size_t j = 0; j < d; ++j) {
      centers(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(j)) =
          rng.uniform(-config.center_scale, config.center_scale);
    }
  }

  Dataset out;
  out.task = Task::classification(config.n_classes);
  out.name = "blobs";
  out.features.resize(static_cast<Eigen::Index>(C * per), static_cast<Eigen::Index>(d));
  out.labels.resize(C * per);
  for (std::size_t c = 0; c < C; ++c) {
    const double t = C > 1 ? static_cast<double>(c) / static_cast<double>(C - 1) : 0.0;
    const double sd = config.noise_std * std::pow(config.class_std_ratio, t);
    for (std::size_t k = 0; k < per; ++k) {
      const std::size_t i = c * per + k;
      for (std::size_t j = 0; j < d; ++j) {
        out.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            centers(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(j)) + sd * rng.normal();
      }
      out.labels[i] = static_cast<double>(c);
    }
  }
  return out;
}

}  // namespace iaif::data
