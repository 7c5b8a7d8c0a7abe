// SPDX-FileCopyrightText: 2026 The iaif Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

namespace iaif {

/// Shortest-safe text for a double: 17 significant digits, '.' decimal point,
/// "nan" / "inf" / "-inf" for non-finite values.
std::string format_double(double value);

}  // namespace iaif
