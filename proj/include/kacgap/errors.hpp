// SPDX-FileCopyrightText: 2026 kacgap contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace kacgap {

/// @brief Bad arguments: out-of-range sizes, invalid densities, malformed input.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// @brief A conserved quantity drifted beyond tolerance.
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// @brief Two routes to the same number disagree.
class VerificationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// @brief A statistical fit that cannot be performed on the given data.
class FitRefused : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {
inline void require(bool ok, const std::string& what) {
  if (!ok) throw UsageError(what);
}
}  // namespace detail

}  // namespace kacgap
