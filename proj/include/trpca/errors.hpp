#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace trpca {

/// Operand extents do not agree (mismatched dims, bad fold height, ...).
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An index (slice, basis position, rank) lies outside its valid range.
class IndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// A numerical kernel failed. Carries the frontal slice that failed, if any.
class NumericError : public std::runtime_error {
 public:
  static constexpr std::size_t kNoSlice = static_cast<std::size_t>(-1);

  explicit NumericError(const std::string& what, std::size_t slice = kNoSlice)
      : std::runtime_error(what), slice_(slice) {}

  std::size_t slice() const noexcept { return slice_; }

 private:
  std::size_t slice_;
};

/// Spectral data handed to the inverse DFT is not conjugate symmetric.
class SymmetryError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Malformed file contents (TNS3, Netpbm, config).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace trpca
