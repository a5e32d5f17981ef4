#pragma once

#include "trpca/tensor.hpp"

#include <filesystem>
#include <iosfwd>

namespace trpca {

// TNS3 binary layout: the 4 magic bytes "TNS3", n1, n2, n3 as little-endian
// uint64, then n1*n2*n3 little-endian IEEE-754 doubles in storage order
// (i fastest, then j, then k). Nothing may follow the last entry.

void write_tensor(std::ostream& out, const Tensor3& t);
void write_tensor(const std::filesystem::path& path, const Tensor3& t);

/// Throws ParseError on bad magic, zero extents, truncation or trailing bytes.
Tensor3 read_tensor(std::istream& in);
Tensor3 read_tensor(const std::filesystem::path& path);

}  // namespace trpca
