#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "lrtsd/tensor.hpp"

namespace lrtsd::harness {

/// Malformed file contents (bad magic, truncated payload, schema violation).
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File could not be opened, read or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Layout: "LRT1", then n1, n2, n3 as little-endian uint64, then n1*n2*n3
// little-endian IEEE-754 doubles in Tensor3 order (mode 1 fastest).
inline constexpr char kTensorMagic[4] = {'L', 'R', 'T', '1'};

std::vector<std::uint8_t> encode_tensor(const Tensor3& t);
Tensor3 decode_tensor(const std::vector<std::uint8_t>& bytes);

void write_tensor(const std::filesystem::path& path, const Tensor3& t);
Tensor3 read_tensor(const std::filesystem::path& path);

}  // namespace lrtsd::harness
