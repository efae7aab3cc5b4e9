#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "fctn/tensor.hpp"

namespace fctn {

/// Failure categories for the on-disk tensor format.
enum class TensorIoErrc {
  io_failure = 1,   // cannot open / read / write
  bad_magic,        // leading bytes are not "DTEN"
  bad_version,      // unsupported format version
  dim_overflow,     // declared dims overflow or exceed the sanity cap
  truncated,        // payload shorter or longer than the declared dims
};

std::string to_string(TensorIoErrc code);

class TensorIoError : public std::runtime_error {
public:
  TensorIoError(TensorIoErrc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  TensorIoErrc code() const { return code_; }

private:
  TensorIoErrc code_;
};

/// Binary tensor container, little-endian throughout:
///   bytes 0..3   magic "DTEN"
///   bytes 4..5   u16 version (currently 1)
///   bytes 6..7   u16 order
///   then         order x u64 dims
///   then         prod(dims) x f64 values, row-major
/// Total length is 8 + 8*order + 8*prod(dims).
DenseTensor read_tensor(const std::filesystem::path& path);
void write_tensor(const std::filesystem::path& path, const DenseTensor& x);

}  // namespace fctn
