#include "fctn/tensor_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <limits>
#include <vector>

namespace fctn {

namespace {

constexpr char kMagic[4] = {'D', 'T', 'E', 'N'};
constexpr std::uint16_t kVersion = 1;
// Sanity cap on total element count (8 GiB of doubles).
constexpr std::int64_t kMaxElements = std::int64_t{1} << 30;

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint16_t get_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint64_t get_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

double get_f64(const unsigned char* p) { return std::bit_cast<double>(get_u64(p)); }

}  // namespace

std::string to_string(TensorIoErrc code) {
  switch (code) {
    case TensorIoErrc::io_failure: return "io-failure";
    case TensorIoErrc::bad_magic: return "bad-magic";
    case TensorIoErrc::bad_version: return "bad-version";
    case TensorIoErrc::dim_overflow: return "dim-overflow";
    case TensorIoErrc::truncated: return "truncated";
  }
  return "unknown";
}

DenseTensor read_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw TensorIoError(TensorIoErrc::io_failure, "cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (!in.good() && !in.eof())
    throw TensorIoError(TensorIoErrc::io_failure, "read failed for " + path.string());

  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  if (bytes.size() < 8)
    throw TensorIoError(TensorIoErrc::truncated, path.string() + ": shorter than the header");
  if (std::memcmp(p, kMagic, 4) != 0)
    throw TensorIoError(TensorIoErrc::bad_magic, path.string() + ": not a DTEN file");
  const std::uint16_t version = get_u16(p + 4);
  if (version != kVersion)
    throw TensorIoError(TensorIoErrc::bad_version,
                        path.string() + ": unsupported version " + std::to_string(version));
  const std::uint16_t order = get_u16(p + 6);
  if (order == 0)
    throw TensorIoError(TensorIoErrc::dim_overflow, path.string() + ": order must be >= 1");

  const std::size_t header = 8 + 8 * static_cast<std::size_t>(order);
  if (bytes.size() < header)
    throw TensorIoError(TensorIoErrc::truncated, path.string() + ": dim list cut short");

  std::vector<std::int64_t> dims(order);
  std::int64_t count = 1;
  for (int i = 0; i < order; ++i) {
    const std::uint64_t d = get_u64(p + 8 + 8 * i);
    if (d == 0 || d > static_cast<std::uint64_t>(kMaxElements))
      throw TensorIoError(TensorIoErrc::dim_overflow,
                          path.string() + ": dim " + std::to_string(i + 1) + " out of range");
    dims[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(d);
    if (count > kMaxElements / dims[static_cast<std::size_t>(i)])
      throw TensorIoError(TensorIoErrc::dim_overflow,
                          path.string() + ": element count overflows the sanity cap");
    count *= dims[static_cast<std::size_t>(i)];
  }

  const std::size_t expected = header + 8 * static_cast<std::size_t>(count);
  if (bytes.size() != expected)
    throw TensorIoError(TensorIoErrc::truncated,
                        path.string() + ": payload holds " +
                            std::to_string((bytes.size() - header) / 8) + " values, dims declare " +
                            std::to_string(count));

  std::vector<double> values(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i)
    values[static_cast<std::size_t>(i)] = get_f64(p + header + 8 * static_cast<std::size_t>(i));
  return DenseTensor(std::move(dims), std::move(values));
}

void write_tensor(const std::filesystem::path& path, const DenseTensor& x) {
  if (x.order() < 1 || x.order() > std::numeric_limits<std::uint16_t>::max())
    throw TensorIoError(TensorIoErrc::dim_overflow, "write_tensor: order out of range");

  std::string bytes;
  bytes.reserve(8 + 8 * static_cast<std::size_t>(x.order()) + 8 * static_cast<std::size_t>(x.size()));
  bytes.append(kMagic, 4);
  put_u16(bytes, kVersion);
  put_u16(bytes, static_cast<std::uint16_t>(x.order()));
  for (std::int64_t d : x.dims()) put_u64(bytes, static_cast<std::uint64_t>(d));
  for (double v : x.values()) put_f64(bytes, v);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw TensorIoError(TensorIoErrc::io_failure, "cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out.good())
    throw TensorIoError(TensorIoErrc::io_failure, "write failed for " + path.string());
}

}  // namespace fctn
