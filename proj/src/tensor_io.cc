// bat/src/tensor_io.cc
//
// Copyright (c)  2026  bat-lattice authors

#include "bat/tensor_io.h"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace bat {

namespace {

constexpr char kMagic[4] = {0x42, 0x41, 0x54, 0x31};  // "BAT1"
constexpr std::size_t kFixedHeaderBytes = 4 + 4 + 1 + 1;

template <typename U>
void PutLe(std::string *out, U value) {
  auto bits = std::bit_cast<std::array<unsigned char, sizeof(U)>>(value);
  if constexpr (std::endian::native == std::endian::big)
    std::reverse(bits.begin(), bits.end());
  out->append(reinterpret_cast<const char *>(bits.data()), bits.size());
}

template <typename U>
U GetLe(const char *p) {
  std::array<unsigned char, sizeof(U)> bits;
  std::memcpy(bits.data(), p, sizeof(U));
  if constexpr (std::endian::native == std::endian::big)
    std::reverse(bits.begin(), bits.end());
  return std::bit_cast<U>(bits);
}

template <typename T>
Tensor<T> DecodePayload(std::vector<int64_t> dims, const char *p) {
  Tensor<T> t(std::move(dims));
  auto data = t.Data();
  for (std::size_t i = 0; i < data.size(); ++i, p += sizeof(T))
    data[i] = GetLe<T>(p);
  return t;
}

}  // namespace

std::string EncodeTensor(const AnyTensor &any) {
  std::string out;
  const auto &dims = DimsOfAny(any);
  DType dtype = DTypeOfAny(any);
  out.append(kMagic, 4);
  PutLe<uint32_t>(&out, kTensorFormatVersion);
  out.push_back(static_cast<char>(dtype));
  out.push_back(static_cast<char>(dims.size()));
  for (int64_t d : dims) PutLe<uint64_t>(&out, static_cast<uint64_t>(d));
  std::visit(
      [&out](const auto &t) {
        out.reserve(out.size() + t.NumBytes());
        for (auto v : t.Data()) PutLe(&out, v);
      },
      any);
  return out;
}

AnyTensor DecodeTensor(const std::string &bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0)
    Throw(ErrorCode::kBadMagic, "not a BAT1 tensor file (bad magic)");
  if (bytes.size() < kFixedHeaderBytes)
    Throw(ErrorCode::kTruncatedPayload, "BAT1 header truncated");
  uint32_t version = GetLe<uint32_t>(bytes.data() + 4);
  if (version != kTensorFormatVersion)
    Throw(ErrorCode::kBadMagic,
          "unsupported BAT1 version " + std::to_string(version));
  auto dtype_code = static_cast<uint8_t>(bytes[8]);
  int ndim = static_cast<uint8_t>(bytes[9]);
  if (dtype_code > 2)
    Throw(ErrorCode::kBadDims, "unknown dtype code " + std::to_string(dtype_code));
  if (ndim < 1 || ndim > kMaxAxes)
    Throw(ErrorCode::kBadDims, "ndim must be in [1, 4], got " + std::to_string(ndim));
  std::size_t header = kFixedHeaderBytes + 8 * static_cast<std::size_t>(ndim);
  if (bytes.size() < header)
    Throw(ErrorCode::kTruncatedPayload, "BAT1 dims truncated");

  std::vector<int64_t> dims(ndim);
  uint64_t count = 1;
  for (int i = 0; i < ndim; ++i) {
    uint64_t d = GetLe<uint64_t>(bytes.data() + kFixedHeaderBytes + 8 * i);
    if (d > (uint64_t{1} << 40))
      Throw(ErrorCode::kBadDims, "dimension too large: " + std::to_string(d));
    dims[i] = static_cast<int64_t>(d);
    count *= d;
  }
  auto dtype = static_cast<DType>(dtype_code);
  if (bytes.size() - header != count * DTypeSize(dtype))
    Throw(ErrorCode::kTruncatedPayload,
          "payload has " + std::to_string(bytes.size() - header) +
              " bytes, header dims require " +
              std::to_string(count * DTypeSize(dtype)));

  const char *p = bytes.data() + header;
  switch (dtype) {
    case DType::kF32:
      return DecodePayload<float>(std::move(dims), p);
    case DType::kF64:
      return DecodePayload<double>(std::move(dims), p);
    case DType::kI64:
      return DecodePayload<int64_t>(std::move(dims), p);
  }
  Throw(ErrorCode::kBadDims, "unreachable dtype");
}

AnyTensor ReadTensor(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) Throw(ErrorCode::kIo, "cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return DecodeTensor(ss.str());
}

void WriteTensor(const std::string &path, const AnyTensor &t) {
  std::ofstream os(path, std::ios::binary);
  if (!os) Throw(ErrorCode::kIo, "cannot write " + path);
  std::string bytes = EncodeTensor(t);
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!os) Throw(ErrorCode::kIo, "write failed: " + path);
}

}  // namespace bat
