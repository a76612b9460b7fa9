// bat/include/bat/tensor_io.h
//
// Copyright (c)  2026  bat-lattice authors

#ifndef BAT_TENSOR_IO_H_
#define BAT_TENSOR_IO_H_

#include <cstdint>
#include <string>

#include "bat/tensor.h"

namespace bat {

/*
  "BAT1" binary tensor file:

    bytes 0..3   magic 0x42 0x41 0x54 0x31
    u32 LE       version (1)
    u8           dtype (0 = f32, 1 = f64, 2 = i64)
    u8           ndim (1..4)
    ndim x u64 LE dims
    payload      row-major, little-endian scalars

  No padding or alignment bytes anywhere.
 */
inline constexpr uint32_t kTensorFormatVersion = 1;

std::string EncodeTensor(const AnyTensor &t);
AnyTensor DecodeTensor(const std::string &bytes);

AnyTensor ReadTensor(const std::string &path);
void WriteTensor(const std::string &path, const AnyTensor &t);

template <typename T>
void WriteTensor(const std::string &path, const Tensor<T> &t) {
  WriteTensor(path, AnyTensor(t));
}

}  // namespace bat

#endif  // BAT_TENSOR_IO_H_
