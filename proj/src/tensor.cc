// bat/src/tensor.cc
//
// Copyright (c)  2026  bat-lattice authors

#include "bat/tensor.h"

namespace bat {

const char *DTypeName(DType dtype) {
  switch (dtype) {
    case DType::kF32:
      return "f32";
    case DType::kF64:
      return "f64";
    case DType::kI64:
      return "i64";
  }
  return "?";
}

std::size_t DTypeSize(DType dtype) {
  switch (dtype) {
    case DType::kF32:
      return 4;
    case DType::kF64:
    case DType::kI64:
      return 8;
  }
  return 0;
}

DType DTypeOfAny(const AnyTensor &t) {
  return std::visit(
      [](const auto &x) {
        using T = typename std::decay_t<decltype(x)>::value_type;
        return DTypeOf<T>::value;
      },
      t);
}

const std::vector<int64_t> &DimsOfAny(const AnyTensor &t) {
  return std::visit(
      [](const auto &x) -> const std::vector<int64_t> & { return x.Dims(); },
      t);
}

}  // namespace bat
