// bat/include/bat/tensor.h
//
// Copyright (c)  2026  bat-lattice authors

#ifndef BAT_TENSOR_H_
#define BAT_TENSOR_H_

#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "bat/error.h"

namespace bat {

enum class DType : uint8_t { kF32 = 0, kF64 = 1, kI64 = 2 };

template <typename T>
struct DTypeOf;
template <>
struct DTypeOf<float> {
  static constexpr DType value = DType::kF32;
};
template <>
struct DTypeOf<double> {
  static constexpr DType value = DType::kF64;
};
template <>
struct DTypeOf<int64_t> {
  static constexpr DType value = DType::kI64;
};

const char *DTypeName(DType dtype);
std::size_t DTypeSize(DType dtype);

inline constexpr int kMaxAxes = 4;

// Dense row-major tensor with 1 to 4 axes.
template <typename T>
class Tensor {
 public:
  using value_type = T;

  Tensor() : dims_{0} {}

  explicit Tensor(std::vector<int64_t> dims, T fill = T{})
      : dims_(std::move(dims)) {
    CheckDims();
    data_.assign(static_cast<std::size_t>(NumElements()), fill);
  }

  Tensor(std::vector<int64_t> dims, std::vector<T> data)
      : dims_(std::move(dims)), data_(std::move(data)) {
    CheckDims();
    if (static_cast<int64_t>(data_.size()) != NumElements())
      Throw(ErrorCode::kBadDims, "tensor payload length " +
                                     std::to_string(data_.size()) +
                                     " does not match dims");
  }

  const std::vector<int64_t> &Dims() const { return dims_; }
  int64_t Dim(int axis) const { return dims_[axis]; }
  int NumAxes() const { return static_cast<int>(dims_.size()); }
  int64_t NumElements() const {
    return std::accumulate(dims_.begin(), dims_.end(), int64_t{1},
                           std::multiplies<>());
  }

  std::span<T> Data() { return data_; }
  std::span<const T> Data() const { return data_; }
  std::vector<T> &Storage() { return data_; }
  const std::vector<T> &Storage() const { return data_; }

  // Contiguous slice along the last axis, addressed by the leading indexes.
  std::span<T> Row(int64_t i) { return Slice(i * Dim(NumAxes() - 1)); }
  std::span<const T> Row(int64_t i) const {
    return Slice(i * Dim(NumAxes() - 1));
  }
  std::span<T> Row(int64_t i, int64_t j) {
    return Slice((i * dims_[1] + j) * dims_[2]);
  }
  std::span<const T> Row(int64_t i, int64_t j) const {
    return Slice((i * dims_[1] + j) * dims_[2]);
  }

  T &operator()(int64_t i) { return data_[i]; }
  const T &operator()(int64_t i) const { return data_[i]; }
  T &operator()(int64_t i, int64_t j) { return data_[i * dims_[1] + j]; }
  const T &operator()(int64_t i, int64_t j) const {
    return data_[i * dims_[1] + j];
  }
  T &operator()(int64_t i, int64_t j, int64_t k) {
    return data_[(i * dims_[1] + j) * dims_[2] + k];
  }
  const T &operator()(int64_t i, int64_t j, int64_t k) const {
    return data_[(i * dims_[1] + j) * dims_[2] + k];
  }

  std::size_t NumBytes() const { return data_.size() * sizeof(T); }

  bool operator==(const Tensor &other) const = default;

 private:
  void CheckDims() const {
    if (dims_.empty() || static_cast<int>(dims_.size()) > kMaxAxes)
      Throw(ErrorCode::kBadDims, "tensor must have 1 to 4 axes, got " +
                                     std::to_string(dims_.size()));
    for (int64_t d : dims_)
      if (d < 0) Throw(ErrorCode::kBadDims, "negative tensor dimension");
  }

  std::span<T> Slice(int64_t offset) {
    return {data_.data() + offset,
            static_cast<std::size_t>(dims_.back())};
  }
  std::span<const T> Slice(int64_t offset) const {
    return {data_.data() + offset,
            static_cast<std::size_t>(dims_.back())};
  }

  std::vector<int64_t> dims_;
  std::vector<T> data_;
};

using AnyTensor = std::variant<Tensor<float>, Tensor<double>, Tensor<int64_t>>;

DType DTypeOfAny(const AnyTensor &t);
const std::vector<int64_t> &DimsOfAny(const AnyTensor &t);

// Converts any stored dtype to the requested one (exact for f32 -> f64).
template <typename T>
Tensor<T> ConvertTensor(const AnyTensor &t) {
  return std::visit(
      [](const auto &src) {
        std::vector<T> data(src.Storage().begin(), src.Storage().end());
        return Tensor<T>(src.Dims(), std::move(data));
      },
      t);
}

}  // namespace bat

#endif  // BAT_TENSOR_H_
