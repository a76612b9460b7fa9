// bat/include/bat/memory.h
//
// Copyright (c)  2026  bat-lattice authors

#ifndef BAT_MEMORY_H_
#define BAT_MEMORY_H_

#include <atomic>
#include <cstddef>
#include <cstdint>

namespace bat {

// Byte accounting for lattice and recursion buffers. Kernels register the
// buffers they hold; bench reads Peak(). This is deterministic, unlike RSS.
class MemoryTracker {
 public:
  void Allocate(std::size_t bytes) {
    std::size_t now = current_.fetch_add(bytes) + bytes;
    std::size_t peak = peak_.load();
    while (now > peak && !peak_.compare_exchange_weak(peak, now)) {
    }
  }
  void Release(std::size_t bytes) { current_.fetch_sub(bytes); }

  std::size_t Current() const { return current_.load(); }
  std::size_t Peak() const { return peak_.load(); }
  void ResetPeak() { peak_.store(current_.load()); }

 private:
  std::atomic<std::size_t> current_{0};
  std::atomic<std::size_t> peak_{0};
};

// Holds `bytes` against a tracker for its lifetime. A null tracker is a no-op.
class TrackedBytes {
 public:
  TrackedBytes() = default;
  TrackedBytes(MemoryTracker *tracker, std::size_t bytes)
      : tracker_(tracker), bytes_(bytes) {
    if (tracker_ != nullptr) tracker_->Allocate(bytes_);
  }
  TrackedBytes(const TrackedBytes &) = delete;
  TrackedBytes &operator=(const TrackedBytes &) = delete;
  TrackedBytes(TrackedBytes &&other) noexcept
      : tracker_(other.tracker_), bytes_(other.bytes_) {
    other.tracker_ = nullptr;
  }
  TrackedBytes &operator=(TrackedBytes &&other) noexcept {
    if (this != &other) {
      Reset();
      tracker_ = other.tracker_;
      bytes_ = other.bytes_;
      other.tracker_ = nullptr;
    }
    return *this;
  }
  ~TrackedBytes() { Reset(); }

  void Reset() {
    if (tracker_ != nullptr) tracker_->Release(bytes_);
    tracker_ = nullptr;
  }

 private:
  MemoryTracker *tracker_ = nullptr;
  std::size_t bytes_ = 0;
};

}  // namespace bat

#endif  // BAT_MEMORY_H_
