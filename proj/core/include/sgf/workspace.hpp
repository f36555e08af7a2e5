#pragma once

#include <cstddef>

#include "sgf/signal.hpp"

namespace sgf {

// Accountant for n x F working buffers. Inputs and the returned output are
// not working memory; everything a recurrence keeps alive besides them is.
class Workspace {
 public:
  // Move-only handle. Accounted buffers give their slot back on destruction.
  class Buffer {
   public:
    Buffer() = default;
    Buffer(Buffer&& other) noexcept;
    Buffer& operator=(Buffer&& other) noexcept;
    Buffer(const Buffer&) = delete;
    Buffer& operator=(const Buffer&) = delete;
    ~Buffer();

    SignalMatrix m;

    bool accounted() const { return owner_ != nullptr; }
    // Hands the matrix out; the peak already recorded stays.
    SignalMatrix release() &&;

   private:
    friend class Workspace;
    Workspace* owner_ = nullptr;
    std::size_t bytes_ = 0;
    void drop();
  };

  Workspace() = default;
  Workspace(const Workspace&) = delete;
  Workspace& operator=(const Workspace&) = delete;

  // Zero-initialized working buffer.
  Buffer acquire(Eigen::Index rows, Eigen::Index cols);
  // Zero-initialized output buffer, not counted.
  static Buffer output(Eigen::Index rows, Eigen::Index cols);

  std::size_t live_buffers() const { return live_buffers_; }
  std::size_t peak_buffers() const { return peak_buffers_; }
  std::size_t peak_bytes() const { return peak_bytes_; }

 private:
  std::size_t live_buffers_ = 0;
  std::size_t live_bytes_ = 0;
  std::size_t peak_buffers_ = 0;
  std::size_t peak_bytes_ = 0;
};

}  // namespace sgf
