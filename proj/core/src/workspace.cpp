#include "sgf/workspace.hpp"

#include <algorithm>
#include <utility>

namespace sgf {

Workspace::Buffer::Buffer(Buffer&& other) noexcept
    : m(std::move(other.m)), owner_(std::exchange(other.owner_, nullptr)),
      bytes_(std::exchange(other.bytes_, 0)) {}

Workspace::Buffer& Workspace::Buffer::operator=(Buffer&& other) noexcept {
  if (this != &other) {
    drop();
    m = std::move(other.m);
    owner_ = std::exchange(other.owner_, nullptr);
    bytes_ = std::exchange(other.bytes_, 0);
  }
  return *this;
}

Workspace::Buffer::~Buffer() { drop(); }

void Workspace::Buffer::drop() {
  if (owner_) {
    owner_->live_buffers_ -= 1;
    owner_->live_bytes_ -= bytes_;
    owner_ = nullptr;
    bytes_ = 0;
  }
}

SignalMatrix Workspace::Buffer::release() && {
  drop();
  return std::move(m);
}

Workspace::Buffer Workspace::acquire(Eigen::Index rows, Eigen::Index cols) {
  Buffer b;
  b.m.setZero(rows, cols);
  b.owner_ = this;
  b.bytes_ = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) * sizeof(double);
  live_buffers_ += 1;
  live_bytes_ += b.bytes_;
  peak_buffers_ = std::max(peak_buffers_, live_buffers_);
  peak_bytes_ = std::max(peak_bytes_, live_bytes_);
  return b;
}

Workspace::Buffer Workspace::output(Eigen::Index rows, Eigen::Index cols) {
  Buffer b;
  b.m.setZero(rows, cols);
  return b;
}

}  // namespace sgf
