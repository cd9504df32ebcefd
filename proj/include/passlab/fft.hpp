#pragma once

#include <cstddef>
#include <span>

#include "passlab/numeric.hpp"

namespace passlab {

/// In-place complex FFT of fixed length backed by FFTW.
///
/// Plans are created with FFTW_ESTIMATE so the algorithm choice (and hence
/// the rounding) is identical run to run. Plan creation is serialized
/// internally; execution on distinct instances may run concurrently.
/// Neither transform is normalized.
class Fft {
 public:
  explicit Fft(std::size_t n);
  ~Fft();
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;
  Fft(Fft&& other) noexcept;
  Fft& operator=(Fft&& other) noexcept;

  std::size_t size() const noexcept { return n_; }

  /// Transforms `data` (size n) in place: forward uses exp(-i k x).
  void forward(std::span<cplx> data);
  void backward(std::span<cplx> data);

 private:
  void release() noexcept;
  std::size_t n_ = 0;
  cplx* buffer_ = nullptr;
  void* plan_forward_ = nullptr;
  void* plan_backward_ = nullptr;
};

}  // namespace passlab
