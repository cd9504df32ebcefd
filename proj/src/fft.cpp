#include "passlab/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>
#include <utility>

#include "passlab/errors.hpp"

namespace passlab {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

Fft::Fft(std::size_t n) : n_(n) {
  if (n == 0) throw InvalidArgument("Fft: size must be positive");
  std::lock_guard<std::mutex> lock(planner_mutex());
  buffer_ = reinterpret_cast<cplx*>(fftw_malloc(sizeof(fftw_complex) * n));
  if (buffer_ == nullptr) throw Error("Fft: allocation failed");
  auto* b = reinterpret_cast<fftw_complex*>(buffer_);
  const int len = static_cast<int>(n);
  plan_forward_ = fftw_plan_dft_1d(len, b, b, FFTW_FORWARD, FFTW_ESTIMATE);
  plan_backward_ = fftw_plan_dft_1d(len, b, b, FFTW_BACKWARD, FFTW_ESTIMATE);
  if (plan_forward_ == nullptr || plan_backward_ == nullptr) {
    release();
    throw Error("Fft: FFTW planning failed");
  }
}

Fft::~Fft() { release(); }

Fft::Fft(Fft&& other) noexcept
    : n_(other.n_),
      buffer_(std::exchange(other.buffer_, nullptr)),
      plan_forward_(std::exchange(other.plan_forward_, nullptr)),
      plan_backward_(std::exchange(other.plan_backward_, nullptr)) {}

Fft& Fft::operator=(Fft&& other) noexcept {
  if (this != &other) {
    release();
    n_ = other.n_;
    buffer_ = std::exchange(other.buffer_, nullptr);
    plan_forward_ = std::exchange(other.plan_forward_, nullptr);
    plan_backward_ = std::exchange(other.plan_backward_, nullptr);
  }
  return *this;
}

void Fft::release() noexcept {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (plan_forward_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(plan_forward_));
  if (plan_backward_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(plan_backward_));
  if (buffer_ != nullptr) fftw_free(buffer_);
  plan_forward_ = plan_backward_ = nullptr;
  buffer_ = nullptr;
}

namespace {

void run(void* plan, cplx* buffer, std::span<cplx> data, std::size_t n) {
  if (data.size() != n) throw InvalidArgument("Fft: data length does not match the plan");
  auto* d = reinterpret_cast<fftw_complex*>(data.data());
  auto* b = reinterpret_cast<fftw_complex*>(buffer);
  if (fftw_alignment_of(reinterpret_cast<double*>(d)) == fftw_alignment_of(reinterpret_cast<double*>(b))) {
    fftw_execute_dft(static_cast<fftw_plan>(plan), d, d);
    return;
  }
  std::memcpy(b, d, sizeof(fftw_complex) * n);
  fftw_execute(static_cast<fftw_plan>(plan));
  std::memcpy(d, b, sizeof(fftw_complex) * n);
}

}  // namespace

void Fft::forward(std::span<cplx> data) { run(plan_forward_, buffer_, data, n_); }

void Fft::backward(std::span<cplx> data) { run(plan_backward_, buffer_, data, n_); }

}  // namespace passlab
