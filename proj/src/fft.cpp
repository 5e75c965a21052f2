#include "ljsr/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <stdexcept>

namespace ljsr {
namespace {
// FFTW plan creation is not thread-safe; execution of a private plan is.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

Dft2D::Dft2D(int nx, int ny) : nx_(nx), ny_(ny) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("Dft2D: grid must be at least 1x1");
  scale_ = 1.0 / std::sqrt(static_cast<double>(nx) * ny);
  std::lock_guard<std::mutex> lock(plan_mutex());
  buf_ = reinterpret_cast<Complex*>(fftw_alloc_complex(static_cast<std::size_t>(nx) * ny));
  auto* b = reinterpret_cast<fftw_complex*>(buf_);
  // Frame layout ix + nx*iy has iy as the slow index, so the FFTW dims are
  // (n0, n1) = (ny, nx).
  plan_fwd_ = fftw_plan_dft_2d(ny, nx, b, b, FFTW_FORWARD, FFTW_ESTIMATE);
  plan_bwd_ = fftw_plan_dft_2d(ny, nx, b, b, FFTW_BACKWARD, FFTW_ESTIMATE);
  if (!plan_fwd_ || !plan_bwd_) throw std::runtime_error("Dft2D: fftw plan creation failed");
}

Dft2D::~Dft2D() {
  std::lock_guard<std::mutex> lock(plan_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
  fftw_free(reinterpret_cast<fftw_complex*>(buf_));
}

void Dft2D::run(const VecC& in, VecC& out, bool fwd) const {
  const Index n = static_cast<Index>(nx_) * ny_;
  if (in.size() != n) throw std::invalid_argument("Dft2D: input size mismatch");
  std::memcpy(buf_, in.data(), static_cast<std::size_t>(n) * sizeof(Complex));
  fftw_execute(static_cast<fftw_plan>(fwd ? plan_fwd_ : plan_bwd_));
  out.resize(n);
  for (Index i = 0; i < n; ++i) out[i] = buf_[i] * scale_;
}

void Dft2D::forward(const VecC& in, VecC& out) const { run(in, out, true); }
void Dft2D::backward(const VecC& in, VecC& out) const { run(in, out, false); }

const Dft2D& thread_dft(int nx, int ny) {
  thread_local std::map<std::pair<int, int>, Dft2D> cache;
  auto it = cache.find({nx, ny});
  if (it == cache.end())
    it = cache.try_emplace({nx, ny}, nx, ny).first;
  return it->second;
}

}  // namespace ljsr
