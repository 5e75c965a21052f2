#pragma once

#include "ljsr/core.hpp"

namespace ljsr {

/// Unitary 2-D DFT on an nx x ny grid (FFTW backend). Input/output vectors
/// use the frame layout ix + nx*iy. Instances own their FFTW plans and
/// scratch buffer and must not be shared across threads; use thread_dft()
/// for a per-thread cached instance.
class Dft2D {
 public:
  Dft2D(int nx, int ny);
  ~Dft2D();
  Dft2D(const Dft2D&) = delete;
  Dft2D& operator=(const Dft2D&) = delete;

  int nx() const { return nx_; }
  int ny() const { return ny_; }

  /// out = F in with F unitary (forward DFT scaled by 1/sqrt(nx*ny)).
  void forward(const VecC& in, VecC& out) const;
  /// out = F^H in (inverse = adjoint of the unitary forward transform).
  void backward(const VecC& in, VecC& out) const;

 private:
  void run(const VecC& in, VecC& out, bool fwd) const;

  int nx_, ny_;
  double scale_;
  void* plan_fwd_;  // fftw_plan
  void* plan_bwd_;
  Complex* buf_;
};

/// Per-thread cache keyed on (nx, ny).
const Dft2D& thread_dft(int nx, int ny);

}  // namespace ljsr
