#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>

namespace ljsr {

using Complex = std::complex<double>;
using MatC = Eigen::MatrixXcd;
using MatR = Eigen::MatrixXd;
using VecC = Eigen::VectorXcd;
using VecR = Eigen::VectorXd;
using Index = Eigen::Index;

/// Relative tolerance for rank decisions (smallest vs. largest singular value).
inline constexpr double kRankTol = 1e-10;

/// Pixel grid of one frame; pixel (ix, iy) maps to linear index ix + nx*iy.
struct FrameShape {
  int nx = 0;
  int ny = 0;
  int pixels() const { return nx * ny; }
  bool operator==(const FrameShape&) const = default;
};

}  // namespace ljsr
