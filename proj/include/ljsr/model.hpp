#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ljsr/core.hpp"

namespace ljsr {

/// A signal matrix X (n x N): columns are vectorized frames. Optional
/// metadata records the planted structure of generated instances.
struct SignalMatrix {
  MatC values;
  std::optional<FrameShape> frame_shape;          // nx*ny == n when present
  std::optional<int> true_rank;
  std::optional<std::vector<int>> true_support;   // sorted row indices

  Index n() const { return values.rows(); }
  Index frames() const { return values.cols(); }
};

/// Truncated SVD X ~= U * diag(S) * V with orthonormal U columns and V rows.
struct SVDFactors {
  MatC U;   // n x r
  VecR S;   // r, positive, non-increasing
  MatC V;   // r x N, rows orthonormal
};

/// Parameters of the periodic dynamic phantom.
struct PhantomSpec {
  int nx = 32;
  int ny = 32;
  int N = 60;
  int period = 6;
  int k_target = 0;   // >0 scales the pulsating ellipse so the joint
                      // gradient support lands near this budget
  std::uint64_t seed = 0;
};

/// Random rank-r matrix supported on exactly k rows: X = U diag(S) V with
/// U orthonormal on a random k-row support, V row-orthonormal, S drawn from
/// [1, 2] and sorted. Deterministic for a fixed seed.
SignalMatrix make_random_lrjs(int n, int N, int r, int k, std::uint64_t seed);

/// Periodic piecewise-constant ellipse phantom with a pulsating inner
/// ellipse; frame t equals frame (t mod period) bit-exactly.
SignalMatrix make_dynamic_phantom(const PhantomSpec& spec);

/// Top-r factors ordered by decreasing singular value. The largest-magnitude
/// entry of each row of V is rotated to be real-positive so the output is
/// deterministic. Fails if sigma_r <= 1e-14 * sigma_1.
SVDFactors truncated_svd(const MatC& X, int r);
SVDFactors truncated_svd(const SignalMatrix& X, int r);

/// Count of singular values above rel_tol * sigma_max.
int numerical_rank(const MatC& M, double rel_tol = kRankTol);

/// Smallest linearly dependent column subset found by exhaustive search,
/// together with a witness null vector over those columns. spark = n+1 when
/// every subset is independent (full-spark convention).
struct SparkCertificate {
  int spark = 0;
  std::vector<int> columns;  // empty for full spark
  VecC null_vector;          // coefficients over `columns`
};

/// Exhaustive spark; requires n <= 24. Rank deficiency of a subset is
/// declared when its smallest singular value is <= 1e-10 times its largest.
int spark_bruteforce(const MatC& A);
SparkCertificate spark_bruteforce_detail(const MatC& A);

/// True when every column subset of size < s is independent (cheaper than a
/// full spark when only a lower bound is needed). Requires n <= 24.
bool spark_at_least(const MatC& A, int s);

/// Indices of rows with Euclidean norm > tol * max row norm, sorted.
std::vector<int> joint_support(const SignalMatrix& X, double tol);
std::vector<int> joint_support(const MatC& X, double tol);

/// r*(k + N - r): parameter count of a rank-r matrix supported on k rows.
long long degrees_of_freedom(int n, int N, int r, int k);

}  // namespace ljsr
