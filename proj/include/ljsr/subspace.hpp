#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ljsr/core.hpp"
#include "ljsr/model.hpp"
#include "ljsr/sampling.hpp"

namespace ljsr {

/// Estimated right-subspace factor: rows of Q span the estimated row space
/// of X (Q equals the true V up to a nonsingular factor). Row i of Q has
/// norm sqrt(eigenvalues[i]) by construction.
struct SubspaceEstimate {
  MatC Q;             // r_est x N
  VecR eigenvalues;   // length N, non-negative, descending
  int r_est = 0;
};

/// G = Z^H Z, symmetrized to kill round-off asymmetry.
MatC gram(const MatC& Z);

inline constexpr int kAutoRank = -1;

/// Principal-square-root subspace estimate from the Gram matrix:
/// G = W diag(lambda) W^H, Q = diag(sqrt(lambda_1..r)) W_r^H with the same
/// row-phase convention as truncated_svd. With r = kAutoRank the rank is the
/// number of eigenvalues above rel_tol * lambda_max.
SubspaceEstimate estimate_right_subspace(const MatC& G, int r = kAutoRank,
                                         double rel_tol = 1e-8);

/// Normalized symmetric subspace distance between the row spans of V1 and
/// V2 (spectral norms; inputs are orthonormalized first). 0 iff the spans
/// coincide, 1 for orthogonal subspaces.
double projection_error(const MatC& V1, const MatC& V2);

struct CurvePoint {
  int m_c = 0;
  double mean_proj_err = 0.0;
  double max_proj_err = 0.0;
};

/// Mean/max projection error against the true right subspace of X over
/// `trials` seeded draws of the common operator, one row per m_c value (for
/// Fourier operators the values are line counts). Trials may run in
/// parallel; per-trial seeds are derived so the result is order-independent.
std::vector<CurvePoint> subspace_error_curve(const SignalMatrix& X,
                                             std::span<const int> m_c_values, int trials,
                                             std::uint64_t seed,
                                             OperatorKind kind = OperatorKind::DenseGaussian,
                                             double rel_tol = 1e-8);

void write_curve_csv(const std::filesystem::path& file, const std::vector<CurvePoint>& curve);

/// Q to FMX plus the Gram spectrum to CSV (`index,eigenvalue`).
void save_subspace_estimate(const std::filesystem::path& dir, const SubspaceEstimate& est);

}  // namespace ljsr
