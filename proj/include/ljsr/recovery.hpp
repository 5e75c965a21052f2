#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "ljsr/core.hpp"
#include "ljsr/model.hpp"
#include "ljsr/sampling.hpp"
#include "ljsr/subspace.hpp"

namespace ljsr {

/// Implicit linear map vec(P) -> stacked A_i (P q_i): the block-structured
/// system tying the coefficient matrix P (n x r) to the variable
/// measurements, with q_i the i-th column of Q.
struct BlockSystem {
  VariableOperatorSet ops;
  MatC Q;  // r x N
  Index n = 0;
  Index r = 0;
  Index total_rows = 0;

  Index total_cols() const { return n * r; }

  std::vector<VecC> forward(const MatC& P) const;
  MatC adjoint(const std::vector<VecC>& blocks) const;

  /// Explicit matrix with blocks q_ji * A_i; test oracle, n*r <= 4096.
  MatC dense_materialize() const;
};

BlockSystem assemble_block_system(const VariableOperatorSet& ops, const MatC& Q);
BlockSystem assemble_block_system(const VariableOperatorSet& ops, const SubspaceEstimate& est);

struct LeastSquaresResult {
  MatC P;
  int iterations = 0;
  double relative_residual = 0.0;  // normal-equations residual
  bool converged = false;
  bool stagnated = false;
};

/// CGLS on the normal equations via the implicit forward/adjoint maps.
/// Stops at ||B^H (Y - B p)|| <= tol * ||B^H Y||; a windowed stagnation
/// check reports solves that stop making progress before that.
LeastSquaresResult solve_least_squares(const BlockSystem& B, const std::vector<VecC>& Y,
                                       double tol, int max_iter, const MatC* init = nullptr);

/// Runs a second solve from a seeded random start; a solution gap well above
/// tol means the minimizer is not unique (rank-deficient system).
bool least_squares_minimizer_unique(const BlockSystem& B, const std::vector<VecC>& Y, double tol,
                                    int max_iter, std::uint64_t seed, double* gap = nullptr);

// First-order forward differences with periodic boundary, applied to each of
// the r coefficient images of P; adjoints are the exact discrete adjoints.
MatC grad_x(const MatC& P, FrameShape shape);
MatC grad_y(const MatC& P, FrameShape shape);
MatC grad_x_adj(const MatC& W, FrameShape shape);
MatC grad_y_adj(const MatC& W, FrameShape shape);

/// Proximal map of threshold * sum_s ||(Vx(s,:), Vy(s,:))||_2: per spatial
/// location the 2r-vector group shrinks by max(0, 1 - threshold/norm).
std::pair<MatC, MatC> group_shrink(const MatC& Vx, const MatC& Vy, double threshold);

struct ADMMConfig {
  double lambda = 1e-3;   // regularization weight
  double beta = 1.0;      // penalty parameter
  int max_outer = 100;
  double pcg_tol = 1e-8;
  int pcg_max = 60;
  double stop_tol = 1e-5;  // relative change of P
  void validate() const;
};

struct RecoveryReport {
  // objective = 0.5*||B vec(P) - vec(Y)||^2 + lambda * TV(grad P), the
  // functional the iteration minimizes, evaluated at each outer iterate.
  std::vector<double> objective_trace;
  // ||G - grad P||_F / max(||grad P||_F, eps): scale-free primal residual.
  std::vector<double> primal_residual_trace;
  std::vector<int> pcg_iteration_counts;
  int iterations_run = 0;
  bool converged = false;
  std::optional<double> final_relative_error;
};

struct ADMMResult {
  MatC P;
  RecoveryReport report;
};

/// Joint l1-l2 TV-regularized recovery of P from the variable measurements:
/// alternates a PCG solve of the quadratic P-step (circulant-preconditioned
/// Laplacian part), group shrinkage of the gradient variable, and the
/// multiplier ascent step. P starts from the adjoint image B^H vec(Y).
ADMMResult admm_recover(const std::vector<VecC>& Y, const VariableOperatorSet& ops,
                        const SubspaceEstimate& est, FrameShape shape, const ADMMConfig& cfg,
                        const SignalMatrix* ground_truth = nullptr);

/// Xhat = P * Q.
SignalMatrix reconstruct(const MatC& P, const SubspaceEstimate& est);
SignalMatrix reconstruct(const MatC& P, const MatC& Q);

/// ||Xhat - X||_F / ||X||_F; rejects X = 0.
double relative_error(const MatC& Xhat, const MatC& X);
double relative_error(const SignalMatrix& Xhat, const SignalMatrix& X);

void write_report_csv(const std::filesystem::path& file, const RecoveryReport& report);

}  // namespace ljsr
