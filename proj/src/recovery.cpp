#include "ljsr/recovery.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "ljsr/fft.hpp"
#include "ljsr/keyval.hpp"
#include "ljsr/rng.hpp"

namespace ljsr {

// --- block system -----------------------------------------------------------

BlockSystem assemble_block_system(const VariableOperatorSet& ops, const MatC& Q) {
  if (Q.rows() < 1) throw std::invalid_argument("assemble_block_system: Q has no rows");
  if (static_cast<int>(Q.cols()) != ops.frames())
    throw std::invalid_argument("assemble_block_system: Q column count != frame count");
  BlockSystem B;
  B.ops = ops;
  B.Q = Q;
  B.n = ops.cluster_ops.front().cols();
  B.r = Q.rows();
  B.total_rows = 0;
  for (int i = 0; i < ops.frames(); ++i) B.total_rows += ops.op(i).rows();
  return B;
}

BlockSystem assemble_block_system(const VariableOperatorSet& ops, const SubspaceEstimate& est) {
  return assemble_block_system(ops, est.Q);
}

std::vector<VecC> BlockSystem::forward(const MatC& P) const {
  if (P.rows() != n || P.cols() != r)
    throw std::invalid_argument("BlockSystem::forward: P shape mismatch");
  const int N = ops.frames();
  std::vector<VecC> out(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) {
    const VecC w = P * Q.col(i);
    out[static_cast<std::size_t>(i)] = ops.op(i).apply(w);
  }
  return out;
}

MatC BlockSystem::adjoint(const std::vector<VecC>& blocks) const {
  if (static_cast<int>(blocks.size()) != ops.frames())
    throw std::invalid_argument("BlockSystem::adjoint: block count mismatch");
  MatC acc = MatC::Zero(n, r);
  for (int i = 0; i < ops.frames(); ++i) {
    const VecC t = ops.op(i).adjoint(blocks[static_cast<std::size_t>(i)]);
    acc.noalias() += t * Q.col(i).adjoint();
  }
  return acc;
}

MatC BlockSystem::dense_materialize() const {
  if (total_cols() > 4096)
    throw std::invalid_argument("BlockSystem::dense_materialize: n*r > 4096");
  MatC D(total_rows, total_cols());
  Index row = 0;
  for (int i = 0; i < ops.frames(); ++i) {
    const MatC Ai = ops.op(i).dense_materialize();
    for (Index j = 0; j < r; ++j)
      D.block(row, j * n, Ai.rows(), n) = Q(j, i) * Ai;
    row += Ai.rows();
  }
  return D;
}

// --- CGLS --------------------------------------------------------------------

namespace {

double stacked_norm(const std::vector<VecC>& v) {
  double s = 0.0;
  for (const auto& b : v) s += b.squaredNorm();
  return std::sqrt(s);
}

std::vector<VecC> stacked_sub(const std::vector<VecC>& a, const std::vector<VecC>& b) {
  std::vector<VecC> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

}  // namespace

LeastSquaresResult solve_least_squares(const BlockSystem& B, const std::vector<VecC>& Y,
                                       double tol, int max_iter, const MatC* init) {
  if (static_cast<int>(Y.size()) != B.ops.frames())
    throw std::invalid_argument("solve_least_squares: Y block count mismatch");
  if (tol <= 0.0 || max_iter < 1)
    throw std::invalid_argument("solve_least_squares: bad tol/max_iter");

  LeastSquaresResult res;
  res.P = init ? *init : MatC::Zero(B.n, B.r);

  std::vector<VecC> resid = init ? stacked_sub(Y, B.forward(res.P)) : Y;
  MatC s = B.adjoint(resid);
  const double s0 = s.norm();
  if (s0 <= 0.0) {
    // Y (or its projection) is already matched; for Y = 0 this returns P = 0.
    res.converged = true;
    return res;
  }

  MatC d = s;
  double gamma = s.squaredNorm();
  double best = std::sqrt(gamma);
  int best_age = 0;
  constexpr int kStagnationWindow = 15;

  for (int it = 0; it < max_iter; ++it) {
    const std::vector<VecC> q = B.forward(d);
    const double qn = stacked_norm(q);
    if (qn <= 0.0) {
      res.stagnated = true;  // search direction in the null space
      break;
    }
    const double alpha = gamma / (qn * qn);
    res.P += alpha * d;
    for (std::size_t i = 0; i < resid.size(); ++i) resid[i] -= alpha * q[i];
    s = B.adjoint(resid);
    const double gamma_new = s.squaredNorm();
    ++res.iterations;
    res.relative_residual = std::sqrt(gamma_new) / s0;
    if (res.relative_residual <= tol) {
      res.converged = true;
      break;
    }
    if (std::sqrt(gamma_new) < 0.99 * best) {
      best = std::sqrt(gamma_new);
      best_age = 0;
    } else if (++best_age >= kStagnationWindow) {
      res.stagnated = true;
      break;
    }
    d = s + (gamma_new / gamma) * d;
    gamma = gamma_new;
  }
  if (!res.converged && !res.stagnated) {
    // ran out of iterations; leave converged=false, residual already recorded
  }
  return res;
}

bool least_squares_minimizer_unique(const BlockSystem& B, const std::vector<VecC>& Y, double tol,
                                    int max_iter, std::uint64_t seed, double* gap) {
  const LeastSquaresResult a = solve_least_squares(B, Y, tol, max_iter);
  Rng rng = Rng::derive(seed, 0x756e6971ULL);  // "uniq"
  const double scale = std::max(1.0, a.P.norm());
  const MatC start = rng.cgaussian_matrix(B.n, B.r, scale);
  const LeastSquaresResult b = solve_least_squares(B, Y, tol, max_iter, &start);
  const double g = (a.P - b.P).norm() / std::max(a.P.norm(), 1e-300);
  if (gap) *gap = g;
  // A null-space component of the random start survives CG untouched, so a
  // rank-deficient system shows an O(1) gap; sqrt(tol) leaves room for
  // conditioning-amplified solver error on full-rank systems.
  return g <= std::sqrt(tol);
}

// --- gradients ---------------------------------------------------------------

namespace {

void check_shape(const MatC& P, FrameShape shape, const char* who) {
  if (shape.nx < 1 || shape.ny < 1 || P.rows() != static_cast<Index>(shape.pixels()))
    throw std::invalid_argument(std::string(who) + ": frame shape does not match P");
}

}  // namespace

MatC grad_x(const MatC& P, FrameShape shape) {
  check_shape(P, shape, "grad_x");
  const int nx = shape.nx, ny = shape.ny;
  MatC out(P.rows(), P.cols());
  for (Index j = 0; j < P.cols(); ++j)
    for (int iy = 0; iy < ny; ++iy)
      for (int ix = 0; ix < nx; ++ix) {
        const Index at = ix + static_cast<Index>(nx) * iy;
        const Index up = (ix + 1) % nx + static_cast<Index>(nx) * iy;
        out(at, j) = P(up, j) - P(at, j);
      }
  return out;
}

MatC grad_y(const MatC& P, FrameShape shape) {
  check_shape(P, shape, "grad_y");
  const int nx = shape.nx, ny = shape.ny;
  MatC out(P.rows(), P.cols());
  for (Index j = 0; j < P.cols(); ++j)
    for (int iy = 0; iy < ny; ++iy)
      for (int ix = 0; ix < nx; ++ix) {
        const Index at = ix + static_cast<Index>(nx) * iy;
        const Index up = ix + static_cast<Index>(nx) * ((iy + 1) % ny);
        out(at, j) = P(up, j) - P(at, j);
      }
  return out;
}

MatC grad_x_adj(const MatC& W, FrameShape shape) {
  check_shape(W, shape, "grad_x_adj");
  const int nx = shape.nx, ny = shape.ny;
  MatC out(W.rows(), W.cols());
  for (Index j = 0; j < W.cols(); ++j)
    for (int iy = 0; iy < ny; ++iy)
      for (int ix = 0; ix < nx; ++ix) {
        const Index at = ix + static_cast<Index>(nx) * iy;
        const Index dn = (ix + nx - 1) % nx + static_cast<Index>(nx) * iy;
        out(at, j) = W(dn, j) - W(at, j);  // negative backward difference
      }
  return out;
}

MatC grad_y_adj(const MatC& W, FrameShape shape) {
  check_shape(W, shape, "grad_y_adj");
  const int nx = shape.nx, ny = shape.ny;
  MatC out(W.rows(), W.cols());
  for (Index j = 0; j < W.cols(); ++j)
    for (int iy = 0; iy < ny; ++iy)
      for (int ix = 0; ix < nx; ++ix) {
        const Index at = ix + static_cast<Index>(nx) * iy;
        const Index dn = ix + static_cast<Index>(nx) * ((iy + ny - 1) % ny);
        out(at, j) = W(dn, j) - W(at, j);
      }
  return out;
}

std::pair<MatC, MatC> group_shrink(const MatC& Vx, const MatC& Vy, double threshold) {
  if (Vx.rows() != Vy.rows() || Vx.cols() != Vy.cols())
    throw std::invalid_argument("group_shrink: shape mismatch");
  if (threshold < 0.0) throw std::invalid_argument("group_shrink: threshold must be >= 0");
  MatC Gx(Vx.rows(), Vx.cols()), Gy(Vy.rows(), Vy.cols());
  for (Index s = 0; s < Vx.rows(); ++s) {
    const double nu = std::sqrt(Vx.row(s).squaredNorm() + Vy.row(s).squaredNorm());
    const double scale = (nu > threshold) ? 1.0 - threshold / nu : 0.0;
    Gx.row(s) = scale * Vx.row(s);
    Gy.row(s) = scale * Vy.row(s);
  }
  return {std::move(Gx), std::move(Gy)};
}

// --- ADMM ---------------------------------------------------------------------

void ADMMConfig::validate() const {
  if (lambda <= 0.0 || beta <= 0.0 || max_outer < 1 || pcg_max < 1 || stop_tol <= 0.0 ||
      pcg_tol <= 0.0 || pcg_tol >= 1.0)
    throw std::invalid_argument("ADMMConfig: all parameters must be positive (pcg_tol < 1)");
}

namespace {

VecR laplacian_symbol(FrameShape shape) {
  VecR sym(shape.pixels());
  for (int iy = 0; iy < shape.ny; ++iy)
    for (int ix = 0; ix < shape.nx; ++ix) {
      const double wx = 2.0 - 2.0 * std::cos(2.0 * M_PI * ix / shape.nx);
      const double wy = 2.0 - 2.0 * std::cos(2.0 * M_PI * iy / shape.ny);
      sym[ix + static_cast<Index>(shape.nx) * iy] = wx + wy;
    }
  return sym;
}

double real_inner(const MatC& a, const MatC& b) {
  return (a.conjugate().cwiseProduct(b)).sum().real();
}

}  // namespace

/// Circulant preconditioner for the P-step normal matrix B^H B + w L
/// (L = periodic Laplacian), operating in the 2-D DFT domain.
///
/// When every variable operator is a DFT restriction, A_i^H A_i is circulant
/// and B^H B decomposes into per-frequency r x r Hermitian blocks
/// M(w) = sum_i 1[w in mask_i] conj(q_i) q_i^T, so the preconditioner can
/// factor the exact normal matrix and PCG converges in one step. For dense
/// operators B^H B is approximated by kappa I (kappa from one stochastic
/// probe) and only the Laplacian part is exact.
class BlockCirculantPreconditioner {
 public:
  BlockCirculantPreconditioner(const BlockSystem& B, FrameShape shape, double weight,
                               double kappa)
      : shape_(shape), r_(B.r) {
    const VecR lap = laplacian_symbol(shape);
    bool all_fourier = true;
    for (const auto& op : B.ops.cluster_ops)
      all_fourier = all_fourier && op.kind() == OperatorKind::FourierLines;
    exact_ = all_fourier;

    if (!exact_) {
      scalar_symbol_ = (lap.array() * weight + kappa).matrix();
      return;
    }

    // Per-cluster Gram contributions H_c = sum_{i in c} conj(q_i) q_i^T.
    const int p = B.ops.p();
    std::vector<MatC> H(static_cast<std::size_t>(p), MatC::Zero(r_, r_));
    for (int i = 0; i < B.ops.frames(); ++i) {
      const VecC qi = B.Q.col(i);
      H[static_cast<std::size_t>(B.ops.cluster_map[static_cast<std::size_t>(i)])] +=
          qi.conjugate() * qi.transpose();
    }

    std::vector<MatC> blocks(static_cast<std::size_t>(shape.pixels()));
    for (Index w = 0; w < shape.pixels(); ++w)
      blocks[static_cast<std::size_t>(w)] = weight * lap[w] * MatC::Identity(r_, r_);
    for (int c = 0; c < p; ++c) {
      const auto& mask = B.ops.cluster_ops[static_cast<std::size_t>(c)].mask();
      for (auto [kx, ky] : mask.locations)
        blocks[static_cast<std::size_t>(kx + static_cast<Index>(shape.nx) * ky)] +=
            H[static_cast<std::size_t>(c)];
    }
    // The DC block has zero Laplacian symbol; if no mask covers DC it would
    // be singular, so ridge it.
    if (blocks[0].norm() == 0.0) blocks[0] = 1e-12 * MatC::Identity(r_, r_);

    factors_.reserve(blocks.size());
    for (auto& blk : blocks) factors_.emplace_back(blk);
  }

  bool exact() const { return exact_; }

  MatC apply(const MatC& R) const {
    const Dft2D& dft = thread_dft(shape_.nx, shape_.ny);
    const Index n = R.rows();
    MatC spec(n, R.cols());
    VecC tmp;
    for (Index j = 0; j < R.cols(); ++j) {
      dft.forward(R.col(j), tmp);
      spec.col(j) = tmp;
    }
    if (exact_) {
      for (Index w = 0; w < n; ++w)
        spec.row(w) = factors_[static_cast<std::size_t>(w)]
                          .solve(spec.row(w).transpose())
                          .transpose();
    } else {
      for (Index w = 0; w < n; ++w) spec.row(w) /= scalar_symbol_[w];
    }
    MatC out(n, R.cols());
    for (Index j = 0; j < R.cols(); ++j) {
      dft.backward(spec.col(j), tmp);
      out.col(j) = tmp;
    }
    return out;
  }

 private:
  FrameShape shape_;
  Index r_;
  bool exact_ = false;
  VecR scalar_symbol_;
  std::vector<Eigen::LDLT<MatC>> factors_;
};

ADMMResult admm_recover(const std::vector<VecC>& Y, const VariableOperatorSet& ops,
                        const SubspaceEstimate& est, FrameShape shape, const ADMMConfig& cfg,
                        const SignalMatrix* ground_truth) {
  cfg.validate();
  if (est.r_est < 1) throw std::invalid_argument("admm_recover: empty subspace estimate");
  const BlockSystem B = assemble_block_system(ops, est);
  if (B.n != static_cast<Index>(shape.pixels()))
    throw std::invalid_argument("admm_recover: frame shape does not match the operators");

  const double w = cfg.lambda * cfg.beta;

  // Normal operator of the P-step: B^H B + w * (gx^H gx + gy^H gy).
  const auto normal_op = [&](const MatC& P) {
    MatC out = B.adjoint(B.forward(P));
    out += w * grad_x_adj(grad_x(P, shape), shape);
    out += w * grad_y_adj(grad_y(P, shape), shape);
    return out;
  };

  // One stochastic probe estimates the mean diagonal of B^H B for the
  // dense-operator preconditioner (fixed internal seed keeps runs
  // reproducible).
  double kappa;
  {
    Rng rng(0x9e3779b97f4a7c15ULL);
    const MatC wpr = rng.cgaussian_matrix(B.n, B.r);
    const MatC bw = B.adjoint(B.forward(wpr));
    kappa = std::max(1e-12, real_inner(wpr, bw) / wpr.squaredNorm());
  }
  const BlockCirculantPreconditioner prec(B, shape, w, kappa);

  const std::vector<VecC> yv = Y;
  const MatC By = B.adjoint(yv);
  double ynorm2 = 0.0;
  for (const auto& b : yv) ynorm2 += b.squaredNorm();

  MatC P = By;  // adjoint-image initialization
  MatC Gx = MatC::Zero(B.n, B.r), Gy = Gx, Lx = Gx, Ly = Gx;

  const auto objective = [&](const MatC& Pc) {
    double fit = 0.0;
    const std::vector<VecC> bp = B.forward(Pc);
    for (std::size_t i = 0; i < bp.size(); ++i) fit += (bp[i] - yv[i]).squaredNorm();
    const MatC dx = grad_x(Pc, shape), dy = grad_y(Pc, shape);
    double tv = 0.0;
    for (Index s = 0; s < dx.rows(); ++s)
      tv += std::sqrt(dx.row(s).squaredNorm() + dy.row(s).squaredNorm());
    return 0.5 * fit + cfg.lambda * tv;
  };

  ADMMResult result;
  RecoveryReport& rep = result.report;
  const double initial_obj = objective(P);
  MatC P_prev = P;

  for (int outer = 0; outer < cfg.max_outer; ++outer) {
    P_prev = P;

    // P-step: (B^H B + w L) P = B^H Y + w (gx^H (Gx + Lx/beta) + gy^H (Gy + Ly/beta))
    MatC rhs = By;
    rhs += w * grad_x_adj(Gx + Lx / cfg.beta, shape);
    rhs += w * grad_y_adj(Gy + Ly / cfg.beta, shape);

    int pcg_iters = 0;
    {
      const double rhs_norm = rhs.norm();
      if (rhs_norm > 0.0) {
        MatC rres = rhs - normal_op(P);
        MatC z = prec.apply(rres);
        MatC d = z;
        double rho = real_inner(rres, z);
        for (; pcg_iters < cfg.pcg_max && rres.norm() > cfg.pcg_tol * rhs_norm; ++pcg_iters) {
          const MatC q = normal_op(d);
          const double dq = real_inner(d, q);
          if (dq <= 0.0) break;  // loss of positive definiteness in round-off
          const double alpha = rho / dq;
          P += alpha * d;
          rres -= alpha * q;
          z = prec.apply(rres);
          const double rho_new = real_inner(rres, z);
          d = z + (rho_new / rho) * d;
          rho = rho_new;
        }
      } else {
        P.setZero();
      }
    }
    rep.pcg_iteration_counts.push_back(pcg_iters);

    // G-step: group shrinkage of the shifted gradients.
    const MatC dxP = grad_x(P, shape);
    const MatC dyP = grad_y(P, shape);
    std::tie(Gx, Gy) = group_shrink(dxP - Lx / cfg.beta, dyP - Ly / cfg.beta, 1.0 / cfg.beta);

    // multiplier ascent
    Lx += cfg.beta * (Gx - dxP);
    Ly += cfg.beta * (Gy - dyP);

    const double grad_norm = std::sqrt(dxP.squaredNorm() + dyP.squaredNorm());
    const double primal = std::sqrt((Gx - dxP).squaredNorm() + (Gy - dyP).squaredNorm());
    const double primal_rel = grad_norm > 0.0 ? primal / grad_norm : primal;
    rep.primal_residual_trace.push_back(primal_rel);

    const double obj = objective(P);
    rep.objective_trace.push_back(obj);
    ++rep.iterations_run;

    if (initial_obj > 0.0 && obj > 1e6 * initial_obj)
      throw std::runtime_error("admm_recover: objective diverged");

    const double change = (P - P_prev).norm() / std::max(P_prev.norm(), 1e-300);
    if (change < cfg.stop_tol && primal_rel <= cfg.stop_tol) {
      rep.converged = true;
      break;
    }
  }
  result.P = P;

  if (ground_truth) {
    const MatC Xhat = P * est.Q;
    rep.final_relative_error = relative_error(Xhat, ground_truth->values);
  }
  return result;
}

SignalMatrix reconstruct(const MatC& P, const MatC& Q) {
  if (P.cols() != Q.rows()) throw std::invalid_argument("reconstruct: inner dimensions mismatch");
  SignalMatrix X;
  X.values = P * Q;
  return X;
}

SignalMatrix reconstruct(const MatC& P, const SubspaceEstimate& est) {
  return reconstruct(P, est.Q);
}

double relative_error(const MatC& Xhat, const MatC& X) {
  if (Xhat.rows() != X.rows() || Xhat.cols() != X.cols())
    throw std::invalid_argument("relative_error: shape mismatch");
  const double nx = X.norm();
  if (nx <= 0.0) throw std::invalid_argument("relative_error: reference matrix is zero");
  return (Xhat - X).norm() / nx;
}

double relative_error(const SignalMatrix& Xhat, const SignalMatrix& X) {
  return relative_error(Xhat.values, X.values);
}

void write_report_csv(const std::filesystem::path& file, const RecoveryReport& report) {
  std::ofstream os(file);
  if (!os) throw std::runtime_error("cannot open " + file.string() + " for writing");
  os << "iter,objective,primal_residual,pcg_iters\n";
  for (int i = 0; i < report.iterations_run; ++i)
    os << i << ',' << format_double(report.objective_trace[static_cast<std::size_t>(i)]) << ','
       << format_double(report.primal_residual_trace[static_cast<std::size_t>(i)]) << ','
       << report.pcg_iteration_counts[static_cast<std::size_t>(i)] << '\n';
}

}  // namespace ljsr
