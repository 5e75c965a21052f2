#include "ljsr/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "ljsr/fmx.hpp"
#include "ljsr/keyval.hpp"
#include "ljsr/parallel.hpp"
#include "ljsr/rng.hpp"

namespace ljsr {

MatC gram(const MatC& Z) {
  MatC G = Z.adjoint() * Z;
  G = 0.5 * (G + G.adjoint()).eval();
  return G;
}

SubspaceEstimate estimate_right_subspace(const MatC& G, int r, double rel_tol) {
  if (G.rows() != G.cols()) throw std::invalid_argument("estimate_right_subspace: G must be square");
  const Index N = G.rows();
  if (N < 1) throw std::invalid_argument("estimate_right_subspace: empty Gram matrix");
  if (r != kAutoRank && (r < 1 || r > N))
    throw std::invalid_argument("estimate_right_subspace: r out of range");

  Eigen::SelfAdjointEigenSolver<MatC> eig(G);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("estimate_right_subspace: eigendecomposition failed");

  // Eigen returns ascending order; flip to descending and clamp round-off
  // negatives to zero.
  SubspaceEstimate est;
  est.eigenvalues.resize(N);
  MatC W(N, N);
  for (Index i = 0; i < N; ++i) {
    est.eigenvalues[i] = std::max(0.0, eig.eigenvalues()[N - 1 - i]);
    W.col(i) = eig.eigenvectors().col(N - 1 - i);
  }
  const double lmax = est.eigenvalues[0];
  if (lmax <= 0.0) throw std::runtime_error("estimate_right_subspace: Gram matrix has no signal");

  int positive = 0;
  for (Index i = 0; i < N; ++i)
    if (est.eigenvalues[i] > 1e-14 * lmax) ++positive;

  if (r == kAutoRank) {
    est.r_est = 0;
    for (Index i = 0; i < N; ++i)
      if (est.eigenvalues[i] > rel_tol * lmax) ++est.r_est;
  } else {
    if (r > positive)
      throw std::runtime_error("estimate_right_subspace: requested rank exceeds the positive spectrum");
    est.r_est = r;
  }

  est.Q.resize(est.r_est, N);
  for (int i = 0; i < est.r_est; ++i)
    est.Q.row(i) = std::sqrt(est.eigenvalues[i]) * W.col(i).adjoint();

  // Row-phase convention: largest-magnitude entry real-positive. A unit
  // phase per row leaves Q^H Q unchanged.
  for (int i = 0; i < est.r_est; ++i) {
    Index jmax = 0;
    double best = -1.0;
    for (Index j = 0; j < N; ++j) {
      const double a = std::abs(est.Q(i, j));
      if (a > best) {
        best = a;
        jmax = j;
      }
    }
    if (best > 0.0) est.Q.row(i) *= std::conj(est.Q(i, jmax)) / best;
  }
  return est;
}

namespace {

/// Orthonormal row basis of the row span (rank-revealing via SVD).
MatC orthonormal_rows(const MatC& V) {
  Eigen::JacobiSVD<MatC> svd(V, Eigen::ComputeThinV);
  const VecR& sv = svd.singularValues();
  if (sv.size() == 0 || sv[0] <= 0.0)
    throw std::invalid_argument("projection_error: zero-rank input");
  int rank = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv[i] > 1e-12 * sv[0]) ++rank;
  return svd.matrixV().leftCols(rank).adjoint();
}

double spectral_norm(const MatC& M) {
  Eigen::JacobiSVD<MatC> svd(M);
  return svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
}

}  // namespace

double projection_error(const MatC& V1, const MatC& V2) {
  if (V1.cols() != V2.cols())
    throw std::invalid_argument("projection_error: ambient dimensions differ");
  const MatC B1 = orthonormal_rows(V1);  // r1 x N
  const MatC B2 = orthonormal_rows(V2);  // r2 x N
  // (I - P1) B2^H with P1 = B1^H B1, and symmetrically.
  const MatC R12 = B2.adjoint() - B1.adjoint() * (B1 * B2.adjoint());
  const MatC R21 = B1.adjoint() - B2.adjoint() * (B2 * B1.adjoint());
  const double n12 = spectral_norm(R12);
  const double n21 = spectral_norm(R21);
  // Orthonormal bases have unit spectral norm, so the denominator is 2.
  return (n12 * n12 + n21 * n21) / 2.0;
}

std::vector<CurvePoint> subspace_error_curve(const SignalMatrix& X,
                                             std::span<const int> m_c_values, int trials,
                                             std::uint64_t seed, OperatorKind kind,
                                             double rel_tol) {
  if (trials < 1) throw std::invalid_argument("subspace_error_curve: trials must be >= 1");
  if (!X.true_rank)
    throw std::invalid_argument("subspace_error_curve: X must carry its true rank");
  for (int m : m_c_values)
    if (m < 1) throw std::invalid_argument("subspace_error_curve: m_c values must be >= 1");
  if (kind == OperatorKind::FourierLines && !X.frame_shape)
    throw std::invalid_argument("subspace_error_curve: Fourier sampling needs a frame shape");

  const MatC V_true = truncated_svd(X, *X.true_rank).V;

  const int points = static_cast<int>(m_c_values.size());
  std::vector<std::vector<double>> errs(static_cast<std::size_t>(points),
                                        std::vector<double>(static_cast<std::size_t>(trials)));
  parallel_for(points * trials, [&](int job) {
    const int pi = job / trials;
    const int trial = job % trials;
    const int m_c = m_c_values[static_cast<std::size_t>(pi)];
    const std::uint64_t s =
        seed ^ (0x10001ULL * static_cast<std::uint64_t>(m_c) + static_cast<std::uint64_t>(trial));
    MeasurementOperator phi =
        (kind == OperatorKind::DenseGaussian)
            ? build_common_gaussian(m_c, static_cast<int>(X.n()), s)
            : build_common_fourier(X.frame_shape->nx, X.frame_shape->ny, m_c, s);
    MatC Z(phi.rows(), X.frames());
    for (Index i = 0; i < X.frames(); ++i) Z.col(i) = phi.apply(X.values.col(i));
    const SubspaceEstimate est = estimate_right_subspace(gram(Z), kAutoRank, rel_tol);
    errs[static_cast<std::size_t>(pi)][static_cast<std::size_t>(trial)] =
        projection_error(est.Q, V_true);
  });

  std::vector<CurvePoint> curve(static_cast<std::size_t>(points));
  for (int pi = 0; pi < points; ++pi) {
    double sum = 0.0, mx = 0.0;
    for (double e : errs[static_cast<std::size_t>(pi)]) {
      sum += e;
      mx = std::max(mx, e);
    }
    curve[static_cast<std::size_t>(pi)] = {m_c_values[static_cast<std::size_t>(pi)],
                                           sum / trials, mx};
  }
  std::sort(curve.begin(), curve.end(),
            [](const CurvePoint& a, const CurvePoint& b) { return a.m_c < b.m_c; });
  return curve;
}

void write_curve_csv(const std::filesystem::path& file, const std::vector<CurvePoint>& curve) {
  std::ofstream os(file);
  if (!os) throw std::runtime_error("cannot open " + file.string() + " for writing");
  os << "m_c,mean_proj_err,max_proj_err\n";
  for (const auto& p : curve)
    os << p.m_c << ',' << format_double(p.mean_proj_err) << ','
       << format_double(p.max_proj_err) << '\n';
}

void save_subspace_estimate(const std::filesystem::path& dir, const SubspaceEstimate& est) {
  std::filesystem::create_directories(dir);
  write_fmx(dir / "Q.fmx", est.Q);
  std::ofstream os(dir / "eigenvalues.csv");
  if (!os) throw std::runtime_error("cannot open eigenvalues.csv for writing");
  os << "index,eigenvalue\n";
  for (Index i = 0; i < est.eigenvalues.size(); ++i)
    os << i << ',' << format_double(est.eigenvalues[i]) << '\n';
}

}  // namespace ljsr
