#include "ljsr/model.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "ljsr/rng.hpp"

namespace ljsr {
namespace {

MatC orthonormal_columns(const MatC& A) {
  Eigen::HouseholderQR<MatC> qr(A);
  return qr.householderQ() * MatC::Identity(A.rows(), A.cols());
}

/// Rotates each row of V so its largest-magnitude entry is real-positive;
/// U columns absorb the conjugate phase so U*diag(S)*V is unchanged.
void fix_row_phases(MatC& U, MatC& V) {
  for (Index i = 0; i < V.rows(); ++i) {
    Index jmax = 0;
    double best = -1.0;
    for (Index j = 0; j < V.cols(); ++j) {
      const double a = std::abs(V(i, j));
      if (a > best) {
        best = a;
        jmax = j;
      }
    }
    if (best <= 0.0) continue;
    const Complex c = std::conj(V(i, jmax)) / best;  // unit modulus
    V.row(i) *= c;
    U.col(i) *= std::conj(c);
  }
}

}  // namespace

SignalMatrix make_random_lrjs(int n, int N, int r, int k, std::uint64_t seed) {
  if (n < 1 || N < 1) throw std::invalid_argument("make_random_lrjs: n, N must be >= 1");
  if (r < 1) throw std::invalid_argument("make_random_lrjs: r must be >= 1");
  if (r > k) throw std::invalid_argument("make_random_lrjs: r > k (a k-row matrix has rank <= k)");
  if (r > N) throw std::invalid_argument("make_random_lrjs: r > N");
  if (k > n) throw std::invalid_argument("make_random_lrjs: k > n");

  Rng rng(seed);
  const std::vector<int> support = rng.sample_indices(n, k);

  const MatC Us = orthonormal_columns(rng.cgaussian_matrix(k, r));
  const MatC Vt = orthonormal_columns(rng.cgaussian_matrix(N, r));  // N x r
  VecR S(r);
  for (int i = 0; i < r; ++i) S[i] = rng.uniform(1.0, 2.0);
  std::sort(S.data(), S.data() + r, std::greater<double>());

  MatC U = MatC::Zero(n, r);
  for (int i = 0; i < k; ++i) U.row(support[static_cast<std::size_t>(i)]) = Us.row(i);

  SignalMatrix X;
  X.values = U * S.asDiagonal() * Vt.adjoint();
  X.true_rank = r;
  X.true_support = support;
  return X;
}

namespace {

struct Ellipse {
  double cx, cy, a, b, value;
};

bool inside(const Ellipse& e, double x, double y) {
  const double dx = (x - e.cx) / e.a;
  const double dy = (y - e.cy) / e.b;
  return dx * dx + dy * dy <= 1.0;
}

}  // namespace

SignalMatrix make_dynamic_phantom(const PhantomSpec& spec) {
  if (spec.period < 1) throw std::invalid_argument("make_dynamic_phantom: period must be >= 1");
  if (spec.N < spec.period) throw std::invalid_argument("make_dynamic_phantom: N must be >= period");
  if (spec.nx < 4 || spec.ny < 4) throw std::invalid_argument("make_dynamic_phantom: nx, ny must be >= 4");

  const int nx = spec.nx, ny = spec.ny, period = spec.period;
  const Index n = static_cast<Index>(nx) * ny;
  const double m = std::min(nx, ny);

  Rng rng(spec.seed);
  const double cx = 0.5 * (nx - 1) + rng.uniform(-0.5, 0.5);
  const double cy = 0.5 * (ny - 1) + rng.uniform(-0.5, 0.5);

  const std::vector<Ellipse> scene = {
      {cx, cy, 0.44 * nx, 0.44 * ny, 0.6},                            // body
      {cx - 0.22 * nx, cy + 0.20 * ny, 0.10 * m, 0.08 * m, 0.5},      // static detail
      {cx + 0.24 * nx, cy - 0.18 * ny, 0.07 * m, 0.11 * m, -0.25},    // static notch
  };

  // Pulsating inner ellipse: the semi-axis grows by at least one pixel per
  // phase so consecutive phase images differ by a nonempty ring, and the
  // intensity is phase-dependent so the phase images are independent.
  const double a_min = 0.10 * m;
  double a_max = 0.30 * m;
  if (spec.k_target > 0) {
    // Heuristic budget: larger rings cost more joint gradient support.
    a_max = std::min(0.45 * m, a_min + std::sqrt(static_cast<double>(spec.k_target)) / 2.0);
  }
  const double step = (period > 1) ? std::max(1.0, (a_max - a_min) / (period - 1)) : 0.0;

  MatC phases(n, period);
  for (int phi = 0; phi < period; ++phi) {
    const double a = std::min(a_min + phi * step, 0.47 * m);
    const Ellipse inner{cx + 0.02 * nx, cy - 0.02 * ny, a, 0.8 * a, 0.9 + 0.08 * phi};
    for (int iy = 0; iy < ny; ++iy) {
      for (int ix = 0; ix < nx; ++ix) {
        double v = 0.0;
        for (const auto& e : scene)
          if (inside(e, ix, iy)) v += e.value;
        if (inside(inner, ix, iy)) v += inner.value;
        phases(ix + static_cast<Index>(nx) * iy, phi) = Complex(v, 0.0);
      }
    }
  }

  SignalMatrix X;
  X.values.resize(n, spec.N);
  for (int t = 0; t < spec.N; ++t) X.values.col(t) = phases.col(t % period);
  X.frame_shape = FrameShape{nx, ny};
  X.true_rank = numerical_rank(X.values);
  return X;
}

SVDFactors truncated_svd(const MatC& X, int r) {
  const Index n = X.rows(), N = X.cols();
  if (r < 1 || r > std::min(n, N))
    throw std::invalid_argument("truncated_svd: r out of range");

  Eigen::JacobiSVD<MatC> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VecR& sv = svd.singularValues();
  if (sv[r - 1] <= 1e-14 * sv[0])
    throw std::runtime_error("truncated_svd: requested rank exceeds numerical rank");

  SVDFactors f;
  f.U = svd.matrixU().leftCols(r);
  f.S = sv.head(r);
  f.V = svd.matrixV().leftCols(r).adjoint();
  fix_row_phases(f.U, f.V);
  return f;
}

SVDFactors truncated_svd(const SignalMatrix& X, int r) { return truncated_svd(X.values, r); }

int numerical_rank(const MatC& M, double rel_tol) {
  if (M.size() == 0) return 0;
  Eigen::JacobiSVD<MatC> svd(M);
  const VecR& sv = svd.singularValues();
  if (sv.size() == 0 || sv[0] <= 0.0) return 0;
  int rank = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv[i] > rel_tol * sv[0]) ++rank;
  return rank;
}

namespace {

/// Rank-deficiency test for an m x s column subset at the 1e-10 relative
/// tolerance. A Gram eigenvalue screen skips the SVD for clearly
/// well-conditioned subsets.
bool subset_dependent(const MatC& sub, VecC* null_vector) {
  if (sub.cols() > sub.rows()) {
    // more columns than rows: dependent by counting; kernel needs the full V
    if (null_vector) {
      Eigen::JacobiSVD<MatC> svd(sub, Eigen::ComputeFullV);
      *null_vector = svd.matrixV().col(sub.cols() - 1);
    }
    return true;
  }
  const MatC gram = sub.adjoint() * sub;
  Eigen::SelfAdjointEigenSolver<MatC> eig(gram);
  const VecR& lam = eig.eigenvalues();  // ascending
  const double lmax = lam[lam.size() - 1];
  if (lmax > 0.0 && lam[0] > 1e-12 * lmax) return false;  // sigma ratio > 1e-6

  Eigen::JacobiSVD<MatC> svd(sub, Eigen::ComputeThinV);
  const VecR& sv = svd.singularValues();
  const double smax = sv[0];
  const double smin = sv[sv.size() - 1];
  if (smin > kRankTol * smax) return false;
  if (null_vector) {
    if (smax <= 0.0) {
      *null_vector = VecC::Zero(sub.cols());
      (*null_vector)[0] = Complex(1.0, 0.0);
    } else {
      *null_vector = svd.matrixV().col(sub.cols() - 1);
    }
  }
  return true;
}

std::optional<SparkCertificate> find_dependent_subset(const MatC& A, int max_size) {
  const int n = static_cast<int>(A.cols());
  MatC sub(A.rows(), std::max(max_size, 1));
  std::vector<int> combo;
  for (int s = 1; s <= std::min(max_size, n); ++s) {
    combo.resize(static_cast<std::size_t>(s));
    for (int i = 0; i < s; ++i) combo[static_cast<std::size_t>(i)] = i;
    while (true) {
      for (int i = 0; i < s; ++i) sub.col(i) = A.col(combo[static_cast<std::size_t>(i)]);
      VecC nv;
      if (subset_dependent(sub.leftCols(s), &nv)) {
        SparkCertificate c;
        c.spark = s;
        c.columns = combo;
        c.null_vector = nv;
        return c;
      }
      // next combination in lexicographic order
      int i = s - 1;
      while (i >= 0 && combo[static_cast<std::size_t>(i)] == n - s + i) --i;
      if (i < 0) break;
      ++combo[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < s; ++j)
        combo[static_cast<std::size_t>(j)] = combo[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return std::nullopt;
}

void check_spark_size(const MatC& A) {
  if (A.cols() > 24)
    throw std::invalid_argument("spark_bruteforce: more than 24 columns (exhaustive search refused)");
  if (A.cols() < 1 || A.rows() < 1)
    throw std::invalid_argument("spark_bruteforce: empty matrix");
}

}  // namespace

SparkCertificate spark_bruteforce_detail(const MatC& A) {
  check_spark_size(A);
  const int n = static_cast<int>(A.cols());
  const int rank = numerical_rank(A);
  if (rank == n) {
    SparkCertificate c;
    c.spark = n + 1;  // full-spark convention
    return c;
  }
  // rank < n guarantees a dependent subset of size <= rank + 1
  auto c = find_dependent_subset(A, rank + 1);
  if (!c) throw std::logic_error("spark_bruteforce: no dependent subset below rank+1");
  return *c;
}

int spark_bruteforce(const MatC& A) { return spark_bruteforce_detail(A).spark; }

bool spark_at_least(const MatC& A, int s) {
  check_spark_size(A);
  if (s <= 1) return true;
  const int n = static_cast<int>(A.cols());
  const int rank = numerical_rank(A);
  if (rank == n) return s <= n + 1;
  if (s - 1 >= rank + 1) return false;  // spark <= rank + 1 < s
  return !find_dependent_subset(A, s - 1).has_value();
}

std::vector<int> joint_support(const MatC& X, double tol) {
  if (tol < 0.0) throw std::invalid_argument("joint_support: tol must be >= 0");
  const VecR norms = X.rowwise().norm();
  const double maxn = norms.size() ? norms.maxCoeff() : 0.0;
  std::vector<int> idx;
  for (Index i = 0; i < norms.size(); ++i)
    if (norms[i] > tol * maxn) idx.push_back(static_cast<int>(i));
  return idx;
}

std::vector<int> joint_support(const SignalMatrix& X, double tol) {
  return joint_support(X.values, tol);
}

long long degrees_of_freedom(int n, int N, int r, int k) {
  if (r < 1 || k < r || N < r || n < k)
    throw std::invalid_argument("degrees_of_freedom: need 1 <= r <= min(k, N) and k <= n");
  return static_cast<long long>(r) * (static_cast<long long>(k) + N - r);
}

}  // namespace ljsr
