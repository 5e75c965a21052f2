#pragma once

#include <algorithm>
#include <set>
#include <stdexcept>
#include <vector>

#include "ljsr/model.hpp"
#include "ljsr/rng.hpp"

namespace ljsr::testing {

/// Rank-r, jointly k-sparse matrix whose leading left singular vector lies in
/// the kernel of a dependent column subset of `phi` (from the spark
/// certificate). The common measurements of such a matrix lose one dimension
/// of the row space, which is the failure construction for small-spark
/// common operators.
inline SignalMatrix make_null_aligned_lrjs(const MatC& phi, int N, int r, int k,
                                           std::uint64_t seed) {
  const int n = static_cast<int>(phi.cols());
  const SparkCertificate cert = spark_bruteforce_detail(phi);
  if (cert.spark > k)
    throw std::invalid_argument("make_null_aligned_lrjs: spark(phi) exceeds k");
  if (r > k || k > n) throw std::invalid_argument("make_null_aligned_lrjs: bad r/k");

  Rng rng = Rng::derive(seed, 0x66616963ULL);

  // Support: the dependent columns plus random padding up to k rows.
  std::set<int> support(cert.columns.begin(), cert.columns.end());
  while (static_cast<int>(support.size()) < k) support.insert(rng.uniform_int(0, n - 1));
  const std::vector<int> rows(support.begin(), support.end());

  // First column: the kernel witness embedded into C^n.
  MatC U = MatC::Zero(n, r);
  for (std::size_t j = 0; j < cert.columns.size(); ++j)
    U(cert.columns[j], 0) = cert.null_vector[static_cast<Index>(j)];
  U.col(0) /= U.col(0).norm();

  // Remaining columns: random on the support, orthonormalized.
  for (int c = 1; c < r; ++c) {
    VecC v = VecC::Zero(n);
    for (int row : rows) v[row] = rng.cgaussian();
    for (int prev = 0; prev < c; ++prev) v -= (U.col(prev).adjoint() * v)(0, 0) * U.col(prev);
    U.col(c) = v / v.norm();
  }

  VecR S(r);
  for (int i = 0; i < r; ++i) S[i] = rng.uniform(1.0, 2.0);
  std::sort(S.data(), S.data() + r, std::greater<double>());

  MatC Vt = rng.cgaussian_matrix(N, r);
  Eigen::HouseholderQR<MatC> qr(Vt);
  const MatC Vq = qr.householderQ() * MatC::Identity(N, r);

  SignalMatrix X;
  X.values = U * S.asDiagonal() * Vq.adjoint();
  X.true_rank = r;
  X.true_support = rows;
  return X;
}

}  // namespace ljsr::testing
