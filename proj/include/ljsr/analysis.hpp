#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ljsr/core.hpp"
#include "ljsr/model.hpp"
#include "ljsr/sampling.hpp"
#include "ljsr/subspace.hpp"

namespace ljsr {

/// MMV identifiability: spark(A) > 2k - r + 1.
bool mmv_identifiable(int k, int r, int spark_A);

/// Measurement budgets for recovering a rank-r, jointly k-sparse n x N
/// matrix: the per-snapshot MMV requirement versus the hybrid
/// common+variable total (r common rows per snapshot plus the variable
/// remainder).
struct BudgetReport {
  int k = 0, r = 0, N = 0;
  int mmv_per_snapshot = 0;          // 2k - r + 1
  long long proposed_total = 0;      // (2k - r + N) * r
  double proposed_avg_per_snapshot;  // proposed_total / N = r + 2kr/N - r^2/N
  double asymptotic_avg;             // r + 2kr/N (large-N form)
  long long dense_dof = 0;           // r (k + N - r)

  std::string to_text() const;
  static std::string csv_header();
  std::string csv_row() const;
};

BudgetReport budget(int k, int r, int N);

/// Cluster-design sufficiency check: spark of the stacked cluster operators
/// against 2k, plus nonsingularity of every per-cluster Q block.
struct Theorem3Check {
  bool satisfied = false;
  int spark_found = 0;
  bool q_clusters_ok = false;
};

Theorem3Check check_theorem3(const MatC& C_stack, int k, const SubspaceEstimate& Q,
                             const std::vector<int>& cluster_map);

/// Dense stack [C_1; ...; C_p] of the distinct cluster operators.
MatC stack_cluster_operators(const VariableOperatorSet& vset);

/// Every set of r columns of X has rank r: exhaustive for N <= 24, sampled
/// (200 seeded draws) otherwise.
struct SparkXResult {
  bool ok = false;
  bool exhaustive = false;
  long long subsets_tested = 0;
};

SparkXResult spark_x_condition(const SignalMatrix& X, int r, std::uint64_t seed = 0);

}  // namespace ljsr
