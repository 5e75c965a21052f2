#include "ljsr/analysis.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "ljsr/keyval.hpp"
#include "ljsr/rng.hpp"

namespace ljsr {

bool mmv_identifiable(int k, int r, int spark_A) {
  if (r < 1 || r > k) throw std::invalid_argument("mmv_identifiable: need 1 <= r <= k");
  return spark_A > 2 * k - r + 1;
}

BudgetReport budget(int k, int r, int N) {
  if (r < 1 || r > k) throw std::invalid_argument("budget: need 1 <= r <= k");
  if (N < r) throw std::invalid_argument("budget: need N >= r");
  BudgetReport b;
  b.k = k;
  b.r = r;
  b.N = N;
  b.mmv_per_snapshot = 2 * k - r + 1;
  b.proposed_total = static_cast<long long>(2 * k - r + N) * r;
  b.proposed_avg_per_snapshot = static_cast<double>(b.proposed_total) / N;
  b.asymptotic_avg = r + 2.0 * k * r / N;
  b.dense_dof = degrees_of_freedom(std::max(k, 1), N, r, k);
  return b;
}

std::string BudgetReport::to_text() const {
  std::ostringstream os;
  os << "k                        = " << k << '\n'
     << "r                        = " << r << '\n'
     << "N                        = " << N << '\n'
     << "mmv_per_snapshot         = " << mmv_per_snapshot << "   (2k - r + 1)\n"
     << "proposed_total           = " << proposed_total << "   ((2k - r + N) r)\n"
     << "proposed_avg_per_snapshot = " << format_double(proposed_avg_per_snapshot)
     << "   (r common rows + (2k - r) r / N variable rows)\n"
     << "asymptotic_avg           = " << format_double(asymptotic_avg) << "   (r + 2kr/N)\n"
     << "dense_dof                = " << dense_dof << "   (r (k + N - r))\n";
  return os.str();
}

std::string BudgetReport::csv_header() {
  return "k,r,N,mmv_per_snapshot,proposed_total,proposed_avg_per_snapshot,asymptotic_avg,dense_dof";
}

std::string BudgetReport::csv_row() const {
  std::ostringstream os;
  os << k << ',' << r << ',' << N << ',' << mmv_per_snapshot << ',' << proposed_total << ','
     << format_double(proposed_avg_per_snapshot) << ',' << format_double(asymptotic_avg) << ','
     << dense_dof;
  return os.str();
}

Theorem3Check check_theorem3(const MatC& C_stack, int k, const SubspaceEstimate& Q,
                             const std::vector<int>& cluster_map) {
  if (k < 1) throw std::invalid_argument("check_theorem3: k must be >= 1");
  if (static_cast<Index>(cluster_map.size()) != Q.Q.cols())
    throw std::invalid_argument("check_theorem3: cluster map length != Q columns");

  Theorem3Check out;
  out.spark_found = spark_bruteforce(C_stack);

  const int r = Q.r_est;
  const int p = cluster_map.empty() ? 0 : *std::max_element(cluster_map.begin(), cluster_map.end()) + 1;
  out.q_clusters_ok = true;
  for (int c = 0; c < p; ++c) {
    std::vector<int> frames;
    for (std::size_t i = 0; i < cluster_map.size(); ++i)
      if (cluster_map[i] == c) frames.push_back(static_cast<int>(i));
    if (static_cast<int>(frames.size()) < r) {
      out.q_clusters_ok = false;
      continue;
    }
    MatC sub(r, static_cast<Index>(frames.size()));
    for (std::size_t j = 0; j < frames.size(); ++j)
      sub.col(static_cast<Index>(j)) = Q.Q.col(frames[j]);
    Eigen::JacobiSVD<MatC> svd(sub);
    const VecR& sv = svd.singularValues();
    if (sv[0] <= 0.0 || sv[sv.size() - 1] <= kRankTol * sv[0]) out.q_clusters_ok = false;
  }
  out.satisfied = (out.spark_found >= 2 * k) && out.q_clusters_ok;
  return out;
}

MatC stack_cluster_operators(const VariableOperatorSet& vset) {
  Index rows = 0;
  for (const auto& op : vset.cluster_ops) rows += op.rows();
  const Index cols = vset.cluster_ops.front().cols();
  MatC stack(rows, cols);
  Index at = 0;
  for (const auto& op : vset.cluster_ops) {
    stack.middleRows(at, op.rows()) = op.dense_materialize();
    at += op.rows();
  }
  return stack;
}

SparkXResult spark_x_condition(const SignalMatrix& X, int r, std::uint64_t seed) {
  const int N = static_cast<int>(X.frames());
  if (r < 1 || r > N) throw std::invalid_argument("spark_x_condition: r out of range");

  const auto subset_full_rank = [&](const std::vector<int>& cols) {
    MatC sub(X.n(), static_cast<Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j)
      sub.col(static_cast<Index>(j)) = X.values.col(cols[j]);
    return numerical_rank(sub) == static_cast<int>(cols.size());
  };

  SparkXResult res;
  if (N <= 24) {
    res.exhaustive = true;
    std::vector<int> combo(static_cast<std::size_t>(r));
    for (int i = 0; i < r; ++i) combo[static_cast<std::size_t>(i)] = i;
    while (true) {
      ++res.subsets_tested;
      if (!subset_full_rank(combo)) return res;  // ok = false
      int i = r - 1;
      while (i >= 0 && combo[static_cast<std::size_t>(i)] == N - r + i) --i;
      if (i < 0) break;
      ++combo[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < r; ++j)
        combo[static_cast<std::size_t>(j)] = combo[static_cast<std::size_t>(j - 1)] + 1;
    }
  } else {
    res.exhaustive = false;  // probabilistic screen only
    Rng rng = Rng::derive(seed, 0x735831ULL);
    for (int t = 0; t < 200; ++t) {
      ++res.subsets_tested;
      if (!subset_full_rank(rng.sample_indices(N, r))) return res;
    }
  }
  res.ok = true;
  return res;
}

}  // namespace ljsr
