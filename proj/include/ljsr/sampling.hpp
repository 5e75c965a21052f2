#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "ljsr/core.hpp"
#include "ljsr/keyval.hpp"
#include "ljsr/model.hpp"
#include "ljsr/rng.hpp"

namespace ljsr {

enum class OperatorKind { DenseGaussian, FourierLines };

/// Sampled 2-D DFT locations on an nx x ny grid, stored as unshifted grid
/// indices (kx, ky) in [0, nx) x [0, ny), sorted and duplicate-free.
struct FourierMask {
  int nx = 0;
  int ny = 0;
  std::vector<std::pair<int, int>> locations;
};

/// A per-frame measurement operator: either an explicit dense matrix or a
/// restriction of the unitary 2-D DFT to a sampled mask. Immutable after
/// construction; apply/adjoint are pure and thread-safe.
class MeasurementOperator {
 public:
  static MeasurementOperator dense(MatC matrix);
  /// i.i.d. complex Gaussian entries scaled by 1/sqrt(rows) so expected
  /// column norms are 1.
  static MeasurementOperator dense_gaussian(int rows, int cols, Rng& rng);
  /// Radial-line mask: one discretized line through the DFT center per
  /// angle. Throws if two angles discretize to the same point set.
  static MeasurementOperator fourier_lines(int nx, int ny, std::span<const double> angles);
  static MeasurementOperator fourier_mask(FourierMask mask);

  VecC apply(const VecC& frame) const;
  VecC adjoint(const VecC& meas) const;

  Index rows() const;
  Index cols() const;
  OperatorKind kind() const { return kind_; }
  const MatC& matrix() const { return matrix_; }
  const FourierMask& mask() const { return mask_; }

  /// Explicit matrix of the operator (test oracle; guard against large n).
  MatC dense_materialize() const;

  bool same_as(const MeasurementOperator& other) const;

  /// Empty placeholder; only meaningful after assignment from a factory.
  MeasurementOperator() = default;

 private:
  OperatorKind kind_ = OperatorKind::DenseGaussian;
  MatC matrix_;       // dense kind
  FourierMask mask_;  // fourier kind
};

/// Grid points of the radial line at `angle` through the DFT center,
/// deduplicated after wrap-around and sorted.
std::vector<std::pair<int, int>> radial_line_points(int nx, int ny, double angle);

/// The common operator applied to every frame.
MeasurementOperator build_common_gaussian(int m_c, int n, std::uint64_t seed);
MeasurementOperator build_common_fourier(int nx, int ny, int line_count, std::uint64_t seed);

enum class ClusterScheme { Consecutive, Periodic, Permuted };

const char* to_string(ClusterScheme s);
ClusterScheme cluster_scheme_from_string(const std::string& s);

/// The per-frame variable operators: p distinct cluster operators plus a
/// frame -> cluster assignment. Frames sharing a cluster see the identical
/// operator object.
struct VariableOperatorSet {
  std::vector<MeasurementOperator> cluster_ops;
  std::vector<int> cluster_map;
  ClusterScheme scheme = ClusterScheme::Consecutive;
  bool truncated_last = false;  // set when p does not divide N evenly

  int p() const { return static_cast<int>(cluster_ops.size()); }
  int frames() const { return static_cast<int>(cluster_map.size()); }
  const MeasurementOperator& op(int frame) const {
    return cluster_ops[static_cast<std::size_t>(cluster_map[static_cast<std::size_t>(frame)])];
  }
};

std::vector<int> consecutive_cluster_map(int N, int p);
std::vector<int> periodic_cluster_map(int N, int p);
/// map'[i] = map[perm[i]]; with the identity permutation this is `map`.
std::vector<int> permute_cluster_map(const std::vector<int>& map, const std::vector<int>& perm);

struct OperatorGeometry {
  OperatorKind kind = OperatorKind::DenseGaussian;
  int n = 0;           // columns (dense kind), or nx*ny
  FrameShape frame;    // fourier kind
};

/// Builds p distinct operators (independent substreams of `seed`) and the
/// cluster map for the requested scheme. `per_op` is the row count for
/// dense operators or the line count for Fourier operators.
VariableOperatorSet build_variable_set(ClusterScheme scheme, int p, int N, int per_op,
                                       const OperatorGeometry& geom, std::uint64_t seed);

/// Per-frame measurements: Z column i holds the common measurements of
/// frame i, Y[i] the variable ones.
struct MeasurementSet {
  MatC Z;
  std::vector<VecC> Y;
  double noise_sigma = 0.0;
};

/// z_i = Phi x_i + eps, y_i = A_i x_i + eps'; eps entries are i.i.d.
/// circular complex Gaussian with E|eps|^2 = noise_sigma^2, streams split
/// per frame so the result is independent of evaluation order.
MeasurementSet measure(const SignalMatrix& X, const MeasurementOperator& phi,
                       const VariableOperatorSet& vset, double noise_sigma, std::uint64_t seed);

/// Noise level that hits the requested measurement-domain SNR on average.
double sigma_for_snr_db(const MeasurementSet& clean, double snr_db);
double empirical_snr_db(const MeasurementSet& clean, const MeasurementSet& noisy);

// --- serialization ---------------------------------------------------------

void write_lines_file(const std::filesystem::path& file, const std::vector<FourierMask>& frames);
std::vector<FourierMask> read_lines_file(const std::filesystem::path& file);

/// Directory layout: Z.fmx, y_0000.fmx..., phi.{fmx|lines}, C_000.{fmx|lines}...,
/// meta (scheme, p, seed, noise_sigma, cluster_map, ...).
void save_measurement_dir(const std::filesystem::path& dir, const MeasurementSet& ms,
                          const MeasurementOperator& phi, const VariableOperatorSet& vset,
                          const KeyVal& extra_meta = {});

struct LoadedMeasurements {
  MeasurementSet ms;
  MeasurementOperator phi;
  VariableOperatorSet vset;
  KeyVal meta;
};

LoadedMeasurements load_measurement_dir(const std::filesystem::path& dir);

}  // namespace ljsr
