#include "ljsr/sampling.hpp"
#include <limits>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "ljsr/fft.hpp"
#include "ljsr/fmx.hpp"
#include "ljsr/rng.hpp"

namespace ljsr {

// --- MeasurementOperator ----------------------------------------------------

MeasurementOperator MeasurementOperator::dense(MatC matrix) {
  if (matrix.rows() < 1 || matrix.cols() < 1)
    throw std::invalid_argument("MeasurementOperator: empty matrix");
  MeasurementOperator op;
  op.kind_ = OperatorKind::DenseGaussian;
  op.matrix_ = std::move(matrix);
  return op;
}

MeasurementOperator MeasurementOperator::dense_gaussian(int rows, int cols, Rng& rng) {
  if (rows < 1 || cols < 1)
    throw std::invalid_argument("dense_gaussian: rows and cols must be >= 1");
  return dense(rng.cgaussian_matrix(rows, cols, 1.0 / std::sqrt(static_cast<double>(rows))));
}

MeasurementOperator MeasurementOperator::fourier_mask(FourierMask mask) {
  if (mask.nx < 1 || mask.ny < 1 || mask.locations.empty())
    throw std::invalid_argument("fourier_mask: empty mask");
  for (auto [kx, ky] : mask.locations)
    if (kx < 0 || kx >= mask.nx || ky < 0 || ky >= mask.ny)
      throw std::invalid_argument("fourier_mask: location outside the grid");
  std::sort(mask.locations.begin(), mask.locations.end());
  mask.locations.erase(std::unique(mask.locations.begin(), mask.locations.end()),
                       mask.locations.end());
  MeasurementOperator op;
  op.kind_ = OperatorKind::FourierLines;
  op.mask_ = std::move(mask);
  return op;
}

std::vector<std::pair<int, int>> radial_line_points(int nx, int ny, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  // March to the bounding square of the frequency grid, not the inscribed
  // disk: diagonal lines reach the spectrum corners, which otherwise stay
  // unsampled under every angle.
  double reach_d = std::numeric_limits<double>::max();
  if (std::abs(c) > 1e-12) reach_d = std::min(reach_d, nx / (2.0 * std::abs(c)));
  if (std::abs(s) > 1e-12) reach_d = std::min(reach_d, ny / (2.0 * std::abs(s)));
  const int reach = static_cast<int>(reach_d);
  std::set<std::pair<int, int>> pts;
  for (int t = -reach; t <= reach; ++t) {
    const long fx = std::llround(t * c);
    const long fy = std::llround(t * s);
    const int kx = static_cast<int>(((fx % nx) + nx) % nx);
    const int ky = static_cast<int>(((fy % ny) + ny) % ny);
    pts.emplace(kx, ky);
  }
  return {pts.begin(), pts.end()};
}

MeasurementOperator MeasurementOperator::fourier_lines(int nx, int ny,
                                                       std::span<const double> angles) {
  if (angles.empty()) throw std::invalid_argument("fourier_lines: no angles given");
  std::vector<std::vector<std::pair<int, int>>> lines;
  lines.reserve(angles.size());
  for (double a : angles) lines.push_back(radial_line_points(nx, ny, a));
  for (std::size_t i = 0; i < lines.size(); ++i)
    for (std::size_t j = i + 1; j < lines.size(); ++j)
      if (lines[i] == lines[j])
        throw std::invalid_argument(
            "fourier_lines: requested line count exceeds the distinct lines on this grid");
  FourierMask mask;
  mask.nx = nx;
  mask.ny = ny;
  for (const auto& line : lines)
    mask.locations.insert(mask.locations.end(), line.begin(), line.end());
  return fourier_mask(std::move(mask));
}

Index MeasurementOperator::rows() const {
  return kind_ == OperatorKind::DenseGaussian ? matrix_.rows()
                                              : static_cast<Index>(mask_.locations.size());
}

Index MeasurementOperator::cols() const {
  return kind_ == OperatorKind::DenseGaussian ? matrix_.cols()
                                              : static_cast<Index>(mask_.nx) * mask_.ny;
}

VecC MeasurementOperator::apply(const VecC& frame) const {
  if (frame.size() != cols())
    throw std::invalid_argument("MeasurementOperator::apply: frame size mismatch");
  if (kind_ == OperatorKind::DenseGaussian) return matrix_ * frame;
  const Dft2D& dft = thread_dft(mask_.nx, mask_.ny);
  VecC spectrum;
  dft.forward(frame, spectrum);
  VecC out(static_cast<Index>(mask_.locations.size()));
  for (std::size_t j = 0; j < mask_.locations.size(); ++j) {
    const auto [kx, ky] = mask_.locations[j];
    out[static_cast<Index>(j)] = spectrum[kx + static_cast<Index>(mask_.nx) * ky];
  }
  return out;
}

VecC MeasurementOperator::adjoint(const VecC& meas) const {
  if (meas.size() != rows())
    throw std::invalid_argument("MeasurementOperator::adjoint: measurement size mismatch");
  if (kind_ == OperatorKind::DenseGaussian) return matrix_.adjoint() * meas;
  VecC spectrum = VecC::Zero(cols());
  for (std::size_t j = 0; j < mask_.locations.size(); ++j) {
    const auto [kx, ky] = mask_.locations[j];
    spectrum[kx + static_cast<Index>(mask_.nx) * ky] = meas[static_cast<Index>(j)];
  }
  const Dft2D& dft = thread_dft(mask_.nx, mask_.ny);
  VecC frame;
  dft.backward(spectrum, frame);
  return frame;
}

MatC MeasurementOperator::dense_materialize() const {
  if (kind_ == OperatorKind::DenseGaussian) return matrix_;
  if (cols() > 4096)
    throw std::invalid_argument("dense_materialize: operator too large");
  MatC D(rows(), cols());
  VecC e = VecC::Zero(cols());
  for (Index j = 0; j < cols(); ++j) {
    e[j] = Complex(1.0, 0.0);
    D.col(j) = apply(e);
    e[j] = Complex(0.0, 0.0);
  }
  return D;
}

bool MeasurementOperator::same_as(const MeasurementOperator& other) const {
  if (kind_ != other.kind_) return false;
  if (kind_ == OperatorKind::DenseGaussian)
    return matrix_.rows() == other.matrix_.rows() && matrix_.cols() == other.matrix_.cols() &&
           matrix_ == other.matrix_;
  return mask_.nx == other.mask_.nx && mask_.ny == other.mask_.ny &&
         mask_.locations == other.mask_.locations;
}

// --- builders ---------------------------------------------------------------

MeasurementOperator build_common_gaussian(int m_c, int n, std::uint64_t seed) {
  if (m_c < 1) throw std::invalid_argument("build_common_gaussian: m_c must be >= 1");
  if (m_c > n)
    std::cerr << "ljsr: warning: common operator has more rows (" << m_c
              << ") than columns (" << n << ")\n";
  Rng rng = Rng::derive(seed, 0x636f6d6d6f6eULL);  // "common"
  return MeasurementOperator::dense_gaussian(m_c, n, rng);
}

MeasurementOperator build_common_fourier(int nx, int ny, int line_count, std::uint64_t seed) {
  if (line_count < 1) throw std::invalid_argument("build_common_fourier: line_count must be >= 1");
  Rng rng = Rng::derive(seed, 0x636f6d6d6f6eULL);
  // Angles cover [0, pi); lines are point-symmetric through the center so
  // pi already exhausts the distinct directions.
  const double offset = rng.uniform(0.0, 0.5 * M_PI / line_count);
  std::vector<double> angles(static_cast<std::size_t>(line_count));
  for (int l = 0; l < line_count; ++l)
    angles[static_cast<std::size_t>(l)] = offset + M_PI * static_cast<double>(l) / line_count;
  return MeasurementOperator::fourier_lines(nx, ny, angles);
}

std::vector<int> consecutive_cluster_map(int N, int p) {
  const int cluster_size = (N + p - 1) / p;  // last cluster may be short
  std::vector<int> map(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) map[static_cast<std::size_t>(i)] = i / cluster_size;
  return map;
}

std::vector<int> periodic_cluster_map(int N, int p) {
  std::vector<int> map(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) map[static_cast<std::size_t>(i)] = i % p;
  return map;
}

std::vector<int> permute_cluster_map(const std::vector<int>& map, const std::vector<int>& perm) {
  if (perm.size() != map.size())
    throw std::invalid_argument("permute_cluster_map: permutation length mismatch");
  std::vector<int> out(map.size());
  for (std::size_t i = 0; i < map.size(); ++i) out[i] = map[static_cast<std::size_t>(perm[i])];
  return out;
}

const char* to_string(ClusterScheme s) {
  switch (s) {
    case ClusterScheme::Consecutive: return "consecutive";
    case ClusterScheme::Periodic: return "periodic";
    case ClusterScheme::Permuted: return "permuted";
  }
  return "?";
}

ClusterScheme cluster_scheme_from_string(const std::string& s) {
  if (s == "consecutive") return ClusterScheme::Consecutive;
  if (s == "periodic") return ClusterScheme::Periodic;
  if (s == "permuted") return ClusterScheme::Permuted;
  throw std::invalid_argument("unknown cluster scheme '" + s + "'");
}

VariableOperatorSet build_variable_set(ClusterScheme scheme, int p, int N, int per_op,
                                       const OperatorGeometry& geom, std::uint64_t seed) {
  if (p < 1) throw std::invalid_argument("build_variable_set: p must be >= 1");
  if (p > N) throw std::invalid_argument("build_variable_set: p exceeds the frame count");
  if (per_op < 1) throw std::invalid_argument("build_variable_set: rows/lines per operator must be >= 1");

  VariableOperatorSet vset;
  vset.scheme = scheme;
  vset.cluster_ops.reserve(static_cast<std::size_t>(p));
  for (int c = 0; c < p; ++c) {
    Rng rng = Rng::derive(seed, 0x76617200ULL + static_cast<std::uint64_t>(c));  // "var"+c
    if (geom.kind == OperatorKind::DenseGaussian) {
      vset.cluster_ops.push_back(MeasurementOperator::dense_gaussian(per_op, geom.n, rng));
    } else {
      // Interleave cluster angles so the union of clusters covers p*per_op
      // distinct directions.
      const int slots = p * per_op;
      const double offset = (M_PI / slots) * (c + 0.25 + 0.5 * rng.uniform());
      std::vector<double> angles(static_cast<std::size_t>(per_op));
      for (int l = 0; l < per_op; ++l)
        angles[static_cast<std::size_t>(l)] = offset + M_PI * static_cast<double>(l) / per_op;
      vset.cluster_ops.push_back(
          MeasurementOperator::fourier_lines(geom.frame.nx, geom.frame.ny, angles));
    }
  }

  const int cluster_size = (N + p - 1) / p;
  vset.truncated_last = (cluster_size * p != N);
  switch (scheme) {
    case ClusterScheme::Consecutive:
      vset.cluster_map = consecutive_cluster_map(N, p);
      break;
    case ClusterScheme::Periodic:
      vset.cluster_map = periodic_cluster_map(N, p);
      vset.truncated_last = (N % p != 0);
      break;
    case ClusterScheme::Permuted: {
      std::vector<int> perm(static_cast<std::size_t>(N));
      for (int i = 0; i < N; ++i) perm[static_cast<std::size_t>(i)] = i;
      Rng rng = Rng::derive(seed, 0x7065726dULL);  // "perm"
      rng.shuffle(perm);
      vset.cluster_map = permute_cluster_map(consecutive_cluster_map(N, p), perm);
      break;
    }
  }
  return vset;
}

// --- measurement ------------------------------------------------------------

MeasurementSet measure(const SignalMatrix& X, const MeasurementOperator& phi,
                       const VariableOperatorSet& vset, double noise_sigma, std::uint64_t seed) {
  if (noise_sigma < 0.0) throw std::invalid_argument("measure: noise_sigma must be >= 0");
  if (phi.cols() != X.n())
    throw std::invalid_argument("measure: common operator column count != n");
  if (vset.frames() != static_cast<int>(X.frames()))
    throw std::invalid_argument("measure: operator set frame count != N");
  for (const auto& op : vset.cluster_ops)
    if (op.cols() != X.n())
      throw std::invalid_argument("measure: variable operator column count != n");

  const int N = static_cast<int>(X.frames());
  MeasurementSet ms;
  ms.noise_sigma = noise_sigma;
  ms.Z.resize(phi.rows(), N);
  ms.Y.resize(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) {
    const VecC x = X.values.col(i);
    VecC z = phi.apply(x);
    VecC y = vset.op(i).apply(x);
    if (noise_sigma > 0.0) {
      Rng rz = Rng::derive(seed, 2 * static_cast<std::uint64_t>(i));
      Rng ry = Rng::derive(seed, 2 * static_cast<std::uint64_t>(i) + 1);
      for (Index j = 0; j < z.size(); ++j) z[j] += noise_sigma * rz.cgaussian();
      for (Index j = 0; j < y.size(); ++j) y[j] += noise_sigma * ry.cgaussian();
    }
    ms.Z.col(i) = z;
    ms.Y[static_cast<std::size_t>(i)] = std::move(y);
  }
  return ms;
}

namespace {

double measurement_energy(const MeasurementSet& ms, long long* count = nullptr) {
  double e = ms.Z.squaredNorm();
  long long c = ms.Z.size();
  for (const auto& y : ms.Y) {
    e += y.squaredNorm();
    c += y.size();
  }
  if (count) *count = c;
  return e;
}

}  // namespace

double sigma_for_snr_db(const MeasurementSet& clean, double snr_db) {
  long long count = 0;
  const double energy = measurement_energy(clean, &count);
  if (count == 0 || energy <= 0.0)
    throw std::invalid_argument("sigma_for_snr_db: no signal energy");
  const double mean_power = energy / static_cast<double>(count);
  return std::sqrt(mean_power / std::pow(10.0, snr_db / 10.0));
}

double empirical_snr_db(const MeasurementSet& clean, const MeasurementSet& noisy) {
  if (clean.Z.rows() != noisy.Z.rows() || clean.Z.cols() != noisy.Z.cols() ||
      clean.Y.size() != noisy.Y.size())
    throw std::invalid_argument("empirical_snr_db: shape mismatch");
  const double signal = measurement_energy(clean);
  double noise = (noisy.Z - clean.Z).squaredNorm();
  for (std::size_t i = 0; i < clean.Y.size(); ++i)
    noise += (noisy.Y[i] - clean.Y[i]).squaredNorm();
  if (noise <= 0.0) throw std::invalid_argument("empirical_snr_db: zero noise");
  return 10.0 * std::log10(signal / noise);
}

// --- serialization ----------------------------------------------------------

void write_lines_file(const std::filesystem::path& file, const std::vector<FourierMask>& frames) {
  if (frames.empty()) throw std::invalid_argument("write_lines_file: no frames");
  std::ofstream os(file);
  if (!os) throw std::runtime_error("lines: cannot open " + file.string() + " for writing");
  os << "lines v1 " << frames[0].nx << ' ' << frames[0].ny << ' ' << frames.size() << '\n';
  for (std::size_t f = 0; f < frames.size(); ++f) {
    os << "frame " << f << ' ' << frames[f].locations.size() << '\n';
    for (auto [kx, ky] : frames[f].locations) os << kx << ' ' << ky << '\n';
  }
  if (!os) throw std::runtime_error("lines: write failed for " + file.string());
}

std::vector<FourierMask> read_lines_file(const std::filesystem::path& file) {
  std::ifstream is(file);
  if (!is) throw std::runtime_error("lines: cannot open " + file.string());
  std::string magic, version;
  int nx = 0, ny = 0;
  std::size_t count = 0;
  is >> magic >> version >> nx >> ny >> count;
  if (!is || magic != "lines" || version != "v1")
    throw std::runtime_error("lines: bad header in " + file.string());
  std::vector<FourierMask> frames(count);
  for (std::size_t f = 0; f < count; ++f) {
    std::string tag;
    std::size_t idx = 0, npts = 0;
    is >> tag >> idx >> npts;
    if (!is || tag != "frame" || idx != f)
      throw std::runtime_error("lines: bad frame header in " + file.string());
    frames[f].nx = nx;
    frames[f].ny = ny;
    frames[f].locations.resize(npts);
    for (std::size_t j = 0; j < npts; ++j) {
      is >> frames[f].locations[j].first >> frames[f].locations[j].second;
      if (!is) throw std::runtime_error("lines: truncated point list in " + file.string());
    }
  }
  return frames;
}

namespace {

void save_operator(const std::filesystem::path& dir, const std::string& stem,
                   const MeasurementOperator& op) {
  if (op.kind() == OperatorKind::DenseGaussian)
    write_fmx(dir / (stem + ".fmx"), op.matrix());
  else
    write_lines_file(dir / (stem + ".lines"), {op.mask()});
}

MeasurementOperator load_operator(const std::filesystem::path& dir, const std::string& stem) {
  const auto fmx = dir / (stem + ".fmx");
  if (std::filesystem::exists(fmx)) return MeasurementOperator::dense(read_fmx_complex(fmx));
  const auto lines = dir / (stem + ".lines");
  auto frames = read_lines_file(lines);
  if (frames.size() != 1)
    throw std::runtime_error("load_operator: expected a single frame in " + lines.string());
  return MeasurementOperator::fourier_mask(std::move(frames[0]));
}

std::string join_ints(const std::vector<int>& v) {
  std::ostringstream ss;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) ss << ',';
    ss << v[i];
  }
  return ss.str();
}

std::vector<int> split_ints(const std::string& s) {
  std::vector<int> v;
  std::istringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) v.push_back(std::stoi(trim(tok)));
  return v;
}

}  // namespace

void save_measurement_dir(const std::filesystem::path& dir, const MeasurementSet& ms,
                          const MeasurementOperator& phi, const VariableOperatorSet& vset,
                          const KeyVal& extra_meta) {
  std::filesystem::create_directories(dir);
  write_fmx(dir / "Z.fmx", ms.Z);
  char name[32];
  for (std::size_t i = 0; i < ms.Y.size(); ++i) {
    std::snprintf(name, sizeof(name), "y_%04zu.fmx", i);
    write_fmx(dir / name, MatC(ms.Y[i]));
  }
  save_operator(dir, "phi", phi);
  for (int c = 0; c < vset.p(); ++c) {
    std::snprintf(name, sizeof(name), "C_%03d", c);
    save_operator(dir, name, vset.cluster_ops[static_cast<std::size_t>(c)]);
  }
  KeyVal meta = extra_meta;
  meta["scheme"] = to_string(vset.scheme);
  meta["p"] = std::to_string(vset.p());
  meta["frames"] = std::to_string(vset.frames());
  meta["noise_sigma"] = format_double(ms.noise_sigma);
  meta["cluster_map"] = join_ints(vset.cluster_map);
  meta["truncated_last"] = vset.truncated_last ? "1" : "0";
  write_keyval_file(dir / "meta", meta);
}

LoadedMeasurements load_measurement_dir(const std::filesystem::path& dir) {
  LoadedMeasurements lm;
  lm.meta = read_keyval_file(dir / "meta");
  lm.ms.Z = read_fmx_complex(dir / "Z.fmx");
  const int N = std::stoi(lm.meta.at("frames"));
  lm.ms.Y.resize(static_cast<std::size_t>(N));
  char name[32];
  for (int i = 0; i < N; ++i) {
    std::snprintf(name, sizeof(name), "y_%04d.fmx", i);
    lm.ms.Y[static_cast<std::size_t>(i)] = read_fmx_complex(dir / name).col(0);
  }
  lm.ms.noise_sigma = std::stod(lm.meta.at("noise_sigma"));
  lm.phi = load_operator(dir, "phi");
  const int p = std::stoi(lm.meta.at("p"));
  for (int c = 0; c < p; ++c) {
    std::snprintf(name, sizeof(name), "C_%03d", c);
    lm.vset.cluster_ops.push_back(load_operator(dir, name));
  }
  lm.vset.cluster_map = split_ints(lm.meta.at("cluster_map"));
  lm.vset.scheme = cluster_scheme_from_string(lm.meta.at("scheme"));
  lm.vset.truncated_last = lm.meta.at("truncated_last") == "1";
  return lm;
}

}  // namespace ljsr
