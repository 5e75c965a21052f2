#include "ljsr/fmx.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace ljsr {
namespace {

// Payloads are written as raw doubles; this code targets little-endian
// IEEE-754 hosts (asserted nowhere at runtime, true on every supported
// platform).

void write_header(std::ostream& os, const char* dtype, Index rows, Index cols) {
  os << "fmx 1 " << dtype << ' ' << rows << ' ' << cols << '\n';
}

struct Header {
  std::string dtype;
  Index rows = 0, cols = 0;
};

Header read_header(std::istream& is, const std::filesystem::path& file) {
  std::string line;
  if (!std::getline(is, line))
    throw std::runtime_error("fmx: cannot read header of " + file.string());
  std::istringstream ss(line);
  std::string magic;
  int version = 0;
  Header h;
  ss >> magic >> version >> h.dtype >> h.rows >> h.cols;
  if (!ss || magic != "fmx" || version != 1)
    throw std::runtime_error("fmx: bad header in " + file.string());
  if (h.dtype != "f64" && h.dtype != "c64")
    throw std::runtime_error("fmx: unknown dtype '" + h.dtype + "' in " + file.string());
  if (h.rows < 0 || h.cols < 0)
    throw std::runtime_error("fmx: negative dimensions in " + file.string());
  return h;
}

void read_payload(std::istream& is, double* dst, std::size_t count,
                  const std::filesystem::path& file) {
  is.read(reinterpret_cast<char*>(dst),
          static_cast<std::streamsize>(count * sizeof(double)));
  if (static_cast<std::size_t>(is.gcount()) != count * sizeof(double))
    throw std::runtime_error("fmx: short payload in " + file.string());
}

}  // namespace

void write_fmx(const std::filesystem::path& file, const MatR& m) {
  std::ofstream os(file, std::ios::binary);
  if (!os) throw std::runtime_error("fmx: cannot open " + file.string() + " for writing");
  write_header(os, "f64", m.rows(), m.cols());
  std::vector<double> row(static_cast<std::size_t>(m.cols()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) row[static_cast<std::size_t>(j)] = m(i, j);
    os.write(reinterpret_cast<const char*>(row.data()),
             static_cast<std::streamsize>(row.size() * sizeof(double)));
  }
  if (!os) throw std::runtime_error("fmx: write failed for " + file.string());
}

void write_fmx(const std::filesystem::path& file, const MatC& m) {
  std::ofstream os(file, std::ios::binary);
  if (!os) throw std::runtime_error("fmx: cannot open " + file.string() + " for writing");
  write_header(os, "c64", m.rows(), m.cols());
  std::vector<double> row(static_cast<std::size_t>(2 * m.cols()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      row[static_cast<std::size_t>(2 * j)] = m(i, j).real();
      row[static_cast<std::size_t>(2 * j + 1)] = m(i, j).imag();
    }
    os.write(reinterpret_cast<const char*>(row.data()),
             static_cast<std::streamsize>(row.size() * sizeof(double)));
  }
  if (!os) throw std::runtime_error("fmx: write failed for " + file.string());
}

MatC read_fmx_complex(const std::filesystem::path& file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw std::runtime_error("fmx: cannot open " + file.string());
  const Header h = read_header(is, file);
  MatC m(h.rows, h.cols);
  if (h.dtype == "f64") {
    std::vector<double> row(static_cast<std::size_t>(h.cols));
    for (Index i = 0; i < h.rows; ++i) {
      read_payload(is, row.data(), row.size(), file);
      for (Index j = 0; j < h.cols; ++j) m(i, j) = Complex(row[static_cast<std::size_t>(j)], 0.0);
    }
  } else {
    std::vector<double> row(static_cast<std::size_t>(2 * h.cols));
    for (Index i = 0; i < h.rows; ++i) {
      read_payload(is, row.data(), row.size(), file);
      for (Index j = 0; j < h.cols; ++j)
        m(i, j) = Complex(row[static_cast<std::size_t>(2 * j)],
                          row[static_cast<std::size_t>(2 * j + 1)]);
    }
  }
  return m;
}

MatR read_fmx_real(const std::filesystem::path& file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw std::runtime_error("fmx: cannot open " + file.string());
  const Header h = read_header(is, file);
  if (h.dtype != "f64")
    throw std::runtime_error("fmx: expected f64 data in " + file.string());
  MatR m(h.rows, h.cols);
  std::vector<double> row(static_cast<std::size_t>(h.cols));
  for (Index i = 0; i < h.rows; ++i) {
    read_payload(is, row.data(), row.size(), file);
    for (Index j = 0; j < h.cols; ++j) m(i, j) = row[static_cast<std::size_t>(j)];
  }
  return m;
}

}  // namespace ljsr
