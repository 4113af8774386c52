#pragma once

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "specsub/core/error.hpp"
#include "specsub/core/matrix.hpp"

namespace specsub::mm {

struct Header {
  bool coordinate = false;
  bool symmetric = false;
};

namespace detail {

inline std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

inline Header parse_banner(const std::string& line) {
  std::istringstream in(line);
  std::string tag, object, format, field, symmetry;
  in >> tag >> object >> format >> field >> symmetry;
  if (tag != "%%MatrixMarket" || lower(object) != "matrix")
    throw Error(Errc::io, "matrix market: bad banner: " + line);
  Header h;
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (format == "coordinate") h.coordinate = true;
  else if (format != "array") throw Error(Errc::io, "matrix market: unknown format " + format);
  if (field != "real" && field != "integer" && field != "double")
    throw Error(Errc::io, "matrix market: unsupported field " + field);
  if (symmetry == "symmetric") h.symmetric = true;
  else if (symmetry != "general") throw Error(Errc::io, "matrix market: unsupported symmetry " + symmetry);
  return h;
}

inline bool next_data_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    const auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '%') continue;
    return true;
  }
  return false;
}

}  // namespace detail

// Reads array or coordinate real matrices; symmetric files are expanded.
inline DenseMatrix read(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::io, "matrix market: empty input");
  const Header h = detail::parse_banner(line);
  if (!detail::next_data_line(in, line)) throw Error(Errc::io, "matrix market: missing size line");
  std::istringstream size_line(line);
  Index rows = 0, cols = 0, nnz = 0;
  size_line >> rows >> cols;
  if (h.coordinate) size_line >> nnz;
  if (!size_line || rows < 0 || cols < 0) throw Error(Errc::io, "matrix market: bad size line");
  if (h.symmetric && rows != cols) throw Error(Errc::io, "matrix market: symmetric matrix must be square");

  DenseMatrix m = DenseMatrix::Zero(rows, cols);
  if (h.coordinate) {
    for (Index e = 0; e < nnz; ++e) {
      if (!detail::next_data_line(in, line)) throw Error(Errc::io, "matrix market: truncated entries");
      std::istringstream es(line);
      Index i = 0, j = 0;
      double v = 0.0;
      if (!(es >> i >> j >> v) || i < 1 || j < 1 || i > rows || j > cols)
        throw Error(Errc::io, "matrix market: bad entry: " + line);
      m(i - 1, j - 1) += v;
      if (h.symmetric && i != j) m(j - 1, i - 1) += v;
    }
  } else {
    for (Index j = 0; j < cols; ++j) {
      for (Index i = h.symmetric ? j : 0; i < rows; ++i) {
        if (!detail::next_data_line(in, line)) throw Error(Errc::io, "matrix market: truncated array");
        std::istringstream es(line);
        double v = 0.0;
        if (!(es >> v)) throw Error(Errc::io, "matrix market: bad value: " + line);
        m(i, j) = v;
        if (h.symmetric) m(j, i) = v;
      }
    }
  }
  require_finite(m, "matrix market: non-finite entry");
  return m;
}

inline DenseMatrix read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open " + path);
  return read(in);
}

inline void write_array(std::ostream& out, const DenseMatrix& m, bool symmetric = false) {
  out << "%%MatrixMarket matrix array real " << (symmetric ? "symmetric" : "general") << '\n';
  out << m.rows() << ' ' << m.cols() << '\n';
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = symmetric ? j : 0; i < m.rows(); ++i) out << m(i, j) << '\n';
}

inline void write(std::ostream& out, const SymMatrix& x) { write_array(out, x.dense(), true); }

inline void write_coordinate(std::ostream& out, const SparseMatrix& s) {
  const bool sym = s.symmetric();
  Index count = 0;
  for (const auto& t : s.entries())
    if (!sym || t.row >= t.col) ++count;
  out << "%%MatrixMarket matrix coordinate real " << (sym ? "symmetric" : "general") << '\n';
  out << s.rows() << ' ' << s.cols() << ' ' << count << '\n';
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& t : s.entries())
    if (!sym || t.row >= t.col) out << t.row + 1 << ' ' << t.col + 1 << ' ' << t.value << '\n';
}

inline void write_file(const std::string& path, const SymMatrix& x) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::io, "cannot write " + path);
  write(out, x);
}

inline void write_file(const std::string& path, const DenseMatrix& m) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::io, "cannot write " + path);
  write_array(out, m);
}

}  // namespace specsub::mm
