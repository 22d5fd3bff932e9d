#include "percept/linalg.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace percept {
namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

std::string dims(std::size_t r, std::size_t c) {
  std::ostringstream os;
  os << r << "x" << c;
  return os.str();
}

}  // namespace

Matrix::Matrix(std::size_t r, std::size_t c, std::vector<double> d)
    : rows(r), cols(c), data(std::move(d)) {
  require(data.size() == rows * cols,
          "matrix " + dims(rows, cols) + " needs " + std::to_string(rows * cols) +
              " entries, got " + std::to_string(data.size()));
}

std::string shape_of(const Matrix& m) { return dims(m.rows, m.cols); }

Matrix identity_matrix(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

namespace serial {

Matrix matmul(const Matrix& a, const Matrix& b) {
  require(a.cols == b.rows,
          "matmul: inner dimensions differ, " + shape_of(a) + " * " + shape_of(b));
  Matrix out(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t j = 0; j < b.cols; ++j) {
      double acc = 0.0;
      for (std::size_t t = 0; t < a.cols; ++t) acc += a(i, t) * b(t, j);
      out(i, j) = acc;
    }
  }
  return out;
}

Vector affine(const Matrix& w, const Vector& x, const Vector& b) {
  require(w.cols == x.size(), "affine: weight " + shape_of(w) + " vs input length " +
                                  std::to_string(x.size()));
  require(w.rows == b.size(), "affine: weight " + shape_of(w) + " vs bias length " +
                                  std::to_string(b.size()));
  Vector out(w.rows);
  for (std::size_t j = 0; j < w.rows; ++j) {
    double acc = 0.0;
    const double* wrow = w.data.data() + j * w.cols;
    for (std::size_t k = 0; k < w.cols; ++k) acc += wrow[k] * x[k];
    out[j] = acc + b[j];
  }
  return out;
}

}  // namespace serial

Matrix matmul(const Matrix& a, const Matrix& b) {
  require(a.cols == b.rows,
          "matmul: inner dimensions differ, " + shape_of(a) + " * " + shape_of(b));
  if (a.rows * b.cols * a.cols < 32768) return serial::matmul(a, b);

  Matrix out(a.rows, b.cols);
  const std::size_t n = b.cols;
  // Blocks of output rows; within a block the t loop runs outermost so a
  // row of b is reused across the block while streaming. Each out(i, j)
  // still accumulates over t in ascending order.
  constexpr std::size_t kRowBlock = 4;
  const long long nblocks =
      static_cast<long long>((a.rows + kRowBlock - 1) / kRowBlock);
#pragma omp parallel for schedule(static)
  for (long long blk = 0; blk < nblocks; ++blk) {
    const std::size_t i0 = static_cast<std::size_t>(blk) * kRowBlock;
    const std::size_t i1 = std::min(i0 + kRowBlock, a.rows);
    for (std::size_t t = 0; t < a.cols; ++t) {
      const double* brow = b.data.data() + t * n;
      for (std::size_t i = i0; i < i1; ++i) {
        const double ait = a(i, t);
        double* orow = out.data.data() + i * n;
        for (std::size_t j = 0; j < n; ++j) orow[j] += ait * brow[j];
      }
    }
  }
  return out;
}

Vector affine(const Matrix& w, const Vector& x, const Vector& b) {
  return serial::affine(w, x, b);
}

Matrix outer(const Vector& u, const Vector& v) {
  Matrix out(u.size(), v.size());
  for (std::size_t j = 0; j < u.size(); ++j) {
    double* orow = out.data.data() + j * v.size();
    const double uj = u[j];
    for (std::size_t k = 0; k < v.size(); ++k) orow[k] = uj * v[k];
  }
  return out;
}

Vector transposed_matvec(const Matrix& w, const Vector& d) {
  require(w.rows == d.size(), "transposed_matvec: weight " + shape_of(w) +
                                  " vs vector length " + std::to_string(d.size()));
  Vector out(w.cols, 0.0);
  for (std::size_t k = 0; k < w.rows; ++k) {
    const double dk = d[k];
    const double* wrow = w.data.data() + k * w.cols;
    for (std::size_t j = 0; j < w.cols; ++j) out[j] += wrow[j] * dk;
  }
  return out;
}

Matrix transpose(const Matrix& m) {
  Matrix out(m.cols, m.rows);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) out(j, i) = m(i, j);
  return out;
}

void add_row_vector(Matrix& m, const Vector& v) {
  require(m.cols == v.size(), "add_row_vector: matrix " + shape_of(m) +
                                  " vs vector length " + std::to_string(v.size()));
  for (std::size_t i = 0; i < m.rows; ++i) {
    double* row = m.data.data() + i * m.cols;
    for (std::size_t j = 0; j < m.cols; ++j) row[j] += v[j];
  }
}

Vector column_sums(const Matrix& m) {
  Vector out(m.cols, 0.0);
  for (std::size_t i = 0; i < m.rows; ++i) {
    const double* row = m.data.data() + i * m.cols;
    for (std::size_t j = 0; j < m.cols; ++j) out[j] += row[j];
  }
  return out;
}

Vector to_vector(std::span<const double> s) { return Vector(s.begin(), s.end()); }

}  // namespace percept
