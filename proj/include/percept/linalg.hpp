#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace percept {

using Vector = std::vector<double>;

// Dense row-major matrix of doubles. Every operation validates shapes and
// throws std::invalid_argument on mismatch; there is no broadcasting.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // rows * cols entries, row-major

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}
  Matrix(std::size_t r, std::size_t c, std::vector<double> d);

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
  std::span<const double> row(std::size_t i) const {
    return {data.data() + i * cols, cols};
  }

  bool operator==(const Matrix&) const = default;
};

std::string shape_of(const Matrix& m);

Matrix identity_matrix(std::size_t n);

// Serial reference kernels, kept as the behavioural baseline for the
// parallel versions: tests assert bit-identical results between the two.
namespace serial {
Matrix matmul(const Matrix& a, const Matrix& b);
Vector affine(const Matrix& w, const Vector& x, const Vector& b);
}  // namespace serial

// out[i][j] = sum_t a[i][t] * b[t][j], each sum accumulated left to right
// over t. OpenMP-parallel across blocks of output rows; no output element
// is ever split between threads, so the reduction order (and therefore the
// result) matches serial::matmul exactly.
Matrix matmul(const Matrix& a, const Matrix& b);

// out[j] = sum_k w[j][k] * x[k] + b[j], sum left to right, bias added last.
Vector affine(const Matrix& w, const Vector& x, const Vector& b);

// out[j][k] = u[j] * v[k]
Matrix outer(const Vector& u, const Vector& v);

// out[j] = sum_k w[k][j] * d[k], k ascending (multiply by the transpose
// without materializing it).
Vector transposed_matvec(const Matrix& w, const Vector& d);

Matrix transpose(const Matrix& m);

// m[i][j] += v[j] for every row i
void add_row_vector(Matrix& m, const Vector& v);

// out[j] = sum_i m[i][j], rows accumulated in ascending order
Vector column_sums(const Matrix& m);

Vector to_vector(std::span<const double> s);

template <class F>
Vector map_elementwise(F f, const Vector& v) {
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = f(v[i]);
  return out;
}

template <class F>
Matrix map_elementwise(F f, const Matrix& m) {
  Matrix out(m.rows, m.cols);
  for (std::size_t i = 0; i < m.data.size(); ++i) out.data[i] = f(m.data[i]);
  return out;
}

}  // namespace percept
