#pragma once

#include <cstddef>
#include <vector>

namespace nsdde {

/// Dense state vector in R^d. Dimensions in this library are small (the
/// built-in models have d <= 2), so plain std::vector keeps the API simple.
using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b);
double norm_sq(const Vec& a);
double norm(const Vec& a);
bool all_finite(const Vec& a);

/// Small dense row-major matrix. Covers generator matrices, diffusion
/// matrices g(x,y,t,i) in R^{d x m} and Newton Jacobians.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  Vec apply(const Vec& v) const;         // this * v
  Vec apply_transposed(const Vec& v) const;  // this^T * v
  double hs_norm_sq() const;             // squared Hilbert-Schmidt norm
  bool all_finite() const;

  /// Solves this * x = rhs by Gaussian elimination with partial pivoting.
  /// Throws Error(errc::jacobian_singular) when no usable pivot exists.
  Vec solve(Vec rhs) const;

  bool operator==(const Matrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Axis-aligned sampling box used by the condition checkers.
struct SampleBox {
  Vec lo;
  Vec hi;

  static SampleBox cube(int dim, double half_width);
};

}  // namespace nsdde
