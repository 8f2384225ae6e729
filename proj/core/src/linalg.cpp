#include "nsdde/linalg.hpp"

#include <cassert>
#include <cmath>
#include <utility>

#include "nsdde/error.hpp"

namespace nsdde {

double dot(const Vec& a, const Vec& b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm_sq(const Vec& a) { return dot(a, a); }

double norm(const Vec& a) { return std::sqrt(norm_sq(a)); }

bool all_finite(const Vec& a) {
  for (double v : a)
    if (!std::isfinite(v)) return false;
  return true;
}

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    require(row.size() == cols_, errc::invalid_argument, "ragged matrix initializer");
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Vec Matrix::apply(const Vec& v) const {
  assert(v.size() == cols_);
  Vec out(rows_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < cols_; ++c) s += (*this)(r, c) * v[c];
    out[r] = s;
  }
  return out;
}

Vec Matrix::apply_transposed(const Vec& v) const {
  assert(v.size() == rows_);
  Vec out(cols_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out[c] += (*this)(r, c) * v[r];
  return out;
}

double Matrix::hs_norm_sq() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return s;
}

bool Matrix::all_finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

Vec Matrix::solve(Vec rhs) const {
  require(rows_ == cols_, errc::invalid_argument, "solve requires a square matrix");
  require(rhs.size() == rows_, errc::invalid_argument, "rhs size mismatch");
  const std::size_t n = rows_;
  Matrix a = *this;

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    double best = std::fabs(a(col, col));
    for (std::size_t r = col + 1; r < n; ++r) {
      const double cand = std::fabs(a(r, col));
      if (cand > best) {
        best = cand;
        pivot = r;
      }
    }
    if (!(best > 0.0) || !std::isfinite(best)) {
      fail(errc::jacobian_singular, "no usable pivot in column " + std::to_string(col));
    }
    if (pivot != col) {
      for (std::size_t c = col; c < n; ++c) std::swap(a(pivot, c), a(col, c));
      std::swap(rhs[pivot], rhs[col]);
    }
    const double inv = 1.0 / a(col, col);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double factor = a(r, col) * inv;
      if (factor == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a(r, c) -= factor * a(col, c);
      rhs[r] -= factor * rhs[col];
    }
  }

  Vec x(n, 0.0);
  for (std::size_t r = n; r-- > 0;) {
    double s = rhs[r];
    for (std::size_t c = r + 1; c < n; ++c) s -= a(r, c) * x[c];
    x[r] = s / a(r, r);
  }
  return x;
}

SampleBox SampleBox::cube(int dim, double half_width) {
  SampleBox box;
  box.lo.assign(static_cast<std::size_t>(dim), -half_width);
  box.hi.assign(static_cast<std::size_t>(dim), half_width);
  return box;
}

}  // namespace nsdde
