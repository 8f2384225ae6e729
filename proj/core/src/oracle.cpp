#include "nsdde/oracle.hpp"

#include <cmath>
#include <cstdlib>

#include "nsdde/error.hpp"

namespace nsdde::oracle {

namespace {

using Dense = std::vector<std::vector<double>>;

Dense dense_identity(std::size_t n) {
  Dense m(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1.0;
  return m;
}

Dense dense_multiply(const Dense& a, const Dense& b) {
  const std::size_t n = a.size();
  Dense out(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const double aik = a[i][k];
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) out[i][j] += aik * b[k][j];
    }
  return out;
}

double dense_max_abs(const Dense& a) {
  double best = 0.0;
  for (const auto& row : a)
    for (double v : row) best = std::max(best, std::fabs(v));
  return best;
}

}  // namespace

double linear_ratio(const LinearTestProblem& prob) {
  const double denom = 1.0 + prob.theta * prob.a * prob.delta;
  require(denom > 0.0, errc::invalid_argument, "1 + theta*a*delta must be positive");
  return (1.0 - (1.0 - prob.theta) * prob.a * prob.delta) / denom;
}

std::vector<double> ctmc_marginal(const GeneratorMatrix& gen, int i0, double t) {
  require(t >= 0.0, errc::invalid_argument, "time must be nonnegative");
  require(i0 >= 1 && i0 <= gen.n_states(), errc::invalid_argument, "i0 outside 1..N");

  const std::size_t n = static_cast<std::size_t>(gen.n_states());

  // scaled argument A = t Gamma / 2^s with ||A||_inf <= 0.5
  double inf_norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) row_sum += std::fabs(t * gen.rates()(i, j));
    inf_norm = std::max(inf_norm, row_sum);
  }
  int squarings = 0;
  double scale = 1.0;
  while (inf_norm * scale > 0.5) {
    scale *= 0.5;
    ++squarings;
  }

  Dense a(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i][j] = t * scale * gen.rates()(i, j);

  // Taylor sum of exp(A)
  Dense result = dense_identity(n);
  Dense term = dense_identity(n);
  for (int k = 1; k <= 64; ++k) {
    term = dense_multiply(term, a);
    for (auto& row : term)
      for (double& v : row) v /= static_cast<double>(k);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) result[i][j] += term[i][j];
    if (dense_max_abs(term) < 1e-18) break;
  }

  for (int s = 0; s < squarings; ++s) result = dense_multiply(result, result);

  std::vector<double> row = result[static_cast<std::size_t>(i0 - 1)];
  for (double& v : row) {
    if (v < 0.0 && v > -1e-15) v = 0.0;  // exact result is a probability
  }
  return row;
}

double scalar_bisection_solve(const std::function<double(double)>& map, double lo, double hi,
                              double tol) {
  require(lo < hi, errc::invalid_argument, "need lo < hi");
  require(tol > 0.0, errc::invalid_argument, "tolerance must be positive");

  double f_lo = map(lo);
  double f_hi = map(hi);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if (f_lo * f_hi > 0.0) {
    fail(errc::bracket_invalid, "map([lo,hi]) does not change sign");
  }

  for (int iter = 0; iter < 200 && (hi - lo) > tol; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = map(mid);
    if (f_mid == 0.0) return mid;
    if (f_lo * f_mid < 0.0) {
      hi = mid;
      f_hi = f_mid;
    } else {
      lo = mid;
      f_lo = f_mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace nsdde::oracle
