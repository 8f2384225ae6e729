#include "nsdde/ctmc.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nsdde/error.hpp"

namespace nsdde {

namespace {
constexpr double kRowSumTolerance = 1e-12;
}

GeneratorMatrix::GeneratorMatrix(Matrix rates)
    : n_states_(static_cast<int>(rates.rows())), rates_(std::move(rates)) {}

GeneratorMatrix validate_generator(const Matrix& rates) {
  require(rates.rows() >= 1, errc::non_square, "generator must have at least one state");
  if (rates.rows() != rates.cols()) {
    fail(errc::non_square, "generator is " + std::to_string(rates.rows()) + "x" +
                               std::to_string(rates.cols()));
  }
  require(rates.all_finite(), errc::invalid_argument, "generator has non-finite entries");

  const std::size_t n = rates.rows();
  Matrix cleaned = rates;
  for (std::size_t i = 0; i < n; ++i) {
    double off_sum = 0.0;
    double row_sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      row_sum += rates(i, j);
      if (i == j) continue;
      if (rates(i, j) < 0.0) {
        fail(errc::negative_off_diagonal,
             "gamma(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ") = " +
                 std::to_string(rates(i, j)));
      }
      off_sum += rates(i, j);
    }
    if (std::fabs(row_sum) > kRowSumTolerance) {
      fail(errc::row_sum_nonzero,
           "row " + std::to_string(i + 1) + " sums to " + std::to_string(row_sum));
    }
    // re-derive the diagonal exactly so exit rates and row sums agree;
    // avoid -0 for absorbing rows
    cleaned(i, i) = off_sum == 0.0 ? 0.0 : -off_sum;
  }
  return GeneratorMatrix(std::move(cleaned));
}

int RegimePath::state_at(double t) const {
  // first jump strictly after t; the state before it is in force
  const auto it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
  const auto idx = static_cast<std::size_t>(it - jump_times.begin());
  return states[idx];
}

RegimePath sample_regime_path(const GeneratorMatrix& gen, int i0, double horizon,
                              rng::Stream& stream) {
  require(horizon > 0.0, errc::invalid_argument, "horizon must be positive");
  require(i0 >= 1 && i0 <= gen.n_states(), errc::invalid_argument,
          "i0 = " + std::to_string(i0) + " outside 1.." + std::to_string(gen.n_states()));

  RegimePath path;
  path.horizon = horizon;
  path.states.push_back(i0);

  double t = 0.0;
  int state = i0;
  while (true) {
    const double exit = gen.exit_rate(state);
    if (exit <= 0.0) break;  // absorbing
    t += stream.next_exponential(exit);
    if (t > horizon) break;

    // next state picked proportionally to the off-diagonal rates
    double u = stream.next_unit() * exit;
    int next = -1;
    for (int j = 1; j <= gen.n_states(); ++j) {
      if (j == state) continue;
      u -= gen.rate(state, j);
      if (u <= 0.0) {
        next = j;
        break;
      }
    }
    if (next < 0) {  // numerical leftover, take the last admissible state
      for (int j = gen.n_states(); j >= 1; --j) {
        if (j != state && gen.rate(state, j) > 0.0) {
          next = j;
          break;
        }
      }
    }
    path.jump_times.push_back(t);
    path.states.push_back(next);
    state = next;
  }
  return path;
}

std::vector<int> regime_at_grid(const RegimePath& path, double delta, int n_steps) {
  require(delta > 0.0 && n_steps >= 0, errc::invalid_argument, "bad grid");
  const double end = static_cast<double>(n_steps) * delta;
  if (end > path.horizon * (1.0 + 1e-12) + 1e-300) {
    fail(errc::horizon_exceeded, "grid end " + std::to_string(end) + " beyond path horizon " +
                                     std::to_string(path.horizon));
  }

  std::vector<int> out(static_cast<std::size_t>(n_steps) + 1);
  std::size_t jump = 0;
  for (int k = 0; k <= n_steps; ++k) {
    const double t = static_cast<double>(k) * delta;
    while (jump < path.jump_times.size() && path.jump_times[jump] <= t) ++jump;
    out[static_cast<std::size_t>(k)] = path.states[jump];
  }
  return out;
}

}  // namespace nsdde
