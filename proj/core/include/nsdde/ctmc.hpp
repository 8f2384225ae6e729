#pragma once

#include <vector>

#include "nsdde/linalg.hpp"
#include "nsdde/rng.hpp"

namespace nsdde {

/// Validated generator (rate) matrix of the driving finite-state chain.
/// Regimes are 1-based: S = {1, ..., N}. Off-diagonal entries are jump
/// rates; the diagonal is re-derived exactly as the negated off-diagonal
/// row sum, so every row sums to zero.
class GeneratorMatrix {
 public:
  int n_states() const { return n_states_; }
  const Matrix& rates() const { return rates_; }

  /// Rate gamma_ij, 1-based indices.
  double rate(int i, int j) const { return rates_(i - 1, j - 1); }

  /// Total jump rate out of state i (= -gamma_ii, >= 0).
  double exit_rate(int i) const { return -rates_(i - 1, i - 1); }

  friend GeneratorMatrix validate_generator(const Matrix& rates);

 private:
  explicit GeneratorMatrix(Matrix rates);

  int n_states_ = 0;
  Matrix rates_;
};

/// Checks squareness, nonnegative off-diagonals, and that each row sums to
/// zero within 1e-12 absolute; the diagonal is then re-derived exactly.
/// Throws Error with errc::non_square / negative_off_diagonal /
/// row_sum_nonzero.
GeneratorMatrix validate_generator(const Matrix& rates);

/// One realized trajectory of the chain: right-continuous and piecewise
/// constant on [0, horizon]. states.front() is r(0); states[k] holds on
/// [jump_times[k-1], jump_times[k]).
struct RegimePath {
  double horizon = 0.0;
  std::vector<double> jump_times;  // strictly increasing, in (0, horizon]
  std::vector<int> states;         // jump_times.size() + 1 entries

  /// r(t) with the right-continuity convention: a jump at exactly t counts.
  int state_at(double t) const;
};

/// Exact simulation by holding times: the sojourn in state i is
/// Exponential(exit_rate(i)), the next state j != i is chosen with
/// probability rate(i,j)/exit_rate(i). A state with exit rate 0 is
/// absorbing.
RegimePath sample_regime_path(const GeneratorMatrix& gen, int i0, double horizon,
                              rng::Stream& stream);

/// Reads r(k*delta) for k = 0..n_steps (n_steps+1 values).
/// Throws Error(errc::horizon_exceeded) when the grid leaves the path.
std::vector<int> regime_at_grid(const RegimePath& path, double delta, int n_steps);

}  // namespace nsdde
