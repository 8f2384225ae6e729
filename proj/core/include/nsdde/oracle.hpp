#pragma once

#include <functional>
#include <vector>

#include "nsdde/ctmc.hpp"

// Independent reference implementations used by tests and the selftest
// command. They deliberately share no arithmetic with the code they check;
// duplicated formulas here are intentional.
namespace nsdde::oracle {

/// Scalar test problem f = -a x, g = 0, D = 0 on a single regime.
struct LinearTestProblem {
  double a = 1.0;
  double theta = 1.0;
  double delta = 0.1;
};

/// Closed-form one-step ratio (1 - (1-theta) a delta) / (1 + theta a delta).
double linear_ratio(const LinearTestProblem& prob);

/// Row i0 of exp(t Gamma) by scaled Taylor series with repeated squaring
/// (scaling until ||t Gamma||_inf <= 0.5). Adequate for the small chains used
/// in tests.
std::vector<double> ctmc_marginal(const GeneratorMatrix& gen, int i0, double t);

/// Bisection root of a scalar monotone map on [lo, hi] to absolute tolerance.
/// Throws Error(errc::bracket_invalid) unless the endpoint values have
/// opposite (or zero) signs.
double scalar_bisection_solve(const std::function<double(double)>& map, double lo, double hi,
                              double tol);

}  // namespace nsdde::oracle
