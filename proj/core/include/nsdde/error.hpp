#pragma once

#include <stdexcept>
#include <string>

namespace nsdde {

enum class errc {
  non_square,
  negative_off_diagonal,
  row_sum_nonzero,
  horizon_exceeded,
  non_finite_evaluation,
  no_convergence,
  jacobian_singular,
  all_paths_blew_up,
  non_positive_moment,
  missing_constants,
  bracket_invalid,
  invalid_argument,
  invalid_config,
  io_error,
};

const char* errc_name(errc code);

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& message);
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] void fail(errc code, const std::string& message);

inline void require(bool condition, errc code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace nsdde
