#include "nsdde/error.hpp"

namespace nsdde {

const char* errc_name(errc code) {
  switch (code) {
    case errc::non_square: return "NonSquare";
    case errc::negative_off_diagonal: return "NegativeOffDiagonal";
    case errc::row_sum_nonzero: return "RowSumNonzero";
    case errc::horizon_exceeded: return "HorizonExceeded";
    case errc::non_finite_evaluation: return "NonFiniteEvaluation";
    case errc::no_convergence: return "NoConvergence";
    case errc::jacobian_singular: return "JacobianSingular";
    case errc::all_paths_blew_up: return "AllPathsBlewUp";
    case errc::non_positive_moment: return "NonPositiveMoment";
    case errc::missing_constants: return "MissingConstants";
    case errc::bracket_invalid: return "BracketInvalid";
    case errc::invalid_argument: return "InvalidArgument";
    case errc::invalid_config: return "InvalidConfig";
    case errc::io_error: return "IoError";
  }
  return "UnknownError";
}

Error::Error(errc code, const std::string& message)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

void fail(errc code, const std::string& message) { throw Error(code, message); }

}  // namespace nsdde
