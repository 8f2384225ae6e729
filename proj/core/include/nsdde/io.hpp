#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nsdde/ensemble.hpp"
#include "nsdde/theta_em.hpp"

namespace nsdde::io {

/// Shortest decimal form that round-trips through IEEE-754 binary64.
std::string format_double(double v);

/// Strict parse of a full token; throws Error(errc::io_error) on leftovers.
double parse_double(std::string_view text);

/// Writes through a temp file and renames, so readers never see a torn file.
void atomic_write_file(const std::string& path, const std::string& contents);

std::string read_file(const std::string& path);

// Path CSV: header `t,x_1,..,x_d,regime`, one row per grid time, the initial
// segment included as negative times.
std::string path_to_csv(const PathRecord& record);
PathRecord path_from_csv(const std::string& text);

// Moment CSV: header `t,moment,stderr,ci_low,ci_high` with 95% normal bands,
// then `# key = value` footer lines.
using Footer = std::vector<std::pair<std::string, std::string>>;
std::string moments_to_csv(const MomentCurve& curve, const Footer& footer);

struct MomentCsv {
  MomentCurve curve;
  Footer footer;
};
MomentCsv moments_from_csv(const std::string& text);

}  // namespace nsdde::io
