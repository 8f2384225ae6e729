#include "nsdde/io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nsdde/error.hpp"

namespace nsdde::io {

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace

std::string format_double(double v) {
  char buffer[64];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), v);
  require(ec == std::errc(), errc::io_error, "double formatting failed");
  return std::string(buffer, end);
}

double parse_double(std::string_view text) {
  text = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    fail(errc::io_error, "cannot parse real number from '" + std::string(text) + "'");
  }
  return value;
}

void atomic_write_file(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(out.good(), errc::io_error, "cannot open " + tmp + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    require(out.good(), errc::io_error, "short write to " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  require(!ec, errc::io_error, "cannot rename " + tmp + " to " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), errc::io_error, "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string path_to_csv(const PathRecord& record) {
  std::string out = "t";
  for (int c = 1; c <= record.dim(); ++c) out += ",x_" + std::to_string(c);
  out += ",regime\n";
  for (std::size_t row = 0; row < record.times.size(); ++row) {
    out += format_double(record.times[row]);
    for (double v : record.states[row]) {
      out += ',';
      out += format_double(v);
    }
    out += ',';
    out += std::to_string(record.regimes[row]);
    out += '\n';
  }
  return out;
}

PathRecord path_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), errc::io_error, "empty path CSV");
  const auto header = split(trim(line), ',');
  require(header.size() >= 3 && header.front() == "t" && header.back() == "regime",
          errc::io_error, "unexpected path CSV header");
  const int dim = static_cast<int>(header.size()) - 2;

  PathRecord record;
  while (std::getline(in, line)) {
    const std::string_view trimmed = trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    const auto cells = split(trimmed, ',');
    require(static_cast<int>(cells.size()) == dim + 2, errc::io_error,
            "path CSV row has wrong arity");
    record.times.push_back(parse_double(cells[0]));
    Vec state(static_cast<std::size_t>(dim));
    for (int c = 0; c < dim; ++c) state[static_cast<std::size_t>(c)] = parse_double(cells[c + 1]);
    record.states.push_back(std::move(state));
    record.regimes.push_back(static_cast<int>(parse_double(cells.back())));
  }
  int m_steps = 0;
  for (double t : record.times) {
    if (t < 0.0) ++m_steps;
  }
  record.m_steps = m_steps;
  return record;
}

std::string moments_to_csv(const MomentCurve& curve, const Footer& footer) {
  std::string out = "t,moment,stderr,ci_low,ci_high\n";
  for (std::size_t k = 0; k < curve.times.size(); ++k) {
    const double half_band = 1.96 * curve.std_err[k];
    out += format_double(curve.times[k]);
    out += ',';
    out += format_double(curve.values[k]);
    out += ',';
    out += format_double(curve.std_err[k]);
    out += ',';
    out += format_double(curve.values[k] - half_band);
    out += ',';
    out += format_double(curve.values[k] + half_band);
    out += '\n';
  }
  for (const auto& [key, value] : footer) {
    out += "# " + key + " = " + value + "\n";
  }
  return out;
}

MomentCsv moments_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), errc::io_error, "empty moment CSV");
  require(trim(line) == "t,moment,stderr,ci_low,ci_high", errc::io_error,
          "unexpected moment CSV header");

  MomentCsv out;
  while (std::getline(in, line)) {
    const std::string_view trimmed = trim(line);
    if (trimmed.empty()) continue;
    if (trimmed.front() == '#') {
      std::string_view body = trim(trimmed.substr(1));
      const std::size_t eq = body.find('=');
      if (eq != std::string_view::npos) {
        out.footer.emplace_back(std::string(trim(body.substr(0, eq))),
                                std::string(trim(body.substr(eq + 1))));
      }
      continue;
    }
    const auto cells = split(trimmed, ',');
    require(cells.size() == 5, errc::io_error, "moment CSV row has wrong arity");
    out.curve.times.push_back(parse_double(cells[0]));
    out.curve.values.push_back(parse_double(cells[1]));
    out.curve.std_err.push_back(parse_double(cells[2]));
  }
  for (const auto& [key, value] : out.footer) {
    if (key == "n_blowups") out.curve.n_blowups = static_cast<int>(parse_double(value));
    if (key == "n_paths") out.curve.n_paths = static_cast<int>(parse_double(value));
    if (key == "p") out.curve.p = parse_double(value);
  }
  return out;
}

}  // namespace nsdde::io
