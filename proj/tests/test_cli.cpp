#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nsdde/commands.hpp"
#include "nsdde/io.hpp"
#include "nsdde/oracle.hpp"
#include "nsdde/selftest.hpp"

using namespace nsdde;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path dir;
  TempDir() {
    dir = fs::temp_directory_path() /
          ("nsdde_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
    fs::create_directories(dir);
  }
  ~TempDir() { fs::remove_all(dir); }
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::string file(const std::string& name, const std::string& contents) const {
    const fs::path p = dir / name;
    std::ofstream out(p);
    out << contents;
    return p.string();
  }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

const char* kLinearConfig = R"([model]
name = linear
tau = 1
xi = 1
a = 1

[chain]
rates = [[0]]
i0 = 1

[scheme]
theta = 1
m_steps = 10
horizon = 10

[ensemble]
n_paths = 4
p_moment = 2
seed = 7
window = [2.5, 10]
)";

const char* kSineConfig = R"([model]
name = sine_neutral
tau = 1
xi = 1

[chain]
rates = [[-1, 1], [1, -1]]
i0 = 1

[scheme]
theta = 1
m_steps = 50
horizon = 4

[ensemble]
n_paths = 200
p_moment = 2
seed = 42
window = [1, 4]
)";

int count_lines(const std::string& text) {
  int lines = 0;
  for (char ch : text) {
    if (ch == '\n') ++lines;
  }
  return lines;
}

}  // namespace

TEST_CASE("simulate writes the full grid including the initial segment") {
  TempDir tmp;
  CommandOptions options;
  options.config_path = tmp.file("linear.cfg", kLinearConfig);
  options.output_override = tmp.path("path.csv");

  std::ostringstream out;
  std::ostringstream err;
  CHECK(cmd_simulate(options, out, err) == kExitOk);
  CHECK(err.str().empty());

  const std::string csv = io::read_file(tmp.path("path.csv"));
  // header + m + 1 + horizon / delta rows
  CHECK(count_lines(csv) == 1 + 10 + 1 + 100);
  CHECK(out.str().find("blow_up_at_step = none") != std::string::npos);
}

TEST_CASE("simulate of frozen dynamics writes an all-zero state column") {
  TempDir tmp;
  std::string trivial = kLinearConfig;
  trivial.replace(trivial.find("a = 1"), 5, "a = 0");
  trivial.replace(trivial.find("xi = 1"), 6, "xi = 0");
  CommandOptions options;
  options.config_path = tmp.file("trivial.cfg", trivial);
  options.output_override = tmp.path("path.csv");

  std::ostringstream out;
  std::ostringstream err;
  REQUIRE(cmd_simulate(options, out, err) == kExitOk);
  const PathRecord rec = io::path_from_csv(io::read_file(tmp.path("path.csv")));
  for (const Vec& x : rec.states) CHECK(x[0] == 0.0);
}

TEST_CASE("config errors exit with code 1 and name the field") {
  TempDir tmp;
  std::string bad = kLinearConfig;
  bad.replace(bad.find("theta = 1"), 9, "theta = 1.5");
  CommandOptions options;
  options.config_path = tmp.file("bad.cfg", bad);

  std::ostringstream out;
  std::ostringstream err;
  CHECK(cmd_simulate(options, out, err) == kExitConfig);
  CHECK(err.str().find("theta") != std::string::npos);

  CommandOptions missing;
  missing.config_path = tmp.path("absent.cfg");
  CHECK(cmd_moments(missing, out, err) == kExitConfig);
}

TEST_CASE("moments of the trivial model are identically one") {
  TempDir tmp;
  std::string trivial = kLinearConfig;
  trivial.replace(trivial.find("a = 1"), 5, "a = 0");
  CommandOptions options;
  options.config_path = tmp.file("trivial.cfg", trivial);
  options.output_override = tmp.path("moments.csv");

  std::ostringstream out;
  std::ostringstream err;
  REQUIRE(cmd_moments(options, out, err) == kExitOk);
  const io::MomentCsv parsed = io::moments_from_csv(io::read_file(tmp.path("moments.csv")));
  for (double v : parsed.curve.values) CHECK(v == 1.0);
  CHECK(parsed.curve.n_blowups == 0);
}

TEST_CASE("moments of the deterministic decay match the closed-form recursion") {
  TempDir tmp;
  CommandOptions options;
  options.config_path = tmp.file("linear.cfg", kLinearConfig);
  options.output_override = tmp.path("moments.csv");

  std::ostringstream out;
  std::ostringstream err;
  REQUIRE(cmd_moments(options, out, err) == kExitOk);
  const io::MomentCsv parsed = io::moments_from_csv(io::read_file(tmp.path("moments.csv")));
  const double ratio = oracle::linear_ratio({1.0, 1.0, 0.1});
  for (std::size_t k = 0; k < parsed.curve.values.size(); ++k) {
    const double expected = std::pow(ratio, 2.0 * static_cast<double>(k));
    CHECK(parsed.curve.values[k] ==
          doctest::Approx(expected).epsilon(1e-10).scale(expected + 1e-30));
  }
}

TEST_CASE("lyapunov fits an injected synthetic curve") {
  TempDir tmp;
  MomentCurve synthetic;
  for (int k = 0; k <= 400; ++k) {
    const double t = 0.025 * k;
    synthetic.times.push_back(t);
    synthetic.values.push_back(std::exp(-2.0 * t));
    synthetic.std_err.push_back(0.0);
  }
  const std::string curve_path = tmp.path("curve.csv");
  io::atomic_write_file(curve_path, io::moments_to_csv(synthetic, {}));

  CommandOptions options;
  options.config_path = tmp.file("linear.cfg", kLinearConfig);
  options.curve_csv = curve_path;

  std::ostringstream out;
  std::ostringstream err;
  REQUIRE(cmd_lyapunov(options, out, err) == kExitOk);
  const std::string report = out.str();
  const std::size_t pos = report.find("moment_slope = ");
  REQUIRE(pos != std::string::npos);
  const double slope = io::parse_double(
      report.substr(pos + 15, report.find('\n', pos) - pos - 15));
  CHECK(slope == doctest::Approx(-2.0).epsilon(1e-9));
}

TEST_CASE("lyapunov reports moment and pathwise estimates for a real run") {
  TempDir tmp;
  CommandOptions options;
  options.config_path = tmp.file("sine.cfg", kSineConfig);
  options.workers = 2;

  std::ostringstream out;
  std::ostringstream err;
  REQUIRE(cmd_lyapunov(options, out, err) == kExitOk);
  const std::string report = out.str();
  CHECK(report.find("moment_slope = -") != std::string::npos);
  CHECK(report.find("pathwise_mean = -") != std::string::npos);
  CHECK(report.find("n_blowups = 0") != std::string::npos);
}

TEST_CASE("certify passes the benchmark and flips on theta = 1/2") {
  TempDir tmp;
  CommandOptions options;
  options.config_path = tmp.file("sine.cfg", kSineConfig);

  std::ostringstream out;
  std::ostringstream err;
  CHECK(cmd_certify(options, out, err) == kExitOk);
  CHECK(out.str().find("verdict = pass") != std::string::npos);
  CHECK(out.str().find("threshold = 2.4147013932800974") != std::string::npos);

  std::string half = kSineConfig;
  half.replace(half.find("theta = 1"), 9, "theta = 0.5");
  options.config_path = tmp.file("half.cfg", half);
  std::ostringstream out2;
  CHECK(cmd_certify(options, out2, err) == kExitCertificateFail);
  CHECK(out2.str().find("verdict = fail") != std::string::npos);
  CHECK(out2.str().find("theta_range") != std::string::npos);
}

TEST_CASE("certify names the well-posedness check when the gate fails") {
  TempDir tmp;
  std::string coarse = kSineConfig;
  coarse.replace(coarse.find("tau = 1"), 7, "tau = 4");
  coarse.replace(coarse.find("m_steps = 50"), 12, "m_steps = 2");  // delta = 2
  CommandOptions options;
  options.config_path = tmp.file("coarse.cfg", coarse);

  std::ostringstream out;
  std::ostringstream err;
  CHECK(cmd_certify(options, out, err) == kExitCertificateFail);
  CHECK(out.str().find("well_posedness,") != std::string::npos);
  CHECK(out.str().find("verdict = fail") != std::string::npos);

  // the same config cannot be materialized for simulation
  std::ostringstream out2;
  CHECK(cmd_simulate(options, out2, err) == kExitConfig);
}

TEST_CASE("moment CSV is byte-identical across worker counts") {
  TempDir tmp;
  CommandOptions first;
  first.config_path = tmp.file("sine.cfg", kSineConfig);
  first.output_override = tmp.path("a.csv");
  first.workers = 1;
  CommandOptions second = first;
  second.output_override = tmp.path("b.csv");
  second.workers = 3;

  std::ostringstream out;
  std::ostringstream err;
  REQUIRE(cmd_moments(first, out, err) == kExitOk);
  REQUIRE(cmd_moments(second, out, err) == kExitOk);
  CHECK(io::read_file(tmp.path("a.csv")) == io::read_file(tmp.path("b.csv")));
}

TEST_CASE("seed override changes the result deterministically") {
  TempDir tmp;
  CommandOptions base;
  base.config_path = tmp.file("sine.cfg", kSineConfig);
  base.output_override = tmp.path("a.csv");
  CommandOptions reseeded = base;
  reseeded.output_override = tmp.path("b.csv");
  reseeded.seed_override = 777;
  CommandOptions reseeded_again = base;
  reseeded_again.output_override = tmp.path("c.csv");
  reseeded_again.seed_override = 777;

  std::ostringstream out;
  std::ostringstream err;
  REQUIRE(cmd_moments(base, out, err) == kExitOk);
  REQUIRE(cmd_moments(reseeded, out, err) == kExitOk);
  REQUIRE(cmd_moments(reseeded_again, out, err) == kExitOk);
  CHECK(io::read_file(tmp.path("a.csv")) != io::read_file(tmp.path("b.csv")));
  CHECK(io::read_file(tmp.path("b.csv")) == io::read_file(tmp.path("c.csv")));
}

TEST_CASE("selftest passes clean and detects a corrupted threshold") {
  std::ostringstream out;
  std::ostringstream err;
  SelfTestOptions fast;
  fast.property_tuples = 2000;
  fast.solver_instances = 50;
  CHECK(cmd_selftest(fast, out, err) == kExitOk);
  CHECK(out.str().find("[FAIL]") == std::string::npos);

  SelfTestOptions corrupted = fast;
  corrupted.threshold_perturbation = 1e-3;
  std::ostringstream out2;
  CHECK(cmd_selftest(corrupted, out2, err) == kExitInternal);
  CHECK(out2.str().find("[FAIL] certificate_arithmetic") != std::string::npos);
}
