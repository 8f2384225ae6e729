#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nsdde/error.hpp"
#include "nsdde/oracle.hpp"
#include "nsdde/theta_em.hpp"

using namespace nsdde;

namespace {

std::vector<int> constant_regimes(int k_max, int state) {
  return std::vector<int>(static_cast<std::size_t>(k_max) + 1, state);
}

// F_k = X_k - D(X_{k-m}, r_k) - theta*delta*f(X_k, X_{k-m}, k delta, r_k)
double f_transform(const ModelSpec& model, const SchemeConfig& cfg, const PathRecord& rec,
                   int k, int regime) {
  const Vec& x = rec.states[rec.index_of_step(k)];
  const Vec& x_del = rec.states[rec.index_of_step(k - cfg.m_steps)];
  const double t = cfg.time_at(k);
  const double d = model.neutral(x_del, regime)[0];
  const double f = model.drift(x, x_del, t, regime)[0];
  return x[0] - d - cfg.theta * cfg.delta * f;
}

}  // namespace

TEST_CASE("scheme config derives the step size and applies the gate") {
  const SchemeConfig cfg = SchemeConfig::create(1.0, 100, 1.0, 8.0, 1.0);
  CHECK(cfg.delta == 0.01);
  CHECK(cfg.horizon_steps == 800);

  CHECK_THROWS_AS(SchemeConfig::create(2.0, 1, 1.0, 8.0, 1.0), Error);   // L*theta*delta = 2
  CHECK_NOTHROW(SchemeConfig::create(2.0, 1, 0.0, 8.0, 1.0));            // explicit, no gate
  CHECK_NOTHROW(SchemeConfig::create_unchecked(2.0, 1, 1.0, 8.0));
  CHECK_THROWS_AS(SchemeConfig::create(1.0, 10, 1.5, 8.0, 1.0), Error);  // theta out of range
}

TEST_CASE("history ring keeps the last m+1 states in order") {
  HistoryRing ring(3);
  ring.push(Vec{0.0});
  ring.push(Vec{1.0});
  ring.push(Vec{2.0});
  CHECK(ring.oldest()[0] == 0.0);
  CHECK(ring.newest()[0] == 2.0);
  ring.push(Vec{3.0});
  CHECK(ring.oldest()[0] == 1.0);
  CHECK(ring.from_oldest(1)[0] == 2.0);
  CHECK(ring.newest()[0] == 3.0);
}

TEST_CASE("implicit solve handles the documented special cases") {
  SUBCASE("zero drift reduces to rhs plus the neutral term") {
    ModelSpec model = builtin_linear(0.0, 0.0, 0.0, 0.0, 0.5);
    const Vec x = implicit_solve(model, Vec{2.0}, 0.0, 1, Vec{1.0}, 0.3);
    CHECK(x[0] == doctest::Approx(1.0 + 0.5 * 2.0).epsilon(1e-15));
  }

  SUBCASE("scalar linear drift has the closed-form solution") {
    const ModelSpec model = builtin_linear(1.0);
    const Vec x = implicit_solve(model, Vec{0.0}, 0.0, 1, Vec{1.0}, 0.1);
    CHECK(x[0] == doctest::Approx(1.0 / 1.1).epsilon(1e-14));
  }

  SUBCASE("odd monotone map maps zero to zero") {
    ModelSpec model = builtin_linear(1.0);
    model.drift = [](const Vec& x, const Vec&, double, int) {
      return Vec{-x[0] * x[0] * x[0] - x[0]};
    };
    model.drift_jacobian = nullptr;
    const Vec x = implicit_solve(model, Vec{0.0}, 0.0, 1, Vec{0.0}, 0.1);
    CHECK(std::fabs(x[0]) <= 1e-15);
  }

  SUBCASE("gate violations are rejected") {
    const ModelSpec model = builtin_linear(1.0);  // declared L = 1
    CHECK_THROWS_AS(implicit_solve(model, Vec{0.0}, 0.0, 1, Vec{1.0}, 1.5), Error);
  }
}

TEST_CASE("trivial initial data stays at the trivial solution") {
  const ModelSpec model = builtin_sine_neutral();
  const SchemeConfig cfg = SchemeConfig::create(1.0, 10, 1.0, 3.0, model.one_sided_L);
  auto stream = rng::seeded(40);
  const PathRecord rec = simulate_path(model, cfg, InitialSegment::constant(Vec{0.0}),
                                       constant_regimes(cfg.horizon_steps, 1), stream);
  CHECK_FALSE(rec.blowup_at.has_value());
  for (const Vec& x : rec.states) CHECK(x[0] == 0.0);
}

TEST_CASE("linear test problem reproduces the closed-form ratio per step") {
  for (double theta : {0.0, 1.0}) {
    const ModelSpec model = builtin_linear(1.0);
    const SchemeConfig cfg = SchemeConfig::create(1.0, 10, theta, 2.0, model.one_sided_L);
    auto stream = rng::seeded(41);
    const PathRecord rec = simulate_path(model, cfg, InitialSegment::constant(Vec{1.0}),
                                         constant_regimes(cfg.horizon_steps, 1), stream);
    const double ratio = oracle::linear_ratio({1.0, theta, cfg.delta});
    if (theta == 1.0) CHECK(ratio == doctest::Approx(1.0 / 1.1).epsilon(1e-15));
    if (theta == 0.0) CHECK(ratio == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(rec.states[rec.index_of_step(1)][0] == doctest::Approx(ratio).epsilon(1e-13));
    CHECK(rec.states[rec.index_of_step(5)][0] ==
          doctest::Approx(std::pow(ratio, 5)).epsilon(1e-13));
  }
}

TEST_CASE("one implicit step of the sine-neutral model agrees with bisection") {
  const ModelSpec model = builtin_sine_neutral();
  const SchemeConfig cfg = SchemeConfig::create(1.0, 10, 1.0, 1.0, model.one_sided_L);

  HistoryRing ring(cfg.m_steps + 1);
  for (int j = 0; j <= cfg.m_steps; ++j) ring.push(Vec{1.0});

  StepState state;
  state.history = &ring;
  state.k = 0;
  state.regime_now = 1;
  state.regime_next = 1;

  const StepResult result = step(model, cfg, state, Vec{0.0});
  CHECK_FALSE(result.blown);

  // X1 - sin(1)/6 - 0.1 f(X1, 1, ., 1) = 1 - sin(1)/6, solved independently
  const double rhs = 1.0 - std::sin(1.0) / 6.0;
  const auto residual = [&](double x) {
    return x - std::sin(1.0) / 6.0 -
           0.1 * (-(6.0 * x + std::pow(x, 5) + 0.5 * std::sin(1.0))) - rhs;
  };
  const double reference = oracle::scalar_bisection_solve(residual, 0.0, 1.0, 1e-13);
  CHECK(std::fabs(result.x[0] - reference) <= 1e-10);
}

TEST_CASE("scheme recursion in F-transform holds at every accepted step") {
  const ModelSpec model = builtin_sine_neutral();
  const SchemeConfig cfg = SchemeConfig::create(1.0, 100, 1.0, 20.0, model.one_sided_L);
  const double tol = 1e-12;

  // replay the same increments the path consumed
  auto sim_stream = rng::path_stream(99, 0, rng::kBrownianStream);
  auto replay_stream = rng::path_stream(99, 0, rng::kBrownianStream);
  const std::vector<int> regimes = constant_regimes(cfg.horizon_steps, 2);
  const PathRecord rec =
      simulate_path(model, cfg, InitialSegment::constant(Vec{1.0}), regimes, sim_stream, tol);
  REQUIRE_FALSE(rec.blowup_at.has_value());

  for (int k = 0; k < cfg.horizon_steps; ++k) {
    const Vec dB = replay_stream.next_gaussian_increment(model.dim_w, cfg.delta);
    const Vec& x = rec.states[rec.index_of_step(k)];
    const Vec& x_del = rec.states[rec.index_of_step(k - cfg.m_steps)];
    const double t = cfg.time_at(k);
    const double f_k = model.drift(x, x_del, t, 2)[0];
    const double g_k = model.diffusion(x, x_del, t, 2)(0, 0);
    const double increment =
        f_transform(model, cfg, rec, k + 1, 2) - f_transform(model, cfg, rec, k, 2) -
        f_k * cfg.delta - g_k * dB[0];
    const double allowed = 10.0 * tol * (1.0 + norm(rec.states[rec.index_of_step(k + 1)]));
    REQUIRE(std::fabs(increment) <= allowed);
  }
}

TEST_CASE("implicit map is strongly monotone on the built-ins") {
  auto stream = rng::seeded(42);
  for (const ModelSpec& model : {builtin_sine_neutral(), builtin_linear(2.0)}) {
    const double theta_delta = 0.1;
    const SampleBox box = SampleBox::cube(model.dim_x, 3.0);
    for (int k = 0; k < 5000; ++k) {
      const Vec x1 = stream.next_point(box);
      const Vec x2 = stream.next_point(box);
      const Vec y = stream.next_point(box);
      const int i = stream.next_index(model.n_regimes);
      const Vec f1 = model.drift(x1, y, 0.0, i);
      const Vec f2 = model.drift(x2, y, 0.0, i);
      double inner = 0.0;
      double gap_sq = 0.0;
      for (std::size_t c = 0; c < x1.size(); ++c) {
        const double dg = (x1[c] - theta_delta * f1[c]) - (x2[c] - theta_delta * f2[c]);
        inner += dg * (x1[c] - x2[c]);
        gap_sq += (x1[c] - x2[c]) * (x1[c] - x2[c]);
      }
      REQUIRE(inner >= (1.0 - model.one_sided_L * theta_delta) * gap_sq - 1e-12);
    }
  }
}

TEST_CASE("deterministic grid error shrinks at first order") {
  // f = -x from xi = 1; exact solution exp(-t) at T = 1
  std::vector<double> errors;
  for (int m : {10, 20, 40}) {
    const ModelSpec model = builtin_linear(1.0);
    const SchemeConfig cfg = SchemeConfig::create(1.0, m, 1.0, 1.0, model.one_sided_L);
    auto stream = rng::seeded(43);
    const PathRecord rec = simulate_path(model, cfg, InitialSegment::constant(Vec{1.0}),
                                         constant_regimes(cfg.horizon_steps, 1), stream);
    errors.push_back(std::fabs(rec.states.back()[0] - std::exp(-1.0)));
  }
  CHECK(errors[0] / errors[1] == doctest::Approx(2.0).epsilon(0.25));
  CHECK(errors[1] / errors[2] == doctest::Approx(2.0).epsilon(0.25));
}

TEST_CASE("explicit runs blow up gracefully") {
  // theta = 0 on a stiff decay: one-step multiplier 1 - a delta = -5
  const ModelSpec model = builtin_linear(30.0);
  const SchemeConfig cfg = SchemeConfig::create(1.0, 5, 0.0, 50.0, model.one_sided_L);
  auto stream = rng::seeded(44);
  const PathRecord rec = simulate_path(model, cfg, InitialSegment::constant(Vec{1.0}),
                                       constant_regimes(cfg.horizon_steps, 1), stream);
  REQUIRE(rec.blowup_at.has_value());
  CHECK(*rec.blowup_at > 0);
  CHECK(rec.states.size() == rec.index_of_step(*rec.blowup_at - 1) + 1);
  for (const Vec& x : rec.states) CHECK(all_finite(x));
}

TEST_CASE("identical seeds give identical paths") {
  const ModelSpec model = builtin_linear(1.0, 0.0, 0.5);
  const SchemeConfig cfg = SchemeConfig::create(1.0, 10, 1.0, 5.0, model.one_sided_L);
  auto s1 = rng::path_stream(7, 3, rng::kBrownianStream);
  auto s2 = rng::path_stream(7, 3, rng::kBrownianStream);
  const PathRecord a = simulate_path(model, cfg, InitialSegment::constant(Vec{1.0}),
                                     constant_regimes(cfg.horizon_steps, 1), s1);
  const PathRecord b = simulate_path(model, cfg, InitialSegment::constant(Vec{1.0}),
                                     constant_regimes(cfg.horizon_steps, 1), s2);
  REQUIRE(a.states.size() == b.states.size());
  for (std::size_t j = 0; j < a.states.size(); ++j) CHECK(a.states[j][0] == b.states[j][0]);
}
