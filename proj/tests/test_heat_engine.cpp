#include <doctest.h>

#include <cmath>

#include "nashlab/environments.hpp"
#include "nashlab/heat_engine.hpp"
#include "nashlab/rng.hpp"
#include "oracles.hpp"

using namespace nashlab;

namespace {

std::vector<double> delta(const Geometry& g, std::size_t x) {
  std::vector<double> u(g.site_count(), 0.0);
  u[x] = 1.0;
  return u;
}

EdgeField random_field(const GeometryPtr& g, std::uint64_t seed) {
  Rng rng(seed);
  EdgeField a(g);
  for (double& v : a.values) v = rng.uniform();
  return a;
}

}  // namespace

TEST_SUITE("heat_engine") {

TEST_CASE("time grid") {
  CHECK(time_grid(0, 2, 0.5) == std::vector<double>{0, 0.5, 1, 1.5, 2});
  CHECK(time_grid(1, 2.2, 0.5) == std::vector<double>{1, 1.5, 2, 2.2});
}

TEST_CASE("free walk against the Bessel oracle") {
  IntegratorConfig cfg;
  cfg.dt = 0.25;
  for (int d = 1; d <= 3; ++d) {
    auto g = make_geometry(d, 14);
    const auto tr = evolve_static(EdgeField(g, 1.0), g->origin(), 3.0, cfg);
    for (std::size_t i = 0; i < tr.size(); ++i) {
      CHECK(tr.p00[i] == doctest::Approx(oracle::free_return(d, tr.t[i])).epsilon(1e-10));
      CHECK(tr.energy[i] == doctest::Approx(oracle::free_energy(d, tr.t[i])).epsilon(1e-10));
    }
  }
  CHECK(oracle::free_return(1, 1.0) == doctest::Approx(0.308508).epsilon(1e-6));
  CHECK(oracle::free_return(2, 1.0) == doctest::Approx(0.095177).epsilon(1e-5));
}

TEST_CASE("frozen walk stays put") {
  auto g = make_geometry(2, 3);
  IntegratorConfig cfg;
  const auto tr = evolve_static(EdgeField(g, 0.0), g->origin(), 5.0, cfg);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    CHECK(tr.p00[i] == 1.0);
    CHECK(tr.dirichlet[i] == 0.0);
  }
  CHECK(tr.final_state.values == delta(*g, g->origin()));
}

TEST_CASE("energy, moment and dirichlet of a delta") {
  for (int d = 1; d <= 3; ++d) {
    auto g = make_geometry(d, 2);
    const auto u = SiteFunction::delta(g, g->origin());
    CHECK(dirichlet_energy(EdgeField(g, 1.0), u) == 2.0 * d);
    for (double p : {1.0, 4.0, 7.5}) CHECK(moment_N(u, p) == 1.0);
  }
}

TEST_CASE("conservation, positivity and monotone energy") {
  auto g = make_geometry(2, 6);
  const auto env = random_piecewise(g, 60, 8.0, 3);
  IntegratorConfig cfg;
  cfg.dt = 0.1;
  cfg.keep_states = true;
  const auto tr = evolve_dynamic(env, 0.0, g->origin(), 8.0, cfg);
  CHECK_FALSE(tr.mass_alarm);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    CHECK(std::abs(tr.mass[i] - 1.0) <= 1e-10);
    for (double v : tr.states[i]) CHECK(v >= 0.0);
    if (i > 0) {
      CHECK(tr.energy[i] <= tr.energy[i - 1]);
      CHECK(tr.lambda[i] >= tr.lambda[i - 1]);
    }
  }
}

TEST_CASE("static symmetry") {
  auto g = make_geometry(2, 3);
  const auto a = random_field(g, 8);
  const auto env = DynamicEnvironment::constant(a, 2.0);
  const std::size_t n = g->site_count();
  std::vector<std::vector<double>> P(n);
  for (std::size_t x = 0; x < n; ++x) {
    P[x] = delta(*g, x);
    propagate(env, 0.0, 2.0, P[x], 1e-14);
  }
  double worst = 0.0;
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) worst = std::max(worst, std::abs(P[x][y] - P[y][x]));
  CHECK(worst < 1e-10);
  const auto r = reversal_check(env, 2.0, 3, 17);
  CHECK(r.first == doctest::Approx(r.second).epsilon(1e-10));
}

TEST_CASE("reversal at t = 0 is the identity") {
  auto g = make_geometry(2, 2);
  const auto env = random_piecewise(g, 5, 3.0, 1);
  CHECK(reversal_check(env, 0.0, 4, 4) == std::pair{1.0, 1.0});
  CHECK(reversal_check(env, 0.0, 4, 5) == std::pair{0.0, 0.0});
}

TEST_CASE("reversal on random piecewise environments") {
  auto g = make_geometry(2, 4);
  Rng rng(31);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto env = random_piecewise(g, 10, 5.0, seed);
    const auto x = rng.below(g->site_count()), y = rng.below(g->site_count());
    const auto r = reversal_check(env, 5.0, std::uint32_t(x), std::uint32_t(y));
    CHECK(std::abs(r.first - r.second) <= 1e-8);
  }
}

TEST_CASE("Chapman-Kolmogorov") {
  auto g = make_geometry(2, 3);
  const auto env = random_piecewise(g, 30, 4.0, 12);
  auto direct = delta(*g, g->origin());
  propagate(env, 0.0, 4.0, direct, 1e-15);
  auto half = delta(*g, g->origin());
  propagate(env, 0.0, 2.0, half, 1e-15);
  std::vector<double> composed(g->site_count(), 0.0);
  for (std::size_t x = 0; x < g->site_count(); ++x) {
    auto row = delta(*g, x);
    propagate(env, 2.0, 4.0, row, 1e-15);
    for (std::size_t y = 0; y < row.size(); ++y) composed[y] += half[x] * row[y];
  }
  for (std::size_t y = 0; y < composed.size(); ++y) CHECK(composed[y] == doctest::Approx(direct[y]).epsilon(1e-11));
}

TEST_CASE("constant dynamic environment agrees with the static solver") {
  auto g = make_geometry(2, 5);
  const auto a = random_field(g, 4);
  DynamicEnvironment env(a, 6.0);
  // A breakpoint that changes nothing must not change the answer either.
  const DynamicEnvironment::Change same[] = {{7, a[7]}};
  env.add_breakpoint(2.37, same);
  IntegratorConfig cfg;
  cfg.dt = 0.5;
  const auto s = evolve_static(a, 12, 6.0, cfg);
  const auto dyn = evolve_dynamic(env, 0.0, 12, 6.0, cfg);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(std::abs(s.energy[i] - dyn.energy[i]) <= 1e-10);
    CHECK(std::abs(s.p00[i] - dyn.p00[i]) <= 1e-10);
  }
  for (std::size_t x = 0; x < g->site_count(); ++x)
    CHECK(std::abs(s.final_state[x] - dyn.final_state[x]) <= 1e-10);
}

TEST_CASE("closed then open") {
  auto g = make_geometry(2, 10);
  DynamicEnvironment env(EdgeField(g, 0.0), 4.0);
  std::vector<DynamicEnvironment::Change> open;
  for (std::uint32_t e = 0; e < g->edge_count(); ++e) open.push_back({e, 1.0});
  env.add_breakpoint(1.0, open);
  IntegratorConfig cfg;
  cfg.dt = 0.5;
  const auto tr = evolve_dynamic(env, 0.0, g->origin(), 4.0, cfg);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    if (tr.t[i] <= 1.0)
      CHECK(tr.p00[i] == 1.0);
    else
      CHECK(tr.p00[i] == doctest::Approx(oracle::free_return(2, tr.t[i] - 1.0)).epsilon(1e-10));
  }
}

TEST_CASE("trap scenario trajectory") {
  auto g = make_geometry(2, 4);
  const auto env = trap_scenario(g, 10.0, 20.0, 30.0);
  IntegratorConfig cfg;
  cfg.dt = 0.5;
  const auto tr = evolve_dynamic(env, 0.0, g->origin(), 30.0, cfg);
  CHECK(tr.p00[tr.index_of(10.0)] == doctest::Approx(0.5).epsilon(1e-6));
  double low = 1.0;
  for (std::size_t i = tr.index_of(10.0); i <= tr.index_of(20.0); ++i) low = std::min(low, tr.p00[i]);
  CHECK(low < 0.05);
  CHECK(tr.p00.back() > 0.2);
  CHECK(tr.p00.back() < 0.3);
}

TEST_CASE("finite differences of the energy") {
  auto g = make_geometry(2, 6);
  const auto env = random_piecewise(g, 40, 10.0, 21);
  const auto chk = energy_derivative_check(env, 0.0, g->origin(), 10.0, 20, 5);
  CHECK(chk.t.size() == 20);
  CHECK(chk.max_relative_error < 1e-5);
  const auto trap = energy_derivative_check(trap_scenario(g, 3.0, 6.0, 10.0), 0.0, g->origin(), 10.0, 20, 6);
  CHECK(trap.max_relative_error < 1e-5);
}

TEST_CASE("argument checks") {
  auto g = make_geometry(1, 3);
  const auto env = DynamicEnvironment::constant(EdgeField(g, 1.0), 5.0);
  IntegratorConfig cfg;
  CHECK_THROWS(evolve_dynamic(env, 2.0, 0, 1.0, cfg));
  CHECK_THROWS(evolve_dynamic(env, 0.0, 0, 6.0, cfg));
  cfg.tolerance = 0.1;
  CHECK_THROWS(evolve_dynamic(env, 0.0, 0, 1.0, cfg));
}

}
