#include <doctest.h>

#include <cmath>

#include "nashlab/kernels.hpp"
#include "nashlab/rng.hpp"

using namespace nashlab;

TEST_SUITE("kernels") {

TEST_CASE("OpenMP kernels agree with the serial reference") {
  for (int d = 1; d <= 3; ++d) {
    const int L = d == 3 ? 12 : (d == 2 ? 40 : 3000);
    auto g = make_geometry(d, L);
    const auto st = kernels::make_stencil(*g);
    Rng rng{std::uint64_t(d)};
    std::vector<double> a(g->edge_count());
    for (double& v : a) v = rng.uniform();
    const auto cond = kernels::padded_conductance(a);
    std::vector<double> u(g->site_count());
    for (double& v : u) v = rng.uniform();
    std::vector<double> o1(u.size()), o2(u.size());
    kernels::serial::apply_transition(st, cond, 1.0 / (2 * d), u, o1);
    kernels::omp::apply_transition(st, cond, 1.0 / (2 * d), u, o2);
    CHECK(o1 == o2);  // per-site arithmetic is identical
    CHECK(kernels::omp::sum(u) == doctest::Approx(kernels::serial::sum(u)).epsilon(1e-13));
    CHECK(kernels::omp::sum_squares(u) == doctest::Approx(kernels::serial::sum_squares(u)).epsilon(1e-13));
    CHECK(kernels::omp::weighted_sum_squares(o1, u) ==
          doctest::Approx(kernels::serial::weighted_sum_squares(o1, u)).epsilon(1e-13));
    CHECK(kernels::omp::dirichlet(*g, cond, u) == doctest::Approx(kernels::serial::dirichlet(*g, cond, u)).epsilon(1e-13));
    std::vector<double> y1 = u, y2 = u;
    kernels::serial::axpy(0.3, o1, y1);
    kernels::omp::axpy(0.3, o1, y2);
    CHECK(y1 == y2);
  }
}

TEST_CASE("one transition step conserves mass and positivity") {
  auto g = make_geometry(2, 5);
  const auto st = kernels::make_stencil(*g);
  Rng rng(3);
  std::vector<double> a(g->edge_count());
  for (double& v : a) v = rng.uniform();
  const auto cond = kernels::padded_conductance(a);
  std::vector<double> u(g->site_count(), 0.0), o(u.size());
  u[g->origin()] = 1.0;
  kernels::serial::apply_transition(st, cond, 0.25, u, o);
  CHECK(kernels::serial::sum(o) == doctest::Approx(1.0).epsilon(1e-15));
  for (double v : o) CHECK(v >= 0.0);
}

TEST_CASE("size mismatches are rejected") {
  auto g = make_geometry(1, 2);
  const auto st = kernels::make_stencil(*g);
  std::vector<double> cond(g->edge_count(), 1.0);  // missing the dummy slot
  std::vector<double> u(g->site_count()), o(u.size());
  CHECK_THROWS_AS(kernels::serial::apply_transition(st, cond, 0.5, u, o), std::invalid_argument);
}

}
