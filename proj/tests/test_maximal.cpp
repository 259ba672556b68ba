#include <doctest.h>

#include <cmath>
#include <sstream>

#include "nashlab/maximal.hpp"
#include "nashlab/rng.hpp"

using namespace nashlab;

TEST_SUITE("maximal") {

TEST_CASE("constant field") {
  const auto f = sample_field(2, 4, FieldLaw::constant(2.5), 1);
  for (double v : maximal_all(f)) CHECK(v == doctest::Approx(2.5).epsilon(1e-14));
  for (double v : min_all(f)) CHECK(v == doctest::Approx(2.5).epsilon(1e-14));
  CHECK(lp_maximal_ratio(FieldLaw::constant(2.5), 2, 4, 2.0, 3, 1).estimate == doctest::Approx(1.0).epsilon(1e-14));
  const auto rows = weak11_experiment(FieldLaw::constant(1.0), 2, 4, {2.0}, 5, 1);
  CHECK(rows[0].estimate == 0.0);
}

TEST_CASE("a point mass") {
  for (int d = 1; d <= 3; ++d) {
    const int L = 3;
    const Torus t(d, L);
    std::vector<double> v(t.site_count(), 0.0);
    const std::size_t x0 = 7 % t.site_count();
    v[x0] = 50.0;
    const auto f = field_from_values(d, L, v);
    CHECK(maximal_fn(f, x0) == doctest::Approx(50.0 / std::pow(3.0, d)).epsilon(1e-14));
  }
}

TEST_CASE("box averages against brute force") {
  const int d = 2, L = 3;
  const auto f = sample_field(d, L, FieldLaw::exponential(1.0), 4);
  const auto avg = box_averages(f);
  const auto& t = *f.torus;
  const std::size_t n = t.site_count();
  for (std::size_t x = 0; x < n; ++x)
    for (int r = 1; r <= L; ++r) {
      double s = 0.0;
      for (int i = -r; i <= r; ++i)
        for (int j = -r; j <= r; ++j) s += f.values[t.shift(t.shift(x, 0, i), 1, j)];
      CHECK(avg[std::size_t(r - 1) * n + x] == doctest::Approx(s / std::pow(2 * r + 1, 2)).epsilon(1e-13));
    }
}

TEST_CASE("ordering of M, m and the field") {
  const auto f = sample_field(2, 6, FieldLaw::pareto(1.5), 9);
  const auto M = maximal_all(f), m = min_all(f), avg = box_averages(f);
  for (std::size_t x = 0; x < M.size(); ++x) {
    CHECK(M[x] >= m[x]);
    CHECK(M[x] >= avg[x]);
  }
  for (double v : f.values) CHECK(v >= 1.0);
}

TEST_CASE("Jensen for inverses") {
  for (std::uint64_t s = 0; s < 50; ++s) CHECK(jensen_holds(sample_field(2, 5, FieldLaw::exponential(1.0), s)));
  CHECK_THROWS(jensen_holds(field_from_values(1, 1, {1.0, 0.0, 2.0})));
}

TEST_CASE("Lp ratios") {
  const auto inf = lp_maximal_ratio(FieldLaw::exponential(1.0), 2, 6, kInf, 20, 3);
  CHECK(inf.estimate <= 1.0 + 1e-12);
  CHECK(inf.bound == 1.0);
  const auto two = lp_maximal_ratio(FieldLaw::exponential(1.0), 2, 6, 2.0, 20, 3);
  CHECK(two.estimate > 0.0);
  CHECK(std::isfinite(two.estimate));
  CHECK_THROWS_AS(lp_maximal_ratio(FieldLaw::exponential(1.0), 2, 6, 1.0, 5, 3), std::invalid_argument);
}

TEST_CASE("weak type estimate and CSV") {
  const auto rows = weak11_experiment(FieldLaw::exponential(1.0), 2, 6, {2, 4, 8}, 500, 11);
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) {
    CHECK(r.bound == 9.0);
    CHECK(r.estimate <= r.bound + 3 * r.stderr_);
    CHECK(r.law == "exp(1)");
  }
  std::ostringstream os;
  write_maximal_csv(os, rows);
  CHECK(os.str().rfind("law,d,L,lambda_or_p,estimate,stderr,bound\n", 0) == 0);
  CHECK(FieldLaw::pareto(1.5).mean() == doctest::Approx(3.0));
}

TEST_CASE("fields are reproducible") {
  CHECK(sample_field(2, 4, FieldLaw::pareto(1.5), 5).values == sample_field(2, 4, FieldLaw::pareto(1.5), 5).values);
  CHECK(sample_field(2, 4, FieldLaw::pareto(1.5), 5).values != sample_field(2, 4, FieldLaw::pareto(1.5), 6).values);
}

}
