#include <doctest.h>

#include <cmath>
#include <set>

#include "nashlab/inequalities.hpp"
#include "nashlab/rng.hpp"
#include "oracles.hpp"

using namespace nashlab;

TEST_SUITE("inequalities") {

TEST_CASE("critical theta") {
  CHECK(theta_c(2, 4, 8) == 0.2);
  CHECK(theta_c(2, 4, kInf) == 0.0);
  CHECK(theta_c(3, 6, 6) == doctest::Approx(4.0 / 9).epsilon(1e-15));
  CHECK_THROWS_AS(theta_c(2, 2, 8), std::invalid_argument);
  CHECK_THROWS_AS(theta_c(2, 4, 2), std::invalid_argument);
}

TEST_CASE("exponents") {
  const auto e1 = nash_exponents(2, 4, 8, 1.0);
  CHECK(e1.alpha == doctest::Approx(2.0 / 3));
  CHECK(e1.beta == 0.0);
  CHECK(e1.gamma == doctest::Approx(1.0 / 3));
  const auto e = nash_exponents(2, 4, 8, 0.2);
  CHECK(e.alpha == doctest::Approx(8.0 / 15).epsilon(1e-15));
  CHECK(e.beta == doctest::Approx(2.0 / 5).epsilon(1e-15));
  CHECK(e.gamma == doctest::Approx(1.0 / 15).epsilon(1e-15));
  CHECK(2 * e.beta + 3 * e.gamma == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(nash_exponents(2, 4, 8, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(nash_exponents(2, 4, 8, 1.5), std::invalid_argument);
  CHECK_NOTHROW(nash_exponents(2, 4, kInf, 0.0));
}

TEST_CASE("maximal Mq") {
  auto g = make_geometry(2, 3);
  CHECK(maximal_Mq(EdgeField(g, 1.0), 8) == doctest::Approx(1.0));
  CHECK(maximal_Mq(EdgeField(g, 1.0), kInf) == 1.0);
  CHECK(maximal_Mq(EdgeField(g, 0.25), 5) == doctest::Approx(4.0));
  CHECK(maximal_Mq(EdgeField(g, 0.25), kInf) == doctest::Approx(4.0));

  auto g1 = make_geometry(1, 3);
  EdgeField w(g1, 1.0);
  w[g1->edge_between(g1->origin(), g1->origin() + 1)] = 0.5;
  CHECK(maximal_Mq(w, 2) == doctest::Approx(std::sqrt(2.5)).epsilon(1e-14));

  EdgeField z(g, 1.0);
  z[5] = 0.0;
  CHECK(maximal_Mq(z, 8) == kInf);
}

TEST_CASE("Mq is antitone in w") {
  auto g = make_geometry(2, 6);
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    EdgeField w(g), wp(g);
    for (std::size_t e = 0; e < w.size(); ++e) {
      w[e] = rng.uniform(0.05, 1.0);
      wp[e] = std::min(1.0, w[e] * rng.uniform(1.0, 2.0));
    }
    for (double q : {3.0, 8.0, kInf}) CHECK(maximal_Mq(w, q) >= maximal_Mq(wp, q));
  }
}

TEST_CASE("nash ratio of the delta and homogeneity") {
  for (int d = 1; d <= 3; ++d) {
    auto g = make_geometry(d, 3);
    const auto exps = nash_exponents(d, 4, 8, 0.6);
    const auto f = SiteFunction::delta(g, g->origin());
    CHECK(nash_ratio(f, EdgeField(g, 1.0), exps) == doctest::Approx(std::pow(2.0 * d, -exps.alpha / 2)).epsilon(1e-13));
  }
  auto g = make_geometry(2, 8);
  const auto exps = nash_exponents(2, 4, 8, 0.2);
  const auto corpus = test_corpus(g, 30, 4);
  Rng rng(2);
  EdgeField w(g);
  for (double& v : w.values) v = rng.uniform(0.1, 1.0);
  for (const auto& item : corpus) {
    const double r = nash_ratio(item.f, w, exps);
    SiteFunction scaled = item.f;
    for (double& v : scaled.values) v *= 37.5;
    CHECK(nash_ratio(scaled, w, exps) == doctest::Approx(r).epsilon(1e-10));
  }
  CHECK_THROWS_AS(nash_ratio(SiteFunction(g, 0.0), w, exps), std::invalid_argument);
}

TEST_CASE("poincare and isoperimetric ratios") {
  auto g = make_geometry(2, 4);
  CHECK(poincare_sobolev_ratio(SiteFunction(g, 2.0), 4, 1.5) == 0.0);
  std::vector<std::uint8_t> a(g->site_count(), 0);
  CHECK(isoperimetric_ratio(*g, a, 3) == 0.0);
  a[g->origin()] = 1;
  CHECK(isoperimetric_ratio(*g, a, 1) == doctest::Approx(0.25));
  const auto ex = isoperimetric_exhaustive_b1();
  CHECK(std::isfinite(ex.best_constant));
  CHECK(ex.best_constant >= 0.25);
}

TEST_CASE("exhaustive isoperimetric constant on B_1 matches a direct enumeration") {
  // Independent count: boundary edges of A within B_1, d = 2.
  auto g = make_geometry(2, 1);
  double best = 0.0;
  for (unsigned mask = 1; mask < 512; ++mask) {
    if (__builtin_popcount(mask) > 4) continue;
    int boundary = 0;
    for (int x = 0; x < 9; ++x)
      for (int y = x + 1; y < 9; ++y) {
        const int dx = std::abs(x % 3 - y % 3), dy = std::abs(x / 3 - y / 3);
        if (dx + dy == 1 && (((mask >> x) & 1u) != ((mask >> y) & 1u))) ++boundary;
      }
    best = std::max(best, std::sqrt(double(__builtin_popcount(mask))) / boundary);
  }
  CHECK(isoperimetric_exhaustive_b1().best_constant == doctest::Approx(best).epsilon(1e-14));
}

TEST_CASE("paths") {
  CHECK(build_path(Site{1, 1, 0}, Site{1, 1, 0}, 2).size() == 1);
  const auto p = build_path(Site{0, 0, 0}, Site{2, 0, 0}, 2);
  REQUIRE(p.size() == 3);
  CHECK(p[1] == Site{1, 0, 0});
  CHECK(p[2] == Site{2, 0, 0});

  Rng rng(17);
  for (int d = 2; d <= 3; ++d)
    for (int trial = 0; trial < 200; ++trial) {
      Site x{}, y{};
      for (int i = 0; i < d; ++i) {
        x[i] = int(rng.below(17)) - 8;
        y[i] = int(rng.below(17)) - 8;
      }
      const auto path = build_path(x, y, d);
      CHECK(path.front() == x);
      CHECK(path.back() == y);
      std::set<Site> seen(path.begin(), path.end());
      CHECK(seen.size() == path.size());
      for (std::size_t k = 0; k < path.size(); ++k) {
        if (k > 0) {
          int step = 0;
          for (int i = 0; i < d; ++i) step += std::abs(path[k][i] - path[k - 1][i]);
          CHECK(step == 1);
        }
        // distance to the segment [x, y]
        double dot = 0, len2 = 0;
        for (int i = 0; i < d; ++i) {
          dot += double(path[k][i] - x[i]) * (y[i] - x[i]);
          len2 += double(y[i] - x[i]) * (y[i] - x[i]);
        }
        const double s = len2 > 0 ? std::clamp(dot / len2, 0.0, 1.0) : 0.0;
        double dist2 = 0;
        for (int i = 0; i < d; ++i) {
          const double c = x[i] + s * (y[i] - x[i]);
          dist2 += (path[k][i] - c) * (path[k][i] - c);
        }
        CHECK(dist2 <= d + 1e-12);
      }
    }
}

TEST_CASE("path counts agree with brute force over targets") {
  auto g = make_geometry(2, 4);
  const Site x{1, -2, 0};
  const auto counts = path_counts_from(*g, x, 4);
  std::vector<std::uint32_t> brute(g->edge_count(), 0);
  for (std::size_t yi = 0; yi < g->site_count(); ++yi) {
    const auto path = build_path(x, g->site(yi), 2);
    std::set<std::uint32_t> edges;
    for (std::size_t k = 1; k < path.size(); ++k) edges.insert(g->edge_between(g->index(path[k - 1]), g->index(path[k])));
    for (auto e : edges) ++brute[e];
  }
  for (std::size_t e = 0; e < g->edge_count(); ++e) {
    CHECK(counts[e] == brute[e]);
    CHECK(path_count(*g, e, x, 4) == brute[e]);
  }
  const auto pc = path_count_report(*make_geometry(2, 8));
  CHECK(std::isfinite(pc.best_constant));
}

TEST_CASE("opt lemma examples") {
  const auto r = opt_lemma(1, 1, 1, 1, 1, 1, 1);
  CHECK(r.r == doctest::Approx(1.0));
  CHECK(r.R == doctest::Approx(1.0));
  CHECK(r.bound == doctest::Approx(3.0));
  CHECK(oracle::grid_inf(1, 1, 1, 1, 1, 1, 1) == doctest::Approx(3.0).epsilon(1e-12));
  const auto z = opt_lemma(1, 1, 1, 1, 0, 1, 1);
  CHECK(z.bound == 0.0);
  CHECK(z.degenerate);
  CHECK(std::isnan(z.r));

  // a = d/q, a' = 1 - d/q, b = d/2, c = p/2 carries the Nash exponents.
  const double a = 0.25, ap = 0.75, b = 1.0, c = 2.0;
  const double sigma = a * b + ap * c + b * c;
  const auto exps = nash_exponents(2, 4, 8, 0.2);
  CHECK(b * c / sigma == doctest::Approx(exps.alpha).epsilon(1e-15));
  CHECK(ap * c / sigma == doctest::Approx(exps.beta).epsilon(1e-15));
  CHECK(a * b / sigma == doctest::Approx(exps.gamma).epsilon(1e-15));
  const auto o = opt_lemma(a, ap, b, c, 2.0, 3.0, 5.0);
  CHECK(o.bound == doctest::Approx(3 * std::pow(2.0, exps.alpha) * std::pow(3.0, exps.beta) * std::pow(5.0, exps.gamma))
                       .epsilon(1e-13));
}

TEST_CASE("opt lemma against the grid oracle") {
  Rng rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const double a = rng.uniform(0.2, 2), ap = rng.uniform(0.2, 2), b = rng.uniform(0.2, 2), c = rng.uniform(0.2, 2);
    const double A = std::exp(rng.uniform(-3, 3)), B = std::exp(rng.uniform(-3, 3)), D = std::exp(rng.uniform(-3, 3));
    const auto res = opt_lemma(a, ap, b, c, A, B, D);
    const double t1 = std::pow(res.R, a) * std::pow(res.r, ap) * A, t2 = std::pow(res.r, -b) * B,
                 t3 = std::pow(res.R, -c) * D;
    CHECK(t1 == doctest::Approx(t2).epsilon(1e-10));
    CHECK(t1 == doctest::Approx(t3).epsilon(1e-10));
    const double inf = oracle::grid_inf(a, ap, b, c, A, B, D);
    CHECK(res.bound >= inf * (1 - 1e-9));
    CHECK(res.bound <= 3 * inf);
  }
}

TEST_CASE("corpus is deterministic and independent of count") {
  auto g = make_geometry(2, 8);
  const auto c1 = test_corpus(g, 10, 7);
  const auto c2 = test_corpus(g, 20, 7);
  for (std::size_t i = 0; i < 10; ++i) {
    CHECK(c1[i].descriptor == c2[i].descriptor);
    CHECK(c1[i].f.values == c2[i].f.values);
  }
}

TEST_CASE("sweeps produce finite constants") {
  auto g = make_geometry(2, 8);
  const auto exps = nash_exponents(2, 4, 8, 0.2);
  const auto n = nash_sweep(g, EdgeField(g, 1.0), exps, 40, 1);
  CHECK(n.samples == 40);
  CHECK(std::isfinite(n.best_constant));
  CHECK(n.best_constant > 0);
  CHECK(std::isfinite(poincare_sweep(g, 1.5, 40, 1).best_constant));
  CHECK(std::isfinite(isoperimetric_sweep(*g, 40, 1).best_constant));
  CHECK(std::isfinite(hls_sweep(make_geometry(2, 4), 20, 1).best_constant));
}

}
