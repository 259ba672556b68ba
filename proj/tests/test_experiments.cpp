#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nashlab/experiments.hpp"
#include "nashlab/report.hpp"
#include "oracles.hpp"

using namespace nashlab;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

ExperimentSpec small_exclusion() {
  ExperimentSpec s;
  s.radius = 6;
  s.horizon = 8;
  s.dt = 0.5;
  s.lookahead = 4;
  s.reals = 3;
  s.tmin = 1;
  return s;
}

}  // namespace

TEST_SUITE("experiments") {

TEST_CASE("spec validation and JSON round trip") {
  ExperimentSpec s;
  s.q = kInf;
  s.theta = 0.0;
  CHECK_NOTHROW(s.validate());
  const auto j = to_json(s);
  CHECK(j["q"] == "inf");
  const auto back = spec_from_json(j);
  CHECK(back.q == kInf);
  CHECK(to_json(back).dump() == j.dump());
  s.rho = 1.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  ExperimentSpec t;
  t.theta = 0.1;  // below theta_c = 0.2
  CHECK_THROWS_AS(t.validate(), std::invalid_argument);
}

TEST_CASE("number formatting") {
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(1e-300) == "1e-300");
  CHECK(json_number(kInf) == "inf");
  CHECK(json_number(std::nan("")) == "nan");
}

TEST_CASE("empty exclusion system is the free walk") {
  auto s = small_exclusion();
  s.rho = 0.0;
  s.radius = 24;
  const auto r = run_exclusion_realization(s, 0);
  CHECK_FALSE(r.aborted);
  CHECK(r.environment_breakpoints == 0);
  for (std::size_t i = 0; i < r.forward.size(); ++i)
    CHECK(r.forward.p00[i] == doctest::Approx(oracle::free_return(2, r.forward.t[i])).epsilon(1e-9));
  CHECK(r.energy_half_reversed == doctest::Approx(r.energy_half_forward).epsilon(1e-12));
}

TEST_CASE("exclusion pipeline") {
  const auto s = small_exclusion();
  const auto res = run_exclusion(s);
  REQUIRE(res.realizations.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& r = res.realizations[i];
    CHECK(r.index == i);
    CHECK_FALSE(r.moderation.inconsistent);
    for (double x : r.moderation.ratio) CHECK(std::isfinite(x));
    CHECK(r.bounds.cauchy_schwarz_holds);
    CHECK(r.moderation.t.back() <= s.horizon + 1e-9);
    // Lambda at the horizon is the running max of t E_t over the grid.
    double lam = 1.0;
    for (std::size_t k = 0; k < r.forward.size(); ++k)
      if (r.forward.t[k] <= s.horizon + 1e-9) lam = std::max(lam, r.forward.t[k] * r.forward.energy[k]);
    CHECK(res.summary.lambda_T[i] == doctest::Approx(lam).epsilon(1e-14));
  }
  CHECK(res.summary.X_hat.size() == 3);
  CHECK(res.summary.moments.size() == 3);
  for (double m : res.summary.moments) {
    CHECK(std::isfinite(m));
    CHECK(m >= 0);
  }
  // One realization on its own is identical to the same index inside the batch.
  const auto single = run_exclusion_realization(s, 1);
  CHECK(single.forward.energy == res.realizations[1].forward.energy);
}

TEST_CASE("static runs") {
  ExperimentSpec s;
  s.law = "constant";
  s.level = 1.0;
  s.radius = 12;
  s.horizon = 6;
  s.dt = 1;
  s.reals = 2;
  const auto r = run_static_moment(s);
  CHECK(r.warning.empty());
  CHECK(r.summary.X_hat[0] == r.summary.X_hat[1]);
  for (std::size_t k = 0; k < r.traces[0].size(); ++k)
    CHECK(r.traces[0].p00[k] == doctest::Approx(oracle::free_return(2, r.traces[0].t[k])).epsilon(1e-9));

  ExperimentSpec neg = s;
  neg.law = "power";
  neg.eta = 3;
  neg.q = 8;
  neg.reals = 1;
  CHECK_FALSE(run_static_moment(neg).warning.empty());
}

TEST_CASE("negative control has a larger median") {
  ExperimentSpec s;
  s.radius = 8;
  s.horizon = 10;
  s.dt = 1;
  s.reals = 9;
  s.q = 8;
  s.eta = 8;
  const auto good = run_static_moment(s);
  s.eta = 3;
  const auto bad = run_static_moment(s);
  CHECK(good.warning.empty());
  CHECK_FALSE(bad.warning.empty());
  CHECK(bad.summary.quantiles[1] > good.summary.quantiles[1]);
}

TEST_CASE("trap counterexample") {
  ExperimentSpec s;
  s.radius = 10;
  s.horizon = 4;
  s.dt = 0.5;
  s.reals = 1;
  s.law = "trap";
  s.level = 1e-3;
  const auto trap = run_static_moment(s);
  s.law = "constant";
  s.level = 1.0;
  const auto open = run_static_moment(s);
  for (std::size_t k = 1; k < trap.traces[0].size(); ++k) CHECK(trap.traces[0].p00[k] > open.traces[0].p00[k]);
}

TEST_CASE("two-sample KS") {
  const auto same = ks_two_sample({1, 2, 3, 4}, {1, 2, 3, 4});
  CHECK(same.statistic == 0.0);
  CHECK(same.p_value == doctest::Approx(1.0));
  std::vector<double> a, b;
  for (int i = 0; i < 50; ++i) {
    a.push_back(i);
    b.push_back(100 + i);
  }
  const auto far = ks_two_sample(a, b);
  CHECK(far.statistic == 1.0);
  CHECK(far.p_value < 1e-6);
  // D = 3/4 with n = m = 4; Kolmogorov tail at lambda = (sqrt 2 + 0.12 + 0.11/sqrt 2) * 3/4
  const auto mid = ks_two_sample({1, 2, 3, 4}, {3.5, 4.5, 5, 6});
  CHECK(mid.statistic == doctest::Approx(0.75));
  CHECK(mid.p_value == doctest::Approx(0.1074904650).epsilon(1e-8));
}

TEST_CASE("tail estimate") {
  ExperimentSpec s;
  s.rho = 0.0;
  s.radius = 4;
  s.reals = 5;
  s.tail_times = {2, 4};
  const auto zero = run_tail_estimate(s);
  for (double p : zero.probability) CHECK(p == 0.0);
  s.rho = 0.8;
  s.reals = 200;
  s.tail_times = {5, 10, 20};
  const auto tab = run_tail_estimate(s);
  for (std::size_t i = 1; i < tab.t.size(); ++i) CHECK(tab.probability[i] <= tab.probability[i - 1]);
  // u shrinks along the list, so P[w_0 <= u] must not grow
  for (std::size_t i = 1; i < tab.u.size(); ++i) CHECK(tab.weight_probability[i] <= tab.weight_probability[i - 1]);
}

TEST_CASE("dynamic run and inequality suite") {
  ExperimentSpec s;
  s.radius = 4;
  s.horizon = 30;
  s.dt = 0.5;
  const auto g = make_geometry(2, 4);
  const auto r = run_dynamic(s, trap_scenario(g, 10, 20, 30));
  CHECK(r.derivative.max_relative_error < 1e-5);
  CHECK_FALSE(r.trace.snapshots.empty());

  ExperimentSpec q;
  q.radius = 8;
  q.corpus = 20;
  const auto reps = run_inequality_suite(q);
  CHECK_FALSE(reps.empty());
  for (const auto& rep : reps) CHECK(std::isfinite(rep.best_constant));
}

TEST_CASE("output files are reproducible") {
  const auto base = std::filesystem::temp_directory_path() / "nashlab_test_outputs";
  std::filesystem::remove_all(base);
  auto s = small_exclusion();
  s.reals = 2;
  s.svg = true;
  write_outputs(base / "a", s, run_exclusion(s));
  write_outputs(base / "b", s, run_exclusion(s));
  std::size_t files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(base / "a")) {
    ++files;
    CHECK(slurp(entry.path()) == slurp(base / "b" / entry.path().filename()));
  }
  CHECK(files >= 6);
  std::filesystem::remove_all(base);
}

}
