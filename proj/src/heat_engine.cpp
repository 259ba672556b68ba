#include "nashlab/heat_engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nashlab/kernels.hpp"
#include "nashlab/rng.hpp"

namespace nashlab {

namespace {

// Largest Poisson mean handled in one uniformization step; keeps e^{-lambda} far from underflow.
constexpr double kMaxStepMean = 32.0;

class Propagator {
 public:
  Propagator(const DynamicEnvironment& env, double s, double tolerance)
      : env_(env),
        geometry_(*env.geometry()),
        stencil_(kernels::make_stencil(geometry_)),
        cond_(kernels::padded_conductance(env.at(s).values)),
        now_(s),
        tolerance_(tolerance),
        mu_(2.0 * geometry_.dim()) {
    if (!(tolerance > 0.0)) throw std::invalid_argument("uniformization tolerance must be positive");
    const auto& times = env.breakpoint_times();
    next_ = std::size_t(std::upper_bound(times.begin(), times.end(), s) - times.begin());
    for (double c : cond_) open_ += c > 0.0;
    term_.resize(geometry_.site_count());
    scratch_.resize(geometry_.site_count());
    acc_.resize(geometry_.site_count());
  }

  double now() const { return now_; }
  std::span<const double> conductance() const { return cond_; }
  std::size_t steps() const { return steps_; }

  /**
   * E(now + tau) - E(now) for the state u at `now`, assuming no breakpoint in
   * between. The increment v = (e^{tau Q} - I) u is summed as
   * sum_k P[N > k] P^k (Q/mu) u, so v is never formed as a difference of two
   * nearly equal states.
   */
  double energy_change(const std::vector<double>& u, double tau) {
    const double lambda = mu_ * tau;
    if (!(lambda > 0.0) || lambda > kMaxStepMean) throw std::invalid_argument("energy_change: step out of range");
    const std::size_t n = u.size();
    // (Q/mu) u with neighbour differences taken directly.
    for (std::size_t y = 0; y < n; ++y) {
      double acc = 0.0;
      for (int k = 0; k < stencil_.stride; ++k) {
        const std::size_t slot = y * std::size_t(stencil_.stride) + std::size_t(k);
        acc += cond_[stencil_.edge[slot]] * (u[stencil_.neighbour[slot]] - u[y]);
      }
      term_[y] = acc / mu_;
    }
    // Poisson weights w_1..w_K, with the tail beyond K below 1e-18 P[N > 0]; the tails
    // P[N > k] are summed backwards so small ones keep full relative precision.
    const double first = -std::expm1(-lambda);
    std::vector<double> w{std::exp(-lambda)};
    for (int j = 1;; ++j) {
      w.push_back(w.back() * lambda / j);
      const double next = w.back() * lambda / (j + 1);
      if (j + 2 > lambda && next / (1.0 - lambda / (j + 2)) < 1e-18 * first) break;
    }
    std::vector<double> tails(w.size(), 0.0);  // tails[k] = P[N > k]
    for (std::size_t k = w.size() - 1; k-- > 0;) tails[k] = tails[k + 1] + w[k + 1];
    for (std::size_t i = 0; i < n; ++i) acc_[i] = first * term_[i];
    for (std::size_t k = 1; k < tails.size(); ++k) {
      kernels::omp::apply_transition(stencil_, cond_, 1.0 / mu_, term_, scratch_);
      std::swap(term_, scratch_);
      kernels::omp::axpy(tails[k], term_, acc_);
    }
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) change += acc_[i] * (2.0 * u[i] + acc_[i]);
    return change;
  }

  void advance_to(double t, std::vector<double>& u) {
    if (t < now_) throw std::invalid_argument("cannot propagate backwards in time");
    if (t > env_.horizon()) throw std::invalid_argument("propagation beyond the environment horizon");
    while (next_ < env_.breakpoint_count() && env_.breakpoint_time(next_) <= t) {
      uniformize(u, env_.breakpoint_time(next_) - now_);
      now_ = env_.breakpoint_time(next_);
      for (const auto& c : env_.changes(next_)) {
        open_ += int(c.value > 0.0) - int(cond_[c.edge] > 0.0);
        cond_[c.edge] = c.value;
      }
      ++next_;
    }
    uniformize(u, t - now_);
    now_ = t;
  }

 private:
  // u <- e^{tau Q} u = sum_n Poisson(mu tau; n) P^n u with P = I + Q/mu.
  void uniformize(std::vector<double>& u, double tau) {
    if (!(tau > 0.0) || open_ == 0) return;  // Q = 0: the state is frozen
    const double total = mu_ * tau;
    const int pieces = int(std::ceil(total / kMaxStepMean));
    const double lambda = total / pieces;
    const double inv_mu = 1.0 / mu_;
    for (int piece = 0; piece < pieces; ++piece) {
      double w = std::exp(-lambda);
      std::copy(u.begin(), u.end(), term_.begin());
      for (std::size_t i = 0; i < u.size(); ++i) acc_[i] = w * u[i];
      for (int n = 1;; ++n) {
        kernels::omp::apply_transition(stencil_, cond_, inv_mu, term_, scratch_);
        std::swap(term_, scratch_);
        w *= lambda / n;
        kernels::omp::axpy(w, term_, acc_);
        // Poisson tail beyond n: sum_{k>n} w_k <= w_{n+1} / (1 - lambda/(n+2)).
        const double next = w * lambda / (n + 1);
        if (n + 2 > lambda && next / (1.0 - lambda / (n + 2)) < tolerance_) break;
      }
      std::swap(u, acc_);
      ++steps_;
    }
  }

  const DynamicEnvironment& env_;
  const Geometry& geometry_;
  kernels::Stencil stencil_;
  std::vector<double> cond_;
  double now_;
  double tolerance_;
  double mu_;
  std::size_t next_ = 0;
  std::size_t steps_ = 0;
  std::ptrdiff_t open_ = 0;  // edges with positive conductance
  std::vector<double> term_, scratch_, acc_;
};

std::vector<double> moment_weights(const Geometry& g, double p) {
  std::vector<double> w(g.site_count());
  for (std::size_t x = 0; x < w.size(); ++x) w[x] = std::pow(g.anchored_weight(x), p);
  return w;
}

}  // namespace

std::size_t HeatTrace::index_of(double time) const {
  if (t.empty()) throw std::out_of_range("empty trace");
  auto it = std::lower_bound(t.begin(), t.end(), time);
  if (it == t.end()) return t.size() - 1;
  std::size_t k = std::size_t(it - t.begin());
  if (k > 0 && time - t[k - 1] < t[k] - time) --k;
  return k;
}

std::vector<double> time_grid(double start, double T, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("grid step must be positive");
  if (T < start) throw std::invalid_argument("grid end before its start");
  std::vector<double> grid;
  const double span = T - start;
  const auto n = std::size_t(std::floor(span / dt + 1e-9));
  for (std::size_t k = 0; k <= n; ++k) grid.push_back(start + double(k) * dt);
  if (T - grid.back() > 1e-9 * std::max(1.0, dt))
    grid.push_back(T);
  else
    grid.back() = T;
  return grid;
}

HeatTrace evolve_dynamic(const DynamicEnvironment& env, double s, std::uint32_t x0, double T,
                         const IntegratorConfig& cfg) {
  const Geometry& g = *env.geometry();
  if (x0 >= g.site_count()) throw std::invalid_argument("starting site outside the box");
  if (!(s >= 0.0) || T < s || T > env.horizon()) throw std::invalid_argument("evolve_dynamic needs 0 <= s <= T <= horizon");
  if (!(cfg.tolerance > 0.0 && cfg.tolerance <= 1e-6)) throw std::invalid_argument("tolerance must lie in (0, 1e-6]");

  HeatTrace tr;
  tr.geometry = env.geometry();
  tr.start = s;
  tr.x0 = x0;
  tr.p = cfg.p;

  const std::vector<double> grid = time_grid(s, T, cfg.dt);
  std::vector<double> snaps;
  for (double r : cfg.snapshot_times)
    if (r >= 0.0 && s + r <= T) snaps.push_back(s + r);
  std::sort(snaps.begin(), snaps.end());

  const std::vector<double> mw = moment_weights(g, cfg.p);
  std::vector<std::uint8_t> outer(g.site_count());
  for (std::size_t x = 0; x < outer.size(); ++x) outer[x] = g.shell(x) == g.radius();

  std::vector<double> u(g.site_count(), 0.0);
  u[x0] = 1.0;
  Propagator prop(env, s, cfg.tolerance);
  const double half_d = 0.5 * g.dim();
  double running = 1.0;

  auto record = [&](double t) {
    const double E = kernels::omp::sum_squares(u);
    const double mass = kernels::omp::sum(u);
    double boundary = 0.0;
    for (std::size_t x = 0; x < u.size(); ++x) {
      if (outer[x]) boundary += u[x];
      tr.min_value = std::min(tr.min_value, u[x]);
    }
    if (g.radius() == 0) boundary = 0.0;
    tr.t.push_back(t);
    tr.energy.push_back(E);
    tr.dirichlet.push_back(kernels::omp::dirichlet(g, prop.conductance(), u));
    tr.moment.push_back(kernels::omp::weighted_sum_squares(mw, u));
    const double elapsed = t - s;
    if (elapsed > 0.0) running = std::max(running, std::pow(elapsed, half_d) * E);
    tr.lambda.push_back(running);
    tr.p00.push_back(u[x0]);
    tr.mass.push_back(mass);
    tr.boundary_mass.push_back(boundary);
    tr.max_mass_defect = std::max(tr.max_mass_defect, std::abs(mass - 1.0));
    tr.max_boundary_mass = std::max(tr.max_boundary_mass, boundary);
    if (cfg.keep_states) tr.states.push_back(u);
  };

  std::size_t si = 0;
  for (double t : grid) {
    while (si < snaps.size() && snaps[si] <= t) {
      prop.advance_to(snaps[si], u);
      tr.snapshots.emplace_back(snaps[si], SiteFunction(env.geometry(), u));
      ++si;
    }
    prop.advance_to(t, u);
    record(t);
  }
  tr.mass_alarm = tr.max_mass_defect > cfg.mass_alarm;
  tr.boundary_alarm = tr.max_boundary_mass > cfg.boundary_alarm;
  tr.steps = prop.steps();
  tr.final_state = SiteFunction(env.geometry(), std::move(u));
  return tr;
}

HeatTrace evolve_static(const EdgeField& a, std::uint32_t x0, double T, const IntegratorConfig& cfg) {
  return evolve_dynamic(DynamicEnvironment::constant(a, T), 0.0, x0, T, cfg);
}

std::size_t propagate(const DynamicEnvironment& env, double s, double t, std::vector<double>& u, double tolerance) {
  if (u.size() != env.geometry()->site_count()) throw std::invalid_argument("state size mismatch");
  Propagator prop(env, s, tolerance);
  prop.advance_to(t, u);
  return prop.steps();
}

std::vector<std::vector<double>> sample_states(const DynamicEnvironment& env, double s, std::vector<double> u0,
                                               std::span<const double> times, double tolerance) {
  if (u0.size() != env.geometry()->site_count()) throw std::invalid_argument("state size mismatch");
  Propagator prop(env, s, tolerance);
  std::vector<std::vector<double>> out;
  out.reserve(times.size());
  for (double t : times) {
    prop.advance_to(t, u0);
    out.push_back(u0);
  }
  return out;
}

double dirichlet_energy(const Geometry& g, std::span<const double> a, std::span<const double> u) {
  if (a.size() < g.edge_count() || u.size() != g.site_count()) throw std::invalid_argument("size mismatch");
  return kernels::omp::dirichlet(g, a, u);
}

double dirichlet_energy(const EdgeField& a, const SiteFunction& u) {
  return dirichlet_energy(*a.geometry, a.values, u.values);
}

double moment_N(const Geometry& g, std::span<const double> u, double p) {
  if (u.size() != g.site_count()) throw std::invalid_argument("size mismatch");
  const std::vector<double> w = moment_weights(g, p);
  return kernels::omp::weighted_sum_squares(w, u);
}

double moment_N(const SiteFunction& u, double p) { return moment_N(*u.geometry, u.values, p); }

std::pair<double, double> reversal_check(const DynamicEnvironment& env, double t, std::uint32_t x, std::uint32_t y,
                                         double tolerance) {
  const std::size_t n = env.geometry()->site_count();
  if (x >= n || y >= n) throw std::invalid_argument("site outside the box");
  std::vector<double> u(n, 0.0);
  u[x] = 1.0;
  propagate(env, 0.0, t, u, tolerance);
  const DynamicEnvironment rev = time_reverse(env, t);
  std::vector<double> v(n, 0.0);
  v[y] = 1.0;
  propagate(rev, 0.0, t, v, tolerance);
  return {u[y], v[x]};
}

DerivativeCheck energy_derivative_check(const DynamicEnvironment& env, double s, std::uint32_t x0, double T,
                                        std::size_t count, std::uint64_t seed, double tolerance) {
  const Geometry& g = *env.geometry();
  const auto& bps = env.breakpoint_times();
  Rng rng(derive_seed(seed, Stream::check_times));

  // Random times with a clear window [t-h, t+h] free of breakpoints.
  std::vector<std::pair<double, double>> picks;
  std::size_t attempts = 0;
  while (picks.size() < count) {
    if (++attempts > 1000 * (count + 1)) throw std::runtime_error("no breakpoint-free times found for the check");
    const double t = rng.uniform(s, T);
    double gap = std::min(t - s, T - t);
    auto it = std::lower_bound(bps.begin(), bps.end(), t);
    if (it != bps.end()) gap = std::min(gap, *it - t);
    if (it != bps.begin()) gap = std::min(gap, t - *(it - 1));
    const double h = std::min(1e-3, gap / 4.0);
    if (h < 1e-6) continue;
    picks.emplace_back(t, h);
  }
  std::sort(picks.begin(), picks.end());

  DerivativeCheck out;
  std::vector<double> u(g.site_count(), 0.0);
  u[x0] = 1.0;
  Propagator prop(env, s, tolerance);
  for (const auto& [t, h] : picks) {
    prop.advance_to(t - h, u);
    const double e_minus = kernels::omp::sum_squares(u);
    const double fd = prop.energy_change(u, 2.0 * h) / (2.0 * h);
    prop.advance_to(t, u);
    const double exact = -2.0 * kernels::omp::dirichlet(g, prop.conductance(), u);
    const double rel = exact == 0.0 ? std::abs(fd) / std::max(e_minus, 1e-300) : std::abs(fd - exact) / std::abs(exact);
    out.t.push_back(t);
    out.finite_difference.push_back(fd);
    out.exact.push_back(exact);
    out.relative_error.push_back(rel);
    out.max_relative_error = std::max(out.max_relative_error, rel);
  }
  return out;
}

}  // namespace nashlab
