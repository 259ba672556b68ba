#ifndef NASHLAB_HEAT_ENGINE_HPP
#define NASHLAB_HEAT_ENGINE_HPP

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "nashlab/environments.hpp"
#include "nashlab/lattice.hpp"

namespace nashlab {

struct IntegratorConfig {
  /// Bound on the discarded Poisson tail per uniformization step.
  double tolerance = 1e-12;
  /// Sample step of the time grid.
  double dt = 1.0;
  /// Exponent p of the moment N = || |x|_*^{p/2} u ||_2^2.
  double p = 4.0;
  double mass_alarm = 1e-6;
  /// Alarm when the mass on the outer shell |x|_inf = L exceeds this.
  double boundary_alarm = 1e-6;
  /// Times (relative to the start) at which u is stored in full.
  std::vector<double> snapshot_times;
  /// Store u at every grid time (needed by the moderation check).
  bool keep_states = false;
};

struct HeatTrace {
  GeometryPtr geometry;
  double start = 0.0;
  std::uint32_t x0 = 0;
  double p = 4.0;
  std::vector<double> t;  // absolute times
  std::vector<double> energy;
  std::vector<double> dirichlet;
  std::vector<double> moment;
  std::vector<double> lambda;  // 1 v sup_{s<=t} (s - start)^{d/2} E_s over the grid
  std::vector<double> p00;     // u_t(x0)
  std::vector<double> mass;
  std::vector<double> boundary_mass;
  std::vector<std::pair<double, SiteFunction>> snapshots;
  std::vector<std::vector<double>> states;  // filled when keep_states is set
  SiteFunction final_state;
  std::size_t steps = 0;  // uniformization steps taken
  bool mass_alarm = false;
  bool boundary_alarm = false;
  double max_mass_defect = 0.0;
  double max_boundary_mass = 0.0;
  double min_value = kInf;  // smallest entry of u over the grid

  std::size_t size() const { return t.size(); }
  /// Index of the grid time closest to t.
  std::size_t index_of(double time) const;
};

/// start, start + dt, ..., with T appended when it is not on the grid.
std::vector<double> time_grid(double start, double T, double dt);

/// p_{s,.}(x0, .) on the grid of [s, T].
HeatTrace evolve_dynamic(const DynamicEnvironment& env, double s, std::uint32_t x0, double T,
                         const IntegratorConfig& cfg);
HeatTrace evolve_static(const EdgeField& a, std::uint32_t x0, double T, const IntegratorConfig& cfg);
inline HeatTrace evolve_static(const StaticEnvironment& env, std::uint32_t x0, double T, const IntegratorConfig& cfg) {
  return evolve_static(env.a, x0, T, cfg);
}

/// Solves the master equation from u at time s to time t (s <= t <= horizon). Returns the number of steps taken.
std::size_t propagate(const DynamicEnvironment& env, double s, double t, std::vector<double>& u, double tolerance);

/// States at each of the increasing times (all >= s), starting from u0 at time s.
std::vector<std::vector<double>> sample_states(const DynamicEnvironment& env, double s, std::vector<double> u0,
                                               std::span<const double> times, double tolerance);

/// sum_e a(e) (grad u)^2(e)
double dirichlet_energy(const EdgeField& a, const SiteFunction& u);
double dirichlet_energy(const Geometry& g, std::span<const double> a, std::span<const double> u);
/// sum_x |x|_*^p u(x)^2
double moment_N(const SiteFunction& u, double p);
double moment_N(const Geometry& g, std::span<const double> u, double p);

/// p_{0,t}(x, y) forward and p^{(t)}_{0,t}(y, x) in the reversed environment.
std::pair<double, double> reversal_check(const DynamicEnvironment& env, double t, std::uint32_t x, std::uint32_t y,
                                         double tolerance = 1e-13);

struct DerivativeCheck {
  std::vector<double> t;
  std::vector<double> finite_difference;  // (E_{t+h} - E_{t-h}) / 2h
  std::vector<double> exact;              // -2 D_t
  std::vector<double> relative_error;
  double max_relative_error = 0.0;
};

/**
 * Centered differences of E at `count` random times in (s, T), each kept
 * away from environment breakpoints so that E is smooth on [t-h, t+h].
 * E_{t+h} - E_{t-h} is accumulated from the increment of the state rather
 * than by subtracting two energies, which keeps the quotient accurate when
 * E' is tiny next to E.
 */
DerivativeCheck energy_derivative_check(const DynamicEnvironment& env, double s, std::uint32_t x0, double T,
                                        std::size_t count, std::uint64_t seed, double tolerance = 1e-15);

}  // namespace nashlab

#endif  // NASHLAB_HEAT_ENGINE_HPP
