#ifndef NASHLAB_ENVIRONMENTS_HPP
#define NASHLAB_ENVIRONMENTS_HPP

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "nashlab/lattice.hpp"

namespace nashlab {

/// Law of i.i.d. static conductances.
struct StaticLaw {
  enum class Kind { constant, power };
  Kind kind = Kind::constant;
  /// The constant value, or the exponent eta of P[a <= u] = u^eta.
  double parameter = 1.0;

  static StaticLaw constant(double c);
  static StaticLaw power(double eta);
  /// E[a^{-s}] for the power law (eta / (eta - s), infinite for s >= eta), c^{-s} for a constant.
  double inverse_moment(double s) const;
  std::string describe() const;
};

struct StaticEnvironment {
  EdgeField a;
  StaticLaw law;
  std::uint64_t seed = 0;
};

/**
 * i.i.d. conductances. Each edge value is a counter-based function of
 * (seed, lower endpoint coordinates, axis), so boxes of different radii
 * built from one seed agree on their common edges.
 */
StaticEnvironment iid_static(int d, int L, const StaticLaw& law, std::uint64_t seed);

/// Site-swap exclusion dynamics on the torus of side 2L+1.
struct ExclusionTrajectory {
  std::shared_ptr<const Torus> torus;
  double rho = 0.0;
  double horizon = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::uint8_t> initial;
  std::vector<double> swap_time;
  std::vector<std::uint32_t> swap_edge;  // torus edge ids

  std::size_t particle_count() const;
  /// Occupancy after every swap with time <= t.
  std::vector<std::uint8_t> state_at(double t) const;
};

/**
 * Initial state from product Bernoulli(rho); swaps driven by one global clock
 * of rate |torus edges| with a uniformly chosen edge per ring, which is the
 * superposition of independent rate-1 clocks. Every ring is recorded.
 */
ExclusionTrajectory exclusion_simulate(double rho, int d, int L, double T, std::uint64_t seed);

/**
 * Piecewise-constant, right-continuous conductances on the edges of B_L over
 * [0, horizon]. Changes are grouped into breakpoints with strictly
 * increasing times in (0, horizon]; several edges may change at one
 * breakpoint.
 */
class DynamicEnvironment {
 public:
  struct Change {
    std::uint32_t edge;
    double value;
  };

  DynamicEnvironment(EdgeField initial, double horizon);

  static DynamicEnvironment constant(EdgeField a, double horizon) { return DynamicEnvironment(std::move(a), horizon); }

  /// Appends a breakpoint. A time equal to the last breakpoint merges into it; earlier times throw.
  void add_breakpoint(double time, std::span<const Change> changes);

  const GeometryPtr& geometry() const { return initial_.geometry; }
  const EdgeField& initial() const { return initial_; }
  double horizon() const { return horizon_; }
  std::size_t breakpoint_count() const { return times_.size(); }
  double breakpoint_time(std::size_t k) const { return times_[k]; }
  std::span<const Change> changes(std::size_t k) const {
    return {changes_.data() + offsets_[k], offsets_[k + 1] - offsets_[k]};
  }
  std::size_t change_count() const { return changes_.size(); }
  const std::vector<double>& breakpoint_times() const { return times_; }

  /// Conductances at time t (right-continuous).
  EdgeField at(double t) const;

 private:
  EdgeField initial_;
  double horizon_;
  std::vector<double> times_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Change> changes_;
};

/// a_t(e) = 1 iff both endpoints of e are empty; the walk lives on B_L inside the torus.
DynamicEnvironment env_from_exclusion(const ExclusionTrajectory& traj);

/// s -> a_{t-s} on [0, t]. Throws for t outside [0, horizon].
DynamicEnvironment time_reverse(const DynamicEnvironment& env, double t);

/// Random initial values in [0,1] and `events` single-edge changes at uniform times in (0, horizon).
DynamicEnvironment random_piecewise(const GeometryPtr& g, std::size_t events, double horizon, std::uint64_t seed);

/**
 * The trap: on [0, t1) only the edge {0, e_1} is open; on [t1, t2) every edge
 * is open except those touching e_1; from t2 on the first configuration returns.
 */
DynamicEnvironment trap_scenario(const GeometryPtr& g, double t1, double t2, double horizon);

/// CSV (time,edge_id,new_value); the initial field is written as rows at time 0.
void write_environment_csv(std::ostream& os, const DynamicEnvironment& env);
/// Inverse of write_environment_csv. Edges missing from the time-0 rows start at 1.
DynamicEnvironment read_environment_csv(std::istream& is, const GeometryPtr& g, double horizon);
/// CSV (time,edge_id,new_value): torus edge id and the occupancy of its lower endpoint after the swap.
void write_trajectory_csv(std::ostream& os, const ExclusionTrajectory& traj);

}  // namespace nashlab

#endif  // NASHLAB_ENVIRONMENTS_HPP
