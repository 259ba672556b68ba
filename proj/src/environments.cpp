#include "nashlab/environments.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "nashlab/report.hpp"
#include "nashlab/rng.hpp"

namespace nashlab {

StaticLaw StaticLaw::constant(double c) {
  if (!(c >= 0.0 && c <= 1.0)) throw std::invalid_argument("constant conductance must lie in [0,1]");
  return {Kind::constant, c};
}

StaticLaw StaticLaw::power(double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("power law exponent eta must be positive");
  return {Kind::power, eta};
}

double StaticLaw::inverse_moment(double s) const {
  if (kind == Kind::constant) return std::pow(parameter, -s);
  return s < parameter ? parameter / (parameter - s) : kInf;
}

std::string StaticLaw::describe() const {
  std::ostringstream os;
  if (kind == Kind::constant)
    os << "constant(" << parameter << ")";
  else
    os << "power(" << parameter << ")";
  return os.str();
}

namespace {

double edge_uniform(std::uint64_t stream_seed, const Site& lower, int axis) {
  std::uint64_t key = 0;
  for (int i = 0; i < kMaxDim; ++i) key = (key << 20) | std::uint64_t(lower[i] + (1 << 19));
  key = (key << 2) | std::uint64_t(axis);
  const std::uint64_t h = splitmix64(stream_seed ^ splitmix64(key));
  return 1.0 - double(h >> 11) * 0x1.0p-53;  // (0, 1]
}

}  // namespace

StaticEnvironment iid_static(int d, int L, const StaticLaw& law, std::uint64_t seed) {
  if (law.kind == StaticLaw::Kind::power && !(law.parameter > 0.0))
    throw std::invalid_argument("power law exponent eta must be positive");
  auto g = make_geometry(d, L);
  StaticEnvironment env{EdgeField(g), law, seed};
  const std::uint64_t stream = derive_seed(seed, Stream::environment);
  for (std::size_t e = 0; e < g->edge_count(); ++e) {
    if (law.kind == StaticLaw::Kind::constant) {
      env.a[e] = law.parameter;
    } else {
      const auto& ed = g->edge(e);
      // P[U^{1/eta} <= u] = u^eta
      env.a[e] = std::pow(edge_uniform(stream, g->site(ed.lower), ed.axis), 1.0 / law.parameter);
    }
  }
  return env;
}

std::size_t ExclusionTrajectory::particle_count() const {
  return std::size_t(std::count(initial.begin(), initial.end(), std::uint8_t(1)));
}

std::vector<std::uint8_t> ExclusionTrajectory::state_at(double t) const {
  std::vector<std::uint8_t> eta = initial;
  for (std::size_t k = 0; k < swap_time.size() && swap_time[k] <= t; ++k)
    std::swap(eta[torus->edge_lower(swap_edge[k])], eta[torus->edge_upper(swap_edge[k])]);
  return eta;
}

ExclusionTrajectory exclusion_simulate(double rho, int d, int L, double T, std::uint64_t seed) {
  if (!(rho >= 0.0 && rho < 1.0)) throw std::invalid_argument("density rho must lie in [0,1)");
  if (!(T >= 0.0)) throw std::invalid_argument("horizon must be nonnegative");
  ExclusionTrajectory traj;
  traj.torus = std::make_shared<const Torus>(d, L);
  traj.rho = rho;
  traj.horizon = T;
  traj.seed = seed;

  Rng init(derive_seed(seed, Stream::initial_state));
  traj.initial.resize(traj.torus->site_count());
  for (auto& v : traj.initial) v = init.bernoulli(rho) ? 1 : 0;

  Rng clock(derive_seed(seed, Stream::clock));
  const std::size_t edges = traj.torus->edge_count();
  const double rate = double(edges);
  traj.swap_time.reserve(std::size_t(rate * T * 1.05) + 16);
  traj.swap_edge.reserve(std::size_t(rate * T * 1.05) + 16);
  double t = 0.0;
  for (;;) {
    t += clock.exponential(rate);
    if (t > T) break;
    traj.swap_time.push_back(t);
    traj.swap_edge.push_back(std::uint32_t(clock.below(edges)));
  }
  return traj;
}

DynamicEnvironment::DynamicEnvironment(EdgeField initial, double horizon)
    : initial_(std::move(initial)), horizon_(horizon) {
  if (!(horizon >= 0.0)) throw std::invalid_argument("horizon must be nonnegative");
  for (double v : initial_.values)
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("conductances must lie in [0,1]");
}

void DynamicEnvironment::add_breakpoint(double time, std::span<const Change> changes) {
  if (!(time > 0.0) || time > horizon_) throw std::invalid_argument("breakpoint time outside (0, horizon]");
  for (const Change& c : changes) {
    if (c.edge >= initial_.size()) throw std::invalid_argument("breakpoint edge out of range");
    if (!(c.value >= 0.0 && c.value <= 1.0)) throw std::invalid_argument("conductances must lie in [0,1]");
  }
  if (!times_.empty() && time < times_.back()) throw std::invalid_argument("breakpoint times must increase");
  if (times_.empty() || time > times_.back()) {
    times_.push_back(time);
    offsets_.push_back(offsets_.back());
  }
  changes_.insert(changes_.end(), changes.begin(), changes.end());
  offsets_.back() = changes_.size();
}

EdgeField DynamicEnvironment::at(double t) const {
  EdgeField a = initial_;
  for (std::size_t k = 0; k < times_.size() && times_[k] <= t; ++k)
    for (const Change& c : changes(k)) a[c.edge] = c.value;
  return a;
}

DynamicEnvironment env_from_exclusion(const ExclusionTrajectory& traj) {
  const Torus& torus = *traj.torus;
  auto g = make_geometry(torus.dim(), torus.radius());
  const int d = g->dim();

  // Box edges incident to each site (sites share the torus indexing).
  std::vector<std::vector<std::uint32_t>> incident(g->site_count());
  for (std::size_t e = 0; e < g->edge_count(); ++e) {
    incident[g->edge(e).lower].push_back(std::uint32_t(e));
    incident[g->edge(e).upper].push_back(std::uint32_t(e));
  }

  std::vector<std::uint8_t> eta = traj.initial;
  auto open = [&](std::size_t e) { return (eta[g->edge(e).lower] == 0 && eta[g->edge(e).upper] == 0) ? 1.0 : 0.0; };
  EdgeField a(g);
  for (std::size_t e = 0; e < g->edge_count(); ++e) a[e] = open(e);
  DynamicEnvironment env(a, traj.horizon);

  std::vector<DynamicEnvironment::Change> changes;
  changes.reserve(4 * std::size_t(d));
  for (std::size_t k = 0; k < traj.swap_time.size(); ++k) {
    const std::uint32_t x = torus.edge_lower(traj.swap_edge[k]);
    const std::uint32_t y = torus.edge_upper(traj.swap_edge[k]);
    if (eta[x] == eta[y]) continue;
    std::swap(eta[x], eta[y]);
    changes.clear();
    for (std::uint32_t s : {x, y}) {
      for (std::uint32_t e : incident[s]) {
        const double v = open(e);
        if (v != a[e]) {
          a[e] = v;
          changes.push_back({e, v});
        }
      }
    }
    if (!changes.empty()) env.add_breakpoint(traj.swap_time[k], changes);
  }
  return env;
}

DynamicEnvironment time_reverse(const DynamicEnvironment& env, double t) {
  if (!(t >= 0.0) || t > env.horizon()) throw std::invalid_argument("time_reverse needs 0 <= t <= horizon");
  EdgeField a = env.initial();
  std::vector<std::vector<DynamicEnvironment::Change>> undo;
  std::size_t k = 0;
  for (; k < env.breakpoint_count() && env.breakpoint_time(k) < t; ++k) {
    std::vector<DynamicEnvironment::Change> old;
    for (const auto& c : env.changes(k)) {
      old.push_back({c.edge, a[c.edge]});
      a[c.edge] = c.value;
    }
    // Later entries for the same edge must win when replayed, so restore in reverse order.
    std::reverse(old.begin(), old.end());
    undo.push_back(std::move(old));
  }
  DynamicEnvironment rev(a, t);
  for (std::size_t j = k; j-- > 0;) rev.add_breakpoint(t - env.breakpoint_time(j), undo[j]);
  return rev;
}

DynamicEnvironment random_piecewise(const GeometryPtr& g, std::size_t events, double horizon, std::uint64_t seed) {
  Rng rng(derive_seed(seed, Stream::environment));
  EdgeField a(g);
  for (auto& v : a.values) v = rng.uniform();
  std::vector<double> times(events);
  for (auto& t : times) t = horizon * rng.uniform_open0();
  std::sort(times.begin(), times.end());
  DynamicEnvironment env(a, horizon);
  for (double t : times) {
    const DynamicEnvironment::Change c{std::uint32_t(rng.below(g->edge_count())), rng.uniform()};
    env.add_breakpoint(t, std::span(&c, 1));
  }
  return env;
}

DynamicEnvironment trap_scenario(const GeometryPtr& g, double t1, double t2, double horizon) {
  if (!(0.0 < t1 && t1 < t2 && t2 < horizon)) throw std::invalid_argument("trap scenario needs 0 < t1 < t2 < horizon");
  const std::uint32_t origin = g->origin();
  const std::uint32_t z = g->index(Site{1, 0, 0});
  const std::uint32_t pair = g->edge_between(origin, z);
  EdgeField paired(g, 0.0);
  paired[pair] = 1.0;
  EdgeField isolated(g, 1.0);
  for (std::size_t e = 0; e < g->edge_count(); ++e)
    if (g->edge(e).lower == z || g->edge(e).upper == z) isolated[e] = 0.0;

  DynamicEnvironment env(paired, horizon);
  std::vector<DynamicEnvironment::Change> to_isolated, to_paired;
  for (std::size_t e = 0; e < g->edge_count(); ++e) {
    if (paired[e] != isolated[e]) {
      to_isolated.push_back({std::uint32_t(e), isolated[e]});
      to_paired.push_back({std::uint32_t(e), paired[e]});
    }
  }
  env.add_breakpoint(t1, to_isolated);
  env.add_breakpoint(t2, to_paired);
  return env;
}

void write_environment_csv(std::ostream& os, const DynamicEnvironment& env) {
  os << "time,edge_id,new_value\n";
  const EdgeField& a = env.initial();
  for (std::size_t e = 0; e < a.size(); ++e) os << "0," << e << ',' << format_double(a[e]) << '\n';
  for (std::size_t k = 0; k < env.breakpoint_count(); ++k) {
    const std::string t = format_double(env.breakpoint_time(k));
    for (const auto& c : env.changes(k)) os << t << ',' << c.edge << ',' << format_double(c.value) << '\n';
  }
}

DynamicEnvironment read_environment_csv(std::istream& is, const GeometryPtr& g, double horizon) {
  std::string line;
  std::getline(is, line);
  if (line.rfind("time,edge_id,new_value", 0) != 0) throw std::runtime_error("environment CSV: bad header");
  EdgeField a(g, 1.0);
  struct Row {
    double t;
    std::uint32_t e;
    double v;
  };
  std::vector<Row> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    Row r{};
    char c1 = 0, c2 = 0;
    if (!(ls >> r.t >> c1 >> r.e >> c2 >> r.v) || c1 != ',' || c2 != ',')
      throw std::runtime_error("environment CSV: malformed row '" + line + "'");
    if (r.e >= g->edge_count()) throw std::runtime_error("environment CSV: edge id out of range");
    if (r.t == 0.0)
      a[r.e] = r.v;
    else
      rows.push_back(r);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& x, const Row& y) { return x.t < y.t; });
  DynamicEnvironment env(a, horizon);
  for (const Row& r : rows) {
    const DynamicEnvironment::Change c{r.e, r.v};
    env.add_breakpoint(r.t, std::span(&c, 1));
  }
  return env;
}

void write_trajectory_csv(std::ostream& os, const ExclusionTrajectory& traj) {
  os << "time,edge_id,new_value\n";
  std::vector<std::uint8_t> eta = traj.initial;
  for (std::size_t k = 0; k < traj.swap_time.size(); ++k) {
    const std::uint32_t x = traj.torus->edge_lower(traj.swap_edge[k]);
    const std::uint32_t y = traj.torus->edge_upper(traj.swap_edge[k]);
    std::swap(eta[x], eta[y]);
    os << format_double(traj.swap_time[k]) << ',' << traj.swap_edge[k] << ',' << int(eta[x]) << '\n';
  }
}

}  // namespace nashlab
