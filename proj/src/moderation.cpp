#include "nashlab/moderation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nashlab {

PowerKernel::PowerKernel(double m) : m_(m), integer_(m == std::floor(m) && m < 64) {
  if (!(m > 3.0)) throw std::invalid_argument("kernel exponent m must exceed 3");
}

double PowerKernel::inv_pow(double x, double n) const {
  const double b = 1.0 + x;
  if (integer_) {
    double r = 1.0;
    for (int i = 0; i < int(n); ++i) r *= b;
    return 1.0 / r;
  }
  return std::pow(b, -n);
}

double PowerKernel::k(double t) const { return inv_pow(t, m_); }

double PowerKernel::K(double t) const {
  return inv_pow(t, m_) + inv_pow(t, m_ - 2) / (m_ - 2) - inv_pow(t, m_ - 1) / (m_ - 1);
}

double PowerKernel::k_integral(double a, double b) const {
  if (b <= a) return 0.0;
  const double hi = std::isinf(b) ? 0.0 : inv_pow(b, m_ - 1);
  return (inv_pow(a, m_ - 1) - hi) / (m_ - 1);
}

double PowerKernel::K_tail(double tau) const {
  return inv_pow(tau, m_ - 1) / (m_ - 1) + inv_pow(tau, m_ - 3) / ((m_ - 2) * (m_ - 3)) -
         inv_pow(tau, m_ - 2) / ((m_ - 1) * (m_ - 2));
}

KernelConstants kernel_constants(const PowerKernel& kernel, const NashExponents& exps) {
  if (!(exps.beta > 0.0)) throw std::invalid_argument("C(K) is undefined for beta = 0 (theta = 1)");
  KernelConstants c;
  c.K1 = kernel.K_norm1();
  c.K01 = kernel.K_norm01();
  const double a = exps.alpha;
  const double b = exps.beta;
  c.CK = std::max(1.0, std::pow(c.K1, a / b) / std::pow(c.K01, (1.0 - a) / b));
  return c;
}

namespace {

// Per-edge change lists in time order, as flat arrays indexed by edge.
struct EdgeTimeline {
  std::vector<std::size_t> offset;
  std::vector<double> time;
  std::vector<double> value;
};

EdgeTimeline build_timeline(const DynamicEnvironment& env) {
  const std::size_t edges = env.geometry()->edge_count();
  EdgeTimeline tl;
  tl.offset.assign(edges + 1, 0);
  for (std::size_t k = 0; k < env.breakpoint_count(); ++k)
    for (const auto& c : env.changes(k)) ++tl.offset[c.edge + 1];
  for (std::size_t e = 0; e < edges; ++e) tl.offset[e + 1] += tl.offset[e];
  tl.time.resize(tl.offset.back());
  tl.value.resize(tl.offset.back());
  std::vector<std::size_t> fill(tl.offset.begin(), tl.offset.end() - 1);
  for (std::size_t k = 0; k < env.breakpoint_count(); ++k) {
    for (const auto& c : env.changes(k)) {
      tl.time[fill[c.edge]] = env.breakpoint_time(k);
      tl.value[fill[c.edge]] = c.value;
      ++fill[c.edge];
    }
  }
  return tl;
}

// int_t^H k_{s-t} a_s ds for one edge whose value is `initial` before its first change.
double edge_integral(const PowerKernel& kernel, double initial, const double* times, const double* values,
                     std::size_t n, double t, double H) {
  // Value in force at t: last change at or before t.
  const std::size_t first = std::size_t(std::upper_bound(times, times + n, t) - times);
  double v = first == 0 ? initial : values[first - 1];
  double lo = t;
  double total = 0.0;
  for (std::size_t j = first; j < n && times[j] < H; ++j) {
    if (v != 0.0) total += v * kernel.k_integral(lo - t, times[j] - t);
    lo = times[j];
    v = values[j];
  }
  if (v != 0.0 && lo < H) total += v * kernel.k_integral(lo - t, H - t);
  return total;
}

}  // namespace

WeightSeries weights_from_env(const DynamicEnvironment& env, const PowerKernel& kernel, std::span<const double> times) {
  const double H = env.horizon();
  for (double t : times)
    if (!(t >= 0.0 && t <= H)) throw std::invalid_argument("weight time outside [0, horizon]");
  const EdgeTimeline tl = build_timeline(env);
  const auto& g = env.geometry();
  const std::size_t edges = g->edge_count();

  WeightSeries ws;
  ws.t.assign(times.begin(), times.end());
  ws.horizon = H;
  ws.w.assign(times.size(), EdgeField(g));
  for (double t : times) ws.tail.push_back(kernel.k_tail(H - t));

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t e = 0; e < std::ptrdiff_t(edges); ++e) {
    const std::size_t lo = tl.offset[std::size_t(e)];
    const std::size_t n = tl.offset[std::size_t(e) + 1] - lo;
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double w2 = edge_integral(kernel, env.initial()[std::size_t(e)], tl.time.data() + lo,
                                      tl.value.data() + lo, n, times[i], H);
      ws.w[i][std::size_t(e)] = std::sqrt(w2);
    }
  }
  return ws;
}

double weight_squared(const DynamicEnvironment& env, const PowerKernel& kernel, std::uint32_t edge, double t) {
  if (edge >= env.geometry()->edge_count()) throw std::invalid_argument("edge out of range");
  if (!(t >= 0.0 && t <= env.horizon())) throw std::invalid_argument("weight time outside [0, horizon]");
  std::vector<double> times, values;
  for (std::size_t k = 0; k < env.breakpoint_count(); ++k)
    for (const auto& c : env.changes(k))
      if (c.edge == edge) {
        times.push_back(env.breakpoint_time(k));
        values.push_back(c.value);
      }
  return edge_integral(kernel, env.initial()[edge], times.data(), values.data(), times.size(), t, env.horizon());
}

ModerationReport check_moderation(const HeatTrace& trace, const WeightSeries& w, const PowerKernel& kernel,
                                  double t_max) {
  const std::size_t n = trace.size();
  if (trace.states.size() != n) throw std::invalid_argument("moderation check needs a trace with stored states");
  if (w.t.size() != n) throw std::invalid_argument("trace and weights must share one grid");
  for (std::size_t k = 0; k < n; ++k)
    if (std::abs(w.t[k] - trace.t[k]) > 1e-9) throw std::invalid_argument("trace and weights must share one grid");

  const Geometry& g = *trace.geometry;
  const double last = trace.t.back();
  const double tail_factor = 4.0 * g.dim();
  ModerationReport rep;
  for (std::size_t k = 0; k < n && trace.t[k] <= t_max + 1e-12; ++k) {
    const auto& u = trace.states[k];
    const auto& wk = w.w[k].values;
    double lhs = 0.0;
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
      const auto& ed = g.edge(e);
      const double d = u[ed.upper] - u[ed.lower];
      lhs += wk[e] * wk[e] * d * d;
    }
    double rhs = 0.0;
    for (std::size_t j = k; j + 1 < n; ++j) {
      const double f0 = kernel.K(trace.t[j] - trace.t[k]) * trace.dirichlet[j];
      const double f1 = kernel.K(trace.t[j + 1] - trace.t[k]) * trace.dirichlet[j + 1];
      rhs += 0.5 * (trace.t[j + 1] - trace.t[j]) * (f0 + f1);
    }
    // Beyond the end of the trace D_s <= 4d E_s <= 4d E_last, E being nonincreasing.
    // The cruder 4d E_t is kept for comparison; its excess decays only like 1/(last - t).
    const double tail_int = kernel.K_tail(last - trace.t[k]);
    const double literal = rhs + tail_factor * trace.energy[k] * tail_int;
    rhs += tail_factor * trace.energy.back() * tail_int;
    if (literal > 0.0) rep.c_emp_literal = std::max(rep.c_emp_literal, lhs / literal);

    double ratio = 0.0;
    if (rhs > 0.0)
      ratio = lhs / rhs;
    else if (lhs > 0.0) {
      ratio = kInf;
      rep.inconsistent = true;
    }
    rep.t.push_back(trace.t[k]);
    rep.lhs.push_back(lhs);
    rep.rhs.push_back(rhs);
    rep.ratio.push_back(ratio);
    rep.c_emp = std::max(rep.c_emp, ratio);
  }
  return rep;
}

double script_Mq(std::span<const double> times, std::span<const double> mq, double T) {
  if (!(T >= 1.0)) throw std::invalid_argument("script M_q needs T >= 1");
  if (times.size() != mq.size() || times.empty()) throw std::invalid_argument("script M_q: bad series");
  if (std::abs(times.front()) > 1e-12) throw std::invalid_argument("script M_q: grid must start at 0");
  auto f = [&](std::size_t k) { return std::isinf(mq[k]) ? 0.0 : 1.0 / (mq[k] * mq[k]); };
  double integral = 0.0;
  double best = kInf;
  for (std::size_t k = 1; k < times.size() && times[k] <= T + 1e-12; ++k) {
    integral += 0.5 * (times[k] - times[k - 1]) * (f(k - 1) + f(k));
    if (times[k] >= 1.0 - 1e-12) best = std::min(best, integral / times[k]);
  }
  if (std::isinf(best)) throw std::invalid_argument("script M_q: no grid time in [1, T]");
  return best > 0.0 ? 1.0 / std::sqrt(best) : kInf;
}

double script_Mq(const WeightSeries& w, double q, double T) {
  std::vector<double> mq;
  mq.reserve(w.t.size());
  for (const auto& wt : w.w) mq.push_back(maximal_Mq(wt, q));
  return script_Mq(w.t, mq, T);
}

BoundReport assemble_bounds(const HeatTrace& trace, const NashExponents& exps, const KernelConstants& kc,
                            double script_mq, std::span<const ReversedSample> reversed, double t_min, double t_max,
                            double cs_tolerance) {
  if (!(exps.beta > 0.0)) throw std::invalid_argument("bounds need beta > 0");
  const double half_d = 0.5 * trace.geometry->dim();
  BoundReport rep;
  rep.CK = kc.CK;
  rep.script_mq = script_mq;
  rep.exponent = 2.0 * exps.alpha / exps.beta;
  rep.energy_bound = kc.CK * std::pow(script_mq, rep.exponent);
  const double lo = std::max(1.0, t_min);
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const double s = trace.t[k] - trace.start;
    if (s < lo - 1e-12 || s > t_max + 1e-12) continue;
    rep.t.push_back(s);
    rep.scaled_energy.push_back(std::pow(s, half_d) * trace.energy[k]);
    rep.C_emp_energy = std::max(rep.C_emp_energy, rep.scaled_energy.back() / rep.energy_bound);
  }

  rep.C_emp_pointwise = reversed.empty() ? std::nan("") : 0.0;
  for (const ReversedSample& r : reversed) {
    const std::size_t kt = trace.index_of(trace.start + r.t);
    const std::size_t kh = trace.index_of(trace.start + r.t / 2);
    if (std::abs(trace.t[kt] - trace.start - r.t) > 1e-9 || std::abs(trace.t[kh] - trace.start - r.t / 2) > 1e-9)
      throw std::invalid_argument("pointwise bound needs t and t/2 on the trace grid");
    const double p = trace.p00[kt];
    const double cs = std::sqrt(trace.energy[kh] * r.energy_half);
    const double scaled = std::pow(r.t, half_d) * p;
    const double bound = kc.CK * std::pow(script_mq * r.script_mq, exps.alpha / exps.beta);
    rep.pointwise_t.push_back(r.t);
    rep.p00.push_back(p);
    rep.cs_bound.push_back(cs);
    rep.scaled_p00.push_back(scaled);
    rep.pointwise_bound.push_back(bound);
    rep.C_emp_pointwise = std::max(rep.C_emp_pointwise, scaled / bound);
    if (p > cs * (1.0 + cs_tolerance)) rep.cauchy_schwarz_holds = false;
    if (cs > 0.0) rep.cauchy_schwarz_worst = std::max(rep.cauchy_schwarz_worst, p / cs);
  }
  return rep;
}

}  // namespace nashlab
