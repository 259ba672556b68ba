#include "nashlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "nashlab/report.hpp"
#include "nashlab/rng.hpp"

namespace nashlab {

void ExperimentSpec::validate() const {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("dim must be 1, 2 or 3");
  if (radius < 1) throw std::invalid_argument("radius must be >= 1");
  if (!(rho >= 0.0 && rho < 1.0)) throw std::invalid_argument("rho must lie in [0, 1)");
  if (law != "power" && law != "constant" && law != "trap") throw std::invalid_argument("unknown static law " + law);
  if (law == "power" && !(eta > 0.0)) throw std::invalid_argument("eta must be positive");
  if (law != "power" && !(level >= 0.0 && level <= 1.0)) throw std::invalid_argument("level must lie in [0, 1]");
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(kernel_m > 3.0)) throw std::invalid_argument("kernel-m must exceed 3");
  if (reals < 1) throw std::invalid_argument("reals must be >= 1");
  if (!(tolerance > 0.0 && tolerance <= 1e-6)) throw std::invalid_argument("tolerance must lie in (0, 1e-6]");
  if (!(tmin >= 0.0)) throw std::invalid_argument("tmin must be nonnegative");
  if (!(lookahead >= 0.0)) throw std::invalid_argument("lookahead must be nonnegative");
  nash_exponents(dim, p, q, theta);  // throws on p, q or theta out of range
}

nlohmann::json to_json(const ExperimentSpec& s) {
  return {{"name", s.name},
          {"dim", s.dim},
          {"radius", s.radius},
          {"rho", s.rho},
          {"law", s.law},
          {"eta", s.eta},
          {"level", s.level},
          {"horizon", s.horizon},
          {"dt", s.dt},
          {"p", s.p},
          {"q", json_number(s.q)},
          {"theta", s.theta},
          {"kernel_m", s.kernel_m},
          {"reals", s.reals},
          {"seed", s.seed},
          {"tmin", s.tmin},
          {"lookahead", s.lookahead},
          {"tolerance", s.tolerance},
          {"pointwise", s.pointwise},
          {"tail_times", s.tail_times},
          {"corpus", s.corpus},
          {"lambdas", s.lambdas},
          {"svg", s.svg}};
}

ExperimentSpec spec_from_json(const nlohmann::json& j) {
  ExperimentSpec s;
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  get("name", s.name);
  get("dim", s.dim);
  get("radius", s.radius);
  get("rho", s.rho);
  get("law", s.law);
  get("eta", s.eta);
  get("level", s.level);
  get("horizon", s.horizon);
  get("dt", s.dt);
  get("p", s.p);
  if (j.contains("q")) s.q = j.at("q").is_string() ? kInf : j.at("q").get<double>();
  get("theta", s.theta);
  get("kernel_m", s.kernel_m);
  get("reals", s.reals);
  get("seed", s.seed);
  get("tmin", s.tmin);
  get("lookahead", s.lookahead);
  get("tolerance", s.tolerance);
  get("pointwise", s.pointwise);
  get("tail_times", s.tail_times);
  get("corpus", s.corpus);
  get("lambdas", s.lambdas);
  get("svg", s.svg);
  return s;
}

namespace {

double quantile(std::vector<double> v, double level) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const double pos = level * double(v.size() - 1);
  const auto lo = std::size_t(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - double(lo)) * (v[hi] - v[lo]);
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? std::nan("") : s / double(v.size());
}

IntegratorConfig integrator(const ExperimentSpec& spec) {
  IntegratorConfig cfg;
  cfg.tolerance = spec.tolerance;
  cfg.dt = spec.dt;
  cfg.p = spec.p;
  return cfg;
}

std::uint64_t realization_seed(const ExperimentSpec& spec, std::size_t r) {
  return derive_seed(spec.seed, Stream::realization, r);
}

}  // namespace

MomentSummary summarize(const std::vector<const HeatTrace*>& traces, double tmin, double T) {
  MomentSummary m;
  if (traces.empty()) return m;
  const HeatTrace& ref = *traces.front();
  for (const HeatTrace* tr : traces)
    if (tr->size() != ref.size()) throw std::invalid_argument("summarize needs traces on one grid");
  const double half_d = 0.5 * ref.geometry->dim();

  std::vector<std::size_t> y_index;
  for (std::size_t k = 0; k < ref.size(); ++k) {
    const double s = ref.t[k] - ref.start;
    if (s >= 1.0 - 1e-12 && s <= T + 1e-12) {
      y_index.push_back(k);
      m.Y_t.push_back(s);
    }
  }
  m.sup_eps_mean.assign(m.epsilons.size(), 0.0);
  std::vector<std::vector<double>> y_values(y_index.size());
  for (const HeatTrace* tr : traces) {
    double x_hat = 0.0;
    for (std::size_t k = 0; k < tr->size(); ++k) {
      const double s = tr->t[k] - tr->start;
      if (s >= tmin - 1e-12 && s <= T + 1e-12 && s > 0.0) x_hat = std::max(x_hat, std::pow(s, half_d) * tr->energy[k]);
    }
    m.X_hat.push_back(x_hat);
    double sup_y = 0.0;
    std::vector<double> sup_eps(m.epsilons.size(), 0.0);
    for (std::size_t i = 0; i < y_index.size(); ++i) {
      const double s = m.Y_t[i];
      const double p = tr->p00[y_index[i]];
      y_values[i].push_back(std::pow(s, half_d) * p);
      sup_y = std::max(sup_y, std::pow(s, half_d) * p);
      for (std::size_t j = 0; j < m.epsilons.size(); ++j)
        sup_eps[j] = std::max(sup_eps[j], std::pow(s, half_d - m.epsilons[j]) * p);
    }
    m.sup_Y.push_back(sup_y);
    for (std::size_t j = 0; j < m.epsilons.size(); ++j) m.sup_eps_mean[j] += sup_eps[j] / double(traces.size());
    m.lambda_T.push_back(tr->lambda[tr->index_of(tr->start + T)]);
  }
  for (double r : m.orders) {
    double s = 0.0;
    for (double x : m.X_hat) s += std::pow(x, r);
    s /= double(m.X_hat.size());
    m.moments.push_back(s);
    m.moment_roots.push_back(std::pow(s, 1.0 / r));
  }
  for (double q : m.quantile_levels) m.quantiles.push_back(quantile(m.X_hat, q));
  for (const auto& v : y_values) {
    m.Y_mean.push_back(mean_of(v));
    m.Y_median.push_back(quantile(v, 0.5));
  }
  return m;
}

nlohmann::json to_json(const MomentSummary& m) {
  return {{"X_hat", json_array(m.X_hat)},
          {"orders", json_array(m.orders)},
          {"moments", json_array(m.moments)},
          {"moment_roots", json_array(m.moment_roots)},
          {"quantile_levels", json_array(m.quantile_levels)},
          {"quantiles", json_array(m.quantiles)},
          {"Y_t", json_array(m.Y_t)},
          {"Y_mean", json_array(m.Y_mean)},
          {"Y_median", json_array(m.Y_median)},
          {"epsilons", json_array(m.epsilons)},
          {"sup_eps_mean", json_array(m.sup_eps_mean)},
          {"sup_Y", json_array(m.sup_Y)},
          {"lambda_T", json_array(m.lambda_T)}};
}

EdgeField static_environment(const ExperimentSpec& spec, std::size_t realization) {
  if (spec.law == "power")
    return iid_static(spec.dim, spec.radius, StaticLaw::power(spec.eta), realization_seed(spec, realization)).a;
  auto g = make_geometry(spec.dim, spec.radius);
  if (spec.law == "constant") return EdgeField(g, spec.level);
  EdgeField a(g, 1.0);
  for (std::size_t e = 0; e < g->edge_count(); ++e) {
    const bool in_lo = g->shell(g->edge(e).lower) <= 1;
    const bool in_hi = g->shell(g->edge(e).upper) <= 1;
    if (in_lo != in_hi) a[e] = spec.level;
  }
  return a;
}

StaticRunResult run_static_moment(const ExperimentSpec& spec) {
  spec.validate();
  StaticRunResult res;
  if (spec.law == "power" && spec.eta <= spec.q / 2)
    res.warning = "eta <= q/2: the moment condition E[a^{-q/2}] < inf fails; negative control";
  res.traces.resize(spec.reals);
  const IntegratorConfig cfg = integrator(spec);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t r = 0; r < std::ptrdiff_t(spec.reals); ++r) {
    const EdgeField a = static_environment(spec, std::size_t(r));
    res.traces[std::size_t(r)] = evolve_static(a, a.geometry->origin(), spec.horizon, cfg);
  }
  std::vector<const HeatTrace*> ptrs;
  for (const auto& t : res.traces) ptrs.push_back(&t);
  res.summary = summarize(ptrs, spec.tmin, spec.horizon);
  return res;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) return {std::nan(""), std::nan("")};
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = double(a.size()), nb = double(b.size());
  std::size_t i = 0, j = 0;
  double D = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    D = std::max(D, std::abs(double(i) / na - double(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  const double lambda = (ne + 0.12 + 0.11 / ne) * D;
  double p = 0.0;
  if (lambda < 0.2) {
    p = 1.0;
  } else {
    for (int k = 1; k <= 100; ++k) p += 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
    p = std::clamp(p, 0.0, 1.0);
  }
  return {D, p};
}

ExclusionRealization run_exclusion_realization(const ExperimentSpec& spec, std::size_t index) {
  ExclusionRealization out;
  out.index = index;
  out.seed = realization_seed(spec, index);
  out.energy_half_reversed = std::nan("");

  const double T = spec.horizon;
  const double H = T + spec.lookahead;
  const auto traj = exclusion_simulate(spec.rho, spec.dim, spec.radius, H, out.seed);
  const DynamicEnvironment env = env_from_exclusion(traj);
  out.environment_breakpoints = env.breakpoint_count();
  const std::uint32_t origin = env.geometry()->origin();
  const PowerKernel kernel(spec.kernel_m);
  const NashExponents exps = nash_exponents(spec.dim, spec.p, spec.q, spec.theta);

  IntegratorConfig cfg = integrator(spec);
  cfg.keep_states = true;
  out.forward = evolve_dynamic(env, 0.0, origin, H, cfg);
  if (out.forward.mass_alarm) {
    out.aborted = true;
    out.diagnostic = "mass defect " + format_double(out.forward.max_mass_defect) + " exceeds the alarm threshold";
    out.forward.states.clear();
    return out;
  }
  const WeightSeries w = weights_from_env(env, kernel, out.forward.t);
  out.moderation = check_moderation(out.forward, w, kernel, T);
  out.forward.states.clear();
  out.forward.states.shrink_to_fit();
  const double smq = script_Mq(w, spec.q, T);
  out.energy_half_forward = out.forward.energy[out.forward.index_of(T / 2)];

  std::vector<ReversedSample> reversed;
  if (spec.pointwise) {
    std::vector<double> times;
    for (double t = 2.0; t < T; t *= 2.0) times.push_back(t);
    times.push_back(T);
    IntegratorConfig rcfg = integrator(spec);
    for (double t : times) {
      const double half = t / 2;
      if (half < 1.0) continue;
      const double steps = half / spec.dt;
      if (std::abs(steps - std::round(steps)) > 1e-9) continue;  // t/2 must lie on the grid
      const DynamicEnvironment rev = time_reverse(env, t);
      const HeatTrace back = evolve_dynamic(rev, 0.0, origin, half, rcfg);
      if (back.mass_alarm) {
        out.aborted = true;
        out.diagnostic = "mass defect in the reversed trace at t = " + format_double(t);
        return out;
      }
      const WeightSeries wr = weights_from_env(rev, kernel, back.t);
      reversed.push_back({t, back.energy.back(), script_Mq(wr, spec.q, half)});
      if (t == T) out.energy_half_reversed = back.energy.back();
    }
  }
  std::optional<KernelConstants> kc;
  if (exps.beta > 0.0) {
    kc = kernel_constants(kernel, exps);
    out.bounds = assemble_bounds(out.forward, exps, *kc, smq, reversed, 1.0, T);
  }
  return out;
}

ExclusionResult run_exclusion(const ExperimentSpec& spec) {
  spec.validate();
  ExclusionResult res;
  res.realizations.resize(spec.reals);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t r = 0; r < std::ptrdiff_t(spec.reals); ++r)
    res.realizations[std::size_t(r)] = run_exclusion_realization(spec, std::size_t(r));

  std::vector<const HeatTrace*> ptrs;
  std::vector<double> fwd, rev;
  for (const auto& r : res.realizations) {
    if (r.aborted) continue;
    ptrs.push_back(&r.forward);
    res.c_emp_max = std::max(res.c_emp_max, r.moderation.c_emp);
    fwd.push_back(r.energy_half_forward);
    if (std::isfinite(r.energy_half_reversed)) rev.push_back(r.energy_half_reversed);
  }
  res.summary = summarize(ptrs, spec.tmin, spec.horizon);
  res.ks = ks_two_sample(fwd, rev);
  return res;
}

TailTable run_tail_estimate(const ExperimentSpec& spec) {
  spec.validate();
  TailTable tab;
  tab.t = spec.tail_times;
  std::sort(tab.t.begin(), tab.t.end());
  if (tab.t.empty() || tab.t.front() <= 0.0) throw std::invalid_argument("tail times must be positive");
  const double H = tab.t.back() + spec.lookahead;
  const PowerKernel kernel(spec.kernel_m);
  std::vector<std::vector<std::uint8_t>> below(spec.reals, std::vector<std::uint8_t>(tab.t.size()));
  std::vector<double> w0(spec.reals);

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t r = 0; r < std::ptrdiff_t(spec.reals); ++r) {
    const auto traj = exclusion_simulate(spec.rho, spec.dim, spec.radius, H, realization_seed(spec, std::size_t(r)));
    const DynamicEnvironment env = env_from_exclusion(traj);
    const Geometry& g = *env.geometry();
    const std::uint32_t e0 = g.edge_between(g.origin(), g.index(Site{1, 0, 0}));
    // Occupation time of the open state, accumulated along the edge's timeline.
    double value = env.initial()[e0];
    double last = 0.0, integral = 0.0;
    std::size_t next_t = 0;
    auto flush_until = [&](double until) {
      while (next_t < tab.t.size() && tab.t[next_t] <= until) {
        below[std::size_t(r)][next_t] = integral + value * (tab.t[next_t] - last) <= 1.0;
        ++next_t;
      }
    };
    for (std::size_t k = 0; k < env.breakpoint_count(); ++k) {
      for (const auto& c : env.changes(k)) {
        if (c.edge != e0) continue;
        const double tk = env.breakpoint_time(k);
        flush_until(tk);
        integral += value * (tk - last);
        last = tk;
        value = c.value;
      }
    }
    flush_until(kInf);
    w0[std::size_t(r)] = std::sqrt(weight_squared(env, kernel, e0, 0.0));
  }

  const double n = double(spec.reals);
  for (std::size_t i = 0; i < tab.t.size(); ++i) {
    double hits = 0.0;
    for (const auto& b : below) hits += b[i];
    const double p = hits / n;
    tab.probability.push_back(p);
    tab.stderr_.push_back(std::sqrt(p * (1.0 - p) / n));
  }
  for (double u : tab.u) {
    double hits = 0.0;
    for (double w : w0) hits += w <= u;
    const double p = hits / n;
    tab.weight_probability.push_back(p);
    tab.weight_stderr.push_back(std::sqrt(p * (1.0 - p) / n));
  }
  return tab;
}

DynamicRunResult run_dynamic(const ExperimentSpec& spec, const DynamicEnvironment& env) {
  if (!(spec.dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const double T = std::min(spec.horizon, env.horizon());
  IntegratorConfig cfg = integrator(spec);
  for (std::size_t k = 0; k < env.breakpoint_count() && k < 16; ++k)
    if (env.breakpoint_time(k) <= T) cfg.snapshot_times.push_back(env.breakpoint_time(k));
  cfg.snapshot_times.push_back(T);
  DynamicRunResult res;
  const std::uint32_t origin = env.geometry()->origin();
  res.trace = evolve_dynamic(env, 0.0, origin, T, cfg);
  res.derivative = energy_derivative_check(env, 0.0, origin, T, 20, spec.seed);
  return res;
}

std::vector<InequalityReport> run_inequality_suite(const ExperimentSpec& spec) {
  spec.validate();
  std::vector<InequalityReport> out;
  const auto g = make_geometry(spec.dim, spec.radius);
  const std::uint64_t corpus_seed = derive_seed(spec.seed, Stream::corpus);
  const double tc = theta_c(spec.dim, spec.p, spec.q);
  std::vector<double> thetas{spec.theta, 0.6, 1.0};
  thetas.erase(std::remove_if(thetas.begin(), thetas.end(), [&](double t) { return t < tc; }), thetas.end());
  std::sort(thetas.begin(), thetas.end());
  thetas.erase(std::unique(thetas.begin(), thetas.end()), thetas.end());

  const EdgeField ones(g, 1.0);
  EdgeField root = iid_static(spec.dim, spec.radius, StaticLaw::power(spec.eta), spec.seed).a;
  for (double& v : root.values) v = std::sqrt(v);
  for (double th : thetas) {
    const NashExponents exps = nash_exponents(spec.dim, spec.p, spec.q, th);
    auto a = nash_sweep(g, ones, exps, spec.corpus, corpus_seed);
    a.name += "[w=1]";
    out.push_back(a);
    auto b = nash_sweep(g, root, exps, spec.corpus, corpus_seed);
    b.name += "[w=sqrt(a),eta=" + format_double(spec.eta) + "]";
    out.push_back(b);
  }
  if (spec.dim >= 2) {
    out.push_back(poincare_sweep(g, 0.5 * (1.0 + spec.dim), spec.corpus, corpus_seed));
    out.push_back(isoperimetric_sweep(*g, spec.corpus, corpus_seed));
  }
  const int small = std::min(spec.radius, 8);
  const auto gs = make_geometry(spec.dim, small);
  out.push_back(hls_sweep(gs, std::min<std::size_t>(spec.corpus, 100), corpus_seed));
  out.push_back(path_count_report(*gs));
  if (spec.dim == 2) out.push_back(isoperimetric_exhaustive_b1());
  return out;
}

MaximalResult run_maximal(const ExperimentSpec& spec) {
  if (spec.dim < 1 || spec.dim > kMaxDim || spec.radius < 1 || spec.reals < 1)
    throw std::invalid_argument("maximal run needs 1 <= dim <= 3, radius >= 1, reals >= 1");
  MaximalResult res;
  const std::uint64_t s = derive_seed(spec.seed, Stream::field);
  for (const FieldLaw& law : {FieldLaw::exponential(1.0), FieldLaw::pareto(1.5)}) {
    auto rows = weak11_experiment(law, spec.dim, spec.radius, spec.lambdas, spec.reals, s);
    res.rows.insert(res.rows.end(), rows.begin(), rows.end());
    for (double p : {2.0, 4.0, kInf}) res.rows.push_back(lp_maximal_ratio(law, spec.dim, spec.radius, p, spec.reals, s));
  }
  const std::size_t fields = std::min<std::size_t>(spec.reals, 1000);
  for (std::size_t i = 0; i < fields; ++i) {
    const StationaryField g = sample_field(spec.dim, spec.radius, FieldLaw::exponential(1.0),
                                           derive_seed(spec.seed, Stream::field, i + 1));
    ++res.jensen_fields;
    if (!jensen_holds(g)) ++res.jensen_failures;
  }
  return res;
}

namespace {

void prepare(const std::filesystem::path& dir, const ExperimentSpec& spec) {
  std::filesystem::create_directories(dir);
  write_json(dir / "spec.json", to_json(spec));
}

std::string trace_csv(const HeatTrace& tr) {
  std::ostringstream os;
  write_trace_csv(os, tr);
  return os.str();
}

std::string index_name(const char* stem, std::size_t i, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%04zu%s", stem, i, ext);
  return buf;
}

Series scaled_energy_series(const HeatTrace& tr, const std::string& name) {
  Series s{name, {}, {}};
  const double half_d = 0.5 * tr.geometry->dim();
  for (std::size_t k = 0; k < tr.size(); ++k) {
    const double t = tr.t[k] - tr.start;
    if (t <= 0.0) continue;
    s.x.push_back(t);
    s.y.push_back(std::pow(t, half_d) * tr.energy[k]);
  }
  return s;
}

constexpr std::size_t kChartSeries = 6;

}  // namespace

void write_outputs(const std::filesystem::path& dir, const ExperimentSpec& spec, const StaticRunResult& r) {
  prepare(dir, spec);
  for (std::size_t i = 0; i < r.traces.size(); ++i) write_text(dir / index_name("trace", i, ".csv"), trace_csv(r.traces[i]));
  nlohmann::json summary = {{"experiment", "static-moment"}, {"summary", to_json(r.summary)}};
  if (!r.warning.empty()) summary["warning"] = r.warning;
  bool alarm = false;
  for (const auto& t : r.traces) alarm = alarm || t.mass_alarm || t.boundary_alarm;
  summary["truncation_alarm"] = alarm;
  write_json(dir / "summary.json", summary);
  if (spec.svg) {
    std::vector<Series> ss;
    for (std::size_t i = 0; i < r.traces.size() && i < kChartSeries; ++i)
      ss.push_back(scaled_energy_series(r.traces[i], "realization " + std::to_string(i)));
    write_text(dir / "scaled_energy.svg", svg_line_chart("t^{d/2} E_t", "t", "t^{d/2} E_t", ss));
  }
}

void write_outputs(const std::filesystem::path& dir, const ExperimentSpec& spec, const ExclusionResult& r) {
  prepare(dir, spec);
  nlohmann::json reals = nlohmann::json::array();
  for (const auto& x : r.realizations) {
    nlohmann::json j = {{"index", x.index},
                        {"seed", x.seed},
                        {"aborted", x.aborted},
                        {"breakpoints", x.environment_breakpoints},
                        {"energy_half_forward", json_number(x.energy_half_forward)},
                        {"energy_half_reversed", json_number(x.energy_half_reversed)}};
    if (x.aborted) {
      j["diagnostic"] = x.diagnostic;
    } else {
      write_text(dir / index_name("trace", x.index, ".csv"), trace_csv(x.forward));
      write_json(dir / index_name("moderation", x.index, ".json"), to_json(x.moderation, &x.bounds));
      j["c_emp"] = json_number(x.moderation.c_emp);
      j["C_emp_energy"] = json_number(x.bounds.C_emp_energy);
      j["C_emp_pointwise"] = json_number(x.bounds.C_emp_pointwise);
      j["cauchy_schwarz_holds"] = x.bounds.cauchy_schwarz_holds;
      j["boundary_alarm"] = x.forward.boundary_alarm;
      j["max_boundary_mass"] = json_number(x.forward.max_boundary_mass);
    }
    reals.push_back(j);
  }
  write_json(dir / "summary.json", {{"experiment", "exclusion"},
                                    {"summary", to_json(r.summary)},
                                    {"c_emp_max", json_number(r.c_emp_max)},
                                    {"ks_statistic", json_number(r.ks.statistic)},
                                    {"ks_p_value", json_number(r.ks.p_value)},
                                    {"realizations", reals}});
  if (spec.svg) {
    std::vector<Series> energy, ratio;
    for (const auto& x : r.realizations) {
      if (x.aborted || energy.size() >= kChartSeries) continue;
      const std::string name = "seed #" + std::to_string(x.index);
      energy.push_back(scaled_energy_series(x.forward, name));
      ratio.push_back({name, x.moderation.t, x.moderation.ratio});
    }
    write_text(dir / "scaled_energy.svg", svg_line_chart("t^{d/2} E_t", "t", "t^{d/2} E_t", energy));
    write_text(dir / "moderation_ratio.svg",
               svg_line_chart("moderation ratio", "t", "||w grad u||^2 / Dbar", ratio, true));
  }
}

void write_outputs(const std::filesystem::path& dir, const ExperimentSpec& spec, const TailTable& r) {
  prepare(dir, spec);
  std::ostringstream os;
  os << "t,probability,stderr\n";
  for (std::size_t i = 0; i < r.t.size(); ++i)
    os << format_double(r.t[i]) << ',' << format_double(r.probability[i]) << ',' << format_double(r.stderr_[i]) << '\n';
  write_text(dir / "tail.csv", os.str());
  std::ostringstream ws;
  ws << "u,probability,stderr\n";
  for (std::size_t i = 0; i < r.u.size(); ++i)
    ws << format_double(r.u[i]) << ',' << format_double(r.weight_probability[i]) << ','
       << format_double(r.weight_stderr[i]) << '\n';
  write_text(dir / "weight_tail.csv", ws.str());
  write_json(dir / "summary.json", {{"experiment", "tail"},
                                    {"t", json_array(r.t)},
                                    {"probability", json_array(r.probability)},
                                    {"stderr", json_array(r.stderr_)},
                                    {"u", json_array(r.u)},
                                    {"weight_probability", json_array(r.weight_probability)},
                                    {"weight_stderr", json_array(r.weight_stderr)}});
}

void write_outputs(const std::filesystem::path& dir, const ExperimentSpec& spec, const DynamicRunResult& r) {
  prepare(dir, spec);
  write_text(dir / "trace.csv", trace_csv(r.trace));
  for (std::size_t i = 0; i < r.trace.snapshots.size(); ++i) {
    std::ostringstream os;
    write_snapshot_csv(os, r.trace.snapshots[i].second);
    write_text(dir / index_name("snapshot", i, ".csv"), os.str());
  }
  nlohmann::json snaps = nlohmann::json::array();
  for (const auto& s : r.trace.snapshots) snaps.push_back(json_number(s.first));
  write_json(dir / "summary.json", {{"experiment", "dynamic"},
                                    {"snapshot_times", snaps},
                                    {"max_mass_defect", json_number(r.trace.max_mass_defect)},
                                    {"max_boundary_mass", json_number(r.trace.max_boundary_mass)},
                                    {"energy_derivative_max_relative_error",
                                     json_number(r.derivative.max_relative_error)}});
  if (spec.svg) {
    write_text(dir / "scaled_energy.svg",
               svg_line_chart("t^{d/2} E_t", "t", "t^{d/2} E_t", {scaled_energy_series(r.trace, "forward")}));
    write_text(dir / "p00.svg", svg_line_chart("return probability", "t", "p_{0,t}(0,0)",
                                               {{"p00", r.trace.t, r.trace.p00}}));
  }
}

void write_outputs(const std::filesystem::path& dir, const ExperimentSpec& spec,
                   const std::vector<InequalityReport>& r) {
  prepare(dir, spec);
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& x : r) arr.push_back(to_json(x));
  write_json(dir / "inequalities.json", arr);
  write_json(dir / "summary.json", {{"experiment", "inequalities"}, {"reports", arr.size()}});
}

void write_outputs(const std::filesystem::path& dir, const ExperimentSpec& spec, const MaximalResult& r) {
  prepare(dir, spec);
  std::ostringstream os;
  write_maximal_csv(os, r.rows);
  write_text(dir / "maximal.csv", os.str());
  write_json(dir / "summary.json", {{"experiment", "maximal"},
                                    {"rows", r.rows.size()},
                                    {"jensen_fields", r.jensen_fields},
                                    {"jensen_failures", r.jensen_failures}});
}

}  // namespace nashlab
