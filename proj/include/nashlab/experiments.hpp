#ifndef NASHLAB_EXPERIMENTS_HPP
#define NASHLAB_EXPERIMENTS_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "nashlab/environments.hpp"
#include "nashlab/heat_engine.hpp"
#include "nashlab/inequalities.hpp"
#include "nashlab/maximal.hpp"
#include "nashlab/moderation.hpp"

namespace nashlab {

struct ExperimentSpec {
  std::string name = "exclusion";
  int dim = 2;
  int radius = 16;
  double rho = 0.5;
  /// Static law: "power" (P[a <= u] = u^eta), "constant" (a = level) or "trap" (a = level on the edges leaving B_1, else 1).
  std::string law = "power";
  double eta = 8.0;
  double level = 1.0;
  double horizon = 100.0;
  double dt = 0.5;
  double p = 4.0;
  double q = 8.0;
  double theta = 0.2;
  double kernel_m = 4.0;
  std::size_t reals = 20;
  std::uint64_t seed = 1;
  /// Lower end of the window for the per-realization sup of t^{d/2} E_t.
  double tmin = 1.0;
  /// Extra simulated time beyond the horizon, so that future integrals at t <= horizon are not cut short.
  double lookahead = 20.0;
  double tolerance = 1e-12;
  /// Compute reversed traces and the pointwise bound.
  bool pointwise = true;
  std::vector<double> tail_times{5, 10, 20, 40};
  std::size_t corpus = 500;
  std::vector<double> lambdas{2, 4, 8};
  std::string out;
  bool svg = false;

  /// Throws std::invalid_argument when a parameter violates a module precondition.
  void validate() const;
};

nlohmann::json to_json(const ExperimentSpec& s);
ExperimentSpec spec_from_json(const nlohmann::json& j);

struct MomentSummary {
  std::vector<double> X_hat;  // per realization: sup of t^{d/2} E_t over grid t in [tmin, T]
  std::vector<double> orders{1, 2, 4};
  std::vector<double> moments;       // mean of X_hat^r
  std::vector<double> moment_roots;  // (mean of X_hat^r)^{1/r}
  std::vector<double> quantile_levels{0.1, 0.5, 0.9};
  std::vector<double> quantiles;
  std::vector<double> Y_t;  // grid times >= 1
  std::vector<double> Y_mean;    // mean over realizations of t^{d/2} p00
  std::vector<double> Y_median;
  std::vector<double> epsilons{0.1, 0.25};
  std::vector<double> sup_eps_mean;  // mean of sup_{t>=1} t^{d/2-eps} p00
  std::vector<double> sup_Y;         // per realization sup_{t>=1} t^{d/2} p00 (reported only)
  std::vector<double> lambda_T;      // per realization Lambda at the horizon
};

/// Moments, quantiles and per-time statistics from traces sharing one grid, restricted to t <= T.
MomentSummary summarize(const std::vector<const HeatTrace*>& traces, double tmin, double T);
nlohmann::json to_json(const MomentSummary& m);

struct StaticRunResult {
  std::vector<HeatTrace> traces;
  MomentSummary summary;
  std::string warning;  // set when eta <= q/2
};

/// Environment of one static realization.
EdgeField static_environment(const ExperimentSpec& spec, std::size_t realization);
StaticRunResult run_static_moment(const ExperimentSpec& spec);

struct ExclusionRealization {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  bool aborted = false;
  std::string diagnostic;
  HeatTrace forward;  // states dropped after post-processing
  ModerationReport moderation;
  BoundReport bounds;
  double energy_half_forward = 0.0;   // E_{T/2}
  double energy_half_reversed = 0.0;  // E^{(T)}_{T/2}; NaN without the pointwise stage
  std::size_t environment_breakpoints = 0;
};

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

struct ExclusionResult {
  std::vector<ExclusionRealization> realizations;
  MomentSummary summary;
  KsResult ks;  // forward vs reversed E_{T/2}
  double c_emp_max = 0.0;
};

/// One realization of the exclusion pipeline (exposed for tests and partial runs).
ExclusionRealization run_exclusion_realization(const ExperimentSpec& spec, std::size_t index);
ExclusionResult run_exclusion(const ExperimentSpec& spec);

struct TailTable {
  std::vector<double> t;
  std::vector<double> probability;  // P[int_0^t a_s(e) ds <= 1]
  std::vector<double> stderr_;
  std::vector<double> u{0.3, 0.1, 0.03};
  std::vector<double> weight_probability;  // P[w_0(e) <= u]
  std::vector<double> weight_stderr;
};

/// Monte Carlo over realizations for the edge {0, e_1}.
TailTable run_tail_estimate(const ExperimentSpec& spec);

struct DynamicRunResult {
  HeatTrace trace;
  DerivativeCheck derivative;
};

/// Forward trace of an explicit environment, with snapshots at the breakpoints and the E' = -2D check.
DynamicRunResult run_dynamic(const ExperimentSpec& spec, const DynamicEnvironment& env);

std::vector<InequalityReport> run_inequality_suite(const ExperimentSpec& spec);

struct MaximalResult {
  std::vector<MaximalRow> rows;
  std::size_t jensen_fields = 0;
  std::size_t jensen_failures = 0;
};

MaximalResult run_maximal(const ExperimentSpec& spec);

// Writers: spec.json, CSV traces, report JSONs, summary.json and optional SVG charts.
void write_outputs(const std::filesystem::path& dir, const ExperimentSpec& spec, const StaticRunResult& r);
void write_outputs(const std::filesystem::path& dir, const ExperimentSpec& spec, const ExclusionResult& r);
void write_outputs(const std::filesystem::path& dir, const ExperimentSpec& spec, const TailTable& r);
void write_outputs(const std::filesystem::path& dir, const ExperimentSpec& spec, const DynamicRunResult& r);
void write_outputs(const std::filesystem::path& dir, const ExperimentSpec& spec,
                   const std::vector<InequalityReport>& r);
void write_outputs(const std::filesystem::path& dir, const ExperimentSpec& spec, const MaximalResult& r);

}  // namespace nashlab

#endif  // NASHLAB_EXPERIMENTS_HPP
