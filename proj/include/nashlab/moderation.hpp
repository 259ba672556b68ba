#ifndef NASHLAB_MODERATION_HPP
#define NASHLAB_MODERATION_HPP

#include <span>
#include <vector>

#include "nashlab/environments.hpp"
#include "nashlab/heat_engine.hpp"
#include "nashlab/inequalities.hpp"

namespace nashlab {

/**
 * k_t = (1+t)^{-m} and K_t = k_t + int_t^inf s k_s ds
 *     = (1+t)^{-m} + (1+t)^{2-m}/(m-2) - (1+t)^{1-m}/(m-1).
 */
class PowerKernel {
 public:
  /// Throws unless m > 3, which is what int (1+t^2) k_t dt < inf requires.
  explicit PowerKernel(double m = 4.0);

  double m() const { return m_; }
  double k(double t) const;
  double K(double t) const;
  /// int_a^b k_s ds; b may be infinite.
  double k_integral(double a, double b) const;
  double k_tail(double tau) const { return k_integral(tau, kInf); }
  /// int_tau^inf K_s ds
  double K_tail(double tau) const;
  double K_norm1() const { return K_tail(0.0); }
  double K_norm01() const { return K_tail(0.0) - K_tail(1.0); }

 private:
  // (1+x)^{-n}; exact repeated multiplication when m is an integer.
  double inv_pow(double x, double n) const;

  double m_;
  bool integer_;
};

struct KernelConstants {
  double K1 = 0.0;   // ||K||_1
  double K01 = 0.0;  // ||K||_{L^1([0,1])}
  double CK = 0.0;   // 1 v ||K||_1^{alpha/beta} / ||K||_{L^1[0,1]}^{(1-alpha)/beta}
};

/// Throws when beta = 0 (theta = 1).
KernelConstants kernel_constants(const PowerKernel& kernel, const NashExponents& exps);

/// w_t on a time grid.
struct WeightSeries {
  std::vector<double> t;
  std::vector<EdgeField> w;
  /// int_{H-t}^inf k: the part of the integral beyond the environment horizon H, left out of w_t^2.
  std::vector<double> tail;
  double horizon = 0.0;
};

/// w_t(e)^2 = int_t^H k_{s-t} a_s(e) ds, summed exactly over the constancy intervals of a.
WeightSeries weights_from_env(const DynamicEnvironment& env, const PowerKernel& kernel, std::span<const double> times);

/// w_t(e)^2 for a single edge and time.
double weight_squared(const DynamicEnvironment& env, const PowerKernel& kernel, std::uint32_t edge, double t);

struct ModerationReport {
  std::vector<double> t;
  std::vector<double> lhs;    // ||w_t grad u_t||_2^2
  std::vector<double> rhs;    // trapezoid int_t^T' K_{s-t} D_s ds + 4d E_T' int_{T'-t}^inf K
  std::vector<double> ratio;
  double c_emp = 0.0;
  /// Same sup with the tail bounded by 4d E_t instead of 4d E_T'.
  double c_emp_literal = 0.0;
  /// Some grid time had rhs = 0 < lhs.
  bool inconsistent = false;
};

/**
 * The (w,K)-moderation inequality along a trace that kept its states. The
 * trace and the weights share one grid; only times t <= t_max are reported,
 * while the future integrals use the whole trace.
 */
ModerationReport check_moderation(const HeatTrace& trace, const WeightSeries& w, const PowerKernel& kernel,
                                  double t_max = kInf);

/**
 * (inf_{t>=1} t^{-1} int_0^t M_q(w_s)^{-2} ds)^{-1/2}, with the inner integral by the
 * trapezoid rule on the given grid (which must start at 0) and the infimum over grid
 * times in [1, T]. Throws for T < 1.
 */
double script_Mq(std::span<const double> times, std::span<const double> mq, double T);
double script_Mq(const WeightSeries& w, double q, double T);

/// What the pointwise bound at time t needs from the environment reversed around t.
struct ReversedSample {
  double t = 0.0;
  double energy_half = 0.0;  // E^{(t)}_{t/2}
  double script_mq = 0.0;    // script M_q(w^{(t)}) over [0, t/2]
};

struct BoundReport {
  double CK = 0.0;
  double script_mq = 0.0;
  double exponent = 0.0;  // 2 alpha / beta
  std::vector<double> t;
  std::vector<double> scaled_energy;  // t^{d/2} E_t
  double energy_bound = 0.0;          // CK script_M^{2 alpha/beta}
  double C_emp_energy = 0.0;

  std::vector<double> pointwise_t;
  std::vector<double> p00;
  std::vector<double> cs_bound;  // sqrt(E_{t/2} E^{(t)}_{t/2})
  std::vector<double> scaled_p00;
  std::vector<double> pointwise_bound;  // CK (script_M script_M^{(t)})^{alpha/beta}
  double C_emp_pointwise = 0.0;         // NaN when no reversed samples were given
  bool cauchy_schwarz_holds = true;
  double cauchy_schwarz_worst = 0.0;  // max of p00 / cs_bound
};

/**
 * Energy bound over grid times in [max(1, t_min), t_max] and, for each reversed
 * sample, the pointwise bound and the Cauchy-Schwarz check (with relative slack
 * `cs_tolerance`). Every t/2 must be a grid time of the trace.
 */
BoundReport assemble_bounds(const HeatTrace& trace, const NashExponents& exps, const KernelConstants& kc,
                            double script_mq, std::span<const ReversedSample> reversed, double t_min = 1.0,
                            double t_max = kInf, double cs_tolerance = 1e-9);

}  // namespace nashlab

#endif  // NASHLAB_MODERATION_HPP
