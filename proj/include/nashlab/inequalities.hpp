#ifndef NASHLAB_INEQUALITIES_HPP
#define NASHLAB_INEQUALITIES_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "nashlab/lattice.hpp"

namespace nashlab {

/// Critical interpolation parameter; zero when q is infinite. Throws unless p > d >= 1 and q > d.
double theta_c(int d, double p, double q);

/// Exponents of the anchored Nash inequality. q may be kInf.
struct NashExponents {
  int d = 2;
  double p = 4.0;
  double q = 8.0;
  double theta = 1.0;
  double theta_c = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
};

/// Throws when theta lies outside [theta_c, 1].
NashExponents nash_exponents(int d, double p, double q, double theta);

/**
 * Origin-anchored maximal inverse moment of a weight field:
 * (sup_{1<=r<=L} |E_r|^{-1} sum_{e in E_r} w(e)^{-q})^{1/q}, or sup 1/w for
 * q = infinity. Any zero weight gives +infinity.
 */
double maximal_Mq(const EdgeField& w, double q);

/// The four norms entering the anchored Nash inequality.
struct NashTerms {
  double l2 = 0.0;
  double weighted_gradient = 0.0;  // ||w grad f||_2
  double l1 = 0.0;
  double moment = 0.0;  // || |x|_*^{p/2} f ||_2
};

NashTerms nash_terms(const SiteFunction& f, const EdgeField& w, double p);

/// ||f||_2 / [(M_q ||w grad f||_2)^alpha ||f||_1^beta |||x|_*^{p/2} f||_2^gamma]; +inf on a zero denominator.
double nash_ratio(const SiteFunction& f, const EdgeField& w, const NashExponents& exps);
/// Same with a precomputed M_q(w).
double nash_ratio(const SiteFunction& f, const EdgeField& w, double mq, const NashExponents& exps);

/**
 * ||f - mean_r f||_{L^{p*}_r} / ||grad f||_{L^p_r} with d/p* = d/p - 1.
 * p = 1 gives the isoperimetric exponent p* = d/(d-1). Zero for constant f.
 */
double poincare_sobolev_ratio(const SiteFunction& f, int r, double p);

/// |A|^{(d-1)/d} / |boundary edges of A inside B_r|. `member` is indexed by site; sites outside B_r are ignored.
double isoperimetric_ratio(const Geometry& g, const std::vector<std::uint8_t>& member, int r);

/**
 * Pointwise kernel bound: max_x |f(x) - mean_r f| divided by
 * sum_e (1 + |x - lower(e)|)^{-(d-1)} |grad f|(e), edges and x restricted to B_r.
 */
double hls_ratio(const SiteFunction& f, int r);

/// Nearest-neighbour path from x to y hugging the straight segment; ties go to the smallest axis.
std::vector<Site> build_path(const Site& x, const Site& y, int dim);
/// Number of edges-on-path counts: entry e = |{y in B_r : e on path(x, y)}|.
std::vector<std::uint32_t> path_counts_from(const Geometry& g, const Site& x, int r);
std::uint32_t path_count(const Geometry& g, std::size_t e, const Site& x, int r);
/// max over x in B_r and edges e of count * (1 + |x - lower(e)|)^{d-1} / r^d.
double path_count_constant(const Geometry& g, int r);

/// Equal-term optimiser for R^a r^a' A + r^-b B + R^-c D.
struct OptLemmaResult {
  double r = 0.0;
  double R = 0.0;
  double bound = 0.0;
  bool degenerate = false;  // some of A, B, D vanish; r and R are undefined (NaN)
};

OptLemmaResult opt_lemma(double a, double a_prime, double b, double c, double A, double B, double D);
/// Value of R^a r^a' A + r^-b B + R^-c D.
double opt_objective(double a, double a_prime, double b, double c, double A, double B, double D, double r,
                     double R);

enum class CorpusKind { gaussian_bump, sparse_sign, indicator };

struct CorpusItem {
  CorpusKind kind;
  std::string descriptor;
  SiteFunction f;
};

/**
 * Test functions scaled with the box radius: Gaussian bumps (random centre
 * and log-uniform width), random-sign sparse functions, and indicators of
 * random sub-boxes. Item i depends only on (seed, i) and the radius.
 */
std::vector<CorpusItem> test_corpus(const GeometryPtr& g, std::size_t count, std::uint64_t seed);

/// Random boxes and Euclidean balls with |A| <= |B_r|/2, scaled with r.
std::vector<std::vector<std::uint8_t>> random_sets(const Geometry& g, int r, std::size_t count, std::uint64_t seed);

struct InequalityReport {
  std::string name;
  std::string corpus;
  int L = 0;
  std::size_t samples = 0;
  double best_constant = 0.0;
  std::string argmax;
};

InequalityReport nash_sweep(const GeometryPtr& g, const EdgeField& w, const NashExponents& exps, std::size_t count,
                            std::uint64_t seed);
InequalityReport poincare_sweep(const GeometryPtr& g, double p, std::size_t count, std::uint64_t seed);
InequalityReport isoperimetric_sweep(const Geometry& g, std::size_t count, std::uint64_t seed);
/// Every subset A of B_1 in d = 2 with |A| <= 4.
InequalityReport isoperimetric_exhaustive_b1();
InequalityReport hls_sweep(const GeometryPtr& g, std::size_t count, std::uint64_t seed);
InequalityReport path_count_report(const Geometry& g);

}  // namespace nashlab

#endif  // NASHLAB_INEQUALITIES_HPP
