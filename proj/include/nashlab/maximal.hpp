#ifndef NASHLAB_MAXIMAL_HPP
#define NASHLAB_MAXIMAL_HPP

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "nashlab/lattice.hpp"

namespace nashlab {

/// Site law of i.i.d. stationary fields.
struct FieldLaw {
  enum class Kind { constant, exponential, pareto };
  Kind kind = Kind::exponential;
  double parameter = 1.0;  // the constant, the rate, or the Pareto index

  static FieldLaw constant(double c) { return {Kind::constant, c}; }
  static FieldLaw exponential(double rate = 1.0) { return {Kind::exponential, rate}; }
  /// P[f > x] = x^{-index} on [1, inf).
  static FieldLaw pareto(double index) { return {Kind::pareto, index}; }
  double mean() const;
  std::string describe() const;
};

/// Periodic field on the torus of side 2L+1; lattice shifts preserve its law exactly.
struct StationaryField {
  std::shared_ptr<const Torus> torus;
  std::vector<double> values;
  FieldLaw law;
  std::uint64_t seed = 0;
};

StationaryField sample_field(int d, int L, const FieldLaw& law, std::uint64_t seed);
StationaryField field_from_values(int d, int L, std::vector<double> values);

/**
 * Averages over the boxes x + B_r for r = 1..L, at every site at once:
 * result[(r-1) * sites + x].
 */
std::vector<double> box_averages(const StationaryField& f);

/// sup_{1<=r<=L} of the box averages, at every site.
std::vector<double> maximal_all(const StationaryField& f);
/// inf_{1<=r<=L} of the box averages, at every site.
std::vector<double> min_all(const StationaryField& f);
double maximal_fn(const StationaryField& f, std::size_t x);
double min_fn(const StationaryField& f, std::size_t x);

/// Pointwise (m g)^{-1} <= M(g^{-1}) with relative slack `slack` for rounding; g must be positive.
bool jensen_holds(const StationaryField& g, double slack = 1e-12);

struct MaximalRow {
  std::string law;
  int d = 0;
  int L = 0;
  double lambda_or_p = 0.0;
  double estimate = 0.0;
  double stderr_ = 0.0;
  double bound = 0.0;
};

/**
 * lambda P[Mf >= lambda] / E f for each lambda, with P estimated by the
 * fraction of sites per seed (all sites share one law) and the standard
 * error taken across seeds. The bound column is 3^d.
 */
std::vector<MaximalRow> weak11_experiment(const FieldLaw& law, int d, int L, const std::vector<double>& lambdas,
                                          std::size_t seeds, std::uint64_t master_seed);

/// ||Mf||_p / ||f||_p pooled over seeds; p = kInf allowed. Throws for p <= 1.
MaximalRow lp_maximal_ratio(const FieldLaw& law, int d, int L, double p, std::size_t seeds,
                            std::uint64_t master_seed);

void write_maximal_csv(std::ostream& os, const std::vector<MaximalRow>& rows);

}  // namespace nashlab

#endif  // NASHLAB_MAXIMAL_HPP
