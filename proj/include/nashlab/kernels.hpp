#ifndef NASHLAB_KERNELS_HPP
#define NASHLAB_KERNELS_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "nashlab/lattice.hpp"

namespace nashlab::kernels {

/**
 * Neighbour table with a fixed stride of 2d slots per site. Missing
 * neighbours (boundary of B_L) point back to the site itself through a
 * dummy edge slot whose conductance is always zero, so the sweep is
 * branch-free. Conductance arrays passed to the kernels therefore carry
 * edge_count + 1 entries.
 */
struct Stencil {
  int stride = 0;
  std::size_t sites = 0;
  std::uint32_t dummy_edge = 0;
  std::vector<std::uint32_t> neighbour;
  std::vector<std::uint32_t> edge;
};

Stencil make_stencil(const Geometry& g);

/// Conductance array with the trailing dummy slot, from an edge field.
std::vector<double> padded_conductance(std::span<const double> a);

// Reference loops; the parallel versions below must agree with these.
namespace serial {

/// out = (I + Q/mu) in, for the generator Q of conductances `cond`.
void apply_transition(const Stencil& s, std::span<const double> cond, double inv_mu, std::span<const double> in,
                      std::span<double> out);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
double sum(std::span<const double> x);
double sum_squares(std::span<const double> x);
/// sum_i weight_i x_i^2
double weighted_sum_squares(std::span<const double> weight, std::span<const double> x);
/// sum_e cond_e (u(upper) - u(lower))^2
double dirichlet(const Geometry& g, std::span<const double> cond, std::span<const double> u);

}  // namespace serial

// OpenMP versions. Reductions sum fixed-size chunks and combine the partial
// sums in chunk order, so results do not depend on the number of threads.
namespace omp {

void apply_transition(const Stencil& s, std::span<const double> cond, double inv_mu, std::span<const double> in,
                      std::span<double> out);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
double sum(std::span<const double> x);
double sum_squares(std::span<const double> x);
double weighted_sum_squares(std::span<const double> weight, std::span<const double> x);
double dirichlet(const Geometry& g, std::span<const double> cond, std::span<const double> u);

}  // namespace omp

inline constexpr std::size_t kReductionChunk = 2048;

}  // namespace nashlab::kernels

#endif  // NASHLAB_KERNELS_HPP
