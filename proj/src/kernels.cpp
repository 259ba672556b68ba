#include "nashlab/kernels.hpp"

#include <omp.h>

#include <stdexcept>

namespace nashlab::kernels {

namespace {

constexpr std::size_t kParallelThreshold = 4096;

inline void transition_site(const Stencil& s, const double* cond, double inv_mu, const double* in, double* out,
                            std::size_t y) {
  const std::uint32_t* nb = s.neighbour.data() + y * std::size_t(s.stride);
  const std::uint32_t* ed = s.edge.data() + y * std::size_t(s.stride);
  double csum = 0.0;
  double acc = 0.0;
  for (int k = 0; k < s.stride; ++k) {
    const double c = cond[ed[k]];
    csum += c;
    acc += c * in[nb[k]];
  }
  // Written as a convex combination so the result stays nonnegative.
  out[y] = in[y] * (1.0 - inv_mu * csum) + inv_mu * acc;
}

void check_sizes(const Stencil& s, std::span<const double> cond, std::span<const double> in, std::span<double> out) {
  if (in.size() != s.sites || out.size() != s.sites || cond.size() != std::size_t(s.dummy_edge) + 1)
    throw std::invalid_argument("kernel size mismatch");
}

template <class Body>
double chunked_sum(std::size_t n, Body&& body) {
  const std::size_t chunks = (n + kReductionChunk - 1) / kReductionChunk;
  if (chunks <= 1) return body(0, n);
  std::vector<double> partial(chunks);
#pragma omp parallel for schedule(static) if (n > kParallelThreshold)
  for (std::ptrdiff_t c = 0; c < std::ptrdiff_t(chunks); ++c) {
    const std::size_t lo = std::size_t(c) * kReductionChunk;
    const std::size_t hi = std::min(n, lo + kReductionChunk);
    partial[std::size_t(c)] = body(lo, hi);
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

}  // namespace

Stencil make_stencil(const Geometry& g) {
  Stencil s;
  s.stride = 2 * g.dim();
  s.sites = g.site_count();
  s.dummy_edge = std::uint32_t(g.edge_count());
  s.neighbour.assign(s.sites * std::size_t(s.stride), 0);
  s.edge.assign(s.sites * std::size_t(s.stride), s.dummy_edge);
  for (std::size_t y = 0; y < s.sites; ++y)
    for (int k = 0; k < s.stride; ++k) s.neighbour[y * std::size_t(s.stride) + std::size_t(k)] = std::uint32_t(y);
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const auto& ed = g.edge(e);
    // slot 2*axis: towards +axis, slot 2*axis+1: towards -axis
    const std::size_t up = ed.lower * std::size_t(s.stride) + std::size_t(2 * ed.axis);
    const std::size_t down = ed.upper * std::size_t(s.stride) + std::size_t(2 * ed.axis + 1);
    s.neighbour[up] = ed.upper;
    s.edge[up] = std::uint32_t(e);
    s.neighbour[down] = ed.lower;
    s.edge[down] = std::uint32_t(e);
  }
  return s;
}

std::vector<double> padded_conductance(std::span<const double> a) {
  std::vector<double> c(a.begin(), a.end());
  c.push_back(0.0);
  return c;
}

namespace serial {

void apply_transition(const Stencil& s, std::span<const double> cond, double inv_mu, std::span<const double> in,
                      std::span<double> out) {
  check_sizes(s, cond, in, out);
  for (std::size_t y = 0; y < s.sites; ++y) transition_site(s, cond.data(), inv_mu, in.data(), out.data(), y);
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

double sum(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s;
}

double sum_squares(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

double weighted_sum_squares(std::span<const double> weight, std::span<const double> x) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += weight[i] * x[i] * x[i];
  return s;
}

double dirichlet(const Geometry& g, std::span<const double> cond, std::span<const double> u) {
  double s = 0.0;
  const auto& edges = g.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const double d = u[edges[e].upper] - u[edges[e].lower];
    s += cond[e] * d * d;
  }
  return s;
}

}  // namespace serial

namespace omp {

void apply_transition(const Stencil& s, std::span<const double> cond, double inv_mu, std::span<const double> in,
                      std::span<double> out) {
  check_sizes(s, cond, in, out);
  const double* c = cond.data();
  const double* pin = in.data();
  double* pout = out.data();
#pragma omp parallel for schedule(static) if (s.sites > kParallelThreshold)
  for (std::ptrdiff_t y = 0; y < std::ptrdiff_t(s.sites); ++y) transition_site(s, c, inv_mu, pin, pout, std::size_t(y));
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  const std::ptrdiff_t n = std::ptrdiff_t(x.size());
#pragma omp parallel for simd schedule(static) if (x.size() > kParallelThreshold)
  for (std::ptrdiff_t i = 0; i < n; ++i) y[std::size_t(i)] += alpha * x[std::size_t(i)];
}

double sum(std::span<const double> x) {
  return chunked_sum(x.size(), [&](std::size_t lo, std::size_t hi) { return serial::sum(x.subspan(lo, hi - lo)); });
}

double sum_squares(std::span<const double> x) {
  return chunked_sum(x.size(),
                     [&](std::size_t lo, std::size_t hi) { return serial::sum_squares(x.subspan(lo, hi - lo)); });
}

double weighted_sum_squares(std::span<const double> weight, std::span<const double> x) {
  return chunked_sum(x.size(), [&](std::size_t lo, std::size_t hi) {
    return serial::weighted_sum_squares(weight.subspan(lo, hi - lo), x.subspan(lo, hi - lo));
  });
}

double dirichlet(const Geometry& g, std::span<const double> cond, std::span<const double> u) {
  const auto& edges = g.edges();
  return chunked_sum(edges.size(), [&](std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t e = lo; e < hi; ++e) {
      const double d = u[edges[e].upper] - u[edges[e].lower];
      s += cond[e] * d * d;
    }
    return s;
  });
}

}  // namespace omp

}  // namespace nashlab::kernels
