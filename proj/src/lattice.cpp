#include "nashlab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace nashlab {

double anchored_weight(const Site& x) {
  double s = 0.0;
  for (int v : x) s += double(v) * double(v);
  return std::max(std::sqrt(s), 1.0);
}

Geometry::Geometry(int dim, int radius) : dim_(dim), radius_(radius) {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("dimension must be in 1..3, got " + std::to_string(dim));
  if (radius < 1) throw std::invalid_argument("radius must be positive, got " + std::to_string(radius));

  const std::size_t n = std::size_t(side());
  site_count_ = 1;
  for (int i = 0; i < dim; ++i) site_count_ *= n;
  if (site_count_ >= npos) throw std::invalid_argument("lattice too large");

  shell_.resize(site_count_);
  anchor_.resize(site_count_);
  edge_from_.assign(site_count_ * std::size_t(dim), npos);
  edges_.reserve(edges_in_box(radius));

  std::size_t stride[kMaxDim] = {1, n, n * n};
  for (std::size_t s = 0; s < site_count_; ++s) {
    Site x = site(s);
    int sh = 0;
    for (int i = 0; i < dim; ++i) sh = std::max(sh, std::abs(x[i]));
    shell_[s] = sh;
    anchor_[s] = nashlab::anchored_weight(x);
    for (int i = 0; i < dim; ++i) {
      if (x[i] < radius) {
        edge_from_[s * std::size_t(dim) + std::size_t(i)] = std::uint32_t(edges_.size());
        edges_.push_back(Edge{std::uint32_t(s), std::uint32_t(s + stride[i]), i});
      }
    }
  }
  origin_ = index(Site{0, 0, 0});
}

bool Geometry::contains(const Site& x) const {
  for (int i = 0; i < kMaxDim; ++i) {
    if (i < dim_) {
      if (x[i] < -radius_ || x[i] > radius_) return false;
    } else if (x[i] != 0) {
      return false;
    }
  }
  return true;
}

std::uint32_t Geometry::index(const Site& x) const {
  if (!contains(x)) throw std::out_of_range("site outside the box");
  std::size_t idx = 0;
  std::size_t stride = 1;
  for (int i = 0; i < dim_; ++i) {
    idx += std::size_t(x[i] + radius_) * stride;
    stride *= std::size_t(side());
  }
  return std::uint32_t(idx);
}

Site Geometry::site(std::size_t index) const {
  Site x{0, 0, 0};
  const std::size_t n = std::size_t(side());
  for (int i = 0; i < dim_; ++i) {
    x[i] = int(index % n) - radius_;
    index /= n;
  }
  return x;
}

std::uint32_t Geometry::edge_between(std::size_t a, std::size_t b) const {
  if (a > b) std::swap(a, b);
  for (int i = 0; i < dim_; ++i) {
    std::uint32_t e = edge_from(a, i);
    if (e != npos && edges_[e].upper == b) return e;
  }
  return npos;
}

std::size_t Geometry::sites_in_box(int r) const {
  std::size_t c = 1;
  for (int i = 0; i < dim_; ++i) c *= std::size_t(2 * r + 1);
  return c;
}

std::size_t Geometry::edges_in_box(int r) const {
  std::size_t c = std::size_t(dim_) * std::size_t(2 * r);
  for (int i = 1; i < dim_; ++i) c *= std::size_t(2 * r + 1);
  return c;
}

GeometryPtr make_geometry(int dim, int radius) { return std::make_shared<const Geometry>(dim, radius); }

SiteFunction::SiteFunction(GeometryPtr g, double fill) : geometry(std::move(g)) {
  values.assign(geometry->site_count(), fill);
}

SiteFunction::SiteFunction(GeometryPtr g, std::vector<double> v) : geometry(std::move(g)), values(std::move(v)) {
  if (values.size() != geometry->site_count()) throw std::invalid_argument("site function size mismatch");
}

SiteFunction SiteFunction::delta(GeometryPtr g, std::size_t site) {
  SiteFunction f(std::move(g));
  f.values.at(site) = 1.0;
  return f;
}

EdgeField::EdgeField(GeometryPtr g, double fill) : geometry(std::move(g)) {
  values.assign(geometry->edge_count(), fill);
}

EdgeField::EdgeField(GeometryPtr g, std::vector<double> v) : geometry(std::move(g)), values(std::move(v)) {
  if (values.size() != geometry->edge_count()) throw std::invalid_argument("edge field size mismatch");
}

namespace {

void check_norm_args(const Geometry& g, double p, int r) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm requires p >= 1");
  if (r < 0 || r > g.radius()) throw std::invalid_argument("sub-box radius out of range");
}

template <class Member>
double accumulate_norm(std::span<const double> values, double p, Member&& in_box) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i)
      if (in_box(i)) m = std::max(m, std::abs(values[i]));
    return m;
  }
  double s = 0.0;
  if (p == 1.0) {
    for (std::size_t i = 0; i < values.size(); ++i)
      if (in_box(i)) s += std::abs(values[i]);
    return s;
  }
  if (p == 2.0) {
    for (std::size_t i = 0; i < values.size(); ++i)
      if (in_box(i)) s += values[i] * values[i];
    return std::sqrt(s);
  }
  for (std::size_t i = 0; i < values.size(); ++i)
    if (in_box(i)) s += std::pow(std::abs(values[i]), p);
  return std::pow(s, 1.0 / p);
}

}  // namespace

double lp_norm(const SiteFunction& f, double p, int r) {
  const Geometry& g = *f.geometry;
  check_norm_args(g, p, r);
  return accumulate_norm(f.values, p, [&](std::size_t i) { return g.shell(i) <= r; });
}

double lp_norm(const EdgeField& f, double p, int r) {
  const Geometry& g = *f.geometry;
  check_norm_args(g, p, r);
  return accumulate_norm(f.values, p, [&](std::size_t e) { return g.edge_shell(e) <= r; });
}

EdgeField gradient(const SiteFunction& f) {
  const Geometry& g = *f.geometry;
  EdgeField out(f.geometry);
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const auto& ed = g.edge(e);
    out[e] = f[ed.upper] - f[ed.lower];
  }
  return out;
}

double box_average(const SiteFunction& f, int r) {
  const Geometry& g = *f.geometry;
  check_norm_args(g, 1.0, r);
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (g.shell(i) <= r) s += f[i];
  return s / double(g.sites_in_box(r));
}

double box_median(const SiteFunction& f, int r) {
  const Geometry& g = *f.geometry;
  check_norm_args(g, 1.0, r);
  std::vector<double> v;
  v.reserve(g.sites_in_box(r));
  for (std::size_t i = 0; i < f.size(); ++i)
    if (g.shell(i) <= r) v.push_back(f[i]);
  auto mid = v.begin() + std::ptrdiff_t((v.size() - 1) / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

}  // namespace nashlab

namespace nashlab {

Torus::Torus(int dim, int radius) : dim_(dim), radius_(radius) {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("dimension must be in 1..3");
  if (radius < 1) throw std::invalid_argument("radius must be positive");
  site_count_ = 1;
  for (int i = 0; i < kMaxDim; ++i) {
    stride_[i] = site_count_;
    if (i < dim) site_count_ *= std::size_t(side());
  }
}

std::uint32_t Torus::shift(std::size_t site, int axis, int step) const {
  const std::size_t n = std::size_t(side());
  const std::size_t stride = stride_[axis];
  const long coord = long((site / stride) % n);
  long moved = (coord + step) % long(n);
  if (moved < 0) moved += long(n);
  return std::uint32_t(site + (std::size_t(moved) - std::size_t(coord)) * stride);
}

}  // namespace nashlab
