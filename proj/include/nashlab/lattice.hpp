#ifndef NASHLAB_LATTICE_HPP
#define NASHLAB_LATTICE_HPP

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <vector>

namespace nashlab {

inline constexpr int kMaxDim = 3;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Integer coordinates of a lattice site. Entries beyond the dimension are zero.
using Site = std::array<int, kMaxDim>;

/// max(|x|, 1) with the Euclidean norm.
double anchored_weight(const Site& x);

/**
 * The box B_L = {-L..L}^d together with the nearest-neighbour edges having
 * both endpoints in B_L.
 *
 * Sites are indexed lexicographically with the first coordinate fastest:
 * index = sum_i (x_i + L) (2L+1)^i. Edges are enumerated by lower endpoint
 * then axis; every edge is oriented along the positive coordinate direction.
 * Edges leaving B_L do not exist (zero-flux truncation).
 */
class Geometry {
 public:
  struct Edge {
    std::uint32_t lower;
    std::uint32_t upper;
    int axis;
  };

  static constexpr std::uint32_t npos = std::numeric_limits<std::uint32_t>::max();

  Geometry(int dim, int radius);

  int dim() const { return dim_; }
  int radius() const { return radius_; }
  int side() const { return 2 * radius_ + 1; }
  std::size_t site_count() const { return site_count_; }
  std::size_t edge_count() const { return edges_.size(); }

  bool contains(const Site& x) const;
  std::uint32_t index(const Site& x) const;
  Site site(std::size_t index) const;
  std::uint32_t origin() const { return origin_; }

  const Edge& edge(std::size_t e) const { return edges_[e]; }
  const std::vector<Edge>& edges() const { return edges_; }
  /// Edge from `site` towards site + e_axis, or npos at the boundary.
  std::uint32_t edge_from(std::size_t site, int axis) const { return edge_from_[site * dim_ + axis]; }
  /// Edge joining two sites, or npos if they are not neighbours in B_L.
  std::uint32_t edge_between(std::size_t a, std::size_t b) const;

  /// |x|_inf of a site.
  int shell(std::size_t site) const { return shell_[site]; }
  /// Smallest r with the edge in the edge set of B_r.
  int edge_shell(std::size_t e) const { return std::max(shell_[edges_[e].lower], shell_[edges_[e].upper]); }
  double anchored_weight(std::size_t site) const { return anchor_[site]; }

  std::size_t sites_in_box(int r) const;
  std::size_t edges_in_box(int r) const;

 private:
  int dim_;
  int radius_;
  std::size_t site_count_;
  std::uint32_t origin_;
  std::vector<Edge> edges_;
  std::vector<std::uint32_t> edge_from_;
  std::vector<int> shell_;
  std::vector<double> anchor_;
};

using GeometryPtr = std::shared_ptr<const Geometry>;

GeometryPtr make_geometry(int dim, int radius);

/**
 * Periodic torus of side 2L+1. Sites share the indexing of Geometry(dim, L);
 * torus edge id = site * dim + axis joins a site to its +axis neighbour.
 */
class Torus {
 public:
  Torus(int dim, int radius);

  int dim() const { return dim_; }
  int radius() const { return radius_; }
  int side() const { return 2 * radius_ + 1; }
  std::size_t site_count() const { return site_count_; }
  std::size_t edge_count() const { return site_count_ * std::size_t(dim_); }

  /// Neighbour of `site` shifted by `step` along `axis`, wrapping around.
  std::uint32_t shift(std::size_t site, int axis, int step) const;
  std::uint32_t edge_lower(std::size_t e) const { return std::uint32_t(e / std::size_t(dim_)); }
  std::uint32_t edge_upper(std::size_t e) const { return shift(e / std::size_t(dim_), int(e % std::size_t(dim_)), 1); }

 private:
  int dim_;
  int radius_;
  std::size_t site_count_;
  std::size_t stride_[kMaxDim];
};

/// One real value per site of B_L.
struct SiteFunction {
  GeometryPtr geometry;
  std::vector<double> values;

  SiteFunction() = default;
  explicit SiteFunction(GeometryPtr g, double fill = 0.0);
  SiteFunction(GeometryPtr g, std::vector<double> v);

  static SiteFunction delta(GeometryPtr g, std::size_t site);

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  std::size_t size() const { return values.size(); }
};

/// One real value per edge of B_L.
struct EdgeField {
  GeometryPtr geometry;
  std::vector<double> values;

  EdgeField() = default;
  explicit EdgeField(GeometryPtr g, double fill = 0.0);
  EdgeField(GeometryPtr g, std::vector<double> v);

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  std::size_t size() const { return values.size(); }
};

/// (sum over B_r of |f|^p)^(1/p); max |f| for p = infinity. Throws for p < 1 or r out of range.
double lp_norm(const SiteFunction& f, double p, int r);
/// Same over the edges of B_r.
double lp_norm(const EdgeField& f, double p, int r);
inline double lp_norm(const SiteFunction& f, double p) { return lp_norm(f, p, f.geometry->radius()); }
inline double lp_norm(const EdgeField& f, double p) { return lp_norm(f, p, f.geometry->radius()); }

/// f(upper) - f(lower) on every edge.
EdgeField gradient(const SiteFunction& f);

double box_average(const SiteFunction& f, int r);
/// Lower median of the values on B_r.
double box_median(const SiteFunction& f, int r);

}  // namespace nashlab

#endif  // NASHLAB_LATTICE_HPP
