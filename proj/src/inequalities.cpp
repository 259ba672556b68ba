#include "nashlab/inequalities.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "nashlab/rng.hpp"

namespace nashlab {

namespace {

void check_exponent_domain(int d, double p, double q) {
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  if (!(p > d)) throw std::invalid_argument("moment exponent p must exceed the dimension");
  if (!(q > d)) throw std::invalid_argument("integrability exponent q must exceed the dimension");
}

std::string site_string(const Site& x, int dim) {
  std::ostringstream os;
  os << '(';
  for (int i = 0; i < dim; ++i) os << (i ? "," : "") << x[i];
  os << ')';
  return os.str();
}

}  // namespace

double theta_c(int d, double p, double q) {
  check_exponent_domain(d, p, q);
  if (std::isinf(q)) return 0.0;
  // 1/theta_c = 1 + (dp+2p)/(dp+2d) (q/d - 1), cleared of denominators.
  const double dd = double(d);
  const double num = dd * dd * (p + 2.0);
  return num / (num + p * (dd + 2.0) * (q - dd));
}

NashExponents nash_exponents(int d, double p, double q, double theta) {
  NashExponents e;
  e.d = d;
  e.p = p;
  e.q = q;
  e.theta = theta;
  e.theta_c = theta_c(d, p, q);
  if (!(theta >= e.theta_c) || !(theta <= 1.0)) {
    std::ostringstream os;
    os << "theta = " << theta << " outside [theta_c, 1] = [" << e.theta_c
       << ", 1]; the anchored Nash inequality needs theta >= theta_c";
    throw std::invalid_argument(os.str());
  }
  const double dd = double(d);
  e.alpha = (1.0 - theta) * dd / (dd + 2.0) + theta * p / (p + 2.0);
  e.beta = (1.0 - theta) * 2.0 / (dd + 2.0);
  e.gamma = theta * 2.0 / (p + 2.0);
  return e;
}

double maximal_Mq(const EdgeField& w, double q) {
  const Geometry& g = *w.geometry;
  if (!(q > 0.0)) throw std::invalid_argument("maximal_Mq needs q > 0");
  double wmin = kInf;
  for (double v : w.values) wmin = std::min(wmin, v);
  if (!(wmin > 0.0)) return kInf;
  if (std::isinf(q)) return 1.0 / wmin;

  // Factor out the smallest weight so that w^{-q} cannot overflow.
  const int L = g.radius();
  std::vector<double> by_shell(std::size_t(L) + 1, 0.0);
  for (std::size_t e = 0; e < g.edge_count(); ++e) by_shell[std::size_t(g.edge_shell(e))] += std::pow(wmin / w[e], q);
  double cum = by_shell[0];
  double best = 0.0;
  for (int r = 1; r <= L; ++r) {
    cum += by_shell[std::size_t(r)];
    best = std::max(best, cum / double(g.edges_in_box(r)));
  }
  return std::pow(best, 1.0 / q) / wmin;
}

NashTerms nash_terms(const SiteFunction& f, const EdgeField& w, double p) {
  const Geometry& g = *f.geometry;
  NashTerms t;
  double l2 = 0.0, l1 = 0.0, mom = 0.0, wg = 0.0;
  for (std::size_t x = 0; x < f.size(); ++x) {
    const double v = f[x];
    l2 += v * v;
    l1 += std::abs(v);
    mom += std::pow(g.anchored_weight(x), p) * v * v;
  }
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const auto& ed = g.edge(e);
    const double d = w[e] * (f[ed.upper] - f[ed.lower]);
    wg += d * d;
  }
  t.l2 = std::sqrt(l2);
  t.l1 = l1;
  t.moment = std::sqrt(mom);
  t.weighted_gradient = std::sqrt(wg);
  return t;
}

double nash_ratio(const SiteFunction& f, const EdgeField& w, const NashExponents& exps) {
  return nash_ratio(f, w, maximal_Mq(w, exps.q), exps);
}

double nash_ratio(const SiteFunction& f, const EdgeField& w, double mq, const NashExponents& exps) {
  const NashTerms t = nash_terms(f, w, exps.p);
  if (t.l2 == 0.0) throw std::invalid_argument("nash_ratio needs f not identically zero");
  const double factors[3] = {mq * t.weighted_gradient, t.l1, t.moment};
  const double powers[3] = {exps.alpha, exps.beta, exps.gamma};
  bool vanishing = false, infinite = false;
  for (int i = 0; i < 3; ++i) {
    if (powers[i] <= 0.0) continue;
    if (factors[i] == 0.0 || std::isnan(factors[i])) vanishing = true;
    if (std::isinf(factors[i])) infinite = true;
  }
  if (vanishing) return kInf;
  if (infinite) return 0.0;
  double denom = 1.0;
  for (int i = 0; i < 3; ++i)
    if (powers[i] > 0.0) denom *= std::pow(factors[i], powers[i]);
  return t.l2 / denom;
}

double poincare_sobolev_ratio(const SiteFunction& f, int r, double p) {
  const Geometry& g = *f.geometry;
  const int d = g.dim();
  if (!(p >= 1.0) || !(p < d)) throw std::invalid_argument("Poincare-Sobolev ratio needs 1 <= p < d");
  const double pstar = double(d) * p / (double(d) - p);
  const double mean = box_average(f, r);
  SiteFunction centred(f.geometry);
  for (std::size_t x = 0; x < f.size(); ++x) centred[x] = f[x] - mean;
  const double grad = lp_norm(gradient(f), p, r);
  const double lhs = lp_norm(centred, pstar, r);
  if (grad == 0.0) return 0.0;
  return lhs / grad;
}

double isoperimetric_ratio(const Geometry& g, const std::vector<std::uint8_t>& member, int r) {
  if (member.size() != g.site_count()) throw std::invalid_argument("membership size mismatch");
  std::size_t volume = 0;
  for (std::size_t x = 0; x < member.size(); ++x)
    if (member[x] && g.shell(x) <= r) ++volume;
  if (volume == 0) return 0.0;
  std::size_t boundary = 0;
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    if (g.edge_shell(e) > r) continue;
    const auto& ed = g.edge(e);
    if ((member[ed.lower] != 0) != (member[ed.upper] != 0)) ++boundary;
  }
  if (boundary == 0) return kInf;
  const double d = double(g.dim());
  return std::pow(double(volume), (d - 1.0) / d) / double(boundary);
}

double hls_ratio(const SiteFunction& f, int r) {
  const Geometry& g = *f.geometry;
  const int d = g.dim();
  const double mean = box_average(f, r);
  struct Term {
    Site lower;
    double grad;
  };
  std::vector<Term> terms;
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    if (g.edge_shell(e) > r) continue;
    const auto& ed = g.edge(e);
    const double gr = std::abs(f[ed.upper] - f[ed.lower]);
    if (gr > 0.0) terms.push_back({g.site(ed.lower), gr});
  }
  if (terms.empty()) return 0.0;
  double best = 0.0;
  for (std::size_t x = 0; x < f.size(); ++x) {
    if (g.shell(x) > r) continue;
    const double lhs = std::abs(f[x] - mean);
    if (lhs == 0.0) continue;
    const Site xs = g.site(x);
    double rhs = 0.0;
    for (const Term& t : terms) {
      double s = 0.0;
      for (int i = 0; i < d; ++i) s += double(xs[i] - t.lower[i]) * double(xs[i] - t.lower[i]);
      const double base = 1.0 + std::sqrt(s);
      rhs += t.grad / (d == 2 ? base : std::pow(base, d - 1));
    }
    best = std::max(best, lhs / rhs);
  }
  return best;
}

std::vector<Site> build_path(const Site& x, const Site& y, int dim) {
  // Squared distance to the segment [x, y] scaled by |y - x|^2, in exact integer arithmetic.
  std::int64_t v[kMaxDim] = {0, 0, 0};
  std::int64_t vv = 0;
  for (int i = 0; i < dim; ++i) {
    v[i] = y[i] - x[i];
    vv += v[i] * v[i];
  }
  auto scaled_dist = [&](const Site& pnt) {
    std::int64_t wv = 0, ww = 0, uu = 0;
    for (int i = 0; i < dim; ++i) {
      const std::int64_t w = pnt[i] - x[i];
      const std::int64_t u = pnt[i] - y[i];
      wv += w * v[i];
      ww += w * w;
      uu += u * u;
    }
    if (wv <= 0) return ww * vv;
    if (wv >= vv) return uu * vv;
    return ww * vv - wv * wv;
  };

  std::vector<Site> path{x};
  Site cur = x;
  while (cur != y) {
    int best_axis = -1;
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    for (int i = 0; i < dim; ++i) {
      if (cur[i] == y[i]) continue;
      Site cand = cur;
      cand[i] += y[i] > cur[i] ? 1 : -1;
      const std::int64_t dist = scaled_dist(cand);
      if (dist < best) {
        best = dist;
        best_axis = i;
      }
    }
    cur[best_axis] += y[best_axis] > cur[best_axis] ? 1 : -1;
    path.push_back(cur);
  }
  return path;
}

std::vector<std::uint32_t> path_counts_from(const Geometry& g, const Site& x, int r) {
  if (r > g.radius()) throw std::invalid_argument("path radius exceeds the lattice");
  std::vector<std::uint32_t> counts(g.edge_count(), 0);
  for (std::size_t yi = 0; yi < g.site_count(); ++yi) {
    if (g.shell(yi) > r) continue;
    const auto path = build_path(x, g.site(yi), g.dim());
    for (std::size_t k = 1; k < path.size(); ++k) {
      const std::uint32_t e = g.edge_between(g.index(path[k - 1]), g.index(path[k]));
      ++counts[e];
    }
  }
  return counts;
}

std::uint32_t path_count(const Geometry& g, std::size_t e, const Site& x, int r) {
  return path_counts_from(g, x, r).at(e);
}

double path_count_constant(const Geometry& g, int r) {
  const int d = g.dim();
  std::vector<std::size_t> sites;
  for (std::size_t x = 0; x < g.site_count(); ++x)
    if (g.shell(x) <= r) sites.push_back(x);
  std::vector<double> best(sites.size(), 0.0);
  const double scale = std::pow(double(r), d);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < std::ptrdiff_t(sites.size()); ++i) {
    const Site xs = g.site(sites[std::size_t(i)]);
    const auto counts = path_counts_from(g, xs, r);
    double b = 0.0;
    for (std::size_t e = 0; e < counts.size(); ++e) {
      if (counts[e] == 0) continue;
      const Site lo = g.site(g.edge(e).lower);
      double s = 0.0;
      for (int k = 0; k < d; ++k) s += double(xs[k] - lo[k]) * double(xs[k] - lo[k]);
      b = std::max(b, double(counts[e]) * std::pow(1.0 + std::sqrt(s), d - 1) / scale);
    }
    best[std::size_t(i)] = b;
  }
  return best.empty() ? 0.0 : *std::max_element(best.begin(), best.end());
}

OptLemmaResult opt_lemma(double a, double a_prime, double b, double c, double A, double B, double D) {
  if (!(a > 0 && a_prime > 0 && b > 0 && c > 0)) throw std::invalid_argument("opt_lemma needs a, a', b, c > 0");
  if (!(A >= 0 && B >= 0 && D >= 0)) throw std::invalid_argument("opt_lemma needs A, B, D >= 0");
  OptLemmaResult res;
  if (A == 0.0 || B == 0.0 || D == 0.0) {
    res.degenerate = true;
    res.r = res.R = std::numeric_limits<double>::quiet_NaN();
    return res;
  }
  const double sigma = a * b + a_prime * c + b * c;
  const double lA = std::log(A), lB = std::log(B), lD = std::log(D);
  const double lr = (-c * lA + (c + a) * lB - a * lD) / sigma;
  const double lR = (lD - lB) / c + (b / c) * lr;
  res.r = std::exp(lr);
  res.R = std::exp(lR);
  res.bound = 3.0 * std::exp((b * c * lA + a_prime * c * lB + a * b * lD) / sigma);
  return res;
}

double opt_objective(double a, double a_prime, double b, double c, double A, double B, double D, double r,
                     double R) {
  return std::pow(R, a) * std::pow(r, a_prime) * A + std::pow(r, -b) * B + std::pow(R, -c) * D;
}

std::vector<CorpusItem> test_corpus(const GeometryPtr& g, std::size_t count, std::uint64_t seed) {
  const int L = g->radius();
  const int d = g->dim();
  std::vector<CorpusItem> items;
  items.reserve(count);
  auto scaled_centre = [&](Rng& rng) {
    Site c{0, 0, 0};
    for (int i = 0; i < d; ++i) c[i] = int(std::lround(rng.uniform(-1.0, 1.0) * L / 2.0));
    return c;
  };
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(derive_seed(seed, Stream::corpus, i));
    CorpusItem item{CorpusKind(i % 3), {}, SiteFunction(g)};
    std::ostringstream desc;
    switch (item.kind) {
      case CorpusKind::gaussian_bump: {
        const Site c = scaled_centre(rng);
        const double width = std::exp(rng.uniform(std::log(0.5), std::log(std::max(0.5, L / 4.0))));
        for (std::size_t x = 0; x < g->site_count(); ++x) {
          const Site xs = g->site(x);
          double s = 0.0;
          for (int k = 0; k < d; ++k) s += double(xs[k] - c[k]) * double(xs[k] - c[k]);
          item.f[x] = std::exp(-s / (2.0 * width * width));
        }
        desc << "bump#" << i << " centre=" << site_string(c, d) << " width=" << width;
        break;
      }
      case CorpusKind::sparse_sign: {
        const int k = 1 + int(rng.below(8));
        desc << "sparse#" << i << " points=" << k;
        for (int j = 0; j < k; ++j) {
          const Site c = scaled_centre(rng);
          item.f[g->index(c)] += rng.bernoulli(0.5) ? 1.0 : -1.0;
        }
        bool all_zero = std::all_of(item.f.values.begin(), item.f.values.end(), [](double v) { return v == 0.0; });
        if (all_zero) item.f[g->origin()] = 1.0;
        break;
      }
      case CorpusKind::indicator: {
        const Site c = scaled_centre(rng);
        const int h = int(std::lround(rng.uniform(0.0, L / 4.0)));
        for (std::size_t x = 0; x < g->site_count(); ++x) {
          const Site xs = g->site(x);
          int m = 0;
          for (int k = 0; k < d; ++k) m = std::max(m, std::abs(xs[k] - c[k]));
          if (m <= h) item.f[x] = 1.0;
        }
        desc << "indicator#" << i << " centre=" << site_string(c, d) << " halfwidth=" << h;
        break;
      }
    }
    item.descriptor = desc.str();
    items.push_back(std::move(item));
  }
  return items;
}

std::vector<std::vector<std::uint8_t>> random_sets(const Geometry& g, int r, std::size_t count, std::uint64_t seed) {
  const int d = g.dim();
  const std::size_t half = g.sites_in_box(r) / 2;
  std::vector<std::vector<std::uint8_t>> sets;
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(derive_seed(seed, Stream::corpus, 1000000 + i));
    Site c{0, 0, 0};
    for (int k = 0; k < d; ++k) c[k] = int(std::lround(rng.uniform(-1.0, 1.0) * r / 2.0));
    const bool ball = rng.bernoulli(0.5);
    double rad = rng.uniform(0.0, r / 2.0);
    std::vector<std::uint8_t> m;
    for (;;) {
      m.assign(g.site_count(), 0);
      std::size_t vol = 0;
      for (std::size_t x = 0; x < g.site_count(); ++x) {
        if (g.shell(x) > r) continue;
        const Site xs = g.site(x);
        double s = 0.0;
        for (int k = 0; k < d; ++k) {
          const double dx = std::abs(xs[k] - c[k]);
          s = ball ? s + dx * dx : std::max(s, dx);
        }
        if ((ball ? std::sqrt(s) : s) <= rad) {
          m[x] = 1;
          ++vol;
        }
      }
      if (vol <= half) break;
      rad *= 0.8;
    }
    m[g.index(c)] = 1;
    sets.push_back(std::move(m));
  }
  return sets;
}

InequalityReport nash_sweep(const GeometryPtr& g, const EdgeField& w, const NashExponents& exps, std::size_t count,
                            std::uint64_t seed) {
  const auto items = test_corpus(g, count, seed);
  const double mq = maximal_Mq(w, exps.q);
  std::vector<double> values(items.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < std::ptrdiff_t(items.size()); ++i)
    values[std::size_t(i)] = nash_ratio(items[std::size_t(i)].f, w, mq, exps);
  const auto best = std::size_t(std::max_element(values.begin(), values.end()) - values.begin());
  std::ostringstream name;
  name << "anchored_nash(d=" << exps.d << ",p=" << exps.p << ",q=" << exps.q << ",theta=" << exps.theta << ")";
  return {name.str(), "bumps/sparse/indicators seed=" + std::to_string(seed), g->radius(), items.size(), values[best],
          items[best].descriptor};
}

InequalityReport poincare_sweep(const GeometryPtr& g, double p, std::size_t count, std::uint64_t seed) {
  const auto items = test_corpus(g, count, seed);
  std::vector<double> values(items.size());
  const int r = g->radius();
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < std::ptrdiff_t(items.size()); ++i)
    values[std::size_t(i)] = poincare_sobolev_ratio(items[std::size_t(i)].f, r, p);
  const auto best = std::size_t(std::max_element(values.begin(), values.end()) - values.begin());
  std::ostringstream name;
  name << "poincare_sobolev(d=" << g->dim() << ",p=" << p << ")";
  return {name.str(), "bumps/sparse/indicators seed=" + std::to_string(seed), r, items.size(), values[best],
          items[best].descriptor};
}

InequalityReport isoperimetric_sweep(const Geometry& g, std::size_t count, std::uint64_t seed) {
  const int r = g.radius();
  const auto sets = random_sets(g, r, count, seed);
  std::vector<double> values(sets.size());
  for (std::size_t i = 0; i < sets.size(); ++i) values[i] = isoperimetric_ratio(g, sets[i], r);
  const auto best = std::size_t(std::max_element(values.begin(), values.end()) - values.begin());
  return {"isoperimetric(d=" + std::to_string(g.dim()) + ")", "random boxes/balls seed=" + std::to_string(seed), r,
          sets.size(), values[best], "set#" + std::to_string(best)};
}

InequalityReport isoperimetric_exhaustive_b1() {
  const Geometry g(2, 1);
  InequalityReport rep{"isoperimetric(d=2)", "all subsets of B_1 with |A| <= 4", 1, 0, 0.0, ""};
  for (unsigned mask = 1; mask < 512u; ++mask) {
    if (std::popcount(mask) > 4) continue;
    std::vector<std::uint8_t> m(9);
    for (unsigned k = 0; k < 9; ++k) m[k] = (mask >> k) & 1u;
    const double v = isoperimetric_ratio(g, m, 1);
    ++rep.samples;
    if (v > rep.best_constant) {
      rep.best_constant = v;
      rep.argmax = "mask=" + std::to_string(mask);
    }
  }
  return rep;
}

InequalityReport hls_sweep(const GeometryPtr& g, std::size_t count, std::uint64_t seed) {
  const auto items = test_corpus(g, count, seed);
  std::vector<double> values(items.size());
  const int r = g->radius();
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < std::ptrdiff_t(items.size()); ++i)
    values[std::size_t(i)] = hls_ratio(items[std::size_t(i)].f, r);
  const auto best = std::size_t(std::max_element(values.begin(), values.end()) - values.begin());
  return {"pointwise_kernel_bound(d=" + std::to_string(g->dim()) + ")",
          "bumps/sparse/indicators seed=" + std::to_string(seed), r, items.size(), values[best],
          items[best].descriptor};
}

InequalityReport path_count_report(const Geometry& g) {
  const int r = g.radius();
  return {"path_count(d=" + std::to_string(g.dim()) + ")", "all x in B_r, all edges", r, g.sites_in_box(r),
          path_count_constant(g, r), ""};
}

}  // namespace nashlab
