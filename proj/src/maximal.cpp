#include "nashlab/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "nashlab/report.hpp"
#include "nashlab/rng.hpp"

namespace nashlab {

double FieldLaw::mean() const {
  switch (kind) {
    case Kind::constant: return parameter;
    case Kind::exponential: return 1.0 / parameter;
    case Kind::pareto: return parameter > 1.0 ? parameter / (parameter - 1.0) : kInf;
  }
  return kInf;
}

std::string FieldLaw::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::constant: os << "constant(" << parameter << ")"; break;
    case Kind::exponential: os << "exp(" << parameter << ")"; break;
    case Kind::pareto: os << "pareto(" << parameter << ")"; break;
  }
  return os.str();
}

StationaryField sample_field(int d, int L, const FieldLaw& law, std::uint64_t seed) {
  if (!(law.parameter > 0.0) && law.kind != FieldLaw::Kind::constant)
    throw std::invalid_argument("field law parameter must be positive");
  StationaryField f;
  f.torus = std::make_shared<const Torus>(d, L);
  f.law = law;
  f.seed = seed;
  f.values.resize(f.torus->site_count());
  Rng rng(derive_seed(seed, Stream::field));
  for (double& v : f.values) {
    switch (law.kind) {
      case FieldLaw::Kind::constant: v = law.parameter; break;
      case FieldLaw::Kind::exponential: v = rng.exponential(law.parameter); break;
      case FieldLaw::Kind::pareto: v = std::pow(rng.uniform_open0(), -1.0 / law.parameter); break;
    }
  }
  return f;
}

StationaryField field_from_values(int d, int L, std::vector<double> values) {
  StationaryField f;
  f.torus = std::make_shared<const Torus>(d, L);
  if (values.size() != f.torus->site_count()) throw std::invalid_argument("field size mismatch");
  f.values = std::move(values);
  f.law = FieldLaw::constant(0.0);
  return f;
}

std::vector<double> box_averages(const StationaryField& f) {
  const Torus& tor = *f.torus;
  const int d = tor.dim();
  const int L = tor.radius();
  const std::size_t n = tor.site_count();
  std::vector<double> out(std::size_t(L) * n);
  std::vector<double> cur(n), next(n);
  for (int r = 1; r <= L; ++r) {
    cur = f.values;
    // Separable window sums of width 2r+1 along each axis; 2r+1 <= 2L+1 so no site is counted twice.
    for (int axis = 0; axis < d; ++axis) {
      for (std::size_t x = 0; x < n; ++x) {
        double s = cur[x];
        for (int k = 1; k <= r; ++k) s += cur[tor.shift(x, axis, k)] + cur[tor.shift(x, axis, -k)];
        next[x] = s;
      }
      std::swap(cur, next);
    }
    const double inv = 1.0 / std::pow(2.0 * r + 1.0, d);
    for (std::size_t x = 0; x < n; ++x) out[std::size_t(r - 1) * n + x] = cur[x] * inv;
  }
  return out;
}

namespace {

template <class Pick>
std::vector<double> reduce_scales(const StationaryField& f, Pick pick) {
  const std::size_t n = f.torus->site_count();
  const int L = f.torus->radius();
  if (L < 1) throw std::invalid_argument("maximal functions need L >= 1");
  const std::vector<double> avg = box_averages(f);
  std::vector<double> out(avg.begin(), avg.begin() + std::ptrdiff_t(n));
  for (int r = 2; r <= L; ++r)
    for (std::size_t x = 0; x < n; ++x) out[x] = pick(out[x], avg[std::size_t(r - 1) * n + x]);
  return out;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / double(v.size());
}

double standard_error(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / double(v.size() - 1) / double(v.size()));
}

}  // namespace

std::vector<double> maximal_all(const StationaryField& f) {
  return reduce_scales(f, [](double a, double b) { return std::max(a, b); });
}

std::vector<double> min_all(const StationaryField& f) {
  return reduce_scales(f, [](double a, double b) { return std::min(a, b); });
}

double maximal_fn(const StationaryField& f, std::size_t x) { return maximal_all(f).at(x); }
double min_fn(const StationaryField& f, std::size_t x) { return min_all(f).at(x); }

bool jensen_holds(const StationaryField& g, double slack) {
  StationaryField inv = g;
  for (double& v : inv.values) {
    if (!(v > 0.0)) throw std::invalid_argument("Jensen check needs a positive field");
    v = 1.0 / v;
  }
  const std::vector<double> m = min_all(g);
  const std::vector<double> M = maximal_all(inv);
  for (std::size_t x = 0; x < m.size(); ++x)
    if (1.0 / m[x] > M[x] * (1.0 + slack)) return false;
  return true;
}

std::vector<MaximalRow> weak11_experiment(const FieldLaw& law, int d, int L, const std::vector<double>& lambdas,
                                          std::size_t seeds, std::uint64_t master_seed) {
  if (seeds == 0) throw std::invalid_argument("need at least one seed");
  std::vector<std::vector<double>> frac(lambdas.size(), std::vector<double>(seeds));
  std::vector<double> level(seeds);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t s = 0; s < std::ptrdiff_t(seeds); ++s) {
    const StationaryField f = sample_field(d, L, law, derive_seed(master_seed, Stream::realization, std::uint64_t(s)));
    const std::vector<double> M = maximal_all(f);
    level[std::size_t(s)] = mean(f.values);
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
      std::size_t hits = 0;
      for (double v : M) hits += v >= lambdas[i];
      frac[i][std::size_t(s)] = double(hits) / double(M.size());
    }
  }
  const double ef = mean(level);
  std::vector<MaximalRow> rows;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    MaximalRow row;
    row.law = law.describe();
    row.d = d;
    row.L = L;
    row.lambda_or_p = lambdas[i];
    row.estimate = lambdas[i] * mean(frac[i]) / ef;
    row.stderr_ = lambdas[i] * standard_error(frac[i]) / ef;
    row.bound = std::pow(3.0, d);
    rows.push_back(row);
  }
  return rows;
}

MaximalRow lp_maximal_ratio(const FieldLaw& law, int d, int L, double p, std::size_t seeds,
                            std::uint64_t master_seed) {
  if (!(p > 1.0)) throw std::invalid_argument("the L^p maximal estimate needs p > 1");
  if (seeds == 0) throw std::invalid_argument("need at least one seed");
  const bool sup = std::isinf(p);
  std::vector<double> num(seeds), den(seeds);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t s = 0; s < std::ptrdiff_t(seeds); ++s) {
    const StationaryField f = sample_field(d, L, law, derive_seed(master_seed, Stream::realization, std::uint64_t(s)));
    const std::vector<double> M = maximal_all(f);
    double a = 0.0, b = 0.0;
    for (std::size_t x = 0; x < M.size(); ++x) {
      if (sup) {
        a = std::max(a, M[x]);
        b = std::max(b, f.values[x]);
      } else {
        a += std::pow(M[x], p);
        b += std::pow(std::abs(f.values[x]), p);
      }
    }
    num[std::size_t(s)] = a;
    den[std::size_t(s)] = b;
  }
  MaximalRow row;
  row.law = law.describe();
  row.d = d;
  row.L = L;
  row.lambda_or_p = p;
  std::vector<double> per_seed(seeds);
  double A = 0.0, B = 0.0;
  for (std::size_t s = 0; s < seeds; ++s) {
    per_seed[s] = sup ? num[s] / den[s] : std::pow(num[s] / den[s], 1.0 / p);
    if (sup) {
      A = std::max(A, num[s]);
      B = std::max(B, den[s]);
    } else {
      A += num[s];
      B += den[s];
    }
  }
  row.estimate = sup ? A / B : std::pow(A / B, 1.0 / p);
  row.stderr_ = standard_error(per_seed);
  row.bound = sup ? 1.0 : std::nan("");
  return row;
}

void write_maximal_csv(std::ostream& os, const std::vector<MaximalRow>& rows) {
  os << "law,d,L,lambda_or_p,estimate,stderr,bound\n";
  for (const auto& r : rows)
    os << r.law << ',' << r.d << ',' << r.L << ',' << format_double(r.lambda_or_p) << ','
       << format_double(r.estimate) << ',' << format_double(r.stderr_) << ',' << format_double(r.bound) << '\n';
}

}  // namespace nashlab
