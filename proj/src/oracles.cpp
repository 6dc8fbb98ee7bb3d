#include "hyperperc/oracles.hpp"

#include <algorithm>
#include <cmath>

#include "hyperperc/errors.hpp"

namespace hyperperc::oracles {

namespace {

void check_k(int k) { require(k >= 3, "tree degree must be at least 3"); }
void check_p(double p) { require(p >= 0.0 && p <= 1.0, "p must lie in [0, 1]"); }

double log_binomial_pmf(double n, double x, double p) {
  if (x < 0.0 || x > n) return -kInfinity;
  if (p == 0.0) return x == 0.0 ? 0.0 : -kInfinity;
  if (p == 1.0) return x == n ? 0.0 : -kInfinity;
  return std::lgamma(n + 1.0) - std::lgamma(x + 1.0) - std::lgamma(n - x + 1.0) + x * std::log(p) +
         (n - x) * std::log1p(-p);
}

// Values of a computation at truncation D-2, D-1, D, and the geometric tail
// estimate from the last two increments.
template <class F>
PolygonValue with_tail(F eval, int d_max) {
  PolygonValue out;
  const double a = eval(d_max - 2), b = eval(d_max - 1), c = eval(d_max);
  out.value = c;
  const double d1 = b - a, d2 = c - b;
  if (d2 == 0.0) {
    out.tail_bound = 0.0;
  } else if (d1 != 0.0 && d2 / d1 >= 0.0 && d2 / d1 < 1.0) {
    const double r = d2 / d1;
    out.tail_bound = std::abs(d2) * r / (1.0 - r);
  } else {
    out.tail_bound = kInfinity;
  }
  out.tail_ok = out.tail_bound <= 1e-9;
  return out;
}

}  // namespace

TreeFamily::TreeFamily(int degree) : k(degree) { check_k(degree); }

double tree_two_point(int k, double p, int d) {
  check_k(k);
  check_p(p);
  require(d >= 0, "distance must be non-negative");
  return std::pow(p, d);
}

double tree_two_point_product(int k, double p, int d) {
  check_k(k);
  check_p(p);
  require(d >= 0, "distance must be non-negative");
  double v = 1.0;
  for (int i = 0; i < d; ++i) v *= p;
  return v;
}

double tree_susceptibility(int k, double p) {
  check_k(k);
  check_p(p);
  if (p * (k - 1) >= 1.0) return kInfinity;
  return (1.0 + p) / (1.0 - (k - 1) * p);
}

double tree_susceptibility_series(int k, double p, double tol) {
  check_k(k);
  check_p(p);
  if (p * (k - 1) >= 1.0) return kInfinity;
  double sum = 1.0, term = k * p;
  for (int d = 1; term > tol * sum; ++d) {
    sum += term;
    term *= (k - 1) * p;
  }
  return sum;
}

double tree_sphere_size(int k, int d) {
  check_k(k);
  require(d >= 0, "distance must be non-negative");
  return d == 0 ? 1.0 : k * std::pow(k - 1.0, d - 1);
}

TreeThresholds tree_thresholds(int k, double q) {
  check_k(k);
  if (!(q >= 2.0)) throw InvalidArgument("tree p_{q->q} is only asserted for q in [2, infinity]");
  TreeThresholds t;
  t.growth = k - 1.0;
  t.p_c = 1.0 / t.growth;
  t.p_qq = std::isinf(q) ? t.p_c : std::pow(t.growth, -(q - 1.0) / q);
  t.rho = 2.0 * std::sqrt(t.growth) / k;
  return t;
}

Radial radial_convolve(int k, const Radial& f, const Radial& g, int d_out) {
  check_k(k);
  require(d_out >= 0, "d_out must be non-negative");
  const int nf = static_cast<int>(f.size()), ng = static_cast<int>(g.size());
  Radial out(d_out + 1, 0.0);
  for (int d = 0; d <= d_out; ++d) {
    double sum = 0.0;
    for (int i = 0; i <= d; ++i) {
      // w projects to the point at distance i from u on the geodesic [u, v]
      // and hangs h steps off it.
      for (int h = 0;; ++h) {
        const int a = i + h, b = d - i + h;
        if (a >= nf || b >= ng) break;
        double count;
        if (h == 0) count = 1.0;
        else if (d == 0) count = k * std::pow(k - 1.0, h - 1);
        else if (i == 0 || i == d) count = std::pow(k - 1.0, h);
        else count = (k - 2.0) * std::pow(k - 1.0, h - 1);
        sum += count * f[a] * g[b];
      }
    }
    out[d] = sum;
  }
  return out;
}

double tree_tp_symbol(int k, double p, double lambda) {
  return (1.0 - p * p) / (1.0 - p * lambda + (k - 1.0) * p * p);
}

PolygonValue tree_polygon(int k, double p, int n, int d_max) {
  check_k(k);
  check_p(p);
  require(n >= 1, "n must be at least 1");
  require(d_max >= 2, "d_max must be at least 2");
  if (n == 1) return {1.0, 0.0, true};
  auto eval = [&](int dm) {
    Radial f(dm + 1);
    for (int d = 0; d <= dm; ++d) f[d] = std::pow(p, d);
    Radial g = f;
    for (int j = 2; j < n; ++j) g = radial_convolve(k, f, g, dm);
    return radial_convolve(k, f, g, 0)[0];
  };
  return with_tail(eval, d_max);
}

double tree_polygon_spectral(int k, double p, int n) {
  check_k(k);
  check_p(p);
  require(p * std::sqrt(k - 1.0) < 1.0, "spectral formula needs p < 1/sqrt(k-1)");
  return kesten_mckay_integral(k, [&](double l) { return std::pow(tree_tp_symbol(k, p, l), n); });
}

double tree_triangle(int k, double p, int d_max) { return tree_polygon(k, p, 3, d_max).value; }

std::vector<double> tree_walk_distance_distribution(int k, int n) {
  check_k(k);
  require(n >= 0, "n must be non-negative");
  std::vector<double> cur(n + 2, 0.0), next(n + 2, 0.0);
  cur[0] = 1.0;
  const double up = (k - 1.0) / k, down = 1.0 / k;
  for (int step = 0; step < n; ++step) {
    std::fill(next.begin(), next.end(), 0.0);
    next[1] += cur[0];
    for (int m = 1; m <= step; ++m) {
      next[m + 1] += up * cur[m];
      next[m - 1] += down * cur[m];
    }
    std::swap(cur, next);
  }
  cur.resize(n + 1);
  return cur;
}

double tree_walk_two_point(int k, double p, int n) {
  check_p(p);
  auto dist = tree_walk_distance_distribution(k, n);
  double sum = 0.0;
  for (int m = n; m >= 0; --m) sum += dist[m] * std::pow(p, m);
  return sum;
}

double tree_walk_two_point_spectral(int k, double p, int n) {
  check_k(k);
  check_p(p);
  require(p * std::sqrt(k - 1.0) < 1.0, "spectral formula needs p < 1/sqrt(k-1)");
  return kesten_mckay_integral(k, [&](double l) { return std::pow(l / k, n) * tree_tp_symbol(k, p, l); });
}

double tree_branching_sum(int k, double p, int n_gen) {
  check_k(k);
  check_p(p);
  require(n_gen >= 1, "n_gen must be at least 1");
  return std::pow((k - 1.0) * p, n_gen);
}

double tree_branching_sum_product(int k, double p, int n_gen) {
  check_k(k);
  check_p(p);
  require(n_gen >= 1, "n_gen must be at least 1");
  double v = 1.0;
  for (int i = 0; i < n_gen; ++i) v *= (k - 1.0) * p;
  return v;
}

std::vector<double> tree_cluster_size_pmf(int k, double p, std::uint64_t n_max) {
  check_k(k);
  check_p(p);
  require(n_max >= 1, "n_max must be at least 1");
  std::vector<double> pmf(n_max + 1, 0.0);
  pmf[1] = std::pow(1.0 - p, k);
  for (std::uint64_t n = 2; n <= n_max; ++n) {
    const double m = static_cast<double>(n - 1);  // vertices below the root
    double sum = 0.0;
    for (int j = 1; j <= k && static_cast<std::uint64_t>(j) <= n - 1; ++j) {
      // P(Z = j) * P(total progeny of j independent subtrees = m), where the
      // latter is (j/m) P(Bin(m(k-1), p) = m - j).
      const double log_term = log_binomial_pmf(k, j, p) + std::log(j / m) +
                              log_binomial_pmf(m * (k - 1.0), m - j, p);
      sum += std::exp(log_term);
    }
    pmf[n] = sum;
  }
  return pmf;
}

ExactTail tree_cluster_tail_exact(int k, double p, const std::vector<std::uint64_t>& grid) {
  require(!grid.empty(), "grid must be nonempty");
  require(std::is_sorted(grid.begin(), grid.end()) && grid.front() >= 1, "grid must be sorted and positive");
  const std::uint64_t n_max = grid.back();
  ExactTail out;
  out.n = grid;
  const bool subcritical = p * (k - 1) < 1.0;
  std::vector<double> pmf;
  std::vector<double> tail;
  if (subcritical) {
    // Sum the tail directly to avoid cancellation in 1 - P(|K| < n).
    std::uint64_t cut = std::max<std::uint64_t>(2 * n_max, 64);
    for (;;) {
      pmf = tree_cluster_size_pmf(k, p, cut);
      if (pmf.back() <= 1e-18 * pmf[n_max] || pmf.back() < 1e-300 || cut >= (1ULL << 24)) break;
      cut *= 2;
    }
    tail.assign(pmf.size() + 1, 0.0);
    for (std::size_t n = pmf.size(); n-- > 1;) tail[n] = tail[n + 1] + pmf[n];
    if (pmf.back() > 1e-18 * pmf[n_max] && pmf.back() >= 1e-300) {
      // Decay too slow to sum; fall back to the complement.
      tail.clear();
    }
  }
  if (tail.empty()) {
    if (pmf.size() < n_max + 1) pmf = tree_cluster_size_pmf(k, p, n_max);
    tail.assign(n_max + 2, 0.0);
    long double below = 0.0L;
    for (std::uint64_t n = 1; n <= n_max; ++n) {
      tail[n] = static_cast<double>(1.0L - below);
      below += pmf[n];
    }
  }
  for (auto n : grid) out.probability.push_back(std::max(0.0, tail[n]));
  return out;
}

std::vector<double> tree_cluster_size_pmf_dp(int k, double p, std::size_t n_max) {
  check_k(k);
  check_p(p);
  require(n_max >= 1 && n_max <= 2000, "n_max must lie in [1, 2000]");
  using Poly = std::vector<double>;
  const std::size_t len = n_max + 1;
  auto mul = [&](const Poly& a, const Poly& b) {
    Poly c(len, 0.0);
    for (std::size_t i = 0; i < len; ++i) {
      if (a[i] == 0.0) continue;
      for (std::size_t j = 0; i + j < len; ++j) c[i + j] += a[i] * b[j];
    }
    return c;
  };
  // s * (1 - p + p x)^e as a truncated polynomial.
  auto shifted_power = [&](const Poly& x, int e) {
    Poly base(len, 0.0);
    for (std::size_t i = 0; i < len; ++i) base[i] = p * x[i];
    base[0] += 1.0 - p;
    Poly r(len, 0.0);
    r[0] = 1.0;
    for (int i = 0; i < e; ++i) r = mul(r, base);
    Poly out(len, 0.0);
    for (std::size_t i = 0; i + 1 < len; ++i) out[i + 1] = r[i];
    return out;
  };
  // Subtree progeny generating function F = s (1 - p + p F)^{k-1}; each
  // iteration fixes one more coefficient.
  Poly f(len, 0.0);
  for (std::size_t it = 0; it < len; ++it) f = shifted_power(f, k - 1);
  return shifted_power(f, k);
}

double line_two_point(double p, int d) {
  check_p(p);
  return std::pow(p, std::abs(d));
}

}  // namespace hyperperc::oracles
