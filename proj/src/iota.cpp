#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "hyperperc/errors.hpp"
#include "hyperperc/operators.hpp"

namespace hyperperc::operators {

namespace {

// Tracks K together with r = T 1_K and S = 1_K^T T 1_K under single flips.
class SubsetState {
 public:
  explicit SubsetState(const TwoPointMatrix& t) : t_(t), in_(t.size(), 0), r_(t.size(), 0.0) {}

  void assign(const std::vector<Vertex>& k) {
    std::fill(in_.begin(), in_.end(), 0);
    std::vector<double> ind(t_.size(), 0.0);
    for (Vertex v : k) {
      in_[v] = 1;
      ind[v] = 1.0;
    }
    size_ = k.size();
    r_ = t_.apply(ind);
    s_ = 0.0;
    for (Vertex v : k) s_ += r_[v];
  }
  // S after flipping v, without applying it.
  double flipped_sum(Vertex v) const {
    const double d = t_(v, v);
    return in_[v] ? s_ - 2.0 * r_[v] + d : s_ + 2.0 * r_[v] + d;
  }
  std::size_t flipped_size(Vertex v) const { return in_[v] ? size_ - 1 : size_ + 1; }
  void flip(Vertex v) {
    s_ = flipped_sum(v);
    size_ = flipped_size(v);
    const double sign = in_[v] ? -1.0 : 1.0;
    in_[v] ^= 1;
    const auto c = t_.column(v);
    for (std::size_t i = 0; i < r_.size(); ++i) r_[i] += sign * c[i];
  }
  double sum() const { return s_; }
  std::size_t size() const { return size_; }
  bool contains(Vertex v) const { return in_[v] != 0; }
  double row(Vertex v) const { return r_[v]; }
  std::vector<Vertex> members() const {
    std::vector<Vertex> out;
    for (std::size_t v = 0; v < in_.size(); ++v)
      if (in_[v]) out.push_back(static_cast<Vertex>(v));
    return out;
  }

 private:
  const TwoPointMatrix& t_;
  std::vector<std::uint8_t> in_;
  std::vector<double> r_;
  double s_ = 0.0;
  std::size_t size_ = 0;
};

double subset_sum(const TwoPointMatrix& t, const std::vector<Vertex>& k) {
  std::vector<double> ind(t.size(), 0.0);
  for (Vertex v : k) ind[v] = 1.0;
  const auto r = t.apply(ind);
  double s = 0.0;
  for (Vertex v : k) s += r[v];
  return s;
}

struct Best {
  double ratio = -1.0;
  std::vector<Vertex> set;
  void offer(double r, const std::vector<Vertex>& k) {
    if (r > ratio) {
      ratio = r;
      set = k;
    }
  }
};

std::vector<double> top_eigenvector(const TwoPointMatrix& t) {
  std::vector<double> x(t.size(), 1.0);
  for (int it = 0; it < 300; ++it) {
    x = t.apply(x);
    const double m = *std::max_element(x.begin(), x.end());
    for (double& v : x) v /= m;
  }
  return x;
}

std::vector<int> bfs(const GraphWindow& w, Vertex s) { return graphs::bfs_distances(w, s); }

}  // namespace

IotaResult iota_exact(const TwoPointMatrix& t) {
  const std::size_t n = t.size();
  require(n >= 1, "matrix must be nonempty");
  require(n <= kExactIotaMax, "exact iota is limited to 20 vertices");
  IotaResult out;
  out.exact = true;
  out.chi_bar = norm_1(t);
  const auto d = t.to_dense();
  std::vector<double> r(n, 0.0);
  std::vector<std::uint8_t> in(n, 0);
  double s = 0.0;
  std::size_t size = 0;
  double best = -1.0;
  std::uint32_t best_mask = 0, mask = 0;
  // Gray code: step i flips the lowest set bit of i.
  for (std::uint32_t i = 1; i < (1u << n); ++i) {
    const std::size_t v = static_cast<std::size_t>(std::countr_zero(i));
    if (in[v]) {
      s -= 2.0 * r[v] - d[v * n + v];
      --size;
      for (std::size_t j = 0; j < n; ++j) r[j] -= d[j * n + v];
    } else {
      s += 2.0 * r[v] + d[v * n + v];
      ++size;
      for (std::size_t j = 0; j < n; ++j) r[j] += d[j * n + v];
    }
    in[v] ^= 1;
    mask ^= 1u << v;
    const double ratio = s / static_cast<double>(size);
    if (ratio > best) {
      best = ratio;
      best_mask = mask;
    }
  }
  for (std::size_t v = 0; v < n; ++v)
    if (best_mask >> v & 1u) out.certificate.push_back(static_cast<Vertex>(v));
  out.best_ratio = subset_sum(t, out.certificate) / (out.chi_bar * static_cast<double>(out.certificate.size()));
  out.value = 1.0 - out.best_ratio;
  return out;
}

IotaResult iota_heuristic(const TwoPointMatrix& t) {
  const std::size_t n = t.size();
  require(n >= 1, "matrix must be nonempty");
  IotaResult out;
  out.chi_bar = norm_1(t);
  const double chi = out.chi_bar;
  auto ratio_of = [&](const std::vector<Vertex>& k) {
    return subset_sum(t, k) / (chi * static_cast<double>(k.size()));
  };
  Best best;
  best.offer(1.0 / chi, {0});
  std::vector<Vertex> all(n);
  std::iota(all.begin(), all.end(), 0);
  best.offer(ratio_of(all), all);

  if (const GraphWindow* w = t.window()) {
    std::vector<Vertex> centers;
    if (n <= 200) {
      centers = all;
    } else {
      for (std::size_t i = 0; i < 32; ++i) centers.push_back(static_cast<Vertex>(i * (n - 1) / 31));
    }
    for (Vertex c : centers) {
      // (a) balls around c
      const auto dist = bfs(*w, c);
      const int max_d = *std::max_element(dist.begin(), dist.end());
      for (int r = 1; r <= max_d; ++r) {
        std::vector<Vertex> ball;
        for (std::size_t v = 0; v < n; ++v)
          if (dist[v] >= 0 && dist[v] <= r) ball.push_back(static_cast<Vertex>(v));
        best.offer(ratio_of(ball), ball);
      }
      // (b) discrete half-spaces H(c, b) for neighbours b
      for (Vertex b : w->neighbors(c)) {
        auto h = graphs::discrete_halfspace(*w, c, b);
        if (!h.empty()) best.offer(ratio_of(h), h);
      }
    }
  }

  // (c) prefixes of the top-eigenvector ordering
  {
    const auto x = top_eigenvector(t);
    std::vector<Vertex> order = all;
    std::stable_sort(order.begin(), order.end(), [&](Vertex a, Vertex b) { return x[a] > x[b]; });
    SubsetState st(t);
    std::size_t best_len = 0;
    double best_prefix = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      st.flip(order[i]);
      const double r = st.sum() / (chi * static_cast<double>(st.size()));
      if (r > best_prefix) {
        best_prefix = r;
        best_len = i + 1;
      }
    }
    std::vector<Vertex> prefix(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(best_len));
    std::sort(prefix.begin(), prefix.end());
    best.offer(ratio_of(prefix), prefix);
  }

  // Local search from the best candidate: single flips, then pair swaps on
  // small matrices.
  SubsetState st(t);
  st.assign(best.set);
  auto current = [&] { return st.sum() / static_cast<double>(st.size()); };
  for (int round = 0; round < 4 * static_cast<int>(n) + 100; ++round) {
    bool improved = false;
    double best_gain = current() * (1.0 + 1e-12);
    Vertex flip_v = -1;
    for (std::size_t v = 0; v < n; ++v) {
      const std::size_t sz = st.flipped_size(static_cast<Vertex>(v));
      if (sz == 0) continue;
      const double r = st.flipped_sum(static_cast<Vertex>(v)) / static_cast<double>(sz);
      if (r > best_gain) {
        best_gain = r;
        flip_v = static_cast<Vertex>(v);
      }
    }
    if (flip_v >= 0) {
      st.flip(flip_v);
      improved = true;
    } else if (n <= 300) {
      Vertex out_v = -1, in_v = -1;
      for (std::size_t u = 0; u < n; ++u) {
        if (!st.contains(static_cast<Vertex>(u))) continue;
        for (std::size_t w = 0; w < n; ++w) {
          if (st.contains(static_cast<Vertex>(w))) continue;
          const Vertex uu = static_cast<Vertex>(u), ww = static_cast<Vertex>(w);
          const double s = st.sum() - 2.0 * st.row(uu) + t(uu, uu) + 2.0 * (st.row(ww) - t(ww, uu)) + t(ww, ww);
          const double r = s / static_cast<double>(st.size());
          if (r > best_gain) {
            best_gain = r;
            out_v = uu;
            in_v = ww;
          }
        }
      }
      if (out_v >= 0) {
        st.flip(out_v);
        st.flip(in_v);
        improved = true;
      }
    }
    if (!improved) break;
  }
  const auto searched = st.members();
  best.offer(ratio_of(searched), searched);

  out.certificate = best.set;
  out.best_ratio = best.ratio;
  out.value = 1.0 - out.best_ratio;
  return out;
}

IotaResult iota(const TwoPointMatrix& t) {
  return t.size() <= kExactIotaMax ? iota_exact(t) : iota_heuristic(t);
}

SandwichReport cheeger_sandwich_check(const TwoPointMatrix& t, double tol) {
  SandwichReport r;
  auto io = iota_exact(t);
  r.chi_bar = io.chi_bar;
  r.iota = io.value;
  r.norm_2 = norm_2(t).value;
  r.lower = r.chi_bar * (1.0 - r.iota);
  r.upper = r.chi_bar * std::sqrt(std::max(0.0, 1.0 - r.iota * r.iota));
  r.lower_holds = r.lower <= r.norm_2 * (1.0 + tol) + tol;
  r.upper_holds = r.norm_2 <= r.upper * (1.0 + tol) + tol;
  return r;
}

}  // namespace hyperperc::operators
