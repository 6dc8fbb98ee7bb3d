#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <memory>
#include <thread>
#include <vector>

#include "hyperperc/errors.hpp"
#include "hyperperc/percolation.hpp"

namespace hyperperc::percolation::detail {

inline constexpr std::uint64_t kChunk = 2048;
inline constexpr std::uint32_t kEdgeStream = 0;
inline constexpr std::uint32_t kWalkStream = 1;

// Splits [0, n) into fixed chunks of kChunk sample indices, runs
// f(begin, end, acc) on each with a private accumulator, and returns the
// accumulators in chunk order. Reducing them in that order gives results that
// do not depend on how many threads ran.
template <class Acc, class F>
std::vector<Acc> run_chunks(std::uint64_t n, unsigned threads, const Acc& init, F f) {
  const std::uint64_t chunks = (n + kChunk - 1) / kChunk;
  std::vector<Acc> acc(chunks, init);
  if (threads == 0) threads = default_threads();
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, std::max<std::uint64_t>(chunks, 1)));
  std::atomic<std::uint64_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::uint64_t c = next.fetch_add(1);
      if (c >= chunks) return;
      f(c * kChunk, std::min(n, (c + 1) * kChunk), acc[c]);
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  return acc;
}

struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::uint64_t touched = 0;
  void add(double x) {
    sum += x;
    sum_sq += x * x;
  }
  Moments& operator+=(const Moments& o) {
    sum += o.sum;
    sum_sq += o.sum_sq;
    touched += o.touched;
    return *this;
  }
};

inline Estimate finish(const Moments& m, std::uint64_t n) {
  Estimate e;
  e.n_samples = n;
  if (n == 0) return e;
  const double nn = static_cast<double>(n);
  e.value = m.sum / nn;
  const double var = n > 1 ? std::max(0.0, (m.sum_sq - nn * e.value * e.value) / (nn - 1.0)) : 0.0;
  e.std_error = std::sqrt(var / nn);
  e.boundary_touch_fraction = static_cast<double>(m.touched) / nn;
  return e;
}

template <class Acc>
Acc reduce(const std::vector<Acc>& parts) {
  Acc total{};
  for (const auto& p : parts) total += p;
  return total;
}

// Breadth-first exploration of the open cluster of `source` in a window, with
// edges drawn lazily. visit(v) returns false to stop early.
class WindowExplorer {
 public:
  explicit WindowExplorer(const GraphWindow& w) : w_(w), stamp_(w.size(), 0) {}

  template <class Visit>
  bool explore(double p, std::uint64_t seed, std::uint64_t sample, Vertex source, Visit visit) {
    if (++current_ == 0) {
      std::fill(stamp_.begin(), stamp_.end(), 0);
      current_ = 1;
    }
    bool touched = false;
    queue_.clear();
    queue_.push_back(source);
    stamp_[source] = current_;
    for (std::size_t head = 0; head < queue_.size(); ++head) {
      const Vertex v = queue_[head];
      touched = touched || w_.is_boundary(v);
      if (!visit(v)) return touched;
      auto nb = w_.neighbors(v);
      auto ids = w_.incident_edges(v);
      for (std::size_t i = 0; i < nb.size(); ++i) {
        const Vertex u = nb[i];
        if (stamp_[u] == current_) continue;
        if (uniform(seed, sample, static_cast<std::uint64_t>(ids[i]), kEdgeStream) < p) {
          stamp_[u] = current_;
          queue_.push_back(u);
        }
      }
    }
    return touched;
  }

  bool visited(Vertex v) const { return stamp_[v] == current_; }

 private:
  const GraphWindow& w_;
  std::vector<std::uint32_t> stamp_;
  std::uint32_t current_ = 0;
  std::vector<Vertex> queue_;
};

// Depth-first exploration of the root cluster of an implicit tree.
// visit(depth) returns false to stop. Returns true if depth radius was reached.
class TreeExplorer {
 public:
  explicit TreeExplorer(const TreeLattice& t) : t_(t) {}

  template <class Visit>
  bool explore(double p, std::uint64_t seed, std::uint64_t sample, Visit visit) {
    bool touched = false;
    stack_.clear();
    stack_.push_back({TreeLattice::root_key(), 0});
    while (!stack_.empty()) {
      const Node node = stack_.back();
      stack_.pop_back();
      touched = touched || node.depth == t_.radius();
      if (!visit(node.depth)) return touched;
      if (node.depth == t_.radius()) continue;
      const int children = node.depth == 0 ? t_.degree() : t_.degree() - 1;
      for (int c = 0; c < children; ++c) {
        const std::uint64_t key = TreeLattice::child_key(node.key, c);
        if (uniform(seed, sample, key, kEdgeStream) < p) stack_.push_back({key, node.depth + 1});
      }
    }
    return touched;
  }

 private:
  struct Node {
    std::uint64_t key;
    std::uint64_t depth;
  };
  const TreeLattice& t_;
  std::vector<Node> stack_;
};

inline void check_p(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("p must lie in [0, 1]");
}

inline void check_samples(std::uint64_t n) {
  if (n == 0) throw InvalidArgument("n_samples must be at least 1");
  if (n > kMaxSamples) throw ResourceLimit("n_samples exceeds the 10^9 guard");
}

struct TailCounts {
  std::vector<std::uint64_t> at_least;  // per grid index, before suffix sums
  std::uint64_t touched = 0;
  TailCounts& operator+=(const TailCounts& o) {
    if (at_least.empty()) at_least.assign(o.at_least.size(), 0);
    for (std::size_t i = 0; i < at_least.size(); ++i) at_least[i] += o.at_least[i];
    touched += o.touched;
    return *this;
  }
  void record(const std::vector<std::uint64_t>& grid, std::uint64_t size) {
    auto idx = std::upper_bound(grid.begin(), grid.end(), size) - grid.begin();
    if (idx > 0) ++at_least[idx - 1];
  }
};

TailCurve finish_tail(const std::vector<std::uint64_t>& grid, const TailCounts& total, std::uint64_t n);

template <class ExploreAt>
DerivativeCheck derivative_from(double p, double h, std::uint64_t n_samples, unsigned threads,
                                ExploreAt make_explore) {
  check_p(p - h);
  check_p(p + h);
  require(h > 0.0, "h must be positive");
  struct Acc {
    Moments diff, chi;
    Acc& operator+=(const Acc& o) {
      diff += o.diff;
      chi += o.chi;
      return *this;
    }
  };
  auto parts = run_chunks(n_samples, threads, Acc{}, [&](std::uint64_t b, std::uint64_t e, Acc& acc) {
    auto size_at = make_explore();
    for (std::uint64_t s = b; s < e; ++s) {
      const auto lo = size_at(p - h, s).first;
      auto [mid, t_mid] = size_at(p, s);
      auto [hi, t_hi] = size_at(p + h, s);
      acc.diff.add(static_cast<double>(hi) - static_cast<double>(lo));
      acc.chi.add(static_cast<double>(mid));
      if (t_hi) ++acc.diff.touched;
      if (t_mid) ++acc.chi.touched;
    }
  });
  Acc total = reduce(parts);
  DerivativeCheck out;
  Estimate diff = finish(total.diff, n_samples);
  out.derivative = diff.value / (2.0 * h);
  out.derivative_std_error = diff.std_error / (2.0 * h);
  out.susceptibility = finish(total.chi, n_samples);
  out.chi_squared = out.susceptibility.value * out.susceptibility.value;
  out.ratio = out.derivative / out.chi_squared;
  out.too_noisy = out.derivative_std_error > std::abs(out.derivative);
  return out;
}

}  // namespace hyperperc::percolation::detail
