#include "hyperperc/operators.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "hyperperc/errors.hpp"

namespace hyperperc::operators {

namespace {

// Runs f(begin, end) over fixed row blocks of [0, n) on the default pool.
template <class F>
void for_row_blocks(std::size_t n, F f) {
  constexpr std::size_t kBlock = 256;
  const std::size_t blocks = (n + kBlock - 1) / kBlock;
  unsigned threads = std::min<std::size_t>(percolation::default_threads(), blocks);
  if (n < 1024 || threads <= 1) {
    f(std::size_t{0}, n);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t b; (b = next.fetch_add(1)) < blocks;) f(b * kBlock, std::min(n, (b + 1) * kBlock));
    });
}

}  // namespace

TwoPointMatrix TwoPointMatrix::from_dense(std::vector<double> entries, std::size_t n, double p) {
  require(entries.size() == n * n, "entry count must be n * n");
  if (n > kMaxDenseVertices) throw ResourceLimit("dense matrix exceeds the vertex guard");
  for (std::size_t i = 0; i < n; ++i) {
    require(entries[i * n + i] == 1.0, "diagonal entries must equal 1");
    for (std::size_t j = 0; j < n; ++j) {
      const double v = entries[i * n + j];
      require(v >= 0.0 && v <= 1.0, "entries must lie in [0, 1]");
      require(v == entries[j * n + i], "matrix must be symmetric");
    }
  }
  TwoPointMatrix t;
  t.n_ = n;
  t.p_ = p;
  t.dense_ = std::move(entries);
  t.row_sum_se_.assign(n, 0.0);
  return t;
}

double TwoPointMatrix::operator()(Vertex u, Vertex v) const {
  require(u >= 0 && v >= 0 && static_cast<std::size_t>(u) < n_ && static_cast<std::size_t>(v) < n_,
          "matrix index out of range");
  if (source_ != MatrixSource::exact_tree) return dense_[static_cast<std::size_t>(u) * n_ + v];
  int d = 0;
  while (u != v) {
    if (window_->depth(u) >= window_->depth(v)) u = parent_[u];
    else v = parent_[v];
    ++d;
  }
  return std::pow(p_, d);
}

double TwoPointMatrix::std_error(Vertex u, Vertex v) const {
  if (source_ != MatrixSource::monte_carlo) return 0.0;
  const double t = (*this)(u, v);
  return std::sqrt(t * (1.0 - t) / static_cast<double>(n_samples_));
}

std::vector<double> TwoPointMatrix::apply(const std::vector<double>& x) const {
  require(x.size() == n_, "vector length must match the matrix");
  if (source_ == MatrixSource::exact_tree) return apply_tree(x);
  std::vector<double> y(n_, 0.0);
  for_row_blocks(n_, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const double* row = dense_.data() + i * n_;
      double s = 0.0;
      for (std::size_t j = 0; j < n_; ++j) s += row[j] * x[j];
      y[i] = s;
    }
  });
  return y;
}

std::vector<double> TwoPointMatrix::apply_tree(const std::vector<double>& x) const {
  // s(v) = sum over the subtree of v of p^{d(v,w)} x(w); then pass the rest of
  // the tree down from the parent.
  std::vector<double> s = x;
  for (std::size_t i = order_.size(); i-- > 1;) {
    const Vertex v = order_[i];
    s[parent_[v]] += p_ * s[v];
  }
  std::vector<double> y(n_);
  y[order_[0]] = s[order_[0]];
  for (std::size_t i = 1; i < order_.size(); ++i) {
    const Vertex v = order_[i];
    y[v] = s[v] + p_ * (y[parent_[v]] - p_ * s[v]);
  }
  return y;
}

std::vector<double> TwoPointMatrix::column(Vertex v) const {
  require(v >= 0 && static_cast<std::size_t>(v) < n_, "matrix index out of range");
  if (source_ != MatrixSource::exact_tree)
    return {dense_.begin() + static_cast<std::ptrdiff_t>(v * n_), dense_.begin() + static_cast<std::ptrdiff_t>((v + 1) * n_)};
  std::vector<double> e(n_, 0.0);
  e[v] = 1.0;
  return apply_tree(e);
}

std::vector<double> TwoPointMatrix::to_dense() const {
  if (source_ != MatrixSource::exact_tree) return dense_;
  if (n_ > kMaxDenseVertices) throw ResourceLimit("dense matrix exceeds the vertex guard");
  std::vector<double> out(n_ * n_);
  for (std::size_t v = 0; v < n_; ++v) {
    auto c = column(static_cast<Vertex>(v));
    std::copy(c.begin(), c.end(), out.begin() + static_cast<std::ptrdiff_t>(v * n_));
  }
  return out;
}

TwoPointMatrix exact_tree_tmatrix(std::shared_ptr<const GraphWindow> w, double p) {
  require(w != nullptr, "window is null");
  require(p >= 0.0 && p <= 1.0, "p must lie in [0, 1]");
  if (w->edge_count() + 1 != w->size()) throw InvalidArgument("exact_tree_tmatrix needs a tree window");
  TwoPointMatrix t;
  t.n_ = w->size();
  t.p_ = p;
  t.source_ = MatrixSource::exact_tree;
  t.window_ = w;
  t.row_sum_se_.assign(t.n_, 0.0);
  t.parent_.assign(t.n_, -1);
  t.order_.reserve(t.n_);
  t.order_.push_back(w->root());
  std::vector<std::uint8_t> seen(t.n_, 0);
  seen[w->root()] = 1;
  for (std::size_t head = 0; head < t.order_.size(); ++head) {
    const Vertex v = t.order_[head];
    for (Vertex u : w->neighbors(v))
      if (!seen[u]) {
        seen[u] = 1;
        t.parent_[u] = v;
        t.order_.push_back(u);
      }
  }
  if (t.order_.size() != t.n_) throw InvalidArgument("exact_tree_tmatrix needs a connected tree window");
  return t;
}

TwoPointMatrix mc_tmatrix(std::shared_ptr<const GraphWindow> w, double p, std::uint64_t n_samples,
                          std::uint64_t seed, percolation::Exec exec) {
  require(w != nullptr, "window is null");
  require(p >= 0.0 && p <= 1.0, "p must lie in [0, 1]");
  if (n_samples == 0) throw InvalidArgument("n_samples must be at least 1");
  if (n_samples > 4'000'000'000ULL) throw ResourceLimit("n_samples exceeds the counter range");
  if (w->edge_count() > kMaxMcEdges) throw ResourceLimit("window has more than 10^5 edges");
  if (w->size() > kMaxMcVertices) throw ResourceLimit("window has too many vertices for an all-pairs matrix");
  const std::size_t n = w->size();
  // Upper-triangle pair counts, shared; integer sums are order independent.
  std::vector<std::uint32_t> counts(n * (n - 1) / 2 + 1, 0);
  auto tri = [n](std::size_t i, std::size_t j) { return i * (2 * n - i - 1) / 2 + (j - i - 1); };
  struct Sizes {
    std::vector<std::uint64_t> sum, sum_sq;
  };
  const unsigned threads = std::max(1u, exec.threads ? exec.threads : percolation::default_threads());
  std::vector<Sizes> sizes(threads, Sizes{std::vector<std::uint64_t>(n, 0), std::vector<std::uint64_t>(n, 0)});
  std::atomic<std::uint64_t> next{0};
  auto worker = [&](unsigned id) {
    std::vector<std::vector<Vertex>> members(n);
    for (std::uint64_t s; (s = next.fetch_add(1)) < n_samples;) {
      auto cfg = percolation::sample(*w, p, seed, s);
      for (auto& m : members) m.clear();
      for (std::size_t v = 0; v < n; ++v) members[cfg.find(static_cast<Vertex>(v))].push_back(static_cast<Vertex>(v));
      for (const auto& m : members) {
        const std::uint64_t c = m.size();
        for (std::size_t a = 0; a < m.size(); ++a) {
          sizes[id].sum[m[a]] += c;
          sizes[id].sum_sq[m[a]] += c * c;
          for (std::size_t b = a + 1; b < m.size(); ++b)
            std::atomic_ref<std::uint32_t>(counts[tri(m[a], m[b])]).fetch_add(1, std::memory_order_relaxed);
        }
      }
    }
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t);
  }

  TwoPointMatrix t;
  t.n_ = n;
  t.p_ = p;
  t.source_ = MatrixSource::monte_carlo;
  t.window_ = w;
  t.n_samples_ = n_samples;
  t.dense_.assign(n * n, 0.0);
  const double nn = static_cast<double>(n_samples);
  for (std::size_t i = 0; i < n; ++i) {
    t.dense_[i * n + i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) t.dense_[i * n + j] = t.dense_[j * n + i] = counts[tri(i, j)] / nn;
  }
  t.row_sum_se_.assign(n, 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& s : sizes) {
      sum += static_cast<double>(s.sum[v]);
      sum_sq += static_cast<double>(s.sum_sq[v]);
    }
    const double mean = sum / nn;
    const double var = n_samples > 1 ? std::max(0.0, (sum_sq - nn * mean * mean) / (nn - 1.0)) : 0.0;
    t.row_sum_se_[v] = std::sqrt(var / nn);
  }
  return t;
}

}  // namespace hyperperc::operators
