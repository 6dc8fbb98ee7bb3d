#include "percolation_internal.hpp"

namespace hyperperc::percolation {

using namespace detail;

namespace {

// Upper bound on explored tree vertices per sample; past it the cluster is
// effectively infinite at this radius and the caller should lower p or R.
constexpr std::uint64_t kTreeClusterCap = 50'000'000;

std::uint64_t mix(std::uint64_t x) {
  x ^= x >> 33;
  x *= 0xFF51AFD7ED558CCDULL;
  x ^= x >> 33;
  x *= 0xC4CEB9FE1A85EC53ULL;
  return x ^ (x >> 33);
}

std::uint64_t counted(std::uint64_t size) {
  if (size > kTreeClusterCap) throw ResourceLimit("tree cluster exceeded 5e7 vertices; p is too close to p_c");
  return size;
}

}  // namespace

TreeLattice::TreeLattice(int k, std::uint64_t radius) : k_(k), radius_(radius) {
  require(k >= 2, "tree degree must be at least 2");
  require(radius >= 1, "tree radius must be at least 1");
}

std::uint64_t TreeLattice::child_key(std::uint64_t parent, int index) {
  return mix(parent + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(index + 1));
}

Estimate susceptibility_estimate(const TreeLattice& t, double p, std::uint64_t n_samples, std::uint64_t seed,
                                 Exec exec) {
  check_p(p);
  check_samples(n_samples);
  auto parts = run_chunks(n_samples, exec.threads, Moments{},
                          [&](std::uint64_t b, std::uint64_t e, Moments& acc) {
    TreeExplorer ex(t);
    for (std::uint64_t s = b; s < e; ++s) {
      std::uint64_t size = 0;
      if (ex.explore(p, seed, s, [&](std::uint64_t) { return counted(++size), true; })) ++acc.touched;
      acc.add(static_cast<double>(size));
    }
  });
  return finish(reduce(parts), n_samples);
}

TailCurve cluster_tail(const TreeLattice& t, double p, std::uint64_t n_max, std::uint64_t n_samples,
                       std::uint64_t seed, Exec exec) {
  check_p(p);
  check_samples(n_samples);
  const auto grid = tail_grid(n_max);
  TailCounts init{std::vector<std::uint64_t>(grid.size(), 0), 0};
  auto parts = run_chunks(n_samples, exec.threads, init,
                          [&](std::uint64_t b, std::uint64_t e, TailCounts& acc) {
    TreeExplorer ex(t);
    for (std::uint64_t s = b; s < e; ++s) {
      std::uint64_t size = 0;
      if (ex.explore(p, seed, s, [&](std::uint64_t) { return ++size < n_max; })) ++acc.touched;
      acc.record(grid, size);
    }
  });
  return finish_tail(grid, reduce(parts), n_samples);
}

DerivativeCheck susceptibility_derivative_check(const TreeLattice& t, double p, double h,
                                                std::uint64_t n_samples, std::uint64_t seed, Exec exec) {
  check_samples(n_samples);
  return derivative_from(p, h, n_samples, exec.threads, [&] {
    return [&t, seed, ex = std::make_shared<TreeExplorer>(t)](double q, std::uint64_t s) {
      std::uint64_t size = 0;
      bool touched = ex->explore(q, seed, s, [&](std::uint64_t) { return counted(++size), true; });
      return std::pair{size, touched};
    };
  });
}

}  // namespace hyperperc::percolation
