// Benchmark comparing the OpenMP-parallel numeric kernels against their
// serial reference implementations: pairwise product tables (the inner loop
// of the algebra-closure fixpoint) and fusion Gram assembly.

#include <chrono>
#include <cstdio>
#include <random>

#include "aqft/corr.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace aqft;
using numkit::CMatrix;

namespace {

template <typename F>
double time_ms(F&& fn, int reps) {
  auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) fn();
  auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

corr::Correspondence random_correspondence(const vna::AlgebraShape& a,
                                           const vna::AlgebraShape& b,
                                           int mult, std::mt19937_64& rng) {
  // block model conjugated by a random unitary
  int dim = 0;
  for (int i = 0; i < a.num_blocks(); ++i)
    for (int j = 0; j < b.num_blocks(); ++j)
      dim += a.block_size(i) * mult * b.block_size(j);
  CMatrix u = numkit::random_unitary(dim, rng);
  auto left = [a, b, mult, u](const vna::AlgElement& x) {
    CMatrix m = CMatrix::Zero(u.rows(), u.rows());
    int off = 0;
    for (int i = 0; i < a.num_blocks(); ++i)
      for (int j = 0; j < b.num_blocks(); ++j) {
        int blk = a.block_size(i) * mult * b.block_size(j);
        m.block(off, off, blk, blk) = numkit::kron(
            x.block_mats[i],
            CMatrix::Identity(mult * b.block_size(j), mult * b.block_size(j)));
        off += blk;
      }
    return (u * m * u.adjoint()).eval();
  };
  auto right = [a, b, mult, u](const vna::AlgElement& x) {
    CMatrix m = CMatrix::Zero(u.rows(), u.rows());
    int off = 0;
    for (int i = 0; i < a.num_blocks(); ++i)
      for (int j = 0; j < b.num_blocks(); ++j) {
        int rows = a.block_size(i) * mult;
        int blk = rows * b.block_size(j);
        m.block(off, off, blk, blk) = numkit::kron(
            CMatrix::Identity(rows, rows), x.block_mats[j].transpose());
        off += blk;
      }
    return (u * m * u.adjoint()).eval();
  };
  return corr::Correspondence{a, b, dim, left, right};
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
  std::printf("built without OpenMP; both columns run serially\n");
#endif
  std::mt19937_64 rng(42);

  {
    std::printf("\npairwise product table (n x n blocks, k columns)\n");
    std::printf("%8s %6s %12s %12s %8s\n", "n", "k", "serial ms", "omp ms",
                "speedup");
    for (int n : {8, 16, 32}) {
      std::vector<CMatrix> mats;
      for (int i = 0; i < 48; ++i) mats.push_back(numkit::random_matrix(n, n, rng));
      volatile double sink = 0;
      double ts = time_ms(
          [&] { sink = numkit::pairwise_products_serial(mats, mats).norm(); }, 3);
      double tp = time_ms(
          [&] { sink = numkit::pairwise_products(mats, mats).norm(); }, 3);
      (void)sink;
      std::printf("%8d %6zu %12.2f %12.2f %8.2fx\n", n, mats.size(), ts, tp,
                  ts / tp);
    }
  }

  {
    std::printf("\nfusion Gram assembly over M_2 (dim x dim correspondences)\n");
    std::printf("%8s %12s %12s %8s\n", "dim", "serial ms", "omp ms", "speedup");
    vna::AlgebraShape m2 = vna::AlgebraShape::matrix(2);
    for (int mult : {4, 8, 12}) {
      auto h = random_correspondence(m2, m2, mult, rng);
      auto k = random_correspondence(m2, m2, mult, rng);
      volatile double sink = 0;
      double ts =
          time_ms([&] { sink = corr::fusion_gram_serial(h, k).norm(); }, 3);
      double tp = time_ms([&] { sink = corr::fusion_gram(h, k).norm(); }, 3);
      (void)sink;
      std::printf("%8d %12.2f %12.2f %8.2fx\n", h.dim, ts, tp, ts / tp);
    }
  }
  return 0;
}
