// Shared test helpers: randomized correspondences (block models conjugated
// by a random unitary) and direct sums of correspondences.
#pragma once

#include <random>

#include "aqft/corr.hpp"

namespace support {

using aqft::corr::Correspondence;
using aqft::numkit::CMatrix;
using aqft::vna::AlgebraShape;
using aqft::vna::AlgElement;

/// Every finite-dimensional correspondence is a multiplicity pattern over
/// the block pairs, up to unitary equivalence; sampling one and hiding it
/// behind a random unitary exercises the generic case.
inline Correspondence random_correspondence(const AlgebraShape& a,
                                            const AlgebraShape& b,
                                            std::mt19937_64& rng,
                                            int max_mult = 2) {
  const int na = a.num_blocks(), nb = b.num_blocks();
  std::uniform_int_distribution<int> pick(0, max_mult);
  std::vector<std::vector<int>> mult(na, std::vector<int>(nb, 0));
  int dim = 0;
  while (dim == 0) {
    dim = 0;
    for (int i = 0; i < na; ++i)
      for (int j = 0; j < nb; ++j) {
        mult[i][j] = pick(rng);
        dim += a.block_size(i) * mult[i][j] * b.block_size(j);
      }
  }
  CMatrix u = aqft::numkit::random_unitary(dim, rng);
  auto left = [a, b, mult, u, dim](const AlgElement& x) {
    CMatrix m = CMatrix::Zero(dim, dim);
    int off = 0;
    for (int i = 0; i < a.num_blocks(); ++i)
      for (int j = 0; j < b.num_blocks(); ++j) {
        int rest = mult[i][j] * b.block_size(j);
        if (rest == 0) continue;
        int blk = a.block_size(i) * rest;
        m.block(off, off, blk, blk) = aqft::numkit::kron(
            x.block_mats[i], CMatrix::Identity(rest, rest));
        off += blk;
      }
    return (u * m * u.adjoint()).eval();
  };
  auto right = [a, b, mult, u, dim](const AlgElement& x) {
    CMatrix m = CMatrix::Zero(dim, dim);
    int off = 0;
    for (int i = 0; i < a.num_blocks(); ++i)
      for (int j = 0; j < b.num_blocks(); ++j) {
        int rows = a.block_size(i) * mult[i][j];
        if (rows == 0) continue;
        int blk = rows * b.block_size(j);
        m.block(off, off, blk, blk) = aqft::numkit::kron(
            CMatrix::Identity(rows, rows), x.block_mats[j].transpose());
        off += blk;
      }
    return (u * m * u.adjoint()).eval();
  };
  return Correspondence{a, b, dim, left, right};
}

inline Correspondence direct_sum(const Correspondence& x,
                                 const Correspondence& y) {
  Correspondence out;
  out.left_alg = x.left_alg;
  out.right_alg = x.right_alg;
  out.dim = x.dim + y.dim;
  auto xl = x.left, yl = y.left, xr = x.right, yr = y.right;
  int dx = x.dim, dy = y.dim;
  out.left = [xl, yl, dx, dy](const AlgElement& a) {
    CMatrix m = CMatrix::Zero(dx + dy, dx + dy);
    m.topLeftCorner(dx, dx) = xl(a);
    m.bottomRightCorner(dy, dy) = yl(a);
    return m;
  };
  out.right = [xr, yr, dx, dy](const AlgElement& b) {
    CMatrix m = CMatrix::Zero(dx + dy, dx + dy);
    m.topLeftCorner(dx, dx) = xr(b);
    m.bottomRightCorner(dy, dy) = yr(b);
    return m;
  };
  return out;
}

}  // namespace support
