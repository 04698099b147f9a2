// Test-side oracles, kept independent of the implementation paths they
// check: ranks via hand-rolled Gaussian elimination, algebra dimensions by
// word enumeration, fusion dimensions by the explicit balancing subspace,
// index-shuffle permutations by exhaustive enumeration.
#pragma once

#include <complex>
#include <vector>

#include "aqft/numkit.hpp"

namespace oracle {

using aqft::Complex;
using aqft::numkit::CMatrix;
using aqft::numkit::CVector;

/// Rank by Gaussian elimination with partial pivoting. The cut is relative
/// to `scale` (defaults to the largest entry); pass the scale of the data
/// the matrix was built from when the matrix itself may be all roundoff.
inline int rank(CMatrix m, double tol = 1e-9, double scale = 0.0) {
  const int rows = static_cast<int>(m.rows());
  const int cols = static_cast<int>(m.cols());
  if (scale <= 0.0) scale = std::max(1e-300, m.cwiseAbs().maxCoeff());
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int pivot = r;
    for (int i = r + 1; i < rows; ++i)
      if (std::abs(m(i, c)) > std::abs(m(pivot, c))) pivot = i;
    if (std::abs(m(pivot, c)) <= tol * scale) continue;
    m.row(pivot).swap(m.row(r));
    for (int i = r + 1; i < rows; ++i) {
      Complex f = m(i, c) / m(r, c);
      m.row(i) -= f * m.row(r);
    }
    ++r;
  }
  return r;
}

inline int null_dim(const CMatrix& m, double tol = 1e-9) {
  return static_cast<int>(m.cols()) - rank(m, tol);
}

/// Span dimension of a set of equal-sized matrices, by elimination on the
/// flattened rows.
inline int span_dim(const std::vector<CMatrix>& mats, double tol = 1e-9) {
  if (mats.empty()) return 0;
  CMatrix stack(mats.size(), mats[0].size());
  for (size_t i = 0; i < mats.size(); ++i)
    stack.row(static_cast<Eigen::Index>(i)) =
        Eigen::Map<const CVector>(mats[i].data(), mats[i].size()).transpose();
  return rank(stack, tol);
}

/// Dimension of the unital *-algebra generated by gens, by enumerating all
/// words up to the given length and taking the span rank.
inline int word_span_dim(const std::vector<CMatrix>& gens, int max_len,
                         double tol = 1e-9) {
  const int n = static_cast<int>(gens[0].rows());
  std::vector<CMatrix> letters = {CMatrix::Identity(n, n)};
  for (const auto& g : gens) {
    letters.push_back(g);
    letters.push_back(g.adjoint());
  }
  std::vector<CMatrix> words = {CMatrix::Identity(n, n)};
  std::vector<CMatrix> frontier = words;
  for (int len = 1; len <= max_len; ++len) {
    std::vector<CMatrix> next;
    for (const auto& w : frontier)
      for (const auto& l : letters) next.push_back(w * l);
    words.insert(words.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return span_dim(words, tol);
}

/// The permutation with kron(a, b) = s * kron(b, a) * s^T, found by
/// exhaustive index enumeration: (i, j) of an (m x n)-indexed tensor basis
/// goes to position j*m + i.
inline CMatrix shuffle_permutation(int m, int n) {
  CMatrix s = CMatrix::Zero(m * n, m * n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) s(i * n + j, j * m + i) = 1.0;
  return s;
}

/// Dimension of the balanced quotient H (x)_B K: the algebraic tensor
/// product modulo the span of rho(b) xi (x) eta - xi (x) lambda(b) eta over
/// all basis b of B and basis vectors xi, eta. right_mats[j] / left_mats[j]
/// are the right action on H / left action on K of the j-th basis element.
inline int balanced_quotient_dim(const std::vector<CMatrix>& right_mats,
                                 const std::vector<CMatrix>& left_mats,
                                 double tol = 1e-9) {
  const int dh = static_cast<int>(right_mats[0].rows());
  const int dk = static_cast<int>(left_mats[0].rows());
  double scale = 0.0;
  for (const auto& m : right_mats) scale = std::max(scale, m.cwiseAbs().maxCoeff());
  for (const auto& m : left_mats) scale = std::max(scale, m.cwiseAbs().maxCoeff());
  std::vector<CVector> balancing;
  for (size_t b = 0; b < right_mats.size(); ++b)
    for (int p = 0; p < dh; ++p)
      for (int q = 0; q < dk; ++q) {
        CVector v = CVector::Zero(dh * dk);
        for (int r = 0; r < dh; ++r) v(r * dk + q) += right_mats[b](r, p);
        for (int s = 0; s < dk; ++s) v(p * dk + s) -= left_mats[b](s, q);
        balancing.push_back(v);
      }
  CMatrix stack(balancing.size(), dh * dk);
  for (size_t i = 0; i < balancing.size(); ++i)
    stack.row(static_cast<Eigen::Index>(i)) = balancing[i].transpose();
  return dh * dk - rank(stack, tol, scale);
}

}  // namespace oracle
