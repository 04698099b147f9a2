#pragma once

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "aqft/common.hpp"

namespace aqft::numkit {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Kronecker product, block convention: block (i,j) of the result is
/// a(i,j)*b (left factor indexes the outer blocks). Bimodule constructions
/// depend on this convention; do not change it.
CMatrix kron(const CMatrix& a, const CMatrix& b);

inline CMatrix dagger(const CMatrix& a) { return a.adjoint(); }

/// Largest singular value.
double op_norm(const CMatrix& a);

/// Column-major flattening of a matrix and its inverse.
CVector vec(const CMatrix& a);
CMatrix unvec(const CVector& v, int rows, int cols);

/// Deterministic pseudo-random test data.
CMatrix random_matrix(int rows, int cols, std::mt19937_64& rng);
CMatrix random_unitary(int n, std::mt19937_64& rng);

/// An orthonormal-basis presentation of a subspace of C^ambient_dim.
/// basis has orthonormal columns; the Gram matrix of the columns is the
/// identity within tolerance.
struct Subspace {
  int ambient_dim = 0;
  CMatrix basis;  // ambient_dim x k, orthonormal columns

  int dim() const { return static_cast<int>(basis.cols()); }
  CMatrix projector() const { return basis * basis.adjoint(); }
  /// Distance of the residual of v after projection, relative to |v|.
  double residual(const CVector& v) const;
  bool contains(const CVector& v, double tol = kDefaultTol) const;
  bool contains(const Subspace& other, double tol = kDefaultTol) const;
  /// Operator-norm distance of the two projectors.
  double projector_distance(const Subspace& other) const;
  /// Frobenius-norm distance of the two projectors (upper bound, cheaper).
  double projector_distance_fro(const Subspace& other) const;
  bool equals(const Subspace& other, double tol = kDefaultTol) const;
  double orthonormality_residual() const;
};

/// Orthonormal basis of the span of the given columns. Rank decisions use
/// modified Gram-Schmidt with re-orthogonalization; columns whose residual
/// after projection is below tol * (largest column norm) are dropped.
CMatrix orthonormal_span(const CMatrix& columns, double tol = kDefaultTol);

/// Extend an orthonormal basis by the new directions present in candidates.
/// Returns the possibly grown basis.
CMatrix extend_orthonormal(const CMatrix& basis, const CMatrix& candidates,
                           double tol = kDefaultTol, double scale_hint = 0.0);

/// Orthonormal basis of the numerical null space of m: singular values below
/// tol * sigma_max are treated as zero. A zero (or empty) matrix yields the
/// full ambient basis.
Subspace kernel_basis(const CMatrix& m, double tol = kDefaultTol);

/// All pairwise products a_i * b_j, flattened column-wise into a
/// (n*n) x (|a|*|b|) matrix. OpenMP-parallel kernel; the serial variant is
/// the reference implementation used by tests and the benchmark.
CMatrix pairwise_products(const std::vector<CMatrix>& a,
                          const std::vector<CMatrix>& b);
CMatrix pairwise_products_serial(const std::vector<CMatrix>& a,
                                 const std::vector<CMatrix>& b);

/// Gram matrix g(i,j) = <cols_i, cols_j> of a set of vectors given as matrix
/// columns. OpenMP-parallel kernel with a serial reference.
CMatrix gram_matrix(const CMatrix& cols);
CMatrix gram_matrix_serial(const CMatrix& cols);

/// Smallest unital *-closed subspace of M_n containing gens and closed under
/// the matrix product (span fixpoint). In finite dimension this is the von
/// Neumann algebra generated by gens. Vectors are column-major flattenings.
/// max_dim, when positive, must be the dimension of a subspace that provably
/// contains the closure (the fixpoint stops exactly when it is reached).
Subspace algebra_closure(const std::vector<CMatrix>& gens,
                         double tol = kDefaultTol, int max_dim = 0);

}  // namespace aqft::numkit
