#pragma once

#include <functional>
#include <vector>

#include "aqft/numkit.hpp"

namespace aqft::vna {

using numkit::CMatrix;
using numkit::CVector;
using numkit::Subspace;

/// A finite-dimensional von Neumann algebra: a direct sum of full matrix
/// blocks M_{n_1} + ... + M_{n_k}, carrying the faithful trace
/// tr(x) = sum_i w_i * Tr(x_i) with strictly positive weights.
struct AlgebraShape {
  std::vector<int> blocks;
  std::vector<double> trace_weights;

  /// M_n with the normalized trace (tr(1) = 1).
  static AlgebraShape matrix(int n);
  /// Direct sum with default weights w_i = 1 / sum_j n_j, so tr(1) = 1.
  static AlgebraShape direct_sum(std::vector<int> blocks);
  static AlgebraShape with_weights(std::vector<int> blocks,
                                   std::vector<double> weights);

  int num_blocks() const { return static_cast<int>(blocks.size()); }
  int block_size(int i) const { return blocks[i]; }
  double weight(int i) const { return trace_weights[i]; }
  int coord_dim() const;  // sum n_i^2
  int dense_dim() const;  // sum n_i
  bool operator==(const AlgebraShape& o) const;
  void validate() const;
};

struct AlgElement {
  AlgebraShape shape;
  std::vector<CMatrix> block_mats;

  static AlgElement identity(const AlgebraShape& s);
  static AlgElement zero(const AlgebraShape& s);
  /// Matrix unit e^{blk}_{rc}.
  static AlgElement unit(const AlgebraShape& s, int blk, int r, int c);
  static AlgElement from_dense(const AlgebraShape& s, const CMatrix& dense,
                               double tol = kDefaultTol);

  AlgElement adjoint() const;
  Complex trace() const;  // the weighted faithful trace
  CMatrix dense() const;  // block-diagonal dense_dim x dense_dim matrix
  double norm() const;    // largest entry magnitude (residual scales)
  double diff_norm(const AlgElement& o) const;
  bool is_unitary(double tol = kDefaultTol) const;

  AlgElement operator+(const AlgElement& o) const;
  AlgElement operator-(const AlgElement& o) const;
  AlgElement operator*(const AlgElement& o) const;
  AlgElement scaled(Complex c) const;
};

/// Flat coordinate of the matrix unit e^{blk}_{rc} (column-major per block).
int coord_index(const AlgebraShape& s, int blk, int r, int c);
CVector coords_of(const AlgElement& a);
AlgElement element_from_coords(const AlgebraShape& s, const CVector& v);
/// Generating set {D, N, N*} of the algebra: a diagonal with globally
/// distinct entries and the subdiagonal shift. Checks that hold on these
/// generators and extend multiplicatively hold on the whole algebra.
std::vector<AlgElement> algebra_generators(const AlgebraShape& s);

/// A normal unital *-homomorphism in Bratteli normal form: a nonnegative
/// multiplicity matrix (target blocks x source blocks) together with an
/// inner unitary of the target. The induced map is
///   a |-> u * canon(a) * u^* ,
/// where canon places, in target block t and for each source block s in
/// ascending order, mult(t,s) diagonal copies of a_s.
struct Hom {
  AlgebraShape source, target;
  Eigen::MatrixXi mult;
  AlgElement conjugator;

  /// Unitality mult * n_source = n_target and unitary conjugator.
  void validate(double tol = kDefaultTol) const;
};

Hom identity_hom(const AlgebraShape& s);
AlgElement hom_apply(const Hom& phi, const AlgElement& a);
Hom hom_compose(const Hom& psi, const Hom& phi);
/// Equality as maps: equal multiplicities and conjugators differing by a
/// unitary in the commutant of the canonical embedding.
bool hom_equal(const Hom& a, const Hom& b, double tol = kDefaultTol);
double hom_equal_residual(const Hom& a, const Hom& b);
bool is_injective(const Hom& phi);
/// tr_target(phi(a)) = tr_source(a) for all a; with the weight conventions
/// here this is exactly mult^T * w_target = w_source.
bool is_trace_preserving(const Hom& phi, double tol = kDefaultTol);
/// The hom as a matrix on flat coordinates.
CMatrix hom_linearized(const Hom& phi);

/// Smallest unital *-subalgebra of the ambient containing all parts.
/// Subspaces live in the column-major flatten of the dense picture.
Subspace generated_subalgebra(const AlgebraShape& ambient,
                              const std::vector<Subspace>& parts,
                              double tol = kDefaultTol);

struct FiniteGroup {
  int order = 1;
  Eigen::MatrixXi mult;  // mult(g,h)

  static FiniteGroup trivial();
  static FiniteGroup cyclic(int n);
  int unit() const { return 0; }
  int inverse(int g) const;
  void validate() const;
};

struct UnitaryRep {
  FiniteGroup group;
  std::vector<AlgElement> unitaries;
  void validate(double tol = kDefaultTol) const;
};

/// Fixed-point algebra {a : u_g a u_g^* = a for all g}, as a subspace of the
/// dense flatten. The action must be a validated unitary representation.
Subspace fixed_point_subalgebra(const AlgebraShape& ambient,
                                const UnitaryRep& action,
                                double tol = kDefaultTol);

/// Multi-matrix structure of a unital *-subalgebra: block sizes m_j (sorted
/// descending), ambient multiplicities c_j, and a dense unitary iso with
/// iso^* s iso = blkdiag_j (m_j-block  kron  1_{c_j}) for every s in the
/// subalgebra.
struct WedderburnData {
  std::vector<int> blocks;
  std::vector<int> multiplicities;
  CMatrix iso;
};
WedderburnData wedderburn_decompose(const AlgebraShape& ambient,
                                    const Subspace& s,
                                    double tol = kDefaultTol);

/// Present an element of the abstract multi-matrix shape as a dense ambient
/// matrix through the Wedderburn iso, and extract it back.
CMatrix wedderburn_embed(const WedderburnData& wd, const AlgElement& a);
AlgElement wedderburn_extract(const WedderburnData& wd,
                              const AlgebraShape& abstract_shape,
                              const CMatrix& dense);

/// Blockwise transpose: the linear *-antihomomorphism identifying the
/// opposite algebra with the same multi-matrix shape, so right actions can
/// be stored as *-homomorphisms. Applying it twice is the identity.
AlgElement opposite_identification(const AlgElement& a);

/// Bratteli normal form of a raw linear map that is (validated to be) a
/// unital *-homomorphism; rejects anything else.
Hom hom_from_linear_map(const AlgebraShape& source, const AlgebraShape& target,
                        const std::function<AlgElement(const AlgElement&)>& f,
                        double tol = kDefaultTol);

}  // namespace aqft::vna
