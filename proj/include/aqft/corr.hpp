#pragma once

#include <functional>
#include <memory>

#include "aqft/l2.hpp"

namespace aqft::corr {

using numkit::CMatrix;
using numkit::CVector;
using numkit::Subspace;
using vna::AlgebraShape;
using vna::AlgElement;
using vna::Hom;

/// A Hilbert space with a normal unital left action of left_alg and a
/// commuting normal unital right action of right_alg. Actions are stored as
/// operator factories on the coordinate space: left(a) is a *-representation,
/// right(b) is the right multiplication operator xi |-> xi . b (that is, the
/// *-representation of the opposite algebra evaluated at b^op, so it is
/// antimultiplicative and adjoint-preserving).
struct Correspondence {
  AlgebraShape left_alg, right_alg;
  int dim = 0;
  std::function<CMatrix(const AlgElement&)> left;
  std::function<CMatrix(const AlgElement&)> right;
};

/// Max deviation from the correspondence laws (unitality, *-property,
/// (anti)multiplicativity, commuting actions), checked on coordinate bases.
double correspondence_residual(const Correspondence& c);
/// Same laws checked on the {D, N, N*} generator sets only; cheap.
double correspondence_residual_fast(const Correspondence& c);
/// Max deviation of the two correspondences' actions on coordinate bases.
double correspondence_distance(const Correspondence& a, const Correspondence& b);

/// The standard form L^2(A) as an A-A correspondence (the horizontal unit).
Correspondence identity_correspondence(const AlgebraShape& a);

/// Same space and right action, left action restricted along phi.
Correspondence restrict_left(const Correspondence& h, const Hom& phi);

/// A square of the target double category: an operator with the two boundary
/// identities T lambda_src(a) = lambda_tgt(phiL(a)) T and
/// T right_src(b) = right_tgt(phiR(b)) T.
struct IntertwinerCell {
  Correspondence src, tgt;
  Hom left_boundary, right_boundary;
  CMatrix matrix;
};

/// Max boundary-identity deviation on full coordinate bases.
double cell_residual(const IntertwinerCell& c);
/// Boundary identities on the {D, N, N*} generators only.
double cell_residual_fast(const IntertwinerCell& c);
bool is_globular_cell(const IntertwinerCell& c, double tol = kDefaultTol);

IntertwinerCell identity_cell(const Correspondence& c);
/// The canonical unit square iota_phi with boundary (phi, phi), carried by
/// the standard-form map of phi. Gate: phi must be trace-preserving.
IntertwinerCell unit_cell(const Hom& phi);
IntertwinerCell vertical_compose(const IntertwinerCell& second,
                                 const IntertwinerCell& first,
                                 double tol = kDefaultTol);

/// Orthonormal basis (Frobenius inner product) of all matrices satisfying
/// both boundary identities, via the kernel of the stacked linear system.
Subspace intertwiner_space(const Correspondence& src, const Correspondence& tgt,
                           const Hom& phi_left, const Hom& phi_right,
                           double tol = kDefaultTol);

/// Connes fusion H (x)_B K. The carrier is the algebraic tensor product
/// modulo the null space of the fusion semi-inner-product
///   <xi (x) eta, xi' (x) eta'> = <eta, lambda_K(<xi, xi'>_B) eta'>,
/// where <xi, xi'>_B is the B-valued inner product of the right module H
/// determined by tr(b^* <xi, xi'>_B) = <xi . b, xi'>. Balancing vectors
/// rho(b) xi (x) eta - xi (x) lambda(b) eta lie in the null space, and the
/// convention is pinned operationally: the canonical right unitor must come
/// out unitary.
struct Fusion {
  Correspondence fused;
  CMatrix gram;        // (dim_h*dim_k)^2, positive semidefinite
  CMatrix embed;       // representatives, embed^adj * gram * embed = 1
  CMatrix null_basis;  // numerical kernel of gram
  int dim_h = 0, dim_k = 0;

  /// Carrier coordinates of a vector given in algebraic tensor coordinates.
  CVector project(const CVector& tensor_coords) const;
};

Fusion connes_fusion(const Correspondence& h, const Correspondence& k,
                     double tol = kDefaultTol);

/// Fusion Gram assembly kernel; OpenMP-parallel, with the serial reference
/// used by tests and the benchmark.
CMatrix fusion_gram(const Correspondence& h, const Correspondence& k);
CMatrix fusion_gram_serial(const Correspondence& h, const Correspondence& k);

/// Tensor index convention: (p, q) |-> p * dim_k + q (left factor outer).
/// apply_left_factor applies a on the H leg, apply_right_factor applies b on
/// the K leg, columnwise, without materializing Kronecker products.
CMatrix apply_left_factor(const CMatrix& a, const CMatrix& cols, int dim_h,
                          int dim_k);
CMatrix apply_right_factor(const CMatrix& b, const CMatrix& cols, int dim_h,
                           int dim_k);

/// Matrices of the canonical collapse maps when one leg of the fusion is a
/// standard form: right: xi (x) b Omega |-> xi . b (the K leg runs over the
/// coordinates of L^2 of target.right_alg); left: b Omega (x) eta |-> b . eta
/// (the H leg runs over the coordinates of L^2 of target.left_alg). Both
/// must come out unitary; anything else signals an inner-product convention
/// error and throws.
CMatrix right_collapse(const Fusion& f, const Correspondence& target,
                       double tol = kDefaultTol);
CMatrix left_collapse(const Fusion& f, const Correspondence& target,
                      double tol = kDefaultTol);

/// Canonical unitary h (x)_B L^2(B) -> h, xi (x) b Omega |-> xi . b.
IntertwinerCell right_unitor(const Correspondence& h, const Fusion& f,
                             double tol = kDefaultTol);
IntertwinerCell right_unitor(const Correspondence& h, double tol = kDefaultTol);

/// Canonical unitary L^2(B) (x)_B k -> k, b Omega (x) eta |-> b . eta.
IntertwinerCell left_unitor(const Correspondence& k, const Fusion& f,
                            double tol = kDefaultTol);
IntertwinerCell left_unitor(const Correspondence& k, double tol = kDefaultTol);

/// Canonical unitary (h (x) k) (x) l -> h (x) (k (x) l) induced by
/// re-bracketing elementary tensors, together with the four fusions it
/// relates (reusable for coherence tests).
struct AssociatorResult {
  Fusion hk, hk_l, kl, h_kl;
  IntertwinerCell cell;
};
AssociatorResult associator(const Correspondence& h, const Correspondence& k,
                            const Correspondence& l, double tol = kDefaultTol);

/// Horizontal composition of cells: the map induced on balanced quotients by
/// t (x) s. Throws if the induced map fails to descend (residual on the
/// balancing null space beyond tolerance) or boundaries mismatch.
IntertwinerCell fuse_cells(const Fusion& src_fusion, const Fusion& tgt_fusion,
                           const IntertwinerCell& t, const IntertwinerCell& s,
                           double tol = kDefaultTol);
IntertwinerCell fuse_cells(const IntertwinerCell& t, const IntertwinerCell& s,
                           double tol = kDefaultTol);

}  // namespace aqft::corr
