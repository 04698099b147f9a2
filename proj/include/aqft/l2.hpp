#pragma once

#include "aqft/vna.hpp"

namespace aqft::l2 {

using numkit::CMatrix;
using numkit::CVector;
using vna::AlgebraShape;
using vna::AlgElement;
using vna::Hom;

/// The GNS space of the faithful trace: the algebra itself with
/// <a, b> = tr(a^* b) (conjugate-linear in the first slot; this convention
/// is fixed repo-wide and enforced by gram_residual). Coordinates are taken
/// in the orthonormal basis e^i_{kl} / sqrt(w_i), so the standard inner
/// product of coordinate vectors realizes the trace inner product
/// isometrically. The modular conjugation J(xi) = xi^* is antilinear and is
/// stored through its linear part: J(x) = j_lin * conj(x).
class StandardFormSpace {
 public:
  explicit StandardFormSpace(AlgebraShape algebra);

  const AlgebraShape& algebra() const { return algebra_; }
  int dim() const { return dim_; }
  const CVector& omega() const { return omega_; }
  const CMatrix& j_lin() const { return j_lin_; }

  CVector coords(const AlgElement& a) const;
  AlgElement element(const CVector& v) const;

  /// lambda(a): left multiplication.
  CMatrix left(const AlgElement& a) const;
  /// Right multiplication xi |-> xi * b, i.e. the right action of b
  /// (the *-representation of the opposite algebra evaluated at b^op).
  CMatrix right(const AlgElement& b) const;
  /// The modular formula J lambda(b^*) J; equals right(b).
  CMatrix right_via_j(const AlgElement& b) const;
  CVector apply_j(const CVector& x) const { return j_lin_ * x.conjugate(); }

  /// Max deviation of <coords(a), coords(b)> from tr(a^* b) over matrix units.
  double gram_residual() const;

 private:
  AlgebraShape algebra_;
  int dim_;
  CVector omega_;
  CMatrix j_lin_;
};

StandardFormSpace standard_form(const AlgebraShape& a);

/// The standard-form map a Omega |-> phi(a) Omega of a trace-preserving
/// homomorphism, as a matrix between coordinate spaces. This is the vN_vert
/// membership gate: non-trace-preserving input is rejected.
CMatrix l2_of_hom(const Hom& phi);

/// Generating set {a Omega : a a rank-one positive basis element} of the
/// positive cone. J fixes every element.
std::vector<CVector> positive_cone(const StandardFormSpace& sf);

}  // namespace aqft::l2
