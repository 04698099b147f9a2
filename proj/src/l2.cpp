#include "aqft/l2.hpp"

#include <cmath>

namespace aqft::l2 {

using numkit::kron;

StandardFormSpace::StandardFormSpace(AlgebraShape algebra)
    : algebra_(std::move(algebra)), dim_(algebra_.coord_dim()) {
  algebra_.validate();
  omega_ = coords(AlgElement::identity(algebra_));
  j_lin_ = CMatrix::Zero(dim_, dim_);
  int off = 0;
  for (int i = 0; i < algebra_.num_blocks(); ++i) {
    int n = algebra_.block_size(i);
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l)
        j_lin_(off + l + k * n, off + k + l * n) = 1.0;
    off += n * n;
  }
}

CVector StandardFormSpace::coords(const AlgElement& a) const {
  CVector v(dim_);
  int off = 0;
  for (int i = 0; i < algebra_.num_blocks(); ++i) {
    int n = algebra_.block_size(i);
    double s = std::sqrt(algebra_.weight(i));
    v.segment(off, n * n) =
        s * Eigen::Map<const CVector>(a.block_mats[i].data(), n * n);
    off += n * n;
  }
  return v;
}

AlgElement StandardFormSpace::element(const CVector& v) const {
  AlgElement a = AlgElement::zero(algebra_);
  int off = 0;
  for (int i = 0; i < algebra_.num_blocks(); ++i) {
    int n = algebra_.block_size(i);
    double s = std::sqrt(algebra_.weight(i));
    a.block_mats[i] = numkit::unvec(v.segment(off, n * n), n, n) / s;
    off += n * n;
  }
  return a;
}

CMatrix StandardFormSpace::left(const AlgElement& a) const {
  CMatrix m = CMatrix::Zero(dim_, dim_);
  int off = 0;
  for (int i = 0; i < algebra_.num_blocks(); ++i) {
    int n = algebra_.block_size(i);
    m.block(off, off, n * n, n * n) =
        kron(CMatrix::Identity(n, n), a.block_mats[i]);
    off += n * n;
  }
  return m;
}

CMatrix StandardFormSpace::right(const AlgElement& b) const {
  CMatrix m = CMatrix::Zero(dim_, dim_);
  int off = 0;
  for (int i = 0; i < algebra_.num_blocks(); ++i) {
    int n = algebra_.block_size(i);
    m.block(off, off, n * n, n * n) =
        kron(b.block_mats[i].transpose(), CMatrix::Identity(n, n));
    off += n * n;
  }
  return m;
}

CMatrix StandardFormSpace::right_via_j(const AlgElement& b) const {
  return j_lin_ * left(b.adjoint()).conjugate() * j_lin_;
}

double StandardFormSpace::gram_residual() const {
  double res = 0.0;
  for (int i = 0; i < algebra_.num_blocks(); ++i) {
    int n = algebra_.block_size(i);
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) {
        AlgElement a = AlgElement::unit(algebra_, i, k, l);
        for (int k2 = 0; k2 < n; ++k2)
          for (int l2 = 0; l2 < n; ++l2) {
            AlgElement b = AlgElement::unit(algebra_, i, k2, l2);
            Complex lhs = coords(a).dot(coords(b));  // conj-linear first slot
            Complex rhs = (a.adjoint() * b).trace();
            res = std::max(res, std::abs(lhs - rhs));
          }
      }
  }
  return res;
}

StandardFormSpace standard_form(const AlgebraShape& a) {
  return StandardFormSpace(a);
}

CMatrix l2_of_hom(const Hom& phi) {
  phi.validate();
  if (!vna::is_trace_preserving(phi))
    throw Error("l2_of_hom: homomorphism does not preserve the trace");
  StandardFormSpace src(phi.source), tgt(phi.target);
  CMatrix t(tgt.dim(), src.dim());
  int col = 0;
  for (int i = 0; i < phi.source.num_blocks(); ++i) {
    int n = phi.source.block_size(i);
    double s = std::sqrt(phi.source.weight(i));
    for (int l = 0; l < n; ++l)
      for (int k = 0; k < n; ++k)
        t.col(col++) =
            tgt.coords(hom_apply(phi, AlgElement::unit(phi.source, i, k, l))) / s;
  }
  return t;
}

std::vector<CVector> positive_cone(const StandardFormSpace& sf) {
  std::vector<CVector> cone;
  const AlgebraShape& s = sf.algebra();
  for (int i = 0; i < s.num_blocks(); ++i) {
    int n = s.block_size(i);
    auto push = [&](const CVector& v) {
      AlgElement a = AlgElement::zero(s);
      a.block_mats[i] = v * v.adjoint();
      cone.push_back(sf.coords(a));
    };
    for (int k = 0; k < n; ++k) {
      CVector ek = CVector::Zero(n);
      ek(k) = 1.0;
      push(ek);
      for (int l = k + 1; l < n; ++l) {
        CVector v = CVector::Zero(n);
        v(k) = 1.0;
        v(l) = 1.0;
        push(v);
        v(l) = Complex(0.0, 1.0);
        push(v);
      }
    }
  }
  return cone;
}

}  // namespace aqft::l2
