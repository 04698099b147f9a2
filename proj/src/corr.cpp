#include "aqft/corr.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace aqft::corr {

namespace {

std::vector<AlgElement> coord_units(const AlgebraShape& s) {
  std::vector<AlgElement> out;
  for (int i = 0; i < s.num_blocks(); ++i) {
    int n = s.block_size(i);
    for (int c = 0; c < n; ++c)
      for (int r = 0; r < n; ++r) out.push_back(AlgElement::unit(s, i, r, c));
  }
  return out;
}

double action_residual(const Correspondence& c,
                       const std::vector<AlgElement>& la,
                       const std::vector<AlgElement>& ra) {
  const int d = c.dim;
  const CMatrix id = CMatrix::Identity(d, d);
  double res = 0.0;
  res = std::max(res, (c.left(AlgElement::identity(c.left_alg)) - id)
                          .cwiseAbs()
                          .maxCoeff());
  res = std::max(res, (c.right(AlgElement::identity(c.right_alg)) - id)
                          .cwiseAbs()
                          .maxCoeff());
  std::vector<CMatrix> lm, rm;
  for (const auto& a : la) lm.push_back(c.left(a));
  for (const auto& b : ra) rm.push_back(c.right(b));
  auto scale = [](const AlgElement& x) { return std::max(1.0, x.norm()); };
  for (size_t i = 0; i < la.size(); ++i) {
    res = std::max(res, (c.left(la[i].adjoint()) - lm[i].adjoint())
                            .cwiseAbs()
                            .maxCoeff() /
                            scale(la[i]));
    for (size_t j = 0; j < la.size(); ++j) {
      double s = scale(la[i]) * scale(la[j]);
      res = std::max(res, (c.left(la[i] * la[j]) - lm[i] * lm[j])
                              .cwiseAbs()
                              .maxCoeff() /
                              s);
    }
  }
  for (size_t i = 0; i < ra.size(); ++i) {
    res = std::max(res, (c.right(ra[i].adjoint()) - rm[i].adjoint())
                            .cwiseAbs()
                            .maxCoeff() /
                            scale(ra[i]));
    for (size_t j = 0; j < ra.size(); ++j) {
      double s = scale(ra[i]) * scale(ra[j]);
      // right action is antimultiplicative: R(bc) = R(c) R(b)
      res = std::max(res, (c.right(ra[i] * ra[j]) - rm[j] * rm[i])
                              .cwiseAbs()
                              .maxCoeff() /
                              s);
    }
  }
  for (size_t i = 0; i < la.size(); ++i)
    for (size_t j = 0; j < ra.size(); ++j) {
      double s = scale(la[i]) * scale(ra[j]);
      res = std::max(res,
                     (lm[i] * rm[j] - rm[j] * lm[i]).cwiseAbs().maxCoeff() / s);
    }
  return res;
}

}  // namespace

double correspondence_residual(const Correspondence& c) {
  return action_residual(c, coord_units(c.left_alg), coord_units(c.right_alg));
}

double correspondence_residual_fast(const Correspondence& c) {
  return action_residual(c, vna::algebra_generators(c.left_alg),
                         vna::algebra_generators(c.right_alg));
}

double correspondence_distance(const Correspondence& a, const Correspondence& b) {
  if (!(a.left_alg == b.left_alg) || !(a.right_alg == b.right_alg) ||
      a.dim != b.dim)
    return 1.0;
  double res = 0.0;
  for (const auto& x : coord_units(a.left_alg))
    res = std::max(res, (a.left(x) - b.left(x)).cwiseAbs().maxCoeff());
  for (const auto& x : coord_units(a.right_alg))
    res = std::max(res, (a.right(x) - b.right(x)).cwiseAbs().maxCoeff());
  return res;
}

Correspondence identity_correspondence(const AlgebraShape& a) {
  auto sf = std::make_shared<l2::StandardFormSpace>(a);
  Correspondence c;
  c.left_alg = a;
  c.right_alg = a;
  c.dim = sf->dim();
  c.left = [sf](const AlgElement& x) { return sf->left(x); };
  c.right = [sf](const AlgElement& x) { return sf->right(x); };
  return c;
}

Correspondence restrict_left(const Correspondence& h, const Hom& phi) {
  if (!(phi.target == h.left_alg))
    throw Error("restrict_left: hom target is not the left algebra");
  Correspondence c = h;
  c.left_alg = phi.source;
  auto base = h.left;
  c.left = [base, phi](const AlgElement& a) { return base(hom_apply(phi, a)); };
  return c;
}

namespace {

double cell_residual_on(const IntertwinerCell& c,
                        const std::vector<AlgElement>& la,
                        const std::vector<AlgElement>& ra) {
  double res = 0.0;
  const CMatrix& t = c.matrix;
  for (const auto& a : la) {
    double s = std::max(1.0, a.norm());
    CMatrix lhs = t * c.src.left(a);
    CMatrix rhs = c.tgt.left(hom_apply(c.left_boundary, a)) * t;
    res = std::max(res, (lhs - rhs).cwiseAbs().maxCoeff() / s);
  }
  for (const auto& b : ra) {
    double s = std::max(1.0, b.norm());
    CMatrix lhs = t * c.src.right(b);
    CMatrix rhs = c.tgt.right(hom_apply(c.right_boundary, b)) * t;
    res = std::max(res, (lhs - rhs).cwiseAbs().maxCoeff() / s);
  }
  return res;
}

}  // namespace

double cell_residual(const IntertwinerCell& c) {
  return cell_residual_on(c, coord_units(c.src.left_alg),
                          coord_units(c.src.right_alg));
}

double cell_residual_fast(const IntertwinerCell& c) {
  return cell_residual_on(c, vna::algebra_generators(c.src.left_alg),
                          vna::algebra_generators(c.src.right_alg));
}

bool is_globular_cell(const IntertwinerCell& c, double tol) {
  return vna::hom_equal(c.left_boundary, vna::identity_hom(c.src.left_alg), tol) &&
         vna::hom_equal(c.right_boundary, vna::identity_hom(c.src.right_alg), tol);
}

IntertwinerCell identity_cell(const Correspondence& c) {
  return IntertwinerCell{c, c, vna::identity_hom(c.left_alg),
                         vna::identity_hom(c.right_alg),
                         CMatrix::Identity(c.dim, c.dim)};
}

IntertwinerCell unit_cell(const Hom& phi) {
  CMatrix t = l2::l2_of_hom(phi);  // rejects non-trace-preserving input
  return IntertwinerCell{identity_correspondence(phi.source),
                         identity_correspondence(phi.target), phi, phi, t};
}

IntertwinerCell vertical_compose(const IntertwinerCell& second,
                                 const IntertwinerCell& first, double tol) {
  if (correspondence_distance(first.tgt, second.src) > tol)
    throw Error("vertical_compose: middle correspondences differ");
  return IntertwinerCell{first.src, second.tgt,
                         hom_compose(second.left_boundary, first.left_boundary),
                         hom_compose(second.right_boundary, first.right_boundary),
                         second.matrix * first.matrix};
}

Subspace intertwiner_space(const Correspondence& src, const Correspondence& tgt,
                           const Hom& phi_left, const Hom& phi_right,
                           double tol) {
  if (!(phi_left.source == src.left_alg) || !(phi_left.target == tgt.left_alg) ||
      !(phi_right.source == src.right_alg) ||
      !(phi_right.target == tgt.right_alg))
    throw Error("intertwiner_space: boundary algebras mismatch");
  const int ds = src.dim, dt = tgt.dim;
  auto la = coord_units(src.left_alg);
  auto ra = coord_units(src.right_alg);
  const Eigen::Index rows =
      static_cast<Eigen::Index>(la.size() + ra.size()) * dt * ds;
  CMatrix sys(rows, static_cast<Eigen::Index>(dt) * ds);
  Eigen::Index row = 0;
  auto add = [&](const CMatrix& s_act, const CMatrix& t_act) {
    sys.middleRows(row, dt * ds) =
        numkit::kron(s_act.transpose(), CMatrix::Identity(dt, dt)) -
        numkit::kron(CMatrix::Identity(ds, ds), t_act);
    row += static_cast<Eigen::Index>(dt) * ds;
  };
  for (const auto& a : la) add(src.left(a), tgt.left(hom_apply(phi_left, a)));
  for (const auto& b : ra) add(src.right(b), tgt.right(hom_apply(phi_right, b)));
  return numkit::kernel_basis(sys, tol);
}

CMatrix apply_left_factor(const CMatrix& a, const CMatrix& cols, int dim_h,
                          int dim_k) {
  const Eigen::Index m = a.rows(), nc = cols.cols();
  CMatrix out(m * dim_k, nc);
  for (Eigen::Index j = 0; j < nc; ++j) {
    Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic,
                                   Eigen::RowMajor>>
        x(cols.col(j).data(), dim_h, dim_k);
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> y =
        a * x;
    out.col(j) = Eigen::Map<const CVector>(y.data(), y.size());
  }
  return out;
}

CMatrix apply_right_factor(const CMatrix& b, const CMatrix& cols, int dim_h,
                           int dim_k) {
  const Eigen::Index m = b.rows(), nc = cols.cols();
  CMatrix out(dim_h * m, nc);
  for (Eigen::Index j = 0; j < nc; ++j) {
    Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic,
                                   Eigen::RowMajor>>
        x(cols.col(j).data(), dim_h, dim_k);
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> y =
        x * b.transpose();
    out.col(j) = Eigen::Map<const CVector>(y.data(), y.size());
  }
  return out;
}

namespace {

/// Orthonormal coordinate basis of B as algebra elements (units / sqrt(w)).
std::vector<AlgElement> trace_onb(const AlgebraShape& s) {
  std::vector<AlgElement> out;
  for (int i = 0; i < s.num_blocks(); ++i) {
    int n = s.block_size(i);
    double w = 1.0 / std::sqrt(s.weight(i));
    for (int c = 0; c < n; ++c)
      for (int r = 0; r < n; ++r)
        out.push_back(AlgElement::unit(s, i, r, c).scaled(w));
  }
  return out;
}

CMatrix fusion_gram_impl(const Correspondence& h, const Correspondence& k,
                         bool parallel) {
  const int dh = h.dim, dk = k.dim;
  const auto onb = trace_onb(h.right_alg);
  const int db = static_cast<int>(onb.size());
  std::vector<CMatrix> rmats(db), lmats(db);
  for (int j = 0; j < db; ++j) {
    rmats[j] = h.right(onb[j]);
    lmats[j] = k.left(onb[j]);
  }
  CMatrix g(static_cast<Eigen::Index>(dh) * dk, static_cast<Eigen::Index>(dh) * dk);
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int p = 0; p < dh; ++p) {
    for (int pp = p; pp < dh; ++pp) {
      CMatrix blk = CMatrix::Zero(dk, dk);
      for (int j = 0; j < db; ++j) {
        // <xi_p . f_j, xi_pp> with the first slot conjugate-linear
        Complex c = std::conj(rmats[j](pp, p));
        if (c != Complex(0.0, 0.0)) blk += c * lmats[j];
      }
      g.block(static_cast<Eigen::Index>(p) * dk,
              static_cast<Eigen::Index>(pp) * dk, dk, dk) = blk;
      if (pp != p)
        g.block(static_cast<Eigen::Index>(pp) * dk,
                static_cast<Eigen::Index>(p) * dk, dk, dk) = blk.adjoint();
    }
  }
  return g;
}

}  // namespace

CMatrix fusion_gram(const Correspondence& h, const Correspondence& k) {
  return fusion_gram_impl(h, k, true);
}

CMatrix fusion_gram_serial(const Correspondence& h, const Correspondence& k) {
  return fusion_gram_impl(h, k, false);
}

CVector Fusion::project(const CVector& tensor_coords) const {
  return embed.adjoint() * (gram * tensor_coords);
}

namespace {
struct FusionCore {
  CMatrix gram, embed;
  int dh = 0, dk = 0;
};
}  // namespace

Fusion connes_fusion(const Correspondence& h, const Correspondence& k,
                     double tol) {
  if (!(h.right_alg == k.left_alg))
    throw Error("connes_fusion: middle algebras differ");
  auto core = std::make_shared<FusionCore>();
  core->dh = h.dim;
  core->dk = k.dim;
  core->gram = fusion_gram(h, k);
  {
    CMatrix herm = 0.5 * (core->gram + core->gram.adjoint());
    if ((core->gram - herm).cwiseAbs().maxCoeff() > 1e-10)
      throw Error("connes_fusion: Gram matrix is not Hermitian");
    core->gram = herm;
  }
  const Eigen::Index d = core->gram.rows();
  Fusion out;
  out.dim_h = h.dim;
  out.dim_k = k.dim;
  if ((core->gram - CMatrix::Identity(d, d)).cwiseAbs().maxCoeff() <= 1e-12) {
    // nondegenerate orthonormal case (e.g. fusion over the scalars): keep
    // the canonical tensor basis as the carrier basis
    core->embed = CMatrix::Identity(d, d);
    out.null_basis.resize(d, 0);
  } else {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(core->gram);
    const auto& ev = es.eigenvalues();
    const double emax = std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
    if (ev.minCoeff() < -100 * tol * emax)
      throw Error("connes_fusion: inner product is not positive semidefinite");
    std::vector<int> keep, drop;
    for (int i = 0; i < ev.size(); ++i)
      (ev(i) > tol * emax ? keep : drop).push_back(i);
    core->embed.resize(d, static_cast<Eigen::Index>(keep.size()));
    for (size_t i = 0; i < keep.size(); ++i)
      core->embed.col(static_cast<Eigen::Index>(i)) =
          es.eigenvectors().col(keep[i]) / std::sqrt(ev(keep[i]));
    out.null_basis.resize(d, static_cast<Eigen::Index>(drop.size()));
    for (size_t i = 0; i < drop.size(); ++i)
      out.null_basis.col(static_cast<Eigen::Index>(i)) =
          es.eigenvectors().col(drop[i]);
  }
  out.gram = core->gram;
  out.embed = core->embed;

  Correspondence fused;
  fused.left_alg = h.left_alg;
  fused.right_alg = k.right_alg;
  fused.dim = static_cast<int>(core->embed.cols());
  auto hleft = h.left;
  auto kright = k.right;
  fused.left = [core, hleft](const AlgElement& a) {
    CMatrix moved = apply_left_factor(hleft(a), core->embed, core->dh, core->dk);
    return (core->embed.adjoint() * (core->gram * moved)).eval();
  };
  fused.right = [core, kright](const AlgElement& b) {
    CMatrix moved = apply_right_factor(kright(b), core->embed, core->dh, core->dk);
    return (core->embed.adjoint() * (core->gram * moved)).eval();
  };
  out.fused = fused;
  return out;
}

namespace {

CMatrix collapse_matrix(const Fusion& f, const Correspondence& target,
                        bool right_side, double tol) {
  const int dh = f.dim_h, dk = f.dim_k, r = f.fused.dim;
  CMatrix u = CMatrix::Zero(target.dim, r);
  if (right_side) {
    // xi (x) b Omega |-> xi . b ; the K leg runs over L^2(B) coordinates
    const auto onb = trace_onb(target.right_alg);
    if (static_cast<int>(onb.size()) != dk)
      throw Error("right_collapse: K leg is not the standard form");
    for (int q = 0; q < dk; ++q) {
      CMatrix slice(dh, r);
      for (int p = 0; p < dh; ++p)
        slice.row(p) = f.embed.row(static_cast<Eigen::Index>(p) * dk + q);
      u += target.right(onb[q]) * slice;
    }
  } else {
    // b Omega (x) eta |-> b . eta ; the H leg runs over L^2(B) coordinates
    const auto onb = trace_onb(target.left_alg);
    if (static_cast<int>(onb.size()) != dh)
      throw Error("left_collapse: H leg is not the standard form");
    for (int p = 0; p < dh; ++p) {
      CMatrix slice = f.embed.middleRows(static_cast<Eigen::Index>(p) * dk, dk);
      u += target.left(onb[p]) * slice;
    }
  }
  double res =
      std::max((u.adjoint() * u - CMatrix::Identity(r, r)).cwiseAbs().maxCoeff(),
               (u * u.adjoint() - CMatrix::Identity(target.dim, target.dim))
                   .cwiseAbs()
                   .maxCoeff());
  if (res > std::max(tol, 1e-7) * 100)
    throw Error("unitor: canonical map is not unitary (convention fault)");
  return u;
}

}  // namespace

CMatrix right_collapse(const Fusion& f, const Correspondence& target, double tol) {
  return collapse_matrix(f, target, true, tol);
}

CMatrix left_collapse(const Fusion& f, const Correspondence& target, double tol) {
  return collapse_matrix(f, target, false, tol);
}

IntertwinerCell right_unitor(const Correspondence& h, const Fusion& f,
                             double tol) {
  return IntertwinerCell{f.fused, h, vna::identity_hom(h.left_alg),
                         vna::identity_hom(h.right_alg),
                         collapse_matrix(f, h, true, tol)};
}

IntertwinerCell right_unitor(const Correspondence& h, double tol) {
  Fusion f = connes_fusion(h, identity_correspondence(h.right_alg), tol);
  return right_unitor(h, f, tol);
}

IntertwinerCell left_unitor(const Correspondence& k, const Fusion& f,
                            double tol) {
  return IntertwinerCell{f.fused, k, vna::identity_hom(k.left_alg),
                         vna::identity_hom(k.right_alg),
                         collapse_matrix(f, k, false, tol)};
}

IntertwinerCell left_unitor(const Correspondence& k, double tol) {
  Fusion f = connes_fusion(identity_correspondence(k.left_alg), k, tol);
  return left_unitor(k, f, tol);
}

AssociatorResult associator(const Correspondence& h, const Correspondence& k,
                            const Correspondence& l, double tol) {
  AssociatorResult out{connes_fusion(h, k, tol), Fusion{}, connes_fusion(k, l, tol),
                       Fusion{}, IntertwinerCell{}};
  out.hk_l = connes_fusion(out.hk.fused, l, tol);
  out.h_kl = connes_fusion(h, out.kl.fused, tol);

  const int dh = h.dim, dk = k.dim, dl = l.dim;
  const int r1 = out.hk.fused.dim;
  // class representative in ((h k) l) -> plain tensor in h k l -> class in
  // h (k l) -> class in the final carrier. Row-major nesting makes the
  // re-bracketing the identity on flat indices.
  CMatrix lifted = apply_left_factor(out.hk.embed, out.hk_l.embed, r1, dl);
  CMatrix kl_proj = out.kl.embed.adjoint() * out.kl.gram;  // r2 x (dk*dl)
  CMatrix moved = apply_right_factor(kl_proj, lifted, dh, dk * dl);
  CMatrix a = out.h_kl.embed.adjoint() * (out.h_kl.gram * moved);

  double res = std::max(
      (a.adjoint() * a - CMatrix::Identity(a.cols(), a.cols())).cwiseAbs().maxCoeff(),
      (a * a.adjoint() - CMatrix::Identity(a.rows(), a.rows())).cwiseAbs().maxCoeff());
  if (res > std::max(tol, 1e-7) * 100)
    throw Error("associator: canonical map is not unitary");

  out.cell = IntertwinerCell{out.hk_l.fused, out.h_kl.fused,
                             vna::identity_hom(h.left_alg),
                             vna::identity_hom(l.right_alg), a};
  return out;
}

IntertwinerCell fuse_cells(const Fusion& src_fusion, const Fusion& tgt_fusion,
                           const IntertwinerCell& t, const IntertwinerCell& s,
                           double tol) {
  if (!vna::hom_equal(t.right_boundary, s.left_boundary, std::max(tol, 1e-7)))
    throw Error("fuse_cells: middle boundaries differ");
  const int dh = src_fusion.dim_h, dk = src_fusion.dim_k;
  auto push = [&](const CMatrix& cols) {
    CMatrix y = apply_left_factor(t.matrix, cols, dh, dk);
    return apply_right_factor(s.matrix, y, static_cast<int>(t.matrix.rows()), dk);
  };
  CMatrix moved = push(src_fusion.embed);
  CMatrix m = tgt_fusion.embed.adjoint() * (tgt_fusion.gram * moved);

  if (src_fusion.null_basis.cols() > 0) {
    CMatrix moved_null = push(src_fusion.null_basis);
    double descent = 0.0;
    for (Eigen::Index j = 0; j < moved_null.cols(); ++j) {
      Complex q = moved_null.col(j).dot(tgt_fusion.gram * moved_null.col(j));
      descent = std::max(descent, std::sqrt(std::max(0.0, std::real(q))));
    }
    if (descent > std::max(tol, 1e-7) * 100)
      throw Error("fuse_cells: map does not descend to the balanced quotient");
  }

  return IntertwinerCell{src_fusion.fused, tgt_fusion.fused, t.left_boundary,
                         s.right_boundary, m};
}

IntertwinerCell fuse_cells(const IntertwinerCell& t, const IntertwinerCell& s,
                           double tol) {
  Fusion src = connes_fusion(t.src, s.src, tol);
  Fusion tgt = connes_fusion(t.tgt, s.tgt, tol);
  return fuse_cells(src, tgt, t, s, tol);
}

}  // namespace aqft::corr
