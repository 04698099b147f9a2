#include "aqft/vna.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace aqft::vna {

using numkit::op_norm;
using numkit::unvec;
using numkit::vec;

AlgebraShape AlgebraShape::matrix(int n) {
  return with_weights({n}, {1.0 / n});
}

AlgebraShape AlgebraShape::direct_sum(std::vector<int> blocks) {
  int total = std::accumulate(blocks.begin(), blocks.end(), 0);
  std::vector<double> w(blocks.size(), 1.0 / total);
  return with_weights(std::move(blocks), std::move(w));
}

AlgebraShape AlgebraShape::with_weights(std::vector<int> blocks,
                                        std::vector<double> weights) {
  AlgebraShape s{std::move(blocks), std::move(weights)};
  s.validate();
  return s;
}

int AlgebraShape::coord_dim() const {
  int d = 0;
  for (int n : blocks) d += n * n;
  return d;
}

int AlgebraShape::dense_dim() const {
  return std::accumulate(blocks.begin(), blocks.end(), 0);
}

bool AlgebraShape::operator==(const AlgebraShape& o) const {
  if (blocks != o.blocks) return false;
  for (size_t i = 0; i < trace_weights.size(); ++i)
    if (std::abs(trace_weights[i] - o.trace_weights[i]) >
        1e-12 * std::max(trace_weights[i], o.trace_weights[i]))
      return false;
  return true;
}

void AlgebraShape::validate() const {
  if (blocks.empty()) throw Error("AlgebraShape: no blocks");
  if (blocks.size() != trace_weights.size())
    throw Error("AlgebraShape: weight count mismatch");
  for (int n : blocks)
    if (n < 1) throw Error("AlgebraShape: block size must be >= 1");
  for (double w : trace_weights)
    if (!(w > 0.0)) throw Error("AlgebraShape: trace weights must be > 0");
}

AlgElement AlgElement::identity(const AlgebraShape& s) {
  AlgElement a{s, {}};
  for (int n : s.blocks) a.block_mats.push_back(CMatrix::Identity(n, n));
  return a;
}

AlgElement AlgElement::zero(const AlgebraShape& s) {
  AlgElement a{s, {}};
  for (int n : s.blocks) a.block_mats.push_back(CMatrix::Zero(n, n));
  return a;
}

AlgElement AlgElement::unit(const AlgebraShape& s, int blk, int r, int c) {
  AlgElement a = zero(s);
  a.block_mats[blk](r, c) = 1.0;
  return a;
}

AlgElement AlgElement::from_dense(const AlgebraShape& s, const CMatrix& dense,
                                  double tol) {
  if (dense.rows() != s.dense_dim() || dense.cols() != s.dense_dim())
    throw Error("from_dense: size mismatch");
  AlgElement a{s, {}};
  int off = 0;
  for (int n : s.blocks) {
    a.block_mats.push_back(dense.block(off, off, n, n));
    off += n;
  }
  double scale = std::max(1.0, dense.cwiseAbs().maxCoeff());
  CMatrix recon = a.dense();
  if ((dense - recon).cwiseAbs().maxCoeff() > tol * scale)
    throw Error("from_dense: matrix has off-block support");
  return a;
}

AlgElement AlgElement::adjoint() const {
  AlgElement a{shape, {}};
  for (const auto& m : block_mats) a.block_mats.push_back(m.adjoint());
  return a;
}

Complex AlgElement::trace() const {
  Complex t = 0.0;
  for (int i = 0; i < shape.num_blocks(); ++i)
    t += shape.weight(i) * block_mats[i].trace();
  return t;
}

CMatrix AlgElement::dense() const {
  int d = shape.dense_dim();
  CMatrix m = CMatrix::Zero(d, d);
  int off = 0;
  for (int i = 0; i < shape.num_blocks(); ++i) {
    int n = shape.block_size(i);
    m.block(off, off, n, n) = block_mats[i];
    off += n;
  }
  return m;
}

double AlgElement::norm() const {
  double v = 0.0;
  for (const auto& m : block_mats)
    if (m.size() > 0) v = std::max(v, m.cwiseAbs().maxCoeff());
  return v;
}

double AlgElement::diff_norm(const AlgElement& o) const {
  double v = 0.0;
  for (size_t i = 0; i < block_mats.size(); ++i)
    if (block_mats[i].size() > 0)
      v = std::max(v, (block_mats[i] - o.block_mats[i]).cwiseAbs().maxCoeff());
  return v;
}

bool AlgElement::is_unitary(double tol) const {
  for (const auto& m : block_mats) {
    CMatrix r = m * m.adjoint() - CMatrix::Identity(m.rows(), m.rows());
    if (r.cwiseAbs().maxCoeff() > tol) return false;
  }
  return true;
}

AlgElement AlgElement::operator+(const AlgElement& o) const {
  AlgElement a{shape, {}};
  for (size_t i = 0; i < block_mats.size(); ++i)
    a.block_mats.push_back(block_mats[i] + o.block_mats[i]);
  return a;
}

AlgElement AlgElement::operator-(const AlgElement& o) const {
  AlgElement a{shape, {}};
  for (size_t i = 0; i < block_mats.size(); ++i)
    a.block_mats.push_back(block_mats[i] - o.block_mats[i]);
  return a;
}

AlgElement AlgElement::operator*(const AlgElement& o) const {
  AlgElement a{shape, {}};
  for (size_t i = 0; i < block_mats.size(); ++i)
    a.block_mats.push_back(block_mats[i] * o.block_mats[i]);
  return a;
}

AlgElement AlgElement::scaled(Complex c) const {
  AlgElement a{shape, {}};
  for (const auto& m : block_mats) a.block_mats.push_back(c * m);
  return a;
}

int coord_index(const AlgebraShape& s, int blk, int r, int c) {
  int off = 0;
  for (int i = 0; i < blk; ++i) off += s.block_size(i) * s.block_size(i);
  return off + c * s.block_size(blk) + r;
}

CVector coords_of(const AlgElement& a) {
  CVector v(a.shape.coord_dim());
  int off = 0;
  for (const auto& m : a.block_mats) {
    v.segment(off, m.size()) = Eigen::Map<const CVector>(m.data(), m.size());
    off += static_cast<int>(m.size());
  }
  return v;
}

AlgElement element_from_coords(const AlgebraShape& s, const CVector& v) {
  AlgElement a{s, {}};
  int off = 0;
  for (int n : s.blocks) {
    a.block_mats.push_back(unvec(v.segment(off, n * n), n, n));
    off += n * n;
  }
  return a;
}

std::vector<AlgElement> algebra_generators(const AlgebraShape& s) {
  AlgElement diag = AlgElement::zero(s);
  AlgElement shift = AlgElement::zero(s);
  double val = 1.0;
  for (int i = 0; i < s.num_blocks(); ++i) {
    int n = s.block_size(i);
    for (int k = 0; k < n; ++k) diag.block_mats[i](k, k) = val++;
    for (int k = 0; k + 1 < n; ++k) shift.block_mats[i](k, k + 1) = 1.0;
  }
  return {diag, shift, shift.adjoint()};
}

void Hom::validate(double tol) const {
  source.validate();
  target.validate();
  if (mult.rows() != target.num_blocks() || mult.cols() != source.num_blocks())
    throw Error("Hom: multiplicity matrix shape mismatch");
  if ((mult.array() < 0).any())
    throw Error("Hom: negative multiplicity");
  for (int t = 0; t < target.num_blocks(); ++t) {
    int total = 0;
    for (int s = 0; s < source.num_blocks(); ++s)
      total += mult(t, s) * source.block_size(s);
    if (total != target.block_size(t))
      throw Error("Hom: not unital (mult * n_source != n_target)");
  }
  if (!(conjugator.shape == target)) throw Error("Hom: conjugator shape");
  if (!conjugator.is_unitary(tol)) throw Error("Hom: conjugator not unitary");
}

Hom identity_hom(const AlgebraShape& s) {
  Hom h{s, s, Eigen::MatrixXi::Identity(s.num_blocks(), s.num_blocks()),
        AlgElement::identity(s)};
  return h;
}

namespace {

// canon places, in target block t, mult(t,s) copies of a_s for s ascending
CMatrix canon_block(const Hom& phi, const AlgElement& a, int t) {
  int n = phi.target.block_size(t);
  CMatrix m = CMatrix::Zero(n, n);
  int off = 0;
  for (int s = 0; s < phi.source.num_blocks(); ++s) {
    int ns = phi.source.block_size(s);
    for (int c = 0; c < phi.mult(t, s); ++c) {
      m.block(off, off, ns, ns) = a.block_mats[s];
      off += ns;
    }
  }
  return m;
}

}  // namespace

AlgElement hom_apply(const Hom& phi, const AlgElement& a) {
  if (!(a.shape == phi.source)) throw Error("hom_apply: shape mismatch");
  for (int t = 0; t < phi.target.num_blocks(); ++t) {
    int total = 0;
    for (int s = 0; s < phi.source.num_blocks(); ++s)
      total += phi.mult(t, s) * phi.source.block_size(s);
    if (total != phi.target.block_size(t))
      throw Error("hom_apply: multiplicity matrix is not unital");
  }
  AlgElement out{phi.target, {}};
  for (int t = 0; t < phi.target.num_blocks(); ++t) {
    const CMatrix& u = phi.conjugator.block_mats[t];
    out.block_mats.push_back(u * canon_block(phi, a, t) * u.adjoint());
  }
  return out;
}

Hom hom_compose(const Hom& psi, const Hom& phi) {
  if (!(phi.target == psi.source)) throw Error("hom_compose: shape mismatch");
  Eigen::MatrixXi mult = psi.mult * phi.mult;

  // Nesting canon_psi inside canon_phi produces the composite's diagonal
  // segments in a different order than the composite's own canonical layout;
  // the discrepancy is an explicit block permutation folded into the
  // composite conjugator: u = psi(u_phi) * u_psi * P.
  AlgElement perm = AlgElement::zero(psi.target);
  for (int t = 0; t < psi.target.num_blocks(); ++t) {
    int nt = psi.target.block_size(t);
    // canonical layout of the composite: segment start per source block
    std::vector<int> canon_off(phi.source.num_blocks());
    {
      int off = 0;
      for (int s = 0; s < phi.source.num_blocks(); ++s) {
        canon_off[s] = off;
        off += mult(t, s) * phi.source.block_size(s);
      }
    }
    std::vector<int> copies_used(phi.source.num_blocks(), 0);
    CMatrix p = CMatrix::Zero(nt, nt);
    int pos = 0;
    for (int m = 0; m < psi.source.num_blocks(); ++m) {
      int nm = psi.source.block_size(m);
      for (int c2 = 0; c2 < psi.mult(t, m); ++c2) {
        for (int s = 0; s < phi.source.num_blocks(); ++s) {
          int ns = phi.source.block_size(s);
          for (int c1 = 0; c1 < phi.mult(m, s); ++c1) {
            int canon_pos = canon_off[s] + copies_used[s] * ns;
            ++copies_used[s];
            for (int i = 0; i < ns; ++i) p(pos + i, canon_pos + i) = 1.0;
            pos += ns;
          }
        }
      }
      (void)nm;
    }
    perm.block_mats[t] = p;
  }

  AlgElement u = hom_apply(psi, phi.conjugator) * psi.conjugator * perm;
  Hom out{phi.source, psi.target, std::move(mult), std::move(u)};
  return out;
}

double hom_equal_residual(const Hom& a, const Hom& b) {
  if (!(a.source == b.source) || !(a.target == b.target)) return 1.0;
  if (a.mult != b.mult) return 1.0;
  // u_b^* u_a must commute with the canonical embedding: within each target
  // block, sub-blocks across different source labels vanish and sub-blocks
  // joining copies of the same label are scalar multiples of the identity.
  double res = 0.0;
  for (int t = 0; t < a.target.num_blocks(); ++t) {
    CMatrix v = b.conjugator.block_mats[t].adjoint() * a.conjugator.block_mats[t];
    struct Seg {
      int s, off, len;
    };
    std::vector<Seg> segs;
    int off = 0;
    for (int s = 0; s < a.source.num_blocks(); ++s) {
      int ns = a.source.block_size(s);
      for (int c = 0; c < a.mult(t, s); ++c) {
        segs.push_back({s, off, ns});
        off += ns;
      }
    }
    for (const auto& p : segs)
      for (const auto& q : segs) {
        CMatrix sub = v.block(p.off, q.off, p.len, q.len);
        if (p.s != q.s) {
          res = std::max(res, sub.cwiseAbs().maxCoeff());
        } else {
          Complex lambda = sub.trace() / static_cast<double>(p.len);
          CMatrix dev = sub - lambda * CMatrix::Identity(p.len, p.len);
          res = std::max(res, dev.cwiseAbs().maxCoeff());
        }
      }
  }
  return res;
}

bool hom_equal(const Hom& a, const Hom& b, double tol) {
  return hom_equal_residual(a, b) <= tol;
}

bool is_injective(const Hom& phi) {
  for (int s = 0; s < phi.source.num_blocks(); ++s) {
    bool hit = false;
    for (int t = 0; t < phi.target.num_blocks(); ++t)
      if (phi.mult(t, s) > 0) hit = true;
    if (!hit) return false;
  }
  return true;
}

bool is_trace_preserving(const Hom& phi, double tol) {
  double wmax = 0.0;
  for (double w : phi.source.trace_weights) wmax = std::max(wmax, w);
  for (int s = 0; s < phi.source.num_blocks(); ++s) {
    double lhs = 0.0;
    for (int t = 0; t < phi.target.num_blocks(); ++t)
      lhs += phi.mult(t, s) * phi.target.weight(t);
    if (std::abs(lhs - phi.source.weight(s)) > tol * wmax) return false;
  }
  return true;
}

CMatrix hom_linearized(const Hom& phi) {
  int ds = phi.source.coord_dim();
  CMatrix m(phi.target.coord_dim(), ds);
  for (int blk = 0, col = 0; blk < phi.source.num_blocks(); ++blk) {
    int n = phi.source.block_size(blk);
    for (int c = 0; c < n; ++c)
      for (int r = 0; r < n; ++r, ++col)
        m.col(col) = coords_of(hom_apply(phi, AlgElement::unit(phi.source, blk, r, c)));
  }
  return m;
}

Subspace generated_subalgebra(const AlgebraShape& ambient,
                              const std::vector<Subspace>& parts, double tol) {
  int d = ambient.dense_dim();
  std::vector<CMatrix> gens;
  for (const auto& p : parts) {
    if (p.ambient_dim != d * d)
      throw Error("generated_subalgebra: ambient mismatch");
    for (int j = 0; j < p.dim(); ++j) gens.push_back(unvec(p.basis.col(j), d, d));
  }
  if (gens.empty()) gens.push_back(CMatrix::Identity(d, d));
  // products and adjoints of block-diagonal matrices stay block-diagonal,
  // so the closure lives inside the ambient algebra's coordinate span
  return numkit::algebra_closure(gens, tol, ambient.coord_dim());
}

FiniteGroup FiniteGroup::trivial() {
  FiniteGroup g;
  g.order = 1;
  g.mult = Eigen::MatrixXi::Zero(1, 1);
  return g;
}

FiniteGroup FiniteGroup::cyclic(int n) {
  FiniteGroup g;
  g.order = n;
  g.mult.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g.mult(i, j) = (i + j) % n;
  return g;
}

int FiniteGroup::inverse(int g) const {
  for (int h = 0; h < order; ++h)
    if (mult(g, h) == 0) return h;
  throw Error("FiniteGroup: no inverse");
}

void FiniteGroup::validate() const {
  if (order < 1 || mult.rows() != order || mult.cols() != order)
    throw Error("FiniteGroup: bad table");
  for (int g = 0; g < order; ++g) {
    if (mult(0, g) != g || mult(g, 0) != g)
      throw Error("FiniteGroup: 0 is not a unit");
    inverse(g);
  }
  for (int a = 0; a < order; ++a)
    for (int b = 0; b < order; ++b)
      for (int c = 0; c < order; ++c)
        if (mult(mult(a, b), c) != mult(a, mult(b, c)))
          throw Error("FiniteGroup: not associative");
}

void UnitaryRep::validate(double tol) const {
  group.validate();
  if (static_cast<int>(unitaries.size()) != group.order)
    throw Error("UnitaryRep: size mismatch");
  for (const auto& u : unitaries)
    if (!u.is_unitary(tol)) throw Error("UnitaryRep: non-unitary element");
  if (unitaries[0].diff_norm(AlgElement::identity(unitaries[0].shape)) > tol)
    throw Error("UnitaryRep: unit does not map to 1");
  for (int g = 0; g < group.order; ++g)
    for (int h = 0; h < group.order; ++h) {
      AlgElement prod = unitaries[g] * unitaries[h];
      if (prod.diff_norm(unitaries[group.mult(g, h)]) > tol)
        throw Error("UnitaryRep: not a homomorphism");
    }
}

Subspace fixed_point_subalgebra(const AlgebraShape& ambient,
                                const UnitaryRep& action, double tol) {
  action.validate(tol);
  int dc = ambient.coord_dim();
  // blockwise conjugation on flat coordinates: vec(u a u^*) = kron(conj u, u) vec(a)
  std::vector<CMatrix> systems;
  for (int g = 1; g < action.group.order; ++g) {
    CMatrix m = CMatrix::Zero(dc, dc);
    int off = 0;
    for (int i = 0; i < ambient.num_blocks(); ++i) {
      const CMatrix& u = action.unitaries[g].block_mats[i];
      int n2 = static_cast<int>(u.rows() * u.rows());
      m.block(off, off, n2, n2) = numkit::kron(u.conjugate(), u);
      off += n2;
    }
    systems.push_back(m - CMatrix::Identity(dc, dc));
  }
  if (systems.empty()) systems.push_back(CMatrix::Zero(dc, dc));
  CMatrix stacked(static_cast<Eigen::Index>(systems.size()) * dc, dc);
  for (size_t i = 0; i < systems.size(); ++i)
    stacked.middleRows(static_cast<Eigen::Index>(i) * dc, dc) = systems[i];
  Subspace fixed_coords = numkit::kernel_basis(stacked, tol);

  // re-express in the dense flatten (the common picture for subspaces)
  int d = ambient.dense_dim();
  CMatrix basis(d * d, fixed_coords.dim());
  for (int j = 0; j < fixed_coords.dim(); ++j) {
    AlgElement a = element_from_coords(ambient, fixed_coords.basis.col(j));
    basis.col(j) = vec(a.dense());
  }
  return Subspace{d * d, basis};
}

namespace {

// eigenvalue clustering with a relative gap threshold
std::vector<std::vector<int>> cluster_eigenvalues(const Eigen::VectorXd& ev,
                                                  double gap) {
  std::vector<int> idx(ev.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return ev(a) < ev(b); });
  std::vector<std::vector<int>> clusters;
  for (int i : idx) {
    if (clusters.empty() || ev(i) - ev(clusters.back().back()) > gap)
      clusters.push_back({});
    clusters.back().push_back(i);
  }
  return clusters;
}

}  // namespace

WedderburnData wedderburn_decompose(const AlgebraShape& ambient,
                                    const Subspace& s, double tol) {
  const int d = ambient.dense_dim();
  if (s.ambient_dim != d * d) throw Error("wedderburn: ambient mismatch");
  const int k = s.dim();
  std::vector<CMatrix> basis;
  for (int j = 0; j < k; ++j) basis.push_back(unvec(s.basis.col(j), d, d));

  // the input must be a unital *-closed product-closed subspace
  if (!s.contains(vec(CMatrix::Identity(d, d)).eval(), 1e-7))
    throw Error("wedderburn: subspace is not unital");
  for (const auto& b : basis) {
    if (!s.contains(vec(b.adjoint().eval()).eval(), 1e-7))
      throw Error("wedderburn: subspace is not *-closed");
    for (const auto& c : basis)
      if (!s.contains(vec((b * c).eval()).eval(), 1e-7))
        throw Error("wedderburn: subspace is not closed under products");
  }

  // center: z in s with [z, b] = 0 for every basis element
  CMatrix sys(static_cast<Eigen::Index>(k) * d * d, k);
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < k; ++i)
      sys.block(static_cast<Eigen::Index>(j) * d * d, i, d * d, 1) =
          vec((basis[i] * basis[j] - basis[j] * basis[i]).eval());
  Subspace center_coeff = numkit::kernel_basis(sys, tol);
  const int nblk = center_coeff.dim();

  std::vector<CMatrix> center_herm;
  for (int j = 0; j < nblk; ++j) {
    CMatrix z = CMatrix::Zero(d, d);
    for (int i = 0; i < k; ++i) z += center_coeff.basis(i, j) * basis[i];
    center_herm.push_back(0.5 * (z + z.adjoint()));
    center_herm.push_back(Complex(0, 0.5) * (z - z.adjoint()));
  }

  std::mt19937_64 rng(0x5eedull);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // minimal central projections from a generic central Hermitian element
  std::vector<CMatrix> central_proj;
  for (int attempt = 0; attempt < 16 && central_proj.empty(); ++attempt) {
    CMatrix h = CMatrix::Zero(d, d);
    for (const auto& z : center_herm) h += gauss(rng) * z;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    auto clusters = cluster_eigenvalues(es.eigenvalues(), 1e-6 * scale);
    if (static_cast<int>(clusters.size()) != nblk) continue;
    for (const auto& cl : clusters) {
      CMatrix p = CMatrix::Zero(d, d);
      for (int i : cl)
        p += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
      central_proj.push_back(p);
    }
    for (const auto& p : central_proj)
      if (!s.contains(vec(p).eval(), 1e-7)) {
        central_proj.clear();
        break;
      }
  }
  if (central_proj.empty())
    throw Error("wedderburn: could not separate central projections");

  struct BlockData {
    int m, c;
    std::vector<CVector> columns;  // ambient basis vectors, (a,c)-ordered
  };
  std::vector<BlockData> blocks_out;

  for (const auto& p : central_proj) {
    // corner algebra p s p
    std::vector<CMatrix> corner;
    {
      CMatrix cand(d * d, k);
      for (int i = 0; i < k; ++i) cand.col(i) = vec((p * basis[i] * p).eval());
      CMatrix ob = numkit::orthonormal_span(cand, 1e-9);
      for (int j = 0; j < ob.cols(); ++j) corner.push_back(unvec(ob.col(j), d, d));
    }
    int m = static_cast<int>(std::lround(std::sqrt(double(corner.size()))));
    if (m * m != static_cast<int>(corner.size()))
      throw Error("wedderburn: corner dimension is not a square");
    int r = static_cast<int>(std::lround(p.real().trace()));
    if (r % m != 0) throw Error("wedderburn: multiplicity not integral");
    int c = r / m;

    // orthonormal basis of range(p)
    Eigen::SelfAdjointEigenSolver<CMatrix> esp(p);
    CMatrix q(d, r);
    {
      int col = 0;
      for (int i = 0; i < d; ++i)
        if (esp.eigenvalues()(i) > 0.5) q.col(col++) = esp.eigenvectors().col(i);
      if (col != r) throw Error("wedderburn: projection rank mismatch");
    }

    std::vector<CMatrix> herm_corner;
    for (const auto& x : corner) {
      herm_corner.push_back(0.5 * (x + x.adjoint()));
      herm_corner.push_back(Complex(0, 0.5) * (x - x.adjoint()));
    }

    // minimal projections of the corner from a generic Hermitian element
    std::vector<CMatrix> fproj;
    for (int attempt = 0; attempt < 16 && fproj.empty(); ++attempt) {
      CMatrix y = CMatrix::Zero(d, d);
      for (const auto& z : herm_corner) y += gauss(rng) * z;
      CMatrix yr = q.adjoint() * y * q;
      Eigen::SelfAdjointEigenSolver<CMatrix> es(yr);
      double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
      auto clusters = cluster_eigenvalues(es.eigenvalues(), 1e-6 * scale);
      if (static_cast<int>(clusters.size()) != m) continue;
      bool ok = true;
      for (const auto& cl : clusters) {
        if (static_cast<int>(cl.size()) != c) {
          ok = false;
          break;
        }
        CMatrix v(d, cl.size());
        for (size_t i = 0; i < cl.size(); ++i)
          v.col(static_cast<Eigen::Index>(i)) = q * es.eigenvectors().col(cl[i]);
        fproj.push_back(v * v.adjoint());
      }
      if (!ok) fproj.clear();
    }
    if (fproj.empty())
      throw Error("wedderburn: could not split corner into matrix units");

    // partial isometries v_a with v_a v_a^* = f_a, v_a^* v_a = f_0:
    // f_a s f_0 is one-dimensional
    std::vector<CMatrix> viso;
    for (int a = 0; a < m; ++a) {
      CMatrix cand(d * d, k);
      for (int i = 0; i < k; ++i)
        cand.col(i) = vec((fproj[a] * basis[i] * fproj[0]).eval());
      CMatrix ob = numkit::orthonormal_span(cand, 1e-9);
      if (ob.cols() != 1)
        throw Error("wedderburn: intertwiner space is not one-dimensional");
      CMatrix x = unvec(ob.col(0), d, d);
      double alpha = std::real((x.adjoint() * x).trace()) / c;
      viso.push_back(x / std::sqrt(alpha));
    }

    // orthonormal basis of range(f_0)
    Eigen::SelfAdjointEigenSolver<CMatrix> esf(fproj[0]);
    std::vector<CVector> w;
    for (int i = 0; i < d; ++i)
      if (esf.eigenvalues()(i) > 0.5) w.push_back(esf.eigenvectors().col(i));
    if (static_cast<int>(w.size()) != c)
      throw Error("wedderburn: minimal projection rank mismatch");

    BlockData bd{m, c, {}};
    for (int a = 0; a < m; ++a)
      for (int cc = 0; cc < c; ++cc) bd.columns.push_back(viso[a] * w[cc]);
    blocks_out.push_back(std::move(bd));
  }

  std::stable_sort(blocks_out.begin(), blocks_out.end(),
                   [](const BlockData& a, const BlockData& b) { return a.m > b.m; });

  WedderburnData wd;
  wd.iso = CMatrix::Zero(d, d);
  {
    int col = 0;
    for (const auto& b : blocks_out) {
      wd.blocks.push_back(b.m);
      wd.multiplicities.push_back(b.c);
      for (const auto& v : b.columns) wd.iso.col(col++) = v;
    }
    if (col != d) throw Error("wedderburn: basis does not fill the space");
  }

  CMatrix uu = wd.iso.adjoint() * wd.iso - CMatrix::Identity(d, d);
  if (uu.cwiseAbs().maxCoeff() > 1e-7)
    throw Error("wedderburn: iso is not unitary");

  // validate the multi-matrix structure on every basis element
  AlgebraShape abstract = AlgebraShape::direct_sum(wd.blocks);
  for (const auto& b : basis) {
    AlgElement x = wedderburn_extract(wd, abstract, b);
    CMatrix recon = wedderburn_embed(wd, x);
    if ((recon - b).cwiseAbs().maxCoeff() > 1e-6 * std::max(1.0, b.cwiseAbs().maxCoeff()))
      throw Error("wedderburn: structure validation failed");
  }
  (void)tol;
  return wd;
}

CMatrix wedderburn_embed(const WedderburnData& wd, const AlgElement& a) {
  int d = static_cast<int>(wd.iso.rows());
  CMatrix inner = CMatrix::Zero(d, d);
  int off = 0;
  for (size_t j = 0; j < wd.blocks.size(); ++j) {
    int m = wd.blocks[j], c = wd.multiplicities[j];
    inner.block(off, off, m * c, m * c) =
        numkit::kron(a.block_mats[j], CMatrix::Identity(c, c));
    off += m * c;
  }
  return wd.iso * inner * wd.iso.adjoint();
}

AlgElement wedderburn_extract(const WedderburnData& wd,
                              const AlgebraShape& abstract_shape,
                              const CMatrix& dense) {
  CMatrix inner = wd.iso.adjoint() * dense * wd.iso;
  AlgElement a = AlgElement::zero(abstract_shape);
  int off = 0;
  for (size_t j = 0; j < wd.blocks.size(); ++j) {
    int m = wd.blocks[j], c = wd.multiplicities[j];
    CMatrix x = CMatrix::Zero(m, m);
    for (int r = 0; r < m; ++r)
      for (int cc = 0; cc < m; ++cc) {
        Complex sum = 0.0;
        for (int i = 0; i < c; ++i) sum += inner(off + r * c + i, off + cc * c + i);
        x(r, cc) = sum / static_cast<double>(c);
      }
    a.block_mats[j] = x;
    off += m * c;
  }
  return a;
}

AlgElement opposite_identification(const AlgElement& a) {
  AlgElement out{a.shape, {}};
  for (const auto& m : a.block_mats) out.block_mats.push_back(m.transpose());
  return out;
}

Hom hom_from_linear_map(const AlgebraShape& source, const AlgebraShape& target,
                        const std::function<AlgElement(const AlgElement&)>& f,
                        double tol) {
  source.validate();
  target.validate();
  const double vtol = std::max(tol, 1e-8);

  // *-homomorphism validation on matrix units
  AlgElement one = f(AlgElement::identity(source));
  if (one.diff_norm(AlgElement::identity(target)) > vtol)
    throw Error("hom_from_linear_map: not unital");
  std::vector<std::vector<std::vector<AlgElement>>> fu(source.num_blocks());
  for (int s = 0; s < source.num_blocks(); ++s) {
    int n = source.block_size(s);
    fu[s].resize(n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c)
        fu[s][r].push_back(f(AlgElement::unit(source, s, r, c)));
  }
  for (int s = 0; s < source.num_blocks(); ++s) {
    int n = source.block_size(s);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        if (fu[s][r][c].adjoint().diff_norm(fu[s][c][r]) > vtol)
          throw Error("hom_from_linear_map: not *-preserving");
        for (int r2 = 0; r2 < n; ++r2)
          for (int c2 = 0; c2 < n; ++c2) {
            AlgElement prod = fu[s][r][c] * fu[s][r2][c2];
            AlgElement expect = (c == r2) ? fu[s][r][c2]
                                          : AlgElement::zero(target);
            if (prod.diff_norm(expect) > vtol)
              throw Error("hom_from_linear_map: not multiplicative");
          }
      }
  }
  for (int s = 0; s < source.num_blocks(); ++s)
    for (int s2 = 0; s2 < source.num_blocks(); ++s2) {
      if (s == s2) continue;
      AlgElement prod = fu[s][0][0] * fu[s2][0][0];
      if (prod.norm() > vtol)
        throw Error("hom_from_linear_map: blocks do not map orthogonally");
    }

  // multiplicities from the ranks of the images of rank-one projections
  Eigen::MatrixXi mult(target.num_blocks(), source.num_blocks());
  for (int s = 0; s < source.num_blocks(); ++s)
    for (int t = 0; t < target.num_blocks(); ++t) {
      double tr = std::real(fu[s][0][0].block_mats[t].trace());
      int lam = static_cast<int>(std::lround(tr));
      if (std::abs(tr - lam) > 1e-6)
        throw Error("hom_from_linear_map: non-integral multiplicity");
      mult(t, s) = lam;
    }

  // build the inner unitary columnwise from the ranges of f(e^s_00)
  AlgElement u = AlgElement::zero(target);
  for (int t = 0; t < target.num_blocks(); ++t) {
    int nt = target.block_size(t);
    CMatrix ut = CMatrix::Zero(nt, nt);
    int off = 0;
    for (int s = 0; s < source.num_blocks(); ++s) {
      int ns = source.block_size(s);
      if (mult(t, s) == 0) continue;
      Eigen::SelfAdjointEigenSolver<CMatrix> es(fu[s][0][0].block_mats[t]);
      std::vector<CVector> w;
      for (int i = 0; i < nt; ++i)
        if (es.eigenvalues()(i) > 0.5) w.push_back(es.eigenvectors().col(i));
      if (static_cast<int>(w.size()) != mult(t, s))
        throw Error("hom_from_linear_map: projection rank mismatch");
      for (int c = 0; c < mult(t, s); ++c)
        for (int i = 0; i < ns; ++i)
          ut.col(off + c * ns + i) = fu[s][i][0].block_mats[t] * w[c];
      off += mult(t, s) * ns;
    }
    u.block_mats[t] = ut;
  }

  Hom out{source, target, std::move(mult), std::move(u)};
  out.validate(vtol);

  // final residual check of the normal form against the raw map
  double res = 0.0;
  for (int s = 0; s < source.num_blocks(); ++s) {
    int n = source.block_size(s);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c)
        res = std::max(res, hom_apply(out, AlgElement::unit(source, s, r, c))
                                .diff_norm(fu[s][r][c]));
  }
  if (res > vtol * 10)
    throw Error("hom_from_linear_map: normal form mismatch");
  return out;
}

}  // namespace aqft::vna
