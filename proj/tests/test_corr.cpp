#include "aqft/corr.hpp"

#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "support.hpp"

using namespace aqft;
using corr::Correspondence;
using corr::IntertwinerCell;
using numkit::CMatrix;
using numkit::CVector;
using vna::AlgebraShape;
using vna::AlgElement;
using vna::Hom;

namespace {

Hom tensor_one_hom(int n, int m) {
  AlgebraShape src = AlgebraShape::matrix(n);
  AlgebraShape tgt = AlgebraShape::matrix(n * m);
  Eigen::MatrixXi mult(1, 1);
  mult(0, 0) = m;
  return Hom{src, tgt, mult,
             AlgElement::from_dense(tgt, oracle::shuffle_permutation(n, m))};
}

std::vector<AlgElement> units_of(const AlgebraShape& s) {
  std::vector<AlgElement> out;
  for (int i = 0; i < s.num_blocks(); ++i)
    for (int r = 0; r < s.block_size(i); ++r)
      for (int c = 0; c < s.block_size(i); ++c)
        out.push_back(AlgElement::unit(s, i, r, c));
  return out;
}

int oracle_fusion_dim(const Correspondence& h, const Correspondence& k) {
  std::vector<CMatrix> rmats, lmats;
  for (const auto& b : units_of(h.right_alg)) {
    rmats.push_back(h.right(b));
    lmats.push_back(k.left(b));
  }
  return oracle::balanced_quotient_dim(rmats, lmats);
}

/// The row space as a C -> M_2 correspondence and the column space as an
/// M_2 -> C correspondence.
Correspondence row_space() {
  AlgebraShape c1 = AlgebraShape::matrix(1);
  AlgebraShape m2 = AlgebraShape::matrix(2);
  return Correspondence{
      c1, m2, 2,
      [](const AlgElement& a) {
        return (a.block_mats[0](0, 0) * CMatrix::Identity(2, 2)).eval();
      },
      [](const AlgElement& b) { return b.block_mats[0].transpose().eval(); }};
}

Correspondence column_space() {
  AlgebraShape c1 = AlgebraShape::matrix(1);
  AlgebraShape m2 = AlgebraShape::matrix(2);
  return Correspondence{
      m2, c1, 2, [](const AlgElement& a) { return a.block_mats[0]; },
      [](const AlgElement& b) {
        return (b.block_mats[0](0, 0) * CMatrix::Identity(2, 2)).eval();
      }};
}

}  // namespace

TEST_CASE("identity correspondences") {
  CHECK(corr::identity_correspondence(AlgebraShape::matrix(1)).dim == 1);
  CHECK(corr::identity_correspondence(AlgebraShape::direct_sum({2, 1})).dim == 5);
  auto c = corr::identity_correspondence(AlgebraShape::matrix(2));
  CHECK(corr::correspondence_residual(c) < 1e-12);
}

TEST_CASE("restrict_left") {
  auto id4 = corr::identity_correspondence(AlgebraShape::matrix(4));
  SUBCASE("restriction along the identity changes nothing") {
    auto r = corr::restrict_left(id4, vna::identity_hom(AlgebraShape::matrix(4)));
    CHECK(corr::correspondence_distance(r, id4) < 1e-15);
  }
  SUBCASE("restriction along M_2 -> M_4 keeps the actions commuting") {
    auto r = corr::restrict_left(id4, tensor_one_hom(2, 2));
    CHECK(r.dim == 16);
    CHECK(r.left_alg == AlgebraShape::matrix(2));
    CHECK(corr::correspondence_residual(r) < 1e-12);
  }
  SUBCASE("double restriction is restriction along the composite") {
    Hom phi = tensor_one_hom(2, 2), psi = tensor_one_hom(4, 2);
    auto id8 = corr::identity_correspondence(AlgebraShape::matrix(8));
    auto two_step = corr::restrict_left(corr::restrict_left(id8, psi), phi);
    auto one_step = corr::restrict_left(id8, vna::hom_compose(psi, phi));
    CHECK(corr::correspondence_distance(two_step, one_step) < 1e-12);
  }
}

TEST_CASE("intertwiner spaces") {
  AlgebraShape m2 = AlgebraShape::matrix(2);
  auto l2m2 = corr::identity_correspondence(m2);
  SUBCASE("L^2(M_2) is irreducible as an M_2-M_2 correspondence") {
    auto s = corr::intertwiner_space(l2m2, l2m2, vna::identity_hom(m2),
                                     vna::identity_hom(m2));
    CHECK(s.dim() == 1);
  }
  SUBCASE("the trivial correspondence over the scalars") {
    AlgebraShape c1 = AlgebraShape::matrix(1);
    auto triv = corr::identity_correspondence(c1);
    CHECK(corr::intertwiner_space(triv, triv, vna::identity_hom(c1),
                                  vna::identity_hom(c1))
              .dim() == 1);
  }
  SUBCASE("two copies give a two-dimensional intertwiner space") {
    auto doubled = support::direct_sum(l2m2, l2m2);
    CHECK(corr::intertwiner_space(l2m2, doubled, vna::identity_hom(m2),
                                  vna::identity_hom(m2))
              .dim() == 2);
  }
}

TEST_CASE("connes fusion: dimension examples against the balanced-quotient oracle") {
  SUBCASE("fusion over the scalars is the plain tensor product") {
    std::mt19937_64 rng(3);
    AlgebraShape c1 = AlgebraShape::matrix(1);
    auto h = support::random_correspondence(AlgebraShape::matrix(2), c1, rng, 2);
    auto k = support::random_correspondence(c1, AlgebraShape::matrix(2), rng, 2);
    auto fus = corr::connes_fusion(h, k);
    CHECK(fus.fused.dim == h.dim * k.dim);
    CHECK(fus.fused.dim == oracle_fusion_dim(h, k));
  }
  SUBCASE("row space fused with column space over M_2 is one-dimensional") {
    auto fus = corr::connes_fusion(row_space(), column_space());
    CHECK(fus.fused.dim == 1);
    CHECK(oracle_fusion_dim(row_space(), column_space()) == 1);
  }
  SUBCASE("L^2(M_2) fused with itself is L^2(M_2)") {
    auto l2m2 = corr::identity_correspondence(AlgebraShape::matrix(2));
    auto fus = corr::connes_fusion(l2m2, l2m2);
    CHECK(fus.fused.dim == 4);
    CHECK(fus.fused.dim == oracle_fusion_dim(l2m2, l2m2));
    CHECK(corr::correspondence_residual(fus.fused) < 1e-9);
  }
}

TEST_CASE("fusion Gram agrees with the hand-written B-valued pairing on M_2") {
  // literal transcription of <xi (x) eta, xi' (x) eta'> =
  // <eta, lambda(<xi,xi'>_B) eta'> with <xi,xi'>_B = sum_j f_j <xi f_j, xi'>
  // over the trace-orthonormal f_j of B = M_2
  std::mt19937_64 rng(11);
  AlgebraShape m2 = AlgebraShape::matrix(2);
  auto h = support::random_correspondence(m2, m2, rng, 2);
  auto k = support::random_correspondence(m2, m2, rng, 2);
  std::vector<AlgElement> f;
  for (auto& e : units_of(m2)) f.push_back(e.scaled(std::sqrt(2.0)));
  CMatrix g = CMatrix::Zero(h.dim * k.dim, h.dim * k.dim);
  for (int p = 0; p < h.dim; ++p)
    for (int pp = 0; pp < h.dim; ++pp) {
      AlgElement w = AlgElement::zero(m2);
      for (const auto& fj : f) {
        CVector xi = CVector::Zero(h.dim);
        xi(p) = 1.0;
        CVector xib = h.right(fj) * xi;
        CVector xip = CVector::Zero(h.dim);
        xip(pp) = 1.0;
        w = w + fj.scaled(xib.dot(xip));  // dot conjugates its first slot
      }
      CMatrix lw = k.left(w);
      for (int q = 0; q < k.dim; ++q)
        for (int qq = 0; qq < k.dim; ++qq)
          g(p * k.dim + q, pp * k.dim + qq) = lw(q, qq);
    }
  CHECK((g - corr::fusion_gram(h, k)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((corr::fusion_gram(h, k) - corr::fusion_gram_serial(h, k)).norm() == 0.0);
}

TEST_CASE("right unitor recovers multiplication on L^2(B)") {
  AlgebraShape m2 = AlgebraShape::matrix(2);
  auto l2m2 = corr::identity_correspondence(m2);
  auto fus = corr::connes_fusion(l2m2, l2m2);
  auto rho = corr::right_unitor(l2m2, fus);
  auto sf = l2::standard_form(m2);
  // xi (x) b Omega |-> xi . b on elementary tensors
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 6; ++trial) {
    AlgElement b{m2, {numkit::random_matrix(2, 2, rng)}};
    AlgElement c{m2, {numkit::random_matrix(2, 2, rng)}};
    CVector xi = sf.coords(b), eta = sf.coords(c);
    CVector tensor = CVector::Zero(16);
    for (int p = 0; p < 4; ++p)
      for (int q = 0; q < 4; ++q) tensor(p * 4 + q) = xi(p) * eta(q);
    CVector lhs = rho.matrix * fus.project(tensor);
    CVector rhs = sf.coords(b * c);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
  }
  CHECK(corr::is_globular_cell(rho));
  CHECK(corr::cell_residual(rho) < 1e-9);
}

TEST_CASE("left unitor recovers multiplication on L^2(B)") {
  AlgebraShape m2 = AlgebraShape::matrix(2);
  auto l2m2 = corr::identity_correspondence(m2);
  auto fus = corr::connes_fusion(l2m2, l2m2);
  auto lam = corr::left_unitor(l2m2, fus);
  auto sf = l2::standard_form(m2);
  std::mt19937_64 rng(7);
  AlgElement b{m2, {numkit::random_matrix(2, 2, rng)}};
  AlgElement c{m2, {numkit::random_matrix(2, 2, rng)}};
  CVector xi = sf.coords(b), eta = sf.coords(c);
  CVector tensor = CVector::Zero(16);
  for (int p = 0; p < 4; ++p)
    for (int q = 0; q < 4; ++q) tensor(p * 4 + q) = xi(p) * eta(q);
  CHECK((lam.matrix * fus.project(tensor) - sf.coords(b * c))
            .cwiseAbs()
            .maxCoeff() < 1e-10);
}

TEST_CASE("unitors are unitary for randomized correspondences") {
  std::mt19937_64 rng(13);
  for (const auto& shape :
       {AlgebraShape::matrix(2), AlgebraShape::direct_sum({2, 1})}) {
    for (int trial = 0; trial < 5; ++trial) {
      auto h = support::random_correspondence(AlgebraShape::matrix(2), shape,
                                              rng, 2);
      auto rho = corr::right_unitor(h);  // throws if not unitary
      CHECK(rho.matrix.rows() == h.dim);
      CHECK((rho.matrix * rho.matrix.adjoint() -
             CMatrix::Identity(h.dim, h.dim))
                .cwiseAbs()
                .maxCoeff() < 1e-9);
      auto k = support::random_correspondence(shape, AlgebraShape::matrix(2),
                                              rng, 2);
      auto lam = corr::left_unitor(k);
      CHECK((lam.matrix * lam.matrix.adjoint() -
             CMatrix::Identity(k.dim, k.dim))
                .cwiseAbs()
                .maxCoeff() < 1e-9);
      // fusion dimensions match the balanced-quotient oracle exactly
      CHECK(corr::connes_fusion(h, corr::identity_correspondence(shape))
                .fused.dim ==
            oracle_fusion_dim(h, corr::identity_correspondence(shape)));
    }
  }
}

TEST_CASE("unitor naturality against a random globular cell") {
  std::mt19937_64 rng(17);
  AlgebraShape m2 = AlgebraShape::matrix(2);
  auto h = support::random_correspondence(m2, m2, rng, 1);
  auto h2 = support::direct_sum(h, h);
  // a random globular cell h -> h (+) h built from the intertwiner space
  auto space = corr::intertwiner_space(h, h2, vna::identity_hom(m2),
                                       vna::identity_hom(m2));
  REQUIRE(space.dim() >= 1);
  CMatrix t = numkit::unvec(space.basis.col(0), h2.dim, h.dim);
  IntertwinerCell cell{h, h2, vna::identity_hom(m2), vna::identity_hom(m2), t};
  CHECK(corr::cell_residual(cell) < 1e-9);

  auto l2b = corr::identity_correspondence(m2);
  auto fus_src = corr::connes_fusion(h, l2b);
  auto fus_tgt = corr::connes_fusion(h2, l2b);
  auto rho_src = corr::right_unitor(h, fus_src);
  auto rho_tgt = corr::right_unitor(h2, fus_tgt);
  auto fused = corr::fuse_cells(fus_src, fus_tgt, cell,
                                corr::identity_cell(l2b));
  CMatrix lhs = rho_tgt.matrix * fused.matrix;
  CMatrix rhs = t * rho_src.matrix;
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("associator: scalars give the plain re-bracketing") {
  std::mt19937_64 rng(19);
  AlgebraShape c1 = AlgebraShape::matrix(1);
  auto h = support::random_correspondence(c1, c1, rng, 3);
  auto k = support::random_correspondence(c1, c1, rng, 2);
  auto l = support::random_correspondence(c1, c1, rng, 2);
  auto assoc = corr::associator(h, k, l);
  // over the scalars the fused carriers are the plain tensor products and
  // re-bracketing does not move coordinates
  CHECK(assoc.cell.matrix.rows() == h.dim * k.dim * l.dim);
  CHECK((assoc.cell.matrix - CMatrix::Identity(assoc.cell.matrix.rows(),
                                               assoc.cell.matrix.cols()))
            .cwiseAbs()
            .maxCoeff() < 1e-9);
}

TEST_CASE("pentagon identity on a random 4-chain over M_2") {
  std::mt19937_64 rng(23);
  AlgebraShape m2 = AlgebraShape::matrix(2);
  auto h = support::random_correspondence(m2, m2, rng, 1);
  auto k = support::random_correspondence(m2, m2, rng, 1);
  auto l = support::random_correspondence(m2, m2, rng, 1);
  auto m = support::random_correspondence(m2, m2, rng, 1);

  auto a_hkl = corr::associator(h, k, l);
  auto a_klm = corr::associator(k, l, m);
  auto hk = a_hkl.hk;
  auto kl = a_hkl.kl;
  auto lm = a_klm.kl;
  auto a_hk_l_m = corr::associator(hk.fused, l, m);
  auto a_h_kl_m = corr::associator(h, kl.fused, m);
  auto a_h_k_lm = corr::associator(h, k, lm.fused);

  // path 1: alpha(h,k,l) (x) id_m ; alpha(h, k(x)l, m) ; id_h (x) alpha(k,l,m)
  auto whisker_m = corr::fuse_cells(a_hk_l_m.hk_l /* ((hk)l) (x) m */,
                                    a_h_kl_m.hk_l /* (h(kl)) (x) m */,
                                    a_hkl.cell, corr::identity_cell(m));
  auto step2 = a_h_kl_m.cell;
  auto whisker_h = corr::fuse_cells(a_h_kl_m.h_kl /* h (x) ((kl)m) */,
                                    a_h_k_lm.h_kl /* h (x) (k(lm)) */,
                                    corr::identity_cell(h), a_klm.cell);
  CMatrix path1 = whisker_h.matrix * step2.matrix * whisker_m.matrix;
  // path 2: alpha(h(x)k, l, m) ; alpha(h, k, l(x)m)
  CMatrix path2 = a_h_k_lm.cell.matrix * a_hk_l_m.cell.matrix;
  CHECK((path1 - path2).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("triangle identity with the unitors") {
  std::mt19937_64 rng(29);
  AlgebraShape m2 = AlgebraShape::matrix(2);
  auto h = support::random_correspondence(m2, m2, rng, 1);
  auto k = support::random_correspondence(m2, m2, rng, 1);
  auto l2b = corr::identity_correspondence(m2);

  auto assoc = corr::associator(h, l2b, k);
  auto rho = corr::right_unitor(h, assoc.hk);
  auto lam = corr::left_unitor(k, assoc.kl);
  // (id_h (x) lambda_k) . alpha = rho_h (x) id_k
  auto left_path = corr::fuse_cells(assoc.h_kl, corr::connes_fusion(h, k),
                                    corr::identity_cell(h), lam);
  auto right_path = corr::fuse_cells(assoc.hk_l, corr::connes_fusion(h, k),
                                     rho, corr::identity_cell(k));
  CMatrix lhs = left_path.matrix * assoc.cell.matrix;
  CHECK((lhs - right_path.matrix).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("triangle on L^2(B) (x) L^2(B): the unitors agree") {
  AlgebraShape m2 = AlgebraShape::matrix(2);
  auto l2b = corr::identity_correspondence(m2);
  auto fus = corr::connes_fusion(l2b, l2b);
  auto rho = corr::right_unitor(l2b, fus);
  auto lam = corr::left_unitor(l2b, fus);
  CHECK((rho.matrix - lam.matrix).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("unit cells") {
  AlgebraShape m2 = AlgebraShape::matrix(2);
  SUBCASE("the unit cell of the identity is the identity cell") {
    auto cell = corr::unit_cell(vna::identity_hom(m2));
    CHECK((cell.matrix - CMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("vertical composition matches composition of homs") {
    Hom phi = tensor_one_hom(2, 2), psi = tensor_one_hom(4, 2);
    auto composed =
        corr::vertical_compose(corr::unit_cell(psi), corr::unit_cell(phi));
    auto direct = corr::unit_cell(vna::hom_compose(psi, phi));
    CHECK((composed.matrix - direct.matrix).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("the unit cell is bimodular with boundary (phi, phi)") {
    auto cell = corr::unit_cell(tensor_one_hom(2, 2));
    CHECK(corr::cell_residual(cell) < 1e-9);
    CHECK(!corr::is_globular_cell(cell));
  }
  SUBCASE("the vN_vert gate rejects non-trace-preserving homs") {
    Hom bad = tensor_one_hom(2, 2);
    bad.target = AlgebraShape::with_weights({4}, {1.0});
    bad.conjugator = AlgElement::identity(bad.target);
    CHECK_THROWS_AS(corr::unit_cell(bad), Error);
  }
}

TEST_CASE("fusing unit cells gives the unit cell, after unitor conjugation") {
  AlgebraShape m2 = AlgebraShape::matrix(2);
  Hom phi = tensor_one_hom(2, 2);
  auto iota = corr::unit_cell(phi);
  auto fus_src = corr::connes_fusion(iota.src, iota.src);
  auto fus_tgt = corr::connes_fusion(iota.tgt, iota.tgt);
  auto fused = corr::fuse_cells(fus_src, fus_tgt, iota, iota);
  auto rho_src = corr::right_unitor(iota.src, fus_src);
  auto rho_tgt = corr::right_unitor(iota.tgt, fus_tgt);
  CMatrix transported =
      rho_tgt.matrix * fused.matrix * rho_src.matrix.adjoint();
  CHECK((transported - iota.matrix).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("fusing identity cells gives the identity cell") {
  std::mt19937_64 rng(31);
  AlgebraShape m2 = AlgebraShape::matrix(2);
  auto h = support::random_correspondence(m2, m2, rng, 1);
  auto k = support::random_correspondence(m2, m2, rng, 1);
  auto fus = corr::connes_fusion(h, k);
  auto cell = corr::fuse_cells(fus, fus, corr::identity_cell(h),
                               corr::identity_cell(k));
  CHECK((cell.matrix - CMatrix::Identity(fus.fused.dim, fus.fused.dim))
            .cwiseAbs()
            .maxCoeff() < 1e-10);
}

TEST_CASE("interchange of vertical composition and fusion on a 2x2 grid") {
  // cells built from unit cells so that boundaries stay composable; the
  // second row conjugates inside M_4 to keep the fused spaces small
  std::mt19937_64 rng(41);
  Hom phi = tensor_one_hom(2, 2);
  AlgebraShape m4 = AlgebraShape::matrix(4);
  Hom psi{m4, m4, Eigen::MatrixXi::Identity(1, 1),
          AlgElement{m4, {numkit::random_unitary(4, rng)}}};
  auto a = corr::unit_cell(phi);  // L2(M2) -> L2(M4), boundary (phi, phi)
  auto b = corr::unit_cell(phi);
  auto c = corr::unit_cell(psi);  // L2(M4) -> L2(M4)
  auto d = corr::unit_cell(psi);

  auto fus_top = corr::connes_fusion(a.src, b.src);
  auto fus_mid = corr::connes_fusion(a.tgt, b.tgt);
  auto fus_bot = corr::connes_fusion(c.tgt, d.tgt);

  auto ab = corr::fuse_cells(fus_top, fus_mid, a, b);
  auto cd = corr::fuse_cells(fus_mid, fus_bot, c, d);
  auto order1 = corr::vertical_compose(cd, ab);

  auto ca = corr::vertical_compose(c, a);
  auto db = corr::vertical_compose(d, b);
  auto order2 = corr::fuse_cells(fus_top, fus_bot, ca, db);
  CHECK((order1.matrix - order2.matrix).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("fuse_cells rejects mismatched middle boundaries") {
  Hom phi = tensor_one_hom(2, 2);
  auto iota = corr::unit_cell(phi);
  auto idc = corr::identity_cell(corr::identity_correspondence(phi.source));
  CHECK_THROWS_AS(corr::fuse_cells(iota, idc), Error);
}

TEST_CASE("degenerate fusion Grams are quotiented by their kernel") {
  auto fus = corr::connes_fusion(row_space(), column_space());
  CHECK(fus.null_basis.cols() == 3);
  CHECK(fus.fused.dim == 1);
  CHECK(corr::correspondence_residual(fus.fused) < 1e-10);
}
