#include "aqft/l2.hpp"

#include <random>

#include "doctest.h"
#include "oracles.hpp"

using namespace aqft;
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

}  // namespace

TEST_CASE("standard form of the scalars") {
  auto sf = l2::standard_form(AlgebraShape::matrix(1));
  CHECK(sf.dim() == 1);
  AlgElement two = AlgElement::identity(sf.algebra()).scaled(2.0);
  CHECK((sf.left(two) - sf.right(two)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(std::abs(sf.left(two)(0, 0) - Complex(2.0, 0.0)) < 1e-15);
}

TEST_CASE("standard form of M_2 with the normalized trace") {
  AlgebraShape m2 = AlgebraShape::matrix(2);
  auto sf = l2::standard_form(m2);
  CHECK(sf.dim() == 4);
  // <e11 Omega, e11 Omega> = tr(e11* e11) = 1/2
  CVector v = sf.coords(AlgElement::unit(m2, 0, 0, 0));
  CHECK(std::abs(v.dot(v) - Complex(0.5, 0.0)) < 1e-15);
  CHECK(sf.gram_residual() < 1e-15);
  CHECK(std::abs(sf.omega().dot(sf.omega()) - Complex(1.0, 0.0)) < 1e-15);
}

TEST_CASE("the right action is J lambda(b*) J, on all matrix-unit pairs of M_2") {
  AlgebraShape m2 = AlgebraShape::matrix(2);
  auto sf = l2::standard_form(m2);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      AlgElement b = AlgElement::unit(m2, 0, r, c);
      CHECK((sf.right_via_j(b) - sf.right(b)).cwiseAbs().maxCoeff() < 1e-12);
      // and the right action is really xi |-> xi b
      for (int r2 = 0; r2 < 2; ++r2)
        for (int c2 = 0; c2 < 2; ++c2) {
          AlgElement xi = AlgElement::unit(m2, 0, r2, c2);
          CVector lhs = sf.right(b) * sf.coords(xi);
          CVector rhs = sf.coords(xi * b);
          CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("standard form laws on a multi-block algebra") {
  AlgebraShape s = AlgebraShape::direct_sum({2, 3});
  auto sf = l2::standard_form(s);
  CHECK(sf.dim() == 13);
  // J is an involution
  CHECK((sf.j_lin() * sf.j_lin().conjugate() -
         CMatrix::Identity(sf.dim(), sf.dim()))
            .cwiseAbs()
            .maxCoeff() < 1e-15);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 4; ++trial) {
    AlgElement a{s, {numkit::random_matrix(2, 2, rng),
                     numkit::random_matrix(3, 3, rng)}};
    AlgElement b{s, {numkit::random_matrix(2, 2, rng),
                     numkit::random_matrix(3, 3, rng)}};
    CHECK((sf.right_via_j(b) - sf.right(b)).cwiseAbs().maxCoeff() < 1e-12);
    // commuting actions
    CHECK((sf.left(a) * sf.right(b) - sf.right(b) * sf.left(a))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
    // lambda is a *-representation, the right action an anti-representation
    CHECK((sf.left(a * b) - sf.left(a) * sf.left(b)).cwiseAbs().maxCoeff() <
          1e-12);
    CHECK((sf.right(a * b) - sf.right(b) * sf.right(a)).cwiseAbs().maxCoeff() <
          1e-12);
    CHECK((sf.left(a.adjoint()) - sf.left(a).adjoint()).cwiseAbs().maxCoeff() <
          1e-12);
  }
}

TEST_CASE("l2_of_hom: identity, functoriality along the spin-chain inclusions") {
  AlgebraShape m2 = AlgebraShape::matrix(2);
  CHECK((l2::l2_of_hom(vna::identity_hom(m2)) - CMatrix::Identity(4, 4))
            .cwiseAbs()
            .maxCoeff() < 1e-15);

  Hom phi = tensor_one_hom(2, 2);  // M_2 -> M_4
  Hom psi = tensor_one_hom(4, 2);  // M_4 -> M_8
  CMatrix lhs = l2::l2_of_hom(vna::hom_compose(psi, phi));
  CMatrix rhs = l2::l2_of_hom(psi) * l2::l2_of_hom(phi);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("l2_of_hom is an isometry (Gram pullback)") {
  Hom phi = tensor_one_hom(2, 2);
  CMatrix t = l2::l2_of_hom(phi);
  CHECK((t.adjoint() * t - CMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() <
        1e-12);
  auto src = l2::standard_form(phi.source);
  auto tgt = l2::standard_form(phi.target);
  std::mt19937_64 rng(9);
  AlgElement x{phi.source, {numkit::random_matrix(2, 2, rng)}};
  CHECK((t * src.left(x) - tgt.left(vna::hom_apply(phi, x)) * t)
            .cwiseAbs()
            .maxCoeff() < 1e-12);
  CHECK((t * src.right(x) - tgt.right(vna::hom_apply(phi, x)) * t)
            .cwiseAbs()
            .maxCoeff() < 1e-12);
}

TEST_CASE("l2_of_hom rejects non-trace-preserving maps (the vN_vert gate)") {
  Hom bad = tensor_one_hom(2, 2);
  bad.target = AlgebraShape::with_weights({4}, {1.0});
  bad.conjugator = AlgElement::identity(bad.target);
  CHECK_THROWS_AS(l2::l2_of_hom(bad), Error);
}

TEST_CASE("positive cone") {
  AlgebraShape m2 = AlgebraShape::matrix(2);
  auto sf = l2::standard_form(m2);
  auto cone = l2::positive_cone(sf);
  REQUIRE(!cone.empty());
  // Omega is a nonnegative combination of the generators (the sum of the
  // diagonal units), and J fixes every cone element
  CVector diag_sum = CVector::Zero(sf.dim());
  diag_sum += sf.coords(AlgElement::unit(m2, 0, 0, 0));
  diag_sum += sf.coords(AlgElement::unit(m2, 0, 1, 1));
  CHECK((diag_sum - sf.omega()).cwiseAbs().maxCoeff() < 1e-15);
  for (const auto& v : cone)
    CHECK((sf.apply_j(v) - v).cwiseAbs().maxCoeff() < 1e-12);
  CVector e11 = sf.coords(AlgElement::unit(m2, 0, 0, 0));
  CHECK((sf.apply_j(e11) - e11).cwiseAbs().maxCoeff() < 1e-15);
  // a Omega a* stays positive for random a: eigenvalue check of the
  // representing element
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 4; ++trial) {
    AlgElement a{m2, {numkit::random_matrix(2, 2, rng)}};
    CVector w = sf.left(a) * (sf.right(a.adjoint()) * sf.omega());
    AlgElement rep = sf.element(w);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(rep.block_mats[0]);
    CHECK(es.eigenvalues().minCoeff() > -1e-12);
  }
}
