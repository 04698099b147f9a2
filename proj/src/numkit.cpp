#include "aqft/numkit.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace aqft::numkit {

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

double op_norm(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(a);
  return svd.singularValues()(0);
}

CVector vec(const CMatrix& a) {
  return Eigen::Map<const CVector>(a.data(), a.size());
}

CMatrix unvec(const CVector& v, int rows, int cols) {
  return Eigen::Map<const CMatrix>(v.data(), rows, cols);
}

CMatrix random_matrix(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMatrix m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = Complex(g(rng), g(rng));
  return m;
}

CMatrix random_unitary(int n, std::mt19937_64& rng) {
  CMatrix m = random_matrix(n, n, rng);
  Eigen::HouseholderQR<CMatrix> qr(m);
  CMatrix q = qr.householderQ();
  CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // fix the phase ambiguity so the result is deterministic
  for (int j = 0; j < n; ++j) {
    Complex d = r(j, j);
    if (std::abs(d) > 0) q.col(j) *= d / std::abs(d);
  }
  return q;
}

double Subspace::residual(const CVector& v) const {
  double nv = v.norm();
  if (nv == 0.0) return 0.0;
  CVector r = v - basis * (basis.adjoint() * v);
  return r.norm() / nv;
}

bool Subspace::contains(const CVector& v, double tol) const {
  return residual(v) <= tol;
}

bool Subspace::contains(const Subspace& other, double tol) const {
  for (int j = 0; j < other.dim(); ++j)
    if (!contains(other.basis.col(j), tol)) return false;
  return true;
}

double Subspace::projector_distance(const Subspace& other) const {
  return op_norm(projector() - other.projector());
}

double Subspace::projector_distance_fro(const Subspace& other) const {
  return (projector() - other.projector()).norm();
}

bool Subspace::equals(const Subspace& other, double tol) const {
  if (ambient_dim != other.ambient_dim) return false;
  if (dim() != other.dim()) return false;
  return projector_distance(other) <= tol;
}

double Subspace::orthonormality_residual() const {
  if (dim() == 0) return 0.0;
  CMatrix g = basis.adjoint() * basis;
  return (g - CMatrix::Identity(dim(), dim())).cwiseAbs().maxCoeff();
}

CMatrix extend_orthonormal(const CMatrix& basis, const CMatrix& candidates,
                           double tol, double scale_hint) {
  const Eigen::Index d = candidates.rows();
  if (candidates.cols() == 0) return basis;
  double scale = std::max(scale_hint, candidates.colwise().norm().maxCoeff());
  if (scale == 0.0) return basis;
  const double thresh = tol * scale;

  // batched: project the whole candidate block off the basis, then read the
  // genuinely new directions off the spectrum of R R^adj. Forming the Gram
  // squares the conditioning, so its small eigenvalues carry noise of order
  // eps * lambda_max; the cut combines the data-scale tolerance with that
  // noise floor.
  CMatrix r = candidates;
  for (int pass = 0; pass < 2; ++pass)
    if (basis.cols() > 0) r -= basis * (basis.adjoint() * r);
  CMatrix m = r * r.adjoint();
  if (std::real(m.trace()) <= thresh * thresh) return basis;  // all residue
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
  const double lmax = std::max(0.0, es.eigenvalues().maxCoeff());
  const double cut = std::max(thresh * thresh, 1e-12 * lmax);
  int fresh = 0;
  for (Eigen::Index i = 0; i < d; ++i)
    if (es.eigenvalues()(i) > cut) ++fresh;
  if (fresh == 0) return basis;
  CMatrix out(d, basis.cols() + fresh);
  if (basis.cols() > 0) out.leftCols(basis.cols()) = basis;
  out.rightCols(fresh) = es.eigenvectors().rightCols(fresh);
  // one cleanup pass keeps the block orthonormal against the old basis
  if (basis.cols() > 0) {
    auto nb = out.rightCols(fresh);
    nb -= basis * (basis.adjoint() * nb).eval();
    for (int j = 0; j < fresh; ++j) nb.col(j).normalize();
  }
  return out;
}

CMatrix orthonormal_span(const CMatrix& columns, double tol) {
  return extend_orthonormal(CMatrix(columns.rows(), 0), columns, tol);
}

Subspace kernel_basis(const CMatrix& m, double tol) {
  const int n = static_cast<int>(m.cols());
  if (m.rows() == 0 || m.size() == 0 || m.cwiseAbs().maxCoeff() == 0.0)
    return Subspace{n, CMatrix::Identity(n, n)};
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cut = tol * sv(0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) ++rank;
  Subspace out{n, svd.matrixV().rightCols(n - rank)};
  return out;
}

CMatrix pairwise_products(const std::vector<CMatrix>& a,
                          const std::vector<CMatrix>& b) {
  if (a.empty() || b.empty()) return CMatrix(0, 0);
  const int n = static_cast<int>(a[0].rows());
  const Eigen::Index na = static_cast<Eigen::Index>(a.size());
  const Eigen::Index nb = static_cast<Eigen::Index>(b.size());
  CMatrix out(n * n, na * nb);
#pragma omp parallel for collapse(2) schedule(static)
  for (Eigen::Index i = 0; i < na; ++i)
    for (Eigen::Index j = 0; j < nb; ++j) {
      CMatrix p = a[i] * b[j];
      out.col(i * nb + j) = Eigen::Map<const CVector>(p.data(), p.size());
    }
  return out;
}

CMatrix pairwise_products_serial(const std::vector<CMatrix>& a,
                                 const std::vector<CMatrix>& b) {
  if (a.empty() || b.empty()) return CMatrix(0, 0);
  const int n = static_cast<int>(a[0].rows());
  CMatrix out(n * n, static_cast<Eigen::Index>(a.size() * b.size()));
  Eigen::Index c = 0;
  for (const auto& x : a)
    for (const auto& y : b) {
      CMatrix p = x * y;
      out.col(c++) = Eigen::Map<const CVector>(p.data(), p.size());
    }
  return out;
}

CMatrix gram_matrix(const CMatrix& cols) {
  const Eigen::Index k = cols.cols();
  CMatrix g(k, k);
#pragma omp parallel for schedule(dynamic)
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = i; j < k; ++j) {
      Complex v = cols.col(i).dot(cols.col(j));
      g(i, j) = v;
      g(j, i) = std::conj(v);
    }
  return g;
}

CMatrix gram_matrix_serial(const CMatrix& cols) {
  const Eigen::Index k = cols.cols();
  CMatrix g(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = i; j < k; ++j) {
      Complex v = cols.col(i).dot(cols.col(j));
      g(i, j) = v;
      g(j, i) = std::conj(v);
    }
  return g;
}

Subspace algebra_closure(const std::vector<CMatrix>& gens, double tol,
                         int max_dim) {
  if (gens.empty()) throw Error("algebra_closure: no generators");
  const int n = static_cast<int>(gens[0].rows());
  for (const auto& g : gens)
    if (g.rows() != n || g.cols() != n)
      throw Error("algebra_closure: generators must be square of equal size");
  const int d = n * n;
  // the closure cannot exceed the full matrix algebra; callers that know a
  // tighter invariant subspace (e.g. block-diagonal ambients) pass its
  // dimension, and the fixpoint may stop exactly when it is reached
  const int cap = (max_dim > 0 && max_dim < d) ? max_dim : d;

  std::vector<CMatrix> seed;
  seed.push_back(CMatrix::Identity(n, n));
  for (const auto& g : gens) {
    seed.push_back(g);
    seed.push_back(g.adjoint());
  }
  CMatrix cols(d, seed.size());
  double scale = 0.0;
  for (size_t j = 0; j < seed.size(); ++j) {
    cols.col(static_cast<Eigen::Index>(j)) = vec(seed[j]);
    scale = std::max(scale, cols.col(static_cast<Eigen::Index>(j)).norm());
  }
  CMatrix basis = orthonormal_span(cols, tol);

  // span fixpoint: the span of the seed is *-closed, and products of a
  // *-closed spanning set keep the grown span *-closed, so only products
  // need to be added. New directions can only come from pairs involving
  // a column added in the previous round. Pairs are processed in shuffled
  // chunks so that saturation at the cap is detected early.
  Eigen::Index old_count = 0;
  while (basis.cols() < cap) {
    const Eigen::Index total = basis.cols();
    std::vector<std::pair<int, int>> pairs;
    for (Eigen::Index i = old_count; i < total; ++i)
      for (Eigen::Index j = 0; j < total; ++j) {
        pairs.emplace_back(static_cast<int>(i), static_cast<int>(j));
        if (j < old_count) pairs.emplace_back(static_cast<int>(j),
                                              static_cast<int>(i));
      }
    old_count = total;
    // deterministic shuffle mixes pairs from different generators
    for (size_t i = pairs.size(); i > 1; --i)
      std::swap(pairs[i - 1], pairs[(i * 2654435761u) % i]);

    std::vector<CMatrix> mats;
    for (Eigen::Index j = 0; j < total; ++j) mats.push_back(unvec(basis.col(j), n, n));

    const size_t chunk = 768;
    bool grew = false;
    for (size_t start = 0; start < pairs.size() && basis.cols() < cap;
         start += chunk) {
      size_t stop = std::min(start + chunk, pairs.size());
      CMatrix cand(d, static_cast<Eigen::Index>(stop - start));
#pragma omp parallel for schedule(static)
      for (size_t idx = start; idx < stop; ++idx) {
        CMatrix p = mats[pairs[idx].first] * mats[pairs[idx].second];
        cand.col(static_cast<Eigen::Index>(idx - start)) = vec(p);
      }
      Eigen::Index before = basis.cols();
      basis = extend_orthonormal(basis, cand, tol, scale);
      if (basis.cols() > before) grew = true;
    }
    if (!grew) break;
  }
  return Subspace{d, basis};
}

}  // namespace aqft::numkit
