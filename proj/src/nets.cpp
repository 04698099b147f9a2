#include "aqft/nets.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace aqft::nets {

using mink::Region;
using mink::Symmetry;
using numkit::Subspace;
using vna::hom_apply;

// ---------------------------------------------------------------------------
// spin chain

namespace {

int ipow(int b, int e) {
  int r = 1;
  while (e-- > 0) r *= b;
  return r;
}

/// Canonical cyclic site order of a circle region: a proper arc starts at
/// the unique site whose predecessor is missing; the ambient is 0..N-1.
std::vector<int> site_order(const mink::DiscreteSpacetime& m, const Region& r) {
  if (r.is_ambient) return r.points;
  const int n = m.circle_sites;
  std::set<int> pts(r.points.begin(), r.points.end());
  int start = -1;
  for (int p : r.points)
    if (!pts.count((p + n - 1) % n)) start = p;
  if (start < 0) throw Error("site_order: region is not a proper arc");
  std::vector<int> out;
  for (int i = 0, p = start; i < static_cast<int>(r.points.size()); ++i, p = (p + 1) % n)
    out.push_back(p);
  return out;
}

}  // namespace

Hom placement_hom(int d, const std::vector<int>& source_sites,
                  const std::vector<int>& target_sites) {
  const int l = static_cast<int>(source_sites.size());
  const int m = static_cast<int>(target_sites.size());
  std::vector<int> pos_of_source;  // position of each source site in the target
  std::vector<int> complement;     // target positions not hit by the source
  {
    std::set<int> src(source_sites.begin(), source_sites.end());
    for (int i = 0; i < l; ++i) {
      auto it = std::find(target_sites.begin(), target_sites.end(),
                          source_sites[i]);
      if (it == target_sites.end())
        throw Error("placement_hom: source site not in target");
      pos_of_source.push_back(static_cast<int>(it - target_sites.begin()));
    }
    for (int p = 0; p < m; ++p)
      if (!src.count(target_sites[p])) complement.push_back(p);
  }
  const int dl = ipow(d, l), dm = ipow(d, m), q = ipow(d, m - l);

  CMatrix u = CMatrix::Zero(dm, dm);
  std::vector<int> digit(m, 0);
  for (int c = 0; c < q; ++c)
    for (int j = 0; j < dl; ++j) {
      // digits of the target configuration: source sites read off j,
      // complement sites read off c (most significant digit first)
      for (int i = 0; i < l; ++i)
        digit[pos_of_source[i]] = (j / ipow(d, l - 1 - i)) % d;
      for (size_t t = 0; t < complement.size(); ++t)
        digit[complement[t]] =
            (c / ipow(d, static_cast<int>(complement.size()) - 1 -
                             static_cast<int>(t))) %
            d;
      int row = 0;
      for (int p = 0; p < m; ++p) row = row * d + digit[p];
      u(row, c * dl + j) = 1.0;
    }

  AlgebraShape src = AlgebraShape::matrix(dl);
  AlgebraShape tgt = AlgebraShape::matrix(dm);
  Eigen::MatrixXi mult(1, 1);
  mult(0, 0) = q;
  return Hom{src, tgt, mult, AlgElement::from_dense(tgt, u)};
}

functor::NetInput build_spin_chain_net(const SpinChainConfig& cfg) {
  if (cfg.sites < 3) throw Error("spin chain: need at least 3 sites");
  if (cfg.site_dim < 2) throw Error("spin chain: need site dimension >= 2");
  functor::NetInput n;
  n.geom = mink::build_geometry(mink::DiscreteSpacetime::circle(cfg.sites));
  const auto& g = n.geom;
  const auto& m = g.space;

  std::vector<std::vector<int>> orders;
  for (const auto& r : g.regions) {
    orders.push_back(site_order(m, r));
    n.obj.push_back(AlgebraShape::matrix(ipow(cfg.site_dim, orders.back().size())));
  }
  for (const auto& a : g.arrows) {
    std::vector<int> shifted;
    for (int s : orders[a.source]) shifted.push_back((s + a.sym.a) % cfg.sites);
    n.arrow_hom.push_back(placement_hom(cfg.site_dim, shifted, orders[a.target]));
  }

  for (size_t u = 0; u < g.regions.size(); ++u)
    for (size_t v = u + 1; v < g.regions.size(); ++v) {
      if (g.regions[u].is_ambient || g.regions[v].is_ambient) continue;
      if (mink::is_causally_disjoint(m, g.regions[u], g.regions[v],
                                     g.regions[g.ambient]))
        n.disjoint_pairs.push_back({static_cast<int>(u), static_cast<int>(v)});
    }

  // covers: all two-subarc covers plus the per-site covers
  for (size_t r = 0; r < g.regions.size(); ++r) {
    const auto& reg = g.regions[r];
    if (reg.points.size() < 2) continue;
    for (size_t i = 0; i < g.regions.size(); ++i)
      for (size_t j = i + 1; j < g.regions.size(); ++j) {
        if (i == r || j == r) continue;
        if (!mink::subset(g.regions[i], reg) || !mink::subset(g.regions[j], reg))
          continue;
        std::vector<int> uni;
        std::set_union(g.regions[i].points.begin(), g.regions[i].points.end(),
                       g.regions[j].points.begin(), g.regions[j].points.end(),
                       std::back_inserter(uni));
        if (uni == reg.points)
          n.covers.push_back(
              {static_cast<int>(r), {static_cast<int>(i), static_cast<int>(j)}});
      }
    functor::Cover per_site{static_cast<int>(r), {}};
    for (int p : reg.points) {
      int arc = g.find_region({p});
      if (arc >= 0) per_site.parts.push_back(arc);
    }
    if (per_site.parts.size() == reg.points.size())
      n.covers.push_back(std::move(per_site));
  }
  return n;
}

// ---------------------------------------------------------------------------
// fixed points

namespace {

CMatrix kron_power(const CMatrix& v, int n) {
  CMatrix out = CMatrix::Identity(1, 1);
  for (int i = 0; i < n; ++i) out = numkit::kron(out, v);
  return out;
}

}  // namespace

FixedPointNet build_fixed_point_net(const functor::NetInput& base,
                                    const GroupAction& act, double tol) {
  const auto& g = base.geom;
  if (g.space.kind != mink::Kind::kCircle)
    throw Error("fixed point net: circle nets only");
  act.group.validate();
  const int d = static_cast<int>(act.site_unitaries[0].rows());
  {
    vna::UnitaryRep site_rep{act.group, {}};
    AlgebraShape site = AlgebraShape::matrix(d);
    for (const auto& u : act.site_unitaries)
      site_rep.unitaries.push_back(AlgElement::from_dense(site, u));
    site_rep.validate(tol);
  }

  // per-region unitary representations beta_g = Ad(v_g^{(x) len})
  std::vector<vna::UnitaryRep> reps;
  for (size_t r = 0; r < g.regions.size(); ++r) {
    vna::UnitaryRep rep{act.group, {}};
    int len = static_cast<int>(g.regions[r].points.size());
    for (const auto& v : act.site_unitaries)
      rep.unitaries.push_back(
          AlgElement::from_dense(base.obj[r], kron_power(v, len)));
    reps.push_back(std::move(rep));
  }

  // commutation hypothesis: every beta_g commutes with every arrow
  for (size_t a = 0; a < g.arrows.size(); ++a) {
    int u = g.arrows[a].source, v = g.arrows[a].target;
    for (int gi = 1; gi < act.group.order; ++gi) {
      const AlgElement& gu = reps[u].unitaries[gi];
      const AlgElement& gv = reps[v].unitaries[gi];
      for (const auto& x : vna::algebra_generators(base.obj[u])) {
        AlgElement lhs = hom_apply(base.arrow_hom[a], gu * x * gu.adjoint());
        AlgElement rhs = gv * hom_apply(base.arrow_hom[a], x) * gv.adjoint();
        if (lhs.diff_norm(rhs) > std::max(tol, 1e-8) * std::max(1.0, x.norm()))
          throw Error("fixed point net: commutation hypothesis fails at " +
                      g.arrow_name(static_cast<int>(a)) + ", group element " +
                      std::to_string(gi));
      }
    }
  }

  FixedPointNet out;
  out.net.geom = g;
  for (size_t r = 0; r < g.regions.size(); ++r) {
    Subspace fixed = vna::fixed_point_subalgebra(base.obj[r], reps[r], tol);
    vna::WedderburnData wd = vna::wedderburn_decompose(base.obj[r], fixed, tol);
    std::vector<int> blocks = wd.blocks;
    std::vector<double> weights;
    double w_base = base.obj[r].weight(0);
    for (size_t j = 0; j < wd.blocks.size(); ++j)
      weights.push_back(w_base * wd.multiplicities[j]);
    out.net.obj.push_back(AlgebraShape::with_weights(blocks, weights));
    out.fixed.push_back(std::move(fixed));
    out.presentation.push_back(std::move(wd));
  }
  for (size_t a = 0; a < g.arrows.size(); ++a) {
    int u = g.arrows[a].source, v = g.arrows[a].target;
    const Hom& phi = base.arrow_hom[a];
    const auto& wd_u = out.presentation[u];
    const auto& wd_v = out.presentation[v];
    const AlgebraShape& su = out.net.obj[u];
    const AlgebraShape& sv = out.net.obj[v];
    const AlgebraShape& base_u = base.obj[u];
    auto raw = [&](const AlgElement& x) {
      AlgElement lifted =
          AlgElement::from_dense(base_u, vna::wedderburn_embed(wd_u, x));
      return vna::wedderburn_extract(wd_v, sv, hom_apply(phi, lifted).dense());
    };
    out.net.arrow_hom.push_back(
        vna::hom_from_linear_map(su, sv, raw, std::max(tol, 1e-8)));
  }
  out.net.disjoint_pairs = base.disjoint_pairs;
  out.net.cauchy_class = base.cauchy_class;
  // Additivity for fixed-point subnets holds in the overlapping two-arc
  // form only: a partition cover misses invariant cross terms (X (x) X is
  // fixed but no product of single-site invariants reaches it). Declare
  // exactly the covers whose join identity is the subnet's additivity.
  for (const auto& cover : base.covers) {
    if (cover.parts.size() != 2) continue;
    const auto& a = g.regions[cover.parts[0]].points;
    const auto& b = g.regions[cover.parts[1]].points;
    std::vector<int> overlap;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                          std::back_inserter(overlap));
    if (!overlap.empty()) out.net.covers.push_back(cover);
  }
  return out;
}

report::Report check_open_cover_additivity(const functor::NetInput& n,
                                           double tol) {
  report::Report rep;
  const auto& g = n.geom;
  if (g.space.kind != mink::Kind::kCircle)
    throw Error("open cover additivity: circle nets only");

  auto join_equals_algebra = [&](int region,
                                 const std::vector<int>& parts) -> double {
    std::vector<Subspace> imgs;
    for (int p : parts) imgs.push_back(functor::image_subspace(n, p, region));
    Subspace join = vna::generated_subalgebra(n.obj[region], imgs);
    Subspace expected = functor::image_subspace(n, region, region);
    return (join.dim() == expected.dim())
               ? join.projector_distance_fro(expected)
               : 1.0 + std::abs(join.dim() - expected.dim());
  };

  double worst_two = 0.0, worst_overlap = 0.0, worst_site = 0.0;
  std::string witness_two, witness_overlap, witness_site;
  int n_two = 0, n_overlap = 0, n_site = 0;
  for (const auto& cover : n.covers) {
    if (cover.parts.size() == 2) {
      double r = join_equals_algebra(cover.region, cover.parts);
      ++n_two;
      if (r > worst_two) {
        worst_two = r;
        witness_two = g.regions[cover.region].name;
      }
      std::vector<int> inter;
      const auto& a = g.regions[cover.parts[0]].points;
      const auto& b = g.regions[cover.parts[1]].points;
      std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                            std::back_inserter(inter));
      if (!inter.empty()) {
        ++n_overlap;
        if (r > worst_overlap) {
          worst_overlap = r;
          witness_overlap = g.regions[cover.region].name;
        }
      }
    } else {
      double r = join_equals_algebra(cover.region, cover.parts);
      ++n_site;
      if (r > worst_site) {
        worst_site = r;
        witness_site = g.regions[cover.region].name;
      }
    }
  }
  rep.add("two-arc-joins", "two-subarc covers generate the covered algebra",
          worst_two <= tol && n_two > 0, worst_two,
          worst_two <= tol ? "" : witness_two);
  rep.add("two-arc-overlap-step",
          "the overlapping-pair step of the cover argument",
          worst_overlap <= tol && n_overlap > 0, worst_overlap,
          worst_overlap <= tol ? "" : witness_overlap);
  if (n_site > 0)
    rep.add("per-site-covers", "per-site covers generate the covered algebra",
            worst_site <= tol, worst_site,
            worst_site <= tol ? "" : witness_site);
  else
    rep.add("per-site-covers", "per-site covers generate the covered algebra",
            true, 0.0, "vacuous: no per-site covers declared for this net");
  return rep;
}

// ---------------------------------------------------------------------------
// lattice Klein-Gordon

void KgLatticeConfig::validate() const {
  if (t < 4) throw Error("kg: need at least 4 time rows");
  if (x < 3) throw Error("kg: need at least 3 spatial sites");
  if (mass < 0) throw Error("kg: mass must be nonnegative");
}

namespace {

int wrap(int x, int n) { return ((x % n) + n) % n; }

double lap_x(const RField& u, int t, int x, int nx) {
  return u(t, wrap(x + 1, nx)) - 2.0 * u(t, x) + u(t, wrap(x - 1, nx));
}

}  // namespace

RField kg_apply_P(const KgLatticeConfig& cfg, const RField& f) {
  cfg.validate();
  RField out = RField::Zero(cfg.t, cfg.x);
  const double m2 = cfg.mass * cfg.mass;
  for (int t = 1; t + 1 < cfg.t; ++t)
    for (int x = 0; x < cfg.x; ++x)
      out(t, x) = f(t + 1, x) - 2.0 * f(t, x) + f(t - 1, x) -
                  lap_x(f, t, x, cfg.x) + m2 * f(t, x);
  return out;
}

RField kg_green(const KgLatticeConfig& cfg, bool retarded, const RField& f) {
  cfg.validate();
  RField u = RField::Zero(cfg.t, cfg.x);
  const double m2 = cfg.mass * cfg.mass;
  if (retarded) {
    for (int t = 1; t + 1 < cfg.t; ++t)
      for (int x = 0; x < cfg.x; ++x)
        u(t + 1, x) = f(t, x) + 2.0 * u(t, x) - u(t - 1, x) +
                      lap_x(u, t, x, cfg.x) - m2 * u(t, x);
  } else {
    for (int t = cfg.t - 2; t >= 1; --t)
      for (int x = 0; x < cfg.x; ++x)
        u(t - 1, x) = f(t, x) + 2.0 * u(t, x) - u(t + 1, x) +
                      lap_x(u, t, x, cfg.x) - m2 * u(t, x);
  }
  return u;
}

RField kg_propagator(const KgLatticeConfig& cfg, const RField& f) {
  return kg_green(cfg, true, f) - kg_green(cfg, false, f);
}

std::vector<int> eroded_interior(const KgLatticeConfig& cfg,
                                 const mink::Region& r, int times) {
  mink::DiscreteSpacetime m =
      mink::DiscreteSpacetime::diamond_grid(cfg.t, cfg.x, true);
  std::set<int> cur(r.points.begin(), r.points.end());
  for (int it = 0; it < times; ++it) {
    std::set<int> next;
    for (int p : cur) {
      auto [t, x] = m.point_tx(p);
      if (t - 1 < 0 || t + 1 >= cfg.t) continue;
      bool ok = cur.count(m.point_id(t - 1, x)) &&
                cur.count(m.point_id(t + 1, x)) &&
                cur.count(m.point_id(t, wrap(x + 1, cfg.x))) &&
                cur.count(m.point_id(t, wrap(x - 1, cfg.x)));
      if (ok) next.insert(p);
    }
    cur = std::move(next);
  }
  return {cur.begin(), cur.end()};
}

SymplecticClassSpace kg_class_space(const KgLatticeConfig& cfg,
                                    const mink::Region& region) {
  cfg.validate();
  mink::DiscreteSpacetime m =
      mink::DiscreteSpacetime::diamond_grid(cfg.t, cfg.x, true);
  SymplecticClassSpace s;
  s.cfg = cfg;
  s.region = region;
  s.fpoints = eroded_interior(cfg, region, 1);
  if (s.fpoints.empty()) throw Error("kg_class_space: eroded interior empty");
  s.gpoints = eroded_interior(cfg, region, 2);

  const int nf = static_cast<int>(s.fpoints.size());
  const int ng = static_cast<int>(s.gpoints.size());
  std::unordered_map<int, int> findex;
  for (int i = 0; i < nf; ++i) findex[s.fpoints[i]] = i;

  s.pimage = RMatrix::Zero(nf, ng);
  for (int j = 0; j < ng; ++j) {
    RField delta = RField::Zero(cfg.t, cfg.x);
    auto [t, x] = m.point_tx(s.gpoints[j]);
    delta(t, x) = 1.0;
    RField pd = kg_apply_P(cfg, delta);
    for (int tt = 0; tt < cfg.t; ++tt)
      for (int xx = 0; xx < cfg.x; ++xx) {
        if (pd(tt, xx) == 0.0) continue;
        auto it = findex.find(m.point_id(tt, xx));
        if (it == findex.end())
          throw Error("kg_class_space: P leaks outside the eroded interior");
        s.pimage(it->second, j) = pd(tt, xx);
      }
  }

  s.sigma_f = RMatrix::Zero(nf, nf);
  for (int j = 0; j < nf; ++j) {
    RField delta = RField::Zero(cfg.t, cfg.x);
    auto [t, x] = m.point_tx(s.fpoints[j]);
    delta(t, x) = 1.0;
    RField e = kg_propagator(cfg, delta);
    for (int i = 0; i < nf; ++i) {
      auto [ti, xi] = m.point_tx(s.fpoints[i]);
      s.sigma_f(i, j) = e(ti, xi);
    }
  }
  s.antisym_residual =
      (s.sigma_f + s.sigma_f.transpose()).cwiseAbs().maxCoeff();
  s.sigma_f = 0.5 * (s.sigma_f - s.sigma_f.transpose().eval());

  s.quotient_residual = 0.0;
  if (ng > 0) {
    s.quotient_residual =
        std::max((s.sigma_f * s.pimage).cwiseAbs().maxCoeff(),
                 (s.pimage.transpose() * s.sigma_f).cwiseAbs().maxCoeff());
  }

  if (ng == 0) {
    s.reps = RMatrix::Identity(nf, nf);
  } else {
    Eigen::JacobiSVD<RMatrix> svd(s.pimage, Eigen::ComputeFullU);
    const auto& sv = svd.singularValues();
    double cut = (sv.size() > 0 ? sv(0) : 0.0) * 1e-10;
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv(i) > cut) ++rank;
    s.reps = svd.matrixU().rightCols(nf - rank);
  }
  s.sigma = s.reps.transpose() * s.sigma_f * s.reps;
  s.sigma = 0.5 * (s.sigma - s.sigma.transpose().eval());
  return s;
}

KgClassMap kg_pushforward(const KgLatticeConfig& cfg, const mink::Symmetry& h,
                          const SymplecticClassSpace& src,
                          const SymplecticClassSpace& tgt) {
  mink::DiscreteSpacetime m =
      mink::DiscreteSpacetime::diamond_grid(cfg.t, cfg.x, true);
  auto img = mink::image_points(m, h, src.region);
  if (!img || !mink::subset(mink::Region{*img, false, ""}, tgt.region))
    throw Error("kg_pushforward: image not contained in target");

  std::unordered_map<int, int> tgt_f;
  for (size_t i = 0; i < tgt.fpoints.size(); ++i) tgt_f[tgt.fpoints[i]] = static_cast<int>(i);
  std::set<int> tgt_g(tgt.gpoints.begin(), tgt.gpoints.end());

  RMatrix k = RMatrix::Zero(tgt.fpoints.size(), src.fpoints.size());
  for (size_t j = 0; j < src.fpoints.size(); ++j) {
    auto q = m.apply(h, src.fpoints[j]);
    if (!q || !tgt_f.count(*q))
      throw Error("kg_pushforward: eroded interior does not transport");
    k(tgt_f[*q], static_cast<Eigen::Index>(j)) = 1.0;
  }
  for (int p : src.gpoints) {
    auto q = m.apply(h, p);
    if (!q || !tgt_g.count(*q))
      throw Error("kg_pushforward: P-domain does not transport");
  }

  KgClassMap out;
  if (src.pimage.cols() > 0)
    out.descend_residual =
        (tgt.reps.transpose() * (k * src.pimage)).cwiseAbs().maxCoeff();
  out.mat = tgt.reps.transpose() * k * src.reps;
  return out;
}

RMatrix kg_sigma_between(const KgLatticeConfig& cfg,
                         const SymplecticClassSpace& a,
                         const SymplecticClassSpace& b) {
  mink::DiscreteSpacetime m =
      mink::DiscreteSpacetime::diamond_grid(cfg.t, cfg.x, true);
  RMatrix s = RMatrix::Zero(a.fpoints.size(), b.fpoints.size());
  for (size_t j = 0; j < b.fpoints.size(); ++j) {
    RField delta = RField::Zero(cfg.t, cfg.x);
    auto [t, x] = m.point_tx(b.fpoints[j]);
    delta(t, x) = 1.0;
    RField e = kg_propagator(cfg, delta);
    for (size_t i = 0; i < a.fpoints.size(); ++i) {
      auto [ti, xi] = m.point_tx(a.fpoints[i]);
      s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = e(ti, xi);
    }
  }
  return a.reps.transpose() * s * b.reps;
}

// ---------------------------------------------------------------------------
// Weyl words

WeylWord weyl_identity(const SymplecticClassSpace& s) {
  return WeylWord{RVector::Zero(s.dim()), Complex(1.0, 0.0)};
}

WeylWord weyl_generator(const SymplecticClassSpace& s, const RVector& v) {
  if (v.size() != s.dim()) throw Error("weyl_generator: wrong class dimension");
  return WeylWord{v, Complex(1.0, 0.0)};
}

WeylWord weyl_multiply(const SymplecticClassSpace& s, const WeylWord& a,
                       const WeylWord& b) {
  if (a.v.size() != s.dim() || b.v.size() != s.dim())
    throw Error("weyl_multiply: class-space mismatch");
  double phase = -(a.v.transpose() * s.sigma * b.v)(0, 0) / 2.0;
  WeylWord out;
  out.v = a.v + b.v;
  out.phase = a.phase * b.phase * std::polar(1.0, phase);
  return out;
}

WeylWord weyl_adjoint(const WeylWord& a) {
  return WeylWord{-a.v, std::conj(a.phase)};
}

bool weyl_equal(const WeylWord& a, const WeylWord& b, double tol) {
  return (a.v - b.v).cwiseAbs().maxCoeff() <= tol &&
         std::abs(a.phase - b.phase) <= tol;
}

// ---------------------------------------------------------------------------
// suite

namespace {

RField delta_at(const KgLatticeConfig& cfg, int t, int x) {
  RField f = RField::Zero(cfg.t, cfg.x);
  f(t, x) = 1.0;
  return f;
}

RField random_interior_field(const KgLatticeConfig& cfg, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  RField f = RField::Zero(cfg.t, cfg.x);
  for (int t = 1; t + 1 < cfg.t; ++t)
    for (int x = 0; x < cfg.x; ++x) f(t, x) = gauss(rng);
  return f;
}

}  // namespace

report::Report kg_check_suite(const KgLatticeConfig& cfg,
                              const KgSuiteOptions& opt) {
  cfg.validate();
  report::Report rep;
  const double tol = opt.tol;
  mink::DiscreteSpacetime m =
      mink::DiscreteSpacetime::diamond_grid(cfg.t, cfg.x, true);
  std::mt19937_64 rng2(1729);

  // green-operator identities
  {
    double res = 0.0;
    for (int rep_i = 0; rep_i < 4; ++rep_i) {
      RField f = random_interior_field(cfg, rng2);
      res = std::max(
          res, (kg_apply_P(cfg, kg_green(cfg, true, f)) - f).cwiseAbs().maxCoeff());
      res = std::max(
          res, (kg_apply_P(cfg, kg_green(cfg, false, f)) - f).cwiseAbs().maxCoeff());
    }
    rep.add("green-inverse", "P E^{+-} = id on interior rows", res <= tol, res);
  }
  {
    // E P u = 0 for u supported two steps inside the time extent
    double res = 0.0;
    auto amb = mink::Region{};
    for (int p = 0; p < m.num_points(); ++p) amb.points.push_back(p);
    amb.is_ambient = true;
    amb.name = "ambient";
    auto g2 = eroded_interior(cfg, amb, 2);
    std::normal_distribution<double> gauss(0.0, 1.0);
    RField u = RField::Zero(cfg.t, cfg.x);
    for (int p : g2) {
      auto [t, x] = m.point_tx(p);
      u(t, x) = gauss(rng2);
    }
    res = kg_propagator(cfg, kg_apply_P(cfg, u)).cwiseAbs().maxCoeff();
    rep.add("propagator-annihilates-P", "E P = 0 on margin-supported fields",
            res <= tol, res);
  }
  {
    // retarded support inside the forward lattice cone, pointwise exact
    bool ok = true;
    std::string witness;
    int t0 = 1, x0 = 0;
    RField e = kg_green(cfg, true, delta_at(cfg, t0, x0));
    for (int t = 0; t < cfg.t && ok; ++t)
      for (int x = 0; x < cfg.x && ok; ++x)
        if (e(t, x) != 0.0 &&
            !(t - t0 >= 1 && m.spatial_dist(x, x0) <= t - t0)) {
          ok = false;
          witness = "value at t=" + std::to_string(t) + ",x=" + std::to_string(x);
        }
    rep.add("cone-support",
            "retarded solutions are supported in the forward cone (exact)", ok,
            0.0, witness);
  }
  {
    // pairing antisymmetry <f, E g> = -<g, E f>
    double res = 0.0;
    for (int rep_i = 0; rep_i < 4; ++rep_i) {
      RField f = random_interior_field(cfg, rng2);
      RField g = random_interior_field(cfg, rng2);
      double lhs = (f.array() * kg_propagator(cfg, g).array()).sum();
      double rhs = -(g.array() * kg_propagator(cfg, f).array()).sum();
      res = std::max(res, std::abs(lhs - rhs) /
                              std::max(1.0, std::abs(lhs) + std::abs(rhs)));
    }
    rep.add("pairing-antisymmetry", "<f, E g> = -<g, E f>", res <= tol, res);
  }

  // class spaces over all regions with nonempty eroded interior
  auto regions = mink::regions_of(m);
  std::vector<SymplecticClassSpace> spaces;
  for (const auto& r : regions) {
    if (eroded_interior(cfg, r, 1).empty()) continue;
    if (static_cast<int>(r.points.size()) > cfg.t * cfg.x) continue;
    spaces.push_back(kg_class_space(cfg, r));
  }
  rep.add("class-spaces", "quotient spaces of admissible regions",
          !spaces.empty(), static_cast<double>(spaces.size()));

  {
    // extension commutes with P: the region-restricted stencil and the
    // global stencil agree on margin-supported test functions (exact)
    double res = 0.0;
    for (const auto& s : spaces) {
      std::set<int> reg(s.region.points.begin(), s.region.points.end());
      for (int p : s.gpoints) {
        auto [t, x] = m.point_tx(p);
        RField global = kg_apply_P(cfg, delta_at(cfg, t, x));
        RField local = RField::Zero(cfg.t, cfg.x);
        const double m2 = cfg.mass * cfg.mass;
        for (int tt = 1; tt + 1 < cfg.t; ++tt)
          for (int xx = 0; xx < cfg.x; ++xx) {
            if (!reg.count(m.point_id(tt, xx))) continue;
            auto val = [&](int a, int b) {
              int q = m.point_id(a, wrap(b, cfg.x));
              return reg.count(q) ? (a == t && wrap(b, cfg.x) == x ? 1.0 : 0.0)
                                  : 0.0;
            };
            local(tt, xx) = val(tt + 1, xx) - 2.0 * val(tt, xx) + val(tt - 1, xx)
                            - (val(tt, xx + 1) - 2.0 * val(tt, xx) + val(tt, xx - 1))
                            + m2 * val(tt, xx);
          }
        res = std::max(res, (global - local).cwiseAbs().maxCoeff());
      }
    }
    rep.add("extension-commutes-P",
            "(P_T u) extended = P (u extended) on the eroded interior (exact)",
            res == 0.0, res);
  }
  {
    double q = 0.0, a = 0.0;
    for (const auto& s : spaces) {
      q = std::max(q, s.quotient_residual);
      a = std::max(a, s.antisym_residual);
    }
    rep.add("sigma-well-defined", "sigma(P u, .) = 0 = sigma(., P u)", q <= tol,
            q);
    rep.add("sigma-antisymmetric", "sigma(f, g) = -sigma(g, f)", a <= tol, a);
  }

  // pushforwards: symplecticity and functoriality of translations
  {
    double sym_res = -1.0, fun_res = -1.0, ext_res = -1.0;
    for (const auto& s : spaces) {
      if (s.region.is_ambient || s.dim() == 0) continue;
      for (const Symmetry& h : {Symmetry{0, 1}, Symmetry{1, 0}}) {
        auto img = mink::image_points(m, h, s.region);
        if (!img) continue;
        int tgt_i = -1;
        for (size_t i = 0; i < spaces.size(); ++i)
          if (spaces[i].region.points == *img) tgt_i = static_cast<int>(i);
        if (tgt_i < 0) continue;
        const auto& t = spaces[tgt_i];
        // pushforward commutes with extension (exact, pointwise)
        {
          RField f = RField::Zero(cfg.t, cfg.x);
          std::normal_distribution<double> gauss(0.0, 1.0);
          for (int p : s.fpoints) {
            auto [tt, xx] = m.point_tx(p);
            f(tt, xx) = gauss(rng2);
          }
          RField shifted = RField::Zero(cfg.t, cfg.x);
          for (int tt = 0; tt < cfg.t; ++tt)
            for (int xx = 0; xx < cfg.x; ++xx) {
              int t2 = tt + h.a, x2 = wrap(xx + h.b, cfg.x);
              if (t2 >= 0 && t2 < cfg.t) shifted(t2, x2) = f(tt, xx);
            }
          RField shifted2 = RField::Zero(cfg.t, cfg.x);
          for (int p : s.fpoints) {
            auto q2 = m.apply(h, p);
            auto [tt, xx] = m.point_tx(p);
            auto [t2, x2] = m.point_tx(*q2);
            shifted2(t2, x2) = f(tt, xx);
          }
          ext_res = std::max(ext_res,
                             (shifted - shifted2).cwiseAbs().maxCoeff());
        }
        KgClassMap v = kg_pushforward(cfg, h, s, t);
        RMatrix k = RMatrix::Zero(t.fpoints.size(), s.fpoints.size());
        {
          std::unordered_map<int, int> tf;
          for (size_t i = 0; i < t.fpoints.size(); ++i)
            tf[t.fpoints[i]] = static_cast<int>(i);
          for (size_t j = 0; j < s.fpoints.size(); ++j)
            k(tf[*m.apply(h, s.fpoints[j])], static_cast<Eigen::Index>(j)) = 1.0;
        }
        sym_res = std::max(
            sym_res,
            (k.transpose() * t.sigma_f * k - s.sigma_f).cwiseAbs().maxCoeff());
        sym_res = std::max(
            sym_res,
            (v.mat.transpose() * t.sigma * v.mat - s.sigma).cwiseAbs().maxCoeff());
        // functoriality against the two-step translation
        auto img2 = mink::image_points(m, Symmetry{h.a + h.a, h.b + h.b},
                                       s.region);
        if (img2) {
          int tgt2 = -1;
          for (size_t i = 0; i < spaces.size(); ++i)
            if (spaces[i].region.points == *img2) tgt2 = static_cast<int>(i);
          auto img_t = mink::image_points(m, h, t.region);
          if (tgt2 >= 0 && img_t) {
            int mid2 = -1;
            for (size_t i = 0; i < spaces.size(); ++i)
              if (spaces[i].region.points == *img_t) mid2 = static_cast<int>(i);
            if (mid2 == tgt2) {
              KgClassMap v2 = kg_pushforward(cfg, h, t, spaces[tgt2]);
              KgClassMap w = kg_pushforward(
                  cfg, Symmetry{h.a + h.a, h.b + h.b}, s, spaces[tgt2]);
              fun_res = std::max(
                  fun_res, (v2.mat * v.mat - w.mat).cwiseAbs().maxCoeff());
            }
          }
        }
      }
    }
    rep.add("pushforward-commutes-extension",
            "kappa_*(f extended) = (kappa_* f) extended (exact)",
            ext_res == 0.0, std::max(0.0, ext_res));
    rep.add("symplecticity", "translations preserve sigma",
            sym_res >= 0 && sym_res <= tol, sym_res);
    rep.add("pushforward-functoriality", "V(h2 h1) = V(h2) V(h1)",
            fun_res >= 0 && fun_res <= tol, fun_res);
  }

  // locality: sigma vanishes exactly between spacelike-separated diamonds
  {
    int pairs = 0;
    double res = 0.0;
    Region amb;
    for (int p = 0; p < m.num_points(); ++p) amb.points.push_back(p);
    amb.is_ambient = true;
    for (size_t i = 0; i < spaces.size(); ++i)
      for (size_t j = i + 1; j < spaces.size(); ++j) {
        if (spaces[i].region.is_ambient || spaces[j].region.is_ambient) continue;
        if (!mink::is_causally_disjoint(m, spaces[i].region, spaces[j].region,
                                        amb))
          continue;
        if (spaces[i].dim() == 0 || spaces[j].dim() == 0) continue;
        ++pairs;
        res = std::max(res, kg_sigma_between(cfg, spaces[i], spaces[j])
                                .cwiseAbs()
                                .maxCoeff());
      }
    rep.add("locality-sigma-zero",
            "sigma vanishes exactly between spacelike-separated diamonds",
            pairs > 0 && res == 0.0, res,
            "pairs checked: " + std::to_string(pairs));
  }

  // additivity at the symplectic level: partition of unity on a covered
  // diamond, class additivity, and the Weyl word of the whole equals the
  // phased product of the pieces
  {
    bool found = false, pass = false;
    double res = 0.0;
    std::string witness;
    for (const auto& s : spaces) {
      if (s.region.is_ambient || s.dim() == 0) continue;
      if (static_cast<int>(s.fpoints.size()) < 2) continue;
      // cover by two time-split sub-diamonds (name-derived corners)
      int tmin = cfg.t, tmax = -1;
      for (int p : s.region.points) {
        auto [t, x] = m.point_tx(p);
        tmin = std::min(tmin, t);
        tmax = std::max(tmax, t);
      }
      if (tmax - tmin < 3) continue;
      // sub-regions: clip one row from the top / bottom
      auto clip = [&](bool top) {
        Region r;
        for (int p : s.region.points) {
          auto [t, x] = m.point_tx(p);
          (void)x;
          if (top ? (t < tmax) : (t > tmin)) r.points.push_back(p);
        }
        r.name = s.region.name + (top ? "-top-clipped" : "-bottom-clipped");
        return r;
      };
      Region r1 = clip(true), r2 = clip(false);
      auto f1 = eroded_interior(cfg, r1, 1);
      auto f2 = eroded_interior(cfg, r2, 1);
      if (f1.empty() || f2.empty()) continue;
      std::set<int> cover_pts(f1.begin(), f1.end());
      for (int p : f2) cover_pts.insert(p);
      std::vector<Region> parts = {r1, r2};
      if (opt.inject_partition_gap) parts.pop_back();

      // coverage of the eroded interior
      std::set<int> covered;
      std::vector<std::vector<int>> part_f;
      for (const auto& pr : parts) {
        part_f.push_back(eroded_interior(cfg, pr, 1));
        for (int p : part_f.back()) covered.insert(p);
      }
      bool covers_all = true;
      int missing = -1;
      for (int p : s.fpoints)
        if (!covered.count(p)) {
          covers_all = false;
          missing = p;
        }
      found = true;
      if (!covers_all) {
        pass = false;
        witness = "uncovered point " + std::to_string(missing) + " in " +
                  s.region.name;
        break;
      }

      // random test function, indicator partition along the cover
      std::normal_distribution<double> gauss(0.0, 1.0);
      RVector f = RVector::Zero(s.fpoints.size());
      for (Eigen::Index i = 0; i < f.size(); ++i) f(i) = gauss(rng2);
      std::vector<RVector> piece_class;
      RVector sum_class = RVector::Zero(s.dim());
      std::set<int> assigned;
      for (size_t k = 0; k < parts.size(); ++k) {
        SymplecticClassSpace sk = kg_class_space(cfg, parts[k]);
        RVector fk = RVector::Zero(sk.fpoints.size());
        for (size_t i = 0; i < s.fpoints.size(); ++i) {
          int p = s.fpoints[i];
          if (assigned.count(p)) continue;
          auto it = std::find(sk.fpoints.begin(), sk.fpoints.end(), p);
          if (it == sk.fpoints.end()) continue;
          fk(it - sk.fpoints.begin()) = f(static_cast<Eigen::Index>(i));
          assigned.insert(p);
        }
        KgClassMap incl = kg_pushforward(cfg, Symmetry{0, 0}, sk, s);
        piece_class.push_back(incl.mat * sk.project(fk));
        sum_class += piece_class.back();
      }
      RVector whole = s.project(f);
      res = (whole - sum_class).cwiseAbs().maxCoeff();
      // Weyl words: the generator of the whole equals the phased product of
      // the pieces' generators
      WeylWord prod = weyl_identity(s);
      for (const auto& pc : piece_class)
        prod = weyl_multiply(s, prod, weyl_generator(s, pc));
      double predicted = 0.0;
      for (size_t a = 0; a < piece_class.size(); ++a)
        for (size_t b = a + 1; b < piece_class.size(); ++b)
          predicted +=
              -(piece_class[a].transpose() * s.sigma * piece_class[b])(0, 0) / 2.0;
      bool weyl_ok =
          (prod.v - whole).cwiseAbs().maxCoeff() <= 1e-9 &&
          std::abs(prod.phase - std::polar(1.0, predicted)) <= 1e-12;
      pass = res <= tol && weyl_ok;
      witness = s.region.name;
      break;
    }
    rep.add("additivity-partition",
            "partition of unity: classes add up and Weyl generators of the "
            "cover generate",
            found && pass, res, witness);
  }

  // Weyl CCR identities
  {
    const SymplecticClassSpace* best = nullptr;
    for (const auto& s : spaces)
      if (!best || s.dim() > best->dim()) best = &s;
    double res = 0.0;
    bool ok = best != nullptr && best->dim() >= 2;
    if (ok) {
      const auto& s = *best;
      std::normal_distribution<double> gauss(0.0, 1.0);
      auto rand_vec = [&]() {
        RVector v(s.dim());
        for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = gauss(rng2);
        return v;
      };
      for (int it = 0; it < 8; ++it) {
        RVector v = rand_vec(), w = rand_vec(), u = rand_vec();
        WeylWord wv = weyl_generator(s, v), ww = weyl_generator(s, w),
                 wu = weyl_generator(s, u);
        // unit
        res = std::max(res, std::abs(weyl_multiply(s, weyl_identity(s), wv).phase -
                                     wv.phase));
        // group commutator phase e^{-i sigma(v,w)}
        WeylWord comm = weyl_multiply(
            s, weyl_multiply(s, weyl_multiply(s, wv, ww), weyl_adjoint(wv)),
            weyl_adjoint(ww));
        double sig = (v.transpose() * s.sigma * w)(0, 0);
        res = std::max(res, comm.v.cwiseAbs().maxCoeff());
        res = std::max(res, std::abs(comm.phase - std::polar(1.0, -sig)));
        // associativity via the cocycle identity
        WeylWord left = weyl_multiply(s, weyl_multiply(s, wu, wv), ww);
        WeylWord right = weyl_multiply(s, wu, weyl_multiply(s, wv, ww));
        res = std::max(res, std::abs(left.phase - right.phase));
        res = std::max(res, (left.v - right.v).cwiseAbs().maxCoeff());
        // involution
        WeylWord inv = weyl_multiply(s, wv, weyl_adjoint(wv));
        res = std::max(res, std::abs(inv.phase - Complex(1.0, 0.0)));
        res = std::max(res, inv.v.cwiseAbs().maxCoeff());
      }
    }
    rep.add("weyl-ccr",
            "W(v) W(w) = exp(-i/2 sigma(v,w)) W(v+w) and its consequences",
            ok && res <= 1e-12, res);
  }
  return rep;
}

}  // namespace aqft::nets
