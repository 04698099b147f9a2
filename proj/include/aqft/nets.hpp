#pragma once

#include "aqft/net_functor.hpp"

namespace aqft::nets {

using numkit::CMatrix;
using numkit::RMatrix;
using numkit::RVector;
using vna::AlgebraShape;
using vna::AlgElement;
using vna::Hom;

// ---------------------------------------------------------------------------
// spin chain on the discrete circle

struct SpinChainConfig {
  int sites = 4;
  int site_dim = 2;
};

/// Placement homomorphism: operators on the ordered source sites embed into
/// the algebra of the ordered target sites, identity on the complement.
/// Exposed for oracle tests.
Hom placement_hom(int site_dim, const std::vector<int>& source_sites,
                  const std::vector<int>& target_sites);

/// A(arc) = full matrix algebra of the sites with the normalized trace;
/// inclusions embed tensor factors by site position, rotations act by
/// relabeling sites. Dis jointness is arc disjointness, the time-slice class
/// is empty, covers are all two-subarc covers plus the per-site covers.
functor::NetInput build_spin_chain_net(const SpinChainConfig& cfg);

// ---------------------------------------------------------------------------
// fixed points under a finite group of internal symmetries

struct GroupAction {
  vna::FiniteGroup group;
  std::vector<CMatrix> site_unitaries;  // one per group element, d x d
};

struct FixedPointNet {
  functor::NetInput net;
  // per region: the fixed subalgebra inside the base algebra and its
  // multi-matrix presentation
  std::vector<numkit::Subspace> fixed;
  std::vector<vna::WedderburnData> presentation;
};

/// beta_g = Ad(v_g^{tensor \#sites}) per region. Requires the commutation
/// hypothesis (every beta_g commutes with every arrow of the base net);
/// violations are reported with the offending arrow and group element.
FixedPointNet build_fixed_point_net(const functor::NetInput& base,
                                    const GroupAction& act,
                                    double tol = kDefaultTol);

/// For every region and every declared cover by subarcs, the join of the
/// embedded images is the region's algebra; the two-arc overlap step is
/// exercised separately on overlapping pairs.
report::Report check_open_cover_additivity(const functor::NetInput& n,
                                           double tol = kDefaultTol);

// ---------------------------------------------------------------------------
// the lattice Klein-Gordon symplectic layer

struct KgLatticeConfig {
  int t = 6, x = 6;   // time rows, spatial sites (periodic), lattice speed 1
  double mass = 1.0;  // m >= 0
  void validate() const;
};

/// Real fields on the grid, indexed (t, x).
using RField = Eigen::MatrixXd;

/// (P f)(t,x) = f(t+1,x) - 2f + f(t-1,x) - [f(t,x+1) - 2f + f(t,x-1)] + m^2 f
/// on the interior time rows 1..T-2 (boundary rows are outside the domain of
/// definition and zero in the output).
RField kg_apply_P(const KgLatticeConfig& cfg, const RField& f);

/// Green operators by explicit time stepping: the retarded solution marches
/// forward with zero data on the first two rows, the advanced one marches
/// backward with zero data on the last two. Supports stay inside the
/// discrete causal cone of the source, exactly.
RField kg_green(const KgLatticeConfig& cfg, bool retarded, const RField& f);

/// Causal propagator E = E^- - E^+ (retarded minus advanced).
RField kg_propagator(const KgLatticeConfig& cfg, const RField& f);

/// Points of a region whose full stencil stays inside (applied k times).
std::vector<int> eroded_interior(const KgLatticeConfig& cfg,
                                 const mink::Region& r, int times = 1);

/// V(T): test functions supported on the once-eroded interior modulo the
/// P-image of the twice-eroded ones (one erosion keeps the stencil inside
/// the region, the second supplies the zero-data margin that makes every
/// identity exact on the finite grid), with the symplectic form
/// sigma(f, g) = <f_ext, E g_ext>.
struct SymplecticClassSpace {
  KgLatticeConfig cfg;
  mink::Region region;
  std::vector<int> fpoints;  // once-eroded points: basis of the numerator
  std::vector<int> gpoints;  // twice-eroded points: P-domain
  RMatrix pimage;            // |F| x |G|, columns P(delta_u)
  RMatrix sigma_f;           // |F| x |F| pairing on numerator deltas
  RMatrix reps;              // |F| x dim orthonormal representatives
  RMatrix sigma;             // dim x dim, antisymmetric
  double quotient_residual = 0.0;  // max |sigma(P u, .)| and |sigma(., P u)|
  double antisym_residual = 0.0;   // raw antisymmetry defect before fixing

  int dim() const { return static_cast<int>(reps.cols()); }
  /// Class coordinates of a numerator vector.
  RVector project(const RVector& f_coords) const { return reps.transpose() * f_coords; }
};

SymplecticClassSpace kg_class_space(const KgLatticeConfig& cfg,
                                    const mink::Region& region);

/// Class map of a translation h with image(source) inside target:
/// [f] |-> [pushforward of f, extended by zero].
struct KgClassMap {
  RMatrix mat;                 // target dim x source dim
  double descend_residual = 0;  // image-of-P containment defect
};
KgClassMap kg_pushforward(const KgLatticeConfig& cfg, const mink::Symmetry& h,
                          const SymplecticClassSpace& src,
                          const SymplecticClassSpace& tgt);

/// sigma evaluated between classes of two (sub)regions through extension by
/// zero; spacelike-separated regions give the exact zero block.
RMatrix kg_sigma_between(const KgLatticeConfig& cfg,
                         const SymplecticClassSpace& a,
                         const SymplecticClassSpace& b);

// ---------------------------------------------------------------------------
// Weyl words over a symplectic class space (presentation level)

struct WeylWord {
  RVector v;
  Complex phase{1.0, 0.0};
};

WeylWord weyl_identity(const SymplecticClassSpace& s);
WeylWord weyl_generator(const SymplecticClassSpace& s, const RVector& v);
/// W(v) W(w) = exp(-i/2 sigma(v,w)) W(v+w)
WeylWord weyl_multiply(const SymplecticClassSpace& s, const WeylWord& a,
                       const WeylWord& b);
/// W(v)^* = W(-v)
WeylWord weyl_adjoint(const WeylWord& a);
bool weyl_equal(const WeylWord& a, const WeylWord& b, double tol = 1e-12);

// ---------------------------------------------------------------------------

struct KgSuiteOptions {
  double tol = kDefaultTol;
  bool inject_partition_gap = false;  // drop a cover piece: HK5 must fail
};

/// The lattice lemma suite: extension commutes with P, sigma is well-defined
/// on the quotient and antisymmetric, propagator supports stay in the causal
/// cone, pushforwards are symplectic and functorial, sigma vanishes exactly
/// between spacelike-separated diamonds, partition-of-unity class additivity
/// holds on covered diamonds, and the Weyl words satisfy the CCR identities.
report::Report kg_check_suite(const KgLatticeConfig& cfg,
                              const KgSuiteOptions& opt = {});

}  // namespace aqft::nets
