#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "aqft/dbl.hpp"

namespace aqft::mink {

enum class Kind { kCircle, kDiamondGrid };

/// Group element of the acting symmetry group: rotation k for the circle,
/// spacetime translation (dt, dx) for the grid (dx reduced mod X when the
/// spatial direction is periodic).
struct Symmetry {
  int a = 0, b = 0;
  bool operator==(const Symmetry&) const = default;
};

struct Region {
  std::vector<int> points;  // sorted point ids
  bool is_ambient = false;
  std::string name;
};

struct DiscreteSpacetime {
  Kind kind = Kind::kCircle;
  int circle_sites = 0;
  int grid_t = 0, grid_x = 0;
  bool periodic_space = true;

  static DiscreteSpacetime circle(int n);
  static DiscreteSpacetime diamond_grid(int t, int x, bool periodic_space = true);

  int num_points() const;
  int point_id(int t, int x) const;
  std::pair<int, int> point_tx(int id) const;
  /// Wrapped (or plain) spatial distance between site coordinates.
  int spatial_dist(int x1, int x2) const;
  /// Image of a point under a symmetry; nullopt when it leaves the grid.
  std::optional<int> apply(const Symmetry& g, int point) const;
  Symmetry compose(const Symmetry& second, const Symmetry& first) const;
  bool is_identity(const Symmetry& g) const;
  std::string symmetry_name(const Symmetry& g) const;
  /// All group elements that can act (rotations; grid translations with
  /// |dt| < T and all spatial offsets).
  std::vector<Symmetry> symmetries() const;
};

/// All admissible regions plus the ambient one. Circle: proper arcs
/// arc(start,len), 1 <= len <= N-1. Grid: causal intervals
/// D(p,q) = J+(p) cap J-(q), deduplicated by point set.
std::vector<Region> regions_of(const DiscreteSpacetime& m);

bool subset(const Region& a, const Region& b);
/// Image point set, or nullopt if some point leaves the spacetime.
std::optional<std::vector<int>> image_points(const DiscreteSpacetime& m,
                                             const Symmetry& g, const Region& r);

/// Causal disjointness of two subregions of a common ambient region.
/// Circle: set disjointness. Grid: every point pair strictly spacelike
/// (|dt| < spatial distance; lightlike pairs count as causally related).
bool is_causally_disjoint(const DiscreteSpacetime& m, const Region& u,
                          const Region& v, const Region& amb);

struct EmbeddingArrow {
  int source = -1, target = -1;  // region indices
  Symmetry sym;
};

/// The embedding category of a discrete spacetime: regions, all admissible
/// embedding arrows (g, U, V) with g.U inside V, and composition
/// (g2, V, W) after (g1, U, V) = (g2 g1, U, W).
struct Geometry {
  DiscreteSpacetime space;
  std::vector<Region> regions;
  int ambient = -1;
  std::vector<EmbeddingArrow> arrows;
  std::vector<int> identity_arrow;    // per region
  std::vector<int> inclusion_arrows;  // identity-symmetry arrows

  int find_region(const std::vector<int>& points) const;
  int find_arrow(const Symmetry& g, int src, int tgt) const;
  /// id of second after first, or -1.
  int compose_arrows(int second, int first) const;
  bool is_inclusion(int arrow) const;
  bool arrow_is_iso(int arrow) const;  // image(g, U) == V
  std::string arrow_name(int arrow) const;

 private:
  std::unordered_map<long long, int> arrow_index_;
  std::unordered_map<std::string, int> region_index_;
  friend Geometry build_geometry(const DiscreteSpacetime& m);
};

Geometry build_geometry(const DiscreteSpacetime& m);

struct SpacetimeSquare {
  int top = -1, bottom = -1;  // arrow ids
  int left = -1, right = -1;  // inclusion arrow ids
};

/// True iff the verticals are inclusions and the boundary commutes
/// pointwise on the source region.
bool validate_square(const Geometry& g, const SpacetimeSquare& sq);

/// All valid commuting squares.
std::vector<SpacetimeSquare> enumerate_squares(const Geometry& g);

/// Flatten into the generic double-category kernel: objects = regions,
/// verticals = inclusions, horizontals = all arrows, squares thin.
dbl::ThinDoubleCategory to_thin(const Geometry& g);

struct StrictnessReport {
  bool pass = true;
  long long checks = 0;
  bool exhaustive = true;
  std::string violation;
};

/// Strict-double-category laws on the thin flattening: unit laws and
/// associativity in both directions plus interchange on pasteable 2x2
/// grids. Exhaustive up to `budget` checks per law, sampled beyond.
StrictnessReport check_strictness(const dbl::ThinDoubleCategory& d,
                                  long long budget = 2000000,
                                  unsigned seed = 1);
StrictnessReport check_strictness(const Geometry& g,
                                  long long budget = 2000000,
                                  unsigned seed = 1);

/// Truncation package between two region posets: iota includes the small
/// poset in the big one, tau retracts (tau . iota = id), and c_U designates
/// the inclusion tau(U) into U (the Cauchy candidates).
struct TruncationData {
  std::vector<Region> small_regions, big_regions;
  std::vector<int> iota;  // small index -> big index
  std::vector<int> tau;   // big index -> small index
};

struct AdjunctionReport {
  bool retract_ok = true;      // tau . iota = id
  bool monotone_ok = true;     // both maps monotone
  bool cauchy_ok = true;       // tau(U) included in U for every big U
  bool holds = false;          // the biconditional tau(U) <= V  iff  U <= iota(V)
  std::string witness;
};

/// Exhaustive evaluation of the adjunction criterion in thin categories:
/// tau left adjoint to iota iff for all U, V: tau(U) <= V iff U <= iota(V).
/// The mirrored criterion (iota left adjoint to tau) is evaluated by
/// check_thin_coreflection; a genuine truncation (tau(U) inside U) can only
/// satisfy the first one when iota is essentially surjective.
AdjunctionReport check_thin_adjunction(const TruncationData& td);
AdjunctionReport check_thin_coreflection(const TruncationData& td);

}  // namespace aqft::mink
