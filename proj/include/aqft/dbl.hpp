#pragma once

#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "aqft/numkit.hpp"

namespace aqft::dbl {

/// Boundary of a square: top/bottom horizontal arrow ids and left/right
/// vertical arrow ids, with matching corners.
struct Boundary {
  int top = -1, bot = -1, left = -1, right = -1;
  bool operator==(const Boundary& o) const = default;
};

struct BoundaryHash {
  size_t operator()(const Boundary& b) const {
    size_t h = std::hash<int>()(b.top);
    h = h * 1000003u + std::hash<int>()(b.bot);
    h = h * 1000003u + std::hash<int>()(b.left);
    h = h * 1000003u + std::hash<int>()(b.right);
    return h;
  }
};

/// A finite double category with a thin square store: at most one square per
/// boundary, represented by membership in `squares`. Vertical and horizontal
/// composition are explicit tables (-1 where undefined). This is the store
/// used by the spacetime side; the linear (matrix-cell) store is the
/// correspondence calculus, which shares the same boundary bookkeeping.
struct ThinDoubleCategory {
  int n_objects = 0;
  // vertical arrows; v_comp[g][f] = g after f (-1 if not composable)
  std::vector<int> v_src, v_tgt;
  std::vector<int> v_id;  // per object
  std::vector<std::vector<int>> v_comp;
  // horizontal arrows; h_comp[g][f] = g after f
  std::vector<int> h_src, h_tgt;
  std::vector<int> h_id;  // per object
  std::vector<std::vector<int>> h_comp;
  std::unordered_set<Boundary, BoundaryHash> squares;

  bool vertical_is_identity(int v) const { return v == v_id[v_src[v]]; }
  bool square_exists(const Boundary& b) const { return squares.count(b) > 0; }
  void validate() const;

  /// Unit square on a vertical arrow f.
  Boundary unit_square(int f) const;
  /// Boundary arithmetic; nullopt when the composite is undefined.
  std::optional<Boundary> compose_v(const Boundary& upper,
                                    const Boundary& lower) const;
  std::optional<Boundary> compose_h(const Boundary& left,
                                    const Boundary& right) const;
};

bool is_globular(const ThinDoubleCategory& d, const Boundary& b);

/// All 0-marked squares: existing globular squares plus all unit squares.
std::vector<Boundary> marked_generators(const ThinDoubleCategory& d);

/// A pasting discovered during the closure fixpoint: closure square
/// `result` arises by composing closure squares `a` and `b` (indices into
/// the closure order). Vertical pastings stack `a` above `b`; horizontal
/// pastings put `a` left of `b`.
struct Pasting {
  enum Kind { kVertical, kHorizontal } kind = kVertical;
  int a = -1, b = -1, result = -1;
};

struct GammaClosure {
  std::vector<Boundary> order;
  std::unordered_map<Boundary, int, BoundaryHash> index;
  std::vector<bool> generator;  // parallel to order
  std::vector<Pasting> pastings;

  bool contains(const Boundary& b) const { return index.count(b) > 0; }
  size_t size() const { return order.size(); }
};

/// Least square class containing the 0-marked squares and closed under both
/// compositions, by worklist fixpoint, recording every pasting between
/// closure squares. Requires a thin store.
GammaClosure gamma_closure(const ThinDoubleCategory& d);

/// A square assignment: boundary -> matrix cell.
using SquareAssignment = std::function<numkit::CMatrix(const Boundary&)>;

/// Target-side composition of cell values. Vertical composition of matrix
/// cells is the matrix product; horizontal composition depends on the
/// target's fusion calculus, so the caller supplies it (the value of the
/// pasted square, given both parents and the resulting boundary).
struct CellOps {
  std::function<numkit::CMatrix(const Boundary& upper, const numkit::CMatrix&,
                                const Boundary& lower, const numkit::CMatrix&)>
      compose_v;
  std::function<numkit::CMatrix(const Boundary& left, const numkit::CMatrix&,
                                const Boundary& right, const numkit::CMatrix&,
                                const Boundary& result)>
      compose_h;
};

struct UniquenessReport {
  bool agree = true;
  double max_residual = 0.0;
  int pastings_checked = 0;
  std::string witness;  // offending square or pasting, when any
};

/// Replays the closure: both assignments must agree on every generator, and
/// every recorded pasting must be functorial for both assignments (the value
/// of the pasted square equals the composite of the parents' values). Under
/// these checks agreement propagates to every closure square; disagreements
/// are located and reported.
UniquenessReport check_generator_uniqueness(const ThinDoubleCategory& d,
                                            const GammaClosure& closure,
                                            const SquareAssignment& f,
                                            const SquareAssignment& g,
                                            const CellOps& ops,
                                            double tol = kDefaultTol);

}  // namespace aqft::dbl
