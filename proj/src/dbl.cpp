#include "aqft/dbl.hpp"

namespace aqft::dbl {

void ThinDoubleCategory::validate() const {
  auto in_range = [](int x, size_t n) { return x >= 0 && x < static_cast<int>(n); };
  for (size_t v = 0; v < v_src.size(); ++v)
    if (!in_range(v_src[v], n_objects) || !in_range(v_tgt[v], n_objects))
      throw Error("ThinDoubleCategory: bad vertical arrow");
  for (size_t h = 0; h < h_src.size(); ++h)
    if (!in_range(h_src[h], n_objects) || !in_range(h_tgt[h], n_objects))
      throw Error("ThinDoubleCategory: bad horizontal arrow");
  for (const auto& b : squares)
    if (h_src[b.top] != v_src[b.left] || h_tgt[b.top] != v_src[b.right] ||
        h_src[b.bot] != v_tgt[b.left] || h_tgt[b.bot] != v_tgt[b.right])
      throw Error("ThinDoubleCategory: square corners do not match");
}

Boundary ThinDoubleCategory::unit_square(int f) const {
  return Boundary{h_id[v_src[f]], h_id[v_tgt[f]], f, f};
}

std::optional<Boundary> ThinDoubleCategory::compose_v(const Boundary& upper,
                                                      const Boundary& lower) const {
  if (upper.bot != lower.top) return std::nullopt;
  int l = v_comp[lower.left][upper.left];
  int r = v_comp[lower.right][upper.right];
  if (l < 0 || r < 0) return std::nullopt;
  return Boundary{upper.top, lower.bot, l, r};
}

std::optional<Boundary> ThinDoubleCategory::compose_h(const Boundary& left,
                                                      const Boundary& right) const {
  if (left.right != right.left) return std::nullopt;
  int top = h_comp[right.top][left.top];
  int bot = h_comp[right.bot][left.bot];
  if (top < 0 || bot < 0) return std::nullopt;
  return Boundary{top, bot, left.left, right.right};
}

bool is_globular(const ThinDoubleCategory& d, const Boundary& b) {
  return d.vertical_is_identity(b.left) && d.vertical_is_identity(b.right);
}

std::vector<Boundary> marked_generators(const ThinDoubleCategory& d) {
  std::vector<Boundary> gens;
  std::unordered_set<Boundary, BoundaryHash> seen;
  for (const auto& sq : d.squares)
    if (is_globular(d, sq) && seen.insert(sq).second) gens.push_back(sq);
  for (size_t f = 0; f < d.v_src.size(); ++f) {
    Boundary u = d.unit_square(static_cast<int>(f));
    if (!d.square_exists(u))
      throw Error("marked_generators: unit square missing from store");
    if (seen.insert(u).second) gens.push_back(u);
  }
  return gens;
}

GammaClosure gamma_closure(const ThinDoubleCategory& d) {
  GammaClosure cl;
  auto push = [&](const Boundary& b, bool gen) {
    auto it = cl.index.find(b);
    if (it != cl.index.end()) return it->second;
    int id = static_cast<int>(cl.order.size());
    cl.index.emplace(b, id);
    cl.order.push_back(b);
    cl.generator.push_back(gen);
    return id;
  };
  for (const auto& g : marked_generators(d)) push(g, true);

  size_t frontier_start = 0;
  while (frontier_start < cl.order.size()) {
    size_t frontier_end = cl.order.size();
    // pairs with at least one member in the new frontier
    for (size_t i = 0; i < frontier_end; ++i) {
      size_t j0 = (i >= frontier_start) ? 0 : frontier_start;
      for (size_t j = j0; j < frontier_end; ++j) {
        const Boundary a = cl.order[i];
        const Boundary b = cl.order[j];
        if (auto v = d.compose_v(a, b); v && d.square_exists(*v)) {
          int r = push(*v, false);
          cl.pastings.push_back({Pasting::kVertical, static_cast<int>(i),
                                 static_cast<int>(j), r});
        }
        if (auto h = d.compose_h(a, b); h && d.square_exists(*h)) {
          int r = push(*h, false);
          cl.pastings.push_back({Pasting::kHorizontal, static_cast<int>(i),
                                 static_cast<int>(j), r});
        }
      }
    }
    frontier_start = frontier_end;
  }
  return cl;
}

UniquenessReport check_generator_uniqueness(const ThinDoubleCategory& d,
                                            const GammaClosure& closure,
                                            const SquareAssignment& f,
                                            const SquareAssignment& g,
                                            const CellOps& ops, double tol) {
  (void)d;
  UniquenessReport rep;
  auto describe = [](const Boundary& b) {
    return "square(top=" + std::to_string(b.top) + ",bot=" + std::to_string(b.bot) +
           ",left=" + std::to_string(b.left) +
           ",right=" + std::to_string(b.right) + ")";
  };
  auto fail = [&](const Boundary& b, double res, const std::string& what) {
    rep.agree = false;
    rep.max_residual = std::max(rep.max_residual, res);
    if (rep.witness.empty()) rep.witness = what + " at " + describe(b);
  };

  std::vector<numkit::CMatrix> fv, gv;
  fv.reserve(closure.size());
  gv.reserve(closure.size());
  for (size_t i = 0; i < closure.size(); ++i) {
    fv.push_back(f(closure.order[i]));
    gv.push_back(g(closure.order[i]));
    if (closure.generator[i]) {
      double res = (fv[i] - gv[i]).cwiseAbs().maxCoeff();
      rep.max_residual = std::max(rep.max_residual, res);
      if (res > tol) fail(closure.order[i], res, "generators disagree");
    }
  }

  for (const auto& p : closure.pastings) {
    const Boundary& ba = closure.order[p.a];
    const Boundary& bb = closure.order[p.b];
    const Boundary& br = closure.order[p.result];
    numkit::CMatrix fc, gc;
    if (p.kind == Pasting::kVertical) {
      fc = ops.compose_v(ba, fv[p.a], bb, fv[p.b]);
      gc = ops.compose_v(ba, gv[p.a], bb, gv[p.b]);
    } else {
      fc = ops.compose_h(ba, fv[p.a], bb, fv[p.b], br);
      gc = ops.compose_h(ba, gv[p.a], bb, gv[p.b], br);
    }
    double fres = (fc - fv[p.result]).cwiseAbs().maxCoeff();
    double gres = (gc - gv[p.result]).cwiseAbs().maxCoeff();
    rep.max_residual = std::max({rep.max_residual, fres, gres});
    ++rep.pastings_checked;
    if (fres > tol)
      fail(br, fres, "first assignment is not functorial along the pasting");
    if (gres > tol)
      fail(br, gres, "second assignment is not functorial along the pasting");
  }

  // agreement on every closure square (implied by the above when all checks
  // pass; evaluated directly so disagreements outside generators are located)
  for (size_t i = 0; i < closure.size(); ++i) {
    double res = (fv[i] - gv[i]).cwiseAbs().maxCoeff();
    rep.max_residual = std::max(rep.max_residual, res);
    if (res > tol) fail(closure.order[i], res, "assignments disagree");
  }
  return rep;
}

}  // namespace aqft::dbl
