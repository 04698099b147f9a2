#include "aqft/mink.hpp"

#include <algorithm>
#include <random>
#include <set>

namespace aqft::mink {

DiscreteSpacetime DiscreteSpacetime::circle(int n) {
  if (n < 3) throw Error("circle: need at least 3 sites");
  DiscreteSpacetime m;
  m.kind = Kind::kCircle;
  m.circle_sites = n;
  return m;
}

DiscreteSpacetime DiscreteSpacetime::diamond_grid(int t, int x, bool periodic) {
  if (t < 2 || x < 2) throw Error("diamond_grid: need T,X >= 2");
  DiscreteSpacetime m;
  m.kind = Kind::kDiamondGrid;
  m.grid_t = t;
  m.grid_x = x;
  m.periodic_space = periodic;
  return m;
}

int DiscreteSpacetime::num_points() const {
  return kind == Kind::kCircle ? circle_sites : grid_t * grid_x;
}

int DiscreteSpacetime::point_id(int t, int x) const { return t * grid_x + x; }

std::pair<int, int> DiscreteSpacetime::point_tx(int id) const {
  return {id / grid_x, id % grid_x};
}

int DiscreteSpacetime::spatial_dist(int x1, int x2) const {
  int d = std::abs(x1 - x2);
  if (kind == Kind::kDiamondGrid && periodic_space) d = std::min(d, grid_x - d);
  if (kind == Kind::kCircle) d = std::min(d, circle_sites - d);
  return d;
}

std::optional<int> DiscreteSpacetime::apply(const Symmetry& g, int point) const {
  if (kind == Kind::kCircle) return (point + g.a) % circle_sites;
  auto [t, x] = point_tx(point);
  int t2 = t + g.a;
  if (t2 < 0 || t2 >= grid_t) return std::nullopt;
  int x2 = x + g.b;
  if (periodic_space) {
    x2 = ((x2 % grid_x) + grid_x) % grid_x;
  } else if (x2 < 0 || x2 >= grid_x) {
    return std::nullopt;
  }
  return point_id(t2, x2);
}

Symmetry DiscreteSpacetime::compose(const Symmetry& second,
                                    const Symmetry& first) const {
  if (kind == Kind::kCircle)
    return Symmetry{(second.a + first.a) % circle_sites, 0};
  int dx = second.b + first.b;
  if (periodic_space) dx = ((dx % grid_x) + grid_x) % grid_x;
  return Symmetry{second.a + first.a, dx};
}

bool DiscreteSpacetime::is_identity(const Symmetry& g) const {
  return g.a == 0 && (kind == Kind::kCircle || g.b == 0);
}

std::string DiscreteSpacetime::symmetry_name(const Symmetry& g) const {
  if (kind == Kind::kCircle) return "rot(" + std::to_string(g.a) + ")";
  return "tr(" + std::to_string(g.a) + "," + std::to_string(g.b) + ")";
}

std::vector<Symmetry> DiscreteSpacetime::symmetries() const {
  std::vector<Symmetry> out;
  if (kind == Kind::kCircle) {
    for (int k = 0; k < circle_sites; ++k) out.push_back({k, 0});
    return out;
  }
  int xlo = periodic_space ? 0 : -(grid_x - 1);
  int xhi = periodic_space ? grid_x - 1 : grid_x - 1;
  for (int dt = -(grid_t - 1); dt <= grid_t - 1; ++dt)
    for (int dx = xlo; dx <= xhi; ++dx) out.push_back({dt, dx});
  return out;
}

namespace {

std::string arc_name(int s, int len) {
  return "arc(" + std::to_string(s) + "," + std::to_string(len) + ")";
}

std::string point_key(const std::vector<int>& pts) {
  std::string k;
  for (int p : pts) k += std::to_string(p) + ",";
  return k;
}

}  // namespace

std::vector<Region> regions_of(const DiscreteSpacetime& m) {
  std::vector<Region> out;
  if (m.kind == Kind::kCircle) {
    const int n = m.circle_sites;
    for (int s = 0; s < n; ++s)
      for (int len = 1; len <= n - 1; ++len) {
        Region r;
        for (int i = 0; i < len; ++i) r.points.push_back((s + i) % n);
        std::sort(r.points.begin(), r.points.end());
        r.name = arc_name(s, len);
        out.push_back(std::move(r));
      }
  } else {
    std::set<std::string> seen;
    const int np = m.num_points();
    for (int p = 0; p < np; ++p)
      for (int q = 0; q < np; ++q) {
        auto [tp, xp] = m.point_tx(p);
        auto [tq, xq] = m.point_tx(q);
        if (tq - tp < m.spatial_dist(xp, xq)) continue;  // p not causally below q
        Region r;
        for (int z = 0; z < np; ++z) {
          auto [t, x] = m.point_tx(z);
          if (t - tp >= m.spatial_dist(x, xp) && tq - t >= m.spatial_dist(x, xq))
            r.points.push_back(z);
        }
        std::sort(r.points.begin(), r.points.end());
        std::string key = point_key(r.points);
        if (!seen.insert(key).second) continue;
        r.name = "dia(" + std::to_string(tp) + "," + std::to_string(xp) + "," +
                 std::to_string(tq) + "," + std::to_string(xq) + ")";
        out.push_back(std::move(r));
      }
  }
  Region ambient;
  for (int p = 0; p < m.num_points(); ++p) ambient.points.push_back(p);
  ambient.is_ambient = true;
  ambient.name = "ambient";
  out.push_back(std::move(ambient));
  return out;
}

bool subset(const Region& a, const Region& b) {
  return std::includes(b.points.begin(), b.points.end(), a.points.begin(),
                       a.points.end());
}

std::optional<std::vector<int>> image_points(const DiscreteSpacetime& m,
                                             const Symmetry& g, const Region& r) {
  std::vector<int> out;
  for (int p : r.points) {
    auto q = m.apply(g, p);
    if (!q) return std::nullopt;
    out.push_back(*q);
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool is_causally_disjoint(const DiscreteSpacetime& m, const Region& u,
                          const Region& v, const Region& amb) {
  if (!subset(u, amb) || !subset(v, amb)) return false;
  if (u.points.empty() || v.points.empty()) return false;
  if (m.kind == Kind::kCircle) {
    std::vector<int> inter;
    std::set_intersection(u.points.begin(), u.points.end(), v.points.begin(),
                          v.points.end(), std::back_inserter(inter));
    return inter.empty();
  }
  for (int p : u.points)
    for (int q : v.points) {
      auto [tp, xp] = m.point_tx(p);
      auto [tq, xq] = m.point_tx(q);
      if (std::abs(tp - tq) >= m.spatial_dist(xp, xq)) return false;
    }
  return true;
}

namespace {

long long arrow_key(const Symmetry& g, int src, int tgt) {
  long long k = g.a + 4096;
  k = k * 8192 + (g.b + 4096);
  k = k * 100000 + src;
  k = k * 100000 + tgt;
  return k;
}

}  // namespace

int Geometry::find_region(const std::vector<int>& points) const {
  auto it = region_index_.find(point_key(points));
  return it == region_index_.end() ? -1 : it->second;
}

int Geometry::find_arrow(const Symmetry& g, int src, int tgt) const {
  auto it = arrow_index_.find(arrow_key(g, src, tgt));
  return it == arrow_index_.end() ? -1 : it->second;
}

int Geometry::compose_arrows(int second, int first) const {
  const EmbeddingArrow& f = arrows[first];
  const EmbeddingArrow& s = arrows[second];
  if (f.target != s.source) return -1;
  return find_arrow(space.compose(s.sym, f.sym), f.source, s.target);
}

bool Geometry::is_inclusion(int arrow) const {
  return space.is_identity(arrows[arrow].sym);
}

bool Geometry::arrow_is_iso(int arrow) const {
  const EmbeddingArrow& a = arrows[arrow];
  auto img = image_points(space, a.sym, regions[a.source]);
  return img && *img == regions[a.target].points;
}

std::string Geometry::arrow_name(int arrow) const {
  const EmbeddingArrow& a = arrows[arrow];
  return space.symmetry_name(a.sym) + ":" + regions[a.source].name + "->" +
         regions[a.target].name;
}

Geometry build_geometry(const DiscreteSpacetime& m) {
  Geometry g;
  g.space = m;
  g.regions = regions_of(m);
  for (size_t i = 0; i < g.regions.size(); ++i) {
    g.region_index_[point_key(g.regions[i].points)] = static_cast<int>(i);
    if (g.regions[i].is_ambient) g.ambient = static_cast<int>(i);
  }
  const auto syms = m.symmetries();
  for (const auto& sym : syms)
    for (size_t u = 0; u < g.regions.size(); ++u) {
      auto img = image_points(m, sym, g.regions[u]);
      if (!img) continue;
      for (size_t v = 0; v < g.regions.size(); ++v) {
        Region img_r{*img, false, ""};
        if (!subset(img_r, g.regions[v])) continue;
        EmbeddingArrow a{static_cast<int>(u), static_cast<int>(v), sym};
        g.arrow_index_[arrow_key(sym, a.source, a.target)] =
            static_cast<int>(g.arrows.size());
        g.arrows.push_back(a);
      }
    }
  g.identity_arrow.assign(g.regions.size(), -1);
  for (size_t i = 0; i < g.arrows.size(); ++i) {
    const auto& a = g.arrows[i];
    if (m.is_identity(a.sym)) {
      if (a.source == a.target) g.identity_arrow[a.source] = static_cast<int>(i);
      g.inclusion_arrows.push_back(static_cast<int>(i));
    }
  }
  return g;
}

bool validate_square(const Geometry& g, const SpacetimeSquare& sq) {
  if (sq.top < 0 || sq.bottom < 0 || sq.left < 0 || sq.right < 0) return false;
  const auto& h = g.arrows[sq.top];
  const auto& h2 = g.arrows[sq.bottom];
  const auto& i = g.arrows[sq.left];
  const auto& j = g.arrows[sq.right];
  if (!g.is_inclusion(sq.left) || !g.is_inclusion(sq.right)) return false;
  if (i.source != h.source || i.target != h2.source) return false;
  if (j.source != h.target || j.target != h2.target) return false;
  // pointwise commutation j(h(u)) = h'(i(u)) on the source region
  for (int p : g.regions[h.source].points) {
    auto a = g.space.apply(h.sym, p);
    auto b = g.space.apply(h2.sym, p);
    if (!a || !b || *a != *b) return false;
  }
  return true;
}

std::vector<SpacetimeSquare> enumerate_squares(const Geometry& g) {
  std::vector<SpacetimeSquare> out;
  // group arrows by symmetry (pointwise commutation forces equal symmetries
  // for these freely acting groups)
  std::unordered_map<long long, std::vector<int>> by_sym;
  for (size_t i = 0; i < g.arrows.size(); ++i)
    by_sym[arrow_key(g.arrows[i].sym, 0, 0)].push_back(static_cast<int>(i));
  for (const auto& [key, ids] : by_sym) {
    (void)key;
    for (int top : ids)
      for (int bot : ids) {
        const auto& h = g.arrows[top];
        const auto& h2 = g.arrows[bot];
        int left = g.find_arrow(Symmetry{}, h.source, h2.source);
        int right = g.find_arrow(Symmetry{}, h.target, h2.target);
        if (left < 0 || right < 0) continue;
        SpacetimeSquare sq{top, bot, left, right};
        if (validate_square(g, sq)) out.push_back(sq);
      }
  }
  return out;
}

dbl::ThinDoubleCategory to_thin(const Geometry& g) {
  dbl::ThinDoubleCategory d;
  d.n_objects = static_cast<int>(g.regions.size());
  // verticals: inclusion arrows, re-indexed
  std::unordered_map<int, int> vmap;
  for (int a : g.inclusion_arrows) {
    vmap[a] = static_cast<int>(d.v_src.size());
    d.v_src.push_back(g.arrows[a].source);
    d.v_tgt.push_back(g.arrows[a].target);
  }
  d.v_id.assign(d.n_objects, -1);
  for (int a : g.inclusion_arrows)
    if (g.arrows[a].source == g.arrows[a].target) d.v_id[g.arrows[a].source] = vmap[a];
  d.v_comp.assign(d.v_src.size(), std::vector<int>(d.v_src.size(), -1));
  for (int a : g.inclusion_arrows)
    for (int b : g.inclusion_arrows) {
      int c = g.compose_arrows(b, a);  // b after a
      if (c >= 0) d.v_comp[vmap[b]][vmap[a]] = vmap[c];
    }
  // horizontals: all arrows
  d.h_src.resize(g.arrows.size());
  d.h_tgt.resize(g.arrows.size());
  for (size_t i = 0; i < g.arrows.size(); ++i) {
    d.h_src[i] = g.arrows[i].source;
    d.h_tgt[i] = g.arrows[i].target;
  }
  d.h_id.assign(d.n_objects, -1);
  for (int o = 0; o < d.n_objects; ++o) d.h_id[o] = g.identity_arrow[o];
  d.h_comp.assign(g.arrows.size(), std::vector<int>(g.arrows.size(), -1));
  for (size_t a = 0; a < g.arrows.size(); ++a)
    for (size_t b = 0; b < g.arrows.size(); ++b) {
      int c = g.compose_arrows(static_cast<int>(b), static_cast<int>(a));
      if (c >= 0) d.h_comp[b][a] = c;
    }
  for (const auto& sq : enumerate_squares(g))
    d.squares.insert(dbl::Boundary{sq.top, sq.bottom, vmap.at(sq.left),
                                   vmap.at(sq.right)});
  return d;
}

namespace {

template <typename F>
StrictnessReport scan_triples(long long n, long long budget, unsigned seed, F f) {
  StrictnessReport rep;
  if (n * n * n <= budget) {
    for (long long a = 0; a < n && rep.pass; ++a)
      for (long long b = 0; b < n && rep.pass; ++b)
        for (long long c = 0; c < n && rep.pass; ++c) {
          ++rep.checks;
          f(rep, static_cast<int>(a), static_cast<int>(b), static_cast<int>(c));
        }
  } else {
    rep.exhaustive = false;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long long> pick(0, n - 1);
    for (long long i = 0; i < budget && rep.pass; ++i) {
      ++rep.checks;
      f(rep, static_cast<int>(pick(rng)), static_cast<int>(pick(rng)),
        static_cast<int>(pick(rng)));
    }
  }
  return rep;
}

}  // namespace

StrictnessReport check_strictness(const dbl::ThinDoubleCategory& d,
                                  long long budget, unsigned seed) {
  StrictnessReport rep;
  auto fail = [&](StrictnessReport& r, const std::string& msg) {
    r.pass = false;
    if (r.violation.empty()) r.violation = msg;
  };

  // unit laws in both directions
  for (size_t h = 0; h < d.h_src.size() && rep.pass; ++h) {
    if (d.h_comp[d.h_id[d.h_tgt[h]]][h] != static_cast<int>(h) ||
        d.h_comp[h][d.h_id[d.h_src[h]]] != static_cast<int>(h))
      fail(rep, "horizontal unit law fails at arrow " + std::to_string(h));
    ++rep.checks;
  }
  for (size_t v = 0; v < d.v_src.size() && rep.pass; ++v) {
    if (d.v_comp[d.v_id[d.v_tgt[v]]][v] != static_cast<int>(v) ||
        d.v_comp[v][d.v_id[d.v_src[v]]] != static_cast<int>(v))
      fail(rep, "vertical unit law fails at arrow " + std::to_string(v));
    ++rep.checks;
  }
  if (!rep.pass) return rep;

  // associativity of horizontal composition
  auto assoc_h = scan_triples(
      static_cast<long long>(d.h_src.size()), budget, seed,
      [&](StrictnessReport& r, int a, int b, int c) {
        if (d.h_tgt[a] != d.h_src[b] || d.h_tgt[b] != d.h_src[c]) return;
        int ba = d.h_comp[b][a], cb = d.h_comp[c][b];
        if (ba < 0 || cb < 0) {
          fail(r, "horizontal composition undefined on composable pair");
          return;
        }
        if (d.h_comp[c][ba] != d.h_comp[cb][a])
          fail(r, "horizontal associativity fails");
      });
  rep.checks += assoc_h.checks;
  rep.exhaustive = rep.exhaustive && assoc_h.exhaustive;
  if (!assoc_h.pass) {
    rep.pass = false;
    rep.violation = assoc_h.violation;
    return rep;
  }
  auto assoc_v = scan_triples(
      static_cast<long long>(d.v_src.size()), budget, seed + 1,
      [&](StrictnessReport& r, int a, int b, int c) {
        if (d.v_tgt[a] != d.v_src[b] || d.v_tgt[b] != d.v_src[c]) return;
        int ba = d.v_comp[b][a], cb = d.v_comp[c][b];
        if (ba < 0 || cb < 0) {
          fail(r, "vertical composition undefined on composable pair");
          return;
        }
        if (d.v_comp[c][ba] != d.v_comp[cb][a])
          fail(r, "vertical associativity fails");
      });
  rep.checks += assoc_v.checks;
  rep.exhaustive = rep.exhaustive && assoc_v.exhaustive;
  if (!assoc_v.pass) {
    rep.pass = false;
    rep.violation = assoc_v.violation;
    return rep;
  }

  // interchange on pasteable 2x2 grids of squares
  std::vector<dbl::Boundary> sqs(d.squares.begin(), d.squares.end());
  std::sort(sqs.begin(), sqs.end(), [](const auto& a, const auto& b) {
    return std::tie(a.top, a.bot, a.left, a.right) <
           std::tie(b.top, b.bot, b.left, b.right);
  });
  long long n = static_cast<long long>(sqs.size());
  long long count = 0;
  std::mt19937_64 rng(seed + 2);
  std::uniform_int_distribution<long long> pick(0, std::max<long long>(1, n) - 1);
  bool exhaustive = n * n <= budget;
  rep.exhaustive = rep.exhaustive && exhaustive;
  auto try_grid = [&](const dbl::Boundary& a, const dbl::Boundary& b) {
    // a | b in the top row; search bottom row partners
    auto ab = d.compose_h(a, b);
    if (!ab || !d.square_exists(*ab)) return;
    for (const auto& c : sqs) {
      if (c.top != a.bot) continue;
      for (const auto& e : sqs) {
        if (e.top != b.bot || e.left != c.right) continue;
        auto ce = d.compose_h(c, e);
        auto ac = d.compose_v(a, c);
        auto be = d.compose_v(b, e);
        if (!ce || !ac || !be) continue;
        auto order1 = d.compose_v(*ab, *ce);
        auto order2 = d.compose_h(*ac, *be);
        ++rep.checks;
        if (!order1 || !order2 || !(*order1 == *order2) ||
            !d.square_exists(*order1)) {
          rep.pass = false;
          if (rep.violation.empty()) rep.violation = "interchange fails";
          return;
        }
      }
    }
  };
  if (exhaustive) {
    for (long long i = 0; i < n && rep.pass; ++i)
      for (long long j = 0; j < n && rep.pass; ++j) try_grid(sqs[i], sqs[j]);
  } else {
    for (long long i = 0; i < budget / std::max<long long>(1, n) && rep.pass; ++i)
      try_grid(sqs[pick(rng)], sqs[pick(rng)]);
    count = 0;
  }
  (void)count;
  return rep;
}

StrictnessReport check_strictness(const Geometry& g, long long budget,
                                  unsigned seed) {
  return check_strictness(to_thin(g), budget, seed);
}

namespace {

AdjunctionReport check_biconditional(const TruncationData& td, bool tau_left) {
  AdjunctionReport rep;
  const auto& small = td.small_regions;
  const auto& big = td.big_regions;
  for (size_t v = 0; v < small.size(); ++v)
    if (td.tau[td.iota[v]] != static_cast<int>(v)) {
      rep.retract_ok = false;
      rep.witness = "tau(iota(" + small[v].name + ")) != " + small[v].name;
    }
  for (size_t u = 0; u < big.size(); ++u) {
    if (!subset(small[td.tau[u]], big[u])) rep.cauchy_ok = false;
    for (size_t u2 = 0; u2 < big.size(); ++u2)
      if (subset(big[u], big[u2]) &&
          !subset(small[td.tau[u]], small[td.tau[u2]]))
        rep.monotone_ok = false;
  }
  rep.holds = true;
  for (size_t u = 0; u < big.size() && rep.holds; ++u)
    for (size_t v = 0; v < small.size() && rep.holds; ++v) {
      bool lhs, rhs;
      if (tau_left) {
        lhs = subset(small[td.tau[u]], small[v]);
        rhs = subset(big[u], big[td.iota[v]]);
      } else {
        lhs = subset(big[td.iota[v]], big[u]);
        rhs = subset(small[v], small[td.tau[u]]);
      }
      if (lhs != rhs) {
        rep.holds = false;
        rep.witness = "biconditional fails at U=" + big[u].name +
                      ", V=" + small[v].name;
      }
    }
  return rep;
}

}  // namespace

AdjunctionReport check_thin_adjunction(const TruncationData& td) {
  return check_biconditional(td, true);
}

AdjunctionReport check_thin_coreflection(const TruncationData& td) {
  return check_biconditional(td, false);
}

}  // namespace aqft::mink
