#include "aqft/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace aqft::config {

namespace {

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& keys,
                    const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!keys.count(it.key()))
      throw Error("config: unknown key '" + it.key() + "' in " + where);
}

const std::set<std::string> kKnownSuites = {
    "validate", "bimodularity", "hk",        "unions",
    "additivity", "strictness",  "kg",       "transformation"};

}  // namespace

RunConfig parse_config(const nlohmann::json& j) {
  RunConfig cfg;
  cfg.echo = j;
  reject_unknown(j, {"net", "suites", "tolerance", "fault", "output"}, "root");
  const auto& net = j.at("net");
  reject_unknown(net,
                 {"kind", "sites", "site_dim", "group_order",
                  "generator_diag_phases", "t", "x", "mass"},
                 "net");
  cfg.kind = net.at("kind").get<std::string>();
  if (cfg.kind == "spin_chain" || cfg.kind == "fixed_point") {
    cfg.sites = net.value("sites", 4);
    cfg.site_dim = net.value("site_dim", 2);
    if (cfg.sites < 3) throw Error("config: sites must be >= 3");
    if (cfg.site_dim < 2) throw Error("config: site_dim must be >= 2");
  } else if (cfg.kind == "kg_lattice") {
    cfg.grid_t = net.value("t", 6);
    cfg.grid_x = net.value("x", 6);
    cfg.mass = net.value("mass", 1.0);
    // geometry commands (info, gamma) work from 2x2 up; the field-theory
    // suite checks its own stronger precondition (t >= 4, x >= 3)
    if (cfg.grid_t < 2 || cfg.grid_x < 2)
      throw Error("config: kg lattice needs t >= 2 and x >= 2");
    if (cfg.mass < 0) throw Error("config: mass must be >= 0");
  } else {
    throw Error("config: unknown net kind '" + cfg.kind + "'");
  }
  if (cfg.kind == "fixed_point") {
    cfg.group_order = net.value("group_order", 2);
    if (net.contains("generator_diag_phases"))
      cfg.generator_diag_phases =
          net.at("generator_diag_phases").get<std::vector<double>>();
    else
      cfg.generator_diag_phases = {0.0, 0.5};
    if (cfg.group_order < 1) throw Error("config: group_order must be >= 1");
    if (static_cast<int>(cfg.generator_diag_phases.size()) != cfg.site_dim)
      throw Error("config: generator_diag_phases must list one phase per site dimension");
  }
  if (j.contains("suites"))
    cfg.suites = j.at("suites").get<std::vector<std::string>>();
  for (const auto& s : cfg.suites)
    if (!kKnownSuites.count(s)) throw Error("config: unknown suite '" + s + "'");
  cfg.tolerance = j.value("tolerance", kDefaultTol);
  if (!(cfg.tolerance > 0)) throw Error("config: tolerance must be positive");
  cfg.fault = j.value("fault", std::string("none"));
  if (cfg.fault != "none" && cfg.fault != "hk5_drop_cover_part" &&
      cfg.fault != "kg_partition_gap")
    throw Error("config: unknown fault '" + cfg.fault + "'");
  if (j.contains("output")) cfg.output = j.at("output").get<std::string>();
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("config: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("config: parse error in " + path + ": " + e.what());
  }
  try {
    return parse_config(j);
  } catch (const nlohmann::json::exception& e) {
    throw Error("config: invalid configuration in " + path + ": " + e.what());
  }
}

nets::GroupAction config_group_action(const RunConfig& cfg) {
  nets::GroupAction act;
  act.group = vna::FiniteGroup::cyclic(cfg.group_order);
  for (int g = 0; g < cfg.group_order; ++g) {
    numkit::CMatrix u = numkit::CMatrix::Zero(cfg.site_dim, cfg.site_dim);
    for (int i = 0; i < cfg.site_dim; ++i)
      u(i, i) = std::polar(1.0, 2.0 * M_PI * cfg.generator_diag_phases[i] * g);
    act.site_unitaries.push_back(u);
  }
  return act;
}

RunResult run_suites(const RunConfig& cfg) {
  report::Report rep;
  std::vector<std::string> suites = cfg.suites;
  if (suites.empty()) {
    if (cfg.kind == "kg_lattice")
      suites = {"kg"};
    else
      suites = {"validate", "bimodularity", "hk"};
  }

  if (cfg.kind == "kg_lattice") {
    nets::KgLatticeConfig kg{cfg.grid_t, cfg.grid_x, cfg.mass};
    for (const auto& s : suites) {
      if (s == "kg") {
        kg.validate();
        nets::KgSuiteOptions opt;
        opt.tol = cfg.tolerance;
        opt.inject_partition_gap = cfg.fault == "kg_partition_gap";
        rep.merge(nets::kg_check_suite(kg, opt));
      } else if (s == "strictness") {
        auto g = mink::build_geometry(
            mink::DiscreteSpacetime::diamond_grid(cfg.grid_t, cfg.grid_x, true));
        auto sr = mink::check_strictness(g, 200000, 7);
        rep.add("strictness", "strict double-category laws of the grid",
                sr.pass, static_cast<double>(sr.checks), sr.violation);
      } else {
        throw Error("config: suite '" + s + "' does not apply to kg_lattice");
      }
    }
  } else {
    functor::NetInput net = nets::build_spin_chain_net(
        nets::SpinChainConfig{cfg.sites, cfg.site_dim});
    std::optional<nets::FixedPointNet> fp;
    if (cfg.kind == "fixed_point") {
      fp = nets::build_fixed_point_net(net, config_group_action(cfg),
                                       cfg.tolerance);
      net = fp->net;
    }
    if (cfg.fault == "hk5_drop_cover_part") {
      for (auto& cover : net.covers)
        if (cover.parts.size() > 2) {
          cover.parts.pop_back();
          break;
        }
    }
    functor::AqftDoubleFunctor f = functor::build_functor(net, cfg.tolerance);
    for (const auto& s : suites) {
      if (s == "validate") {
        rep.merge(functor::validate_net_input(net, cfg.tolerance));
      } else if (s == "bimodularity") {
        functor::BimodularityOptions opt;
        opt.tol = cfg.tolerance;
        rep.merge(functor::check_bimodularity(f, opt));
        rep.merge(functor::check_bimodularity_fault_isolation(f, cfg.tolerance));
      } else if (s == "hk") {
        functor::HkOptions opt;
        opt.tol = cfg.tolerance;
        rep.merge(functor::check_hk(f, opt));
      } else if (s == "unions") {
        const auto& g = net.geom;
        double worst = 0.0;
        int count = 0;
        bool ok = true;
        for (size_t u = 0; u < g.regions.size(); ++u)
          for (size_t v = 0; v < g.regions.size(); ++v) {
            if (g.regions[u].is_ambient || g.regions[v].is_ambient) continue;
            std::vector<int> pts;
            std::set_union(g.regions[u].points.begin(), g.regions[u].points.end(),
                           g.regions[v].points.begin(), g.regions[v].points.end(),
                           std::back_inserter(pts));
            int uv = g.find_region(pts);
            if (uv < 0) continue;
            double res = 0.0;
            ok = functor::check_union_join(f, static_cast<int>(u),
                                           static_cast<int>(v), g.ambient,
                                           cfg.tolerance, &res) &&
                 ok;
            worst = std::max(worst, res);
            ++count;
          }
        rep.add("union-join",
                "binary unions become joins of subalgebra images", ok && count > 0,
                worst, "pairs checked: " + std::to_string(count));
      } else if (s == "additivity") {
        rep.merge(nets::check_open_cover_additivity(net, cfg.tolerance));
      } else if (s == "strictness") {
        auto sr = mink::check_strictness(net.geom, 200000, 7);
        rep.add("strictness", "strict double-category laws of the circle",
                sr.pass, static_cast<double>(sr.checks), sr.violation);
      } else if (s == "transformation") {
        nets::GroupAction act = cfg.kind == "fixed_point"
                                    ? config_group_action(cfg)
                                    : nets::GroupAction{};
        if (cfg.kind != "fixed_point") {
          // default global symmetry: the sign flip on the second basis state
          act.group = vna::FiniteGroup::cyclic(2);
          for (int g2 = 0; g2 < 2; ++g2) {
            numkit::CMatrix u =
                numkit::CMatrix::Identity(cfg.site_dim, cfg.site_dim);
            if (g2 == 1) u(1, 1) = -1.0;
            act.site_unitaries.push_back(u);
          }
        }
        functor::NetInput base = nets::build_spin_chain_net(
            nets::SpinChainConfig{cfg.sites, cfg.site_dim});
        functor::NaturalTransformationData d;
        d.source_net = base;
        d.target_net = base;
        for (size_t r = 0; r < base.geom.regions.size(); ++r) {
          int len = static_cast<int>(base.geom.regions[r].points.size());
          numkit::CMatrix u = numkit::CMatrix::Identity(1, 1);
          for (int i = 0; i < len; ++i)
            u = numkit::kron(u, act.site_unitaries[1]);
          vna::Hom eta{base.obj[r], base.obj[r],
                       Eigen::MatrixXi::Identity(1, 1),
                       vna::AlgElement::from_dense(base.obj[r], u)};
          d.components.push_back(eta);
        }
        auto vt = functor::build_vertical_transformation(d, cfg.tolerance);
        rep.merge(vt.rep);
      } else if (s == "kg") {
        throw Error("config: suite 'kg' applies only to kg_lattice");
      }
    }
  }

  RunResult out;
  out.rep = rep;
  out.json = report::to_json(rep, cfg.echo, cfg.tolerance);
  return out;
}

InfoResult run_info(const RunConfig& cfg) {
  std::ostringstream os;
  if (cfg.kind == "kg_lattice") {
    auto m = mink::DiscreteSpacetime::diamond_grid(cfg.grid_t, cfg.grid_x, true);
    auto regions = mink::regions_of(m);
    int with_classes = 0;
    nets::KgLatticeConfig kg{cfg.grid_t, cfg.grid_x, cfg.mass};
    for (const auto& r : regions)
      if (!nets::eroded_interior(kg, r, 1).empty()) ++with_classes;
    os << "kg lattice " << cfg.grid_t << "x" << cfg.grid_x
       << " (periodic space), mass " << cfg.mass << "\n";
    os << "regions (diamonds + ambient): " << regions.size() << "\n";
    os << "regions with nonempty test-function spaces: " << with_classes << "\n";
  } else {
    functor::NetInput net = nets::build_spin_chain_net(
        nets::SpinChainConfig{cfg.sites, cfg.site_dim});
    if (cfg.kind == "fixed_point")
      net = nets::build_fixed_point_net(net, config_group_action(cfg),
                                        cfg.tolerance)
                .net;
    const auto& g = net.geom;
    os << cfg.kind << " on the circle with " << cfg.sites << " sites\n";
    os << "regions: " << g.regions.size() << " (" << g.regions.size() - 1
       << " proper arcs + ambient)\n";
    os << "embedding arrows: " << g.arrows.size()
       << ", inclusions: " << g.inclusion_arrows.size() << "\n";
    size_t composable = 0;
    for (size_t a = 0; a < g.arrows.size(); ++a)
      for (size_t b = 0; b < g.arrows.size(); ++b)
        if (g.arrows[a].target == g.arrows[b].source) ++composable;
    os << "fusion table size (composable arrow pairs): " << composable << "\n";
    os << "algebra dimensions per region:\n";
    for (size_t r = 0; r < g.regions.size(); ++r) {
      os << "  " << g.regions[r].name << ": blocks [";
      for (int i = 0; i < net.obj[r].num_blocks(); ++i)
        os << (i ? "," : "") << net.obj[r].block_size(i);
      os << "], dim " << net.obj[r].coord_dim() << "\n";
    }
    os << "declared covers: " << net.covers.size()
       << ", disjoint pairs: " << net.disjoint_pairs.size() << "\n";
  }
  return InfoResult{os.str()};
}

GammaResult run_gamma(const RunConfig& cfg) {
  mink::Geometry g;
  if (cfg.kind == "kg_lattice") {
    if (cfg.grid_t * cfg.grid_x > 16)
      throw Error("config: gamma statistics are limited to grids with at most 16 points");
    g = mink::build_geometry(
        mink::DiscreteSpacetime::diamond_grid(cfg.grid_t, cfg.grid_x, true));
  } else {
    g = mink::build_geometry(mink::DiscreteSpacetime::circle(cfg.sites));
  }
  auto thin = mink::to_thin(g);
  auto gens = dbl::marked_generators(thin);
  auto closure = dbl::gamma_closure(thin);
  GammaResult out;
  out.generators = gens.size();
  out.closure = closure.size();
  out.squares = thin.squares.size();
  std::ostringstream os;
  os << "0-marked generators: " << out.generators << "\n";
  os << "squares in the gamma closure: " << out.closure << "\n";
  os << "all commuting squares: " << out.squares << "\n";
  os << "pastings recorded: " << closure.pastings.size() << "\n";
  out.text = os.str();
  return out;
}

}  // namespace aqft::config
