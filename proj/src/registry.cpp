#include "supergeo/registry.hpp"

#include "supergeo/errors.hpp"

namespace supergeo {

// All circle-based models below use the same two-chart atlas of S^1: charts P
// and Q with one even coordinate each, glued over the two arcs u > 0 and
// u < 0 by v = -1/u.  That formula is orientation-preserving on both arcs
// (dv/du = 1/u^2) and is its own inverse, so every twist lives in the extra
// components, never in the circle coordinate itself.  Twisted components
// multiply by u (sign flips between the arcs); untwisted ones copy through.
// Samples are u = +-1 and +-2: the first sample of the u < 0 arc makes a
// twisted reduced block exactly [[-1]].

namespace {

struct CircleSpec {
  std::string name;
  std::string description;
  int extra_even = 0;  // fiber coordinates besides the circle coordinate
  int odd = 0;
  bool twist_even = false;  // fiber even coordinate: t = u*s instead of t = s
  bool twist_odd = false;   // odd coordinate: eta = u*xi instead of eta = xi
  bool pi_odd = false;      // eta = xi/u^2, pairing it with the circle even
  bool compact = false;
};

std::vector<std::vector<double>> pad_points(const std::vector<double>& firsts, int m) {
  // Fiber fill-in values; arbitrary but fixed and away from zero.
  const double fill[] = {0.3, -0.4};
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < firsts.size(); ++i) {
    std::vector<double> p{firsts[i]};
    for (int j = 1; j < m; ++j) p.push_back(fill[(i + static_cast<std::size_t>(j)) % 2]);
    out.push_back(std::move(p));
  }
  return out;
}

SuperManifoldModel build_circle(const CircleSpec& spec) {
  const int m = 1 + spec.extra_even;
  const int n = spec.odd;
  SuperManifoldModel model;
  model.name = spec.name;
  model.description = spec.description;
  model.even_dim = m;
  model.odd_dim = n;
  model.compact_body = spec.compact;

  std::vector<std::pair<double, double>> box(1, {-2.5, 2.5});
  for (int j = 1; j < m; ++j) box.emplace_back(-2.0, 2.0);
  for (const char* id : {"P", "Q"}) {
    model.charts.push_back(Chart{id, CoordinateSystem::standard(m, n), {},
                                 pad_points({0.5, -0.5}, m), box});
  }

  // direction: +1 for P->Q, -1 for Q->P.  The reverse of t = u*s is
  // s = -v*t, and of eta = u*xi is xi = -v*eta; the pi-twist eta = xi/u^2 is
  // symmetric.
  const auto make_transition = [&](int direction) {
    TransitionMap t;
    t.from = direction > 0 ? "P" : "Q";
    t.to = direction > 0 ? "Q" : "P";
    const SuperExpr u = ex::even_var(0);
    t.even_components.push_back(ex::div(ex::constant(-1.0), u));
    for (int j = 1; j < m; ++j) {
      SuperExpr c = ex::even_var(j);
      if (spec.twist_even) c = ex::mul(ex::constant(static_cast<double>(direction)), ex::mul(u, c));
      t.even_components.push_back(c);
    }
    for (int j = 0; j < n; ++j) {
      SuperExpr c = ex::odd_var(j);
      if (spec.twist_odd) c = ex::mul(ex::constant(static_cast<double>(direction)), ex::mul(u, c));
      if (spec.pi_odd) c = ex::div(c, ex::pow(u, 2));
      t.odd_components.push_back(c);
    }
    t.overlaps.push_back(OverlapComponent{{u}, pad_points({1.0, 2.0}, m)});
    t.overlaps.push_back(OverlapComponent{{ex::neg(u)}, pad_points({-1.0, -2.0}, m)});
    return t;
  };
  model.transitions.push_back(make_transition(+1));
  model.transitions.push_back(make_transition(-1));

  if (spec.pi_odd) model.pi = PiStructure{};
  return model;
}

SuperManifoldModel build(const std::string& name) {
  if (name == "S1_trivial") {
    return build_circle({"S1_trivial", "circle with an untwisted odd line", 0, 1, false, false,
                         false, true});
  }
  if (name == "PiS1") {
    return build_circle({"PiS1", "circle with the odd line glued like the tangent bundle", 0, 1,
                         false, false, true, true});
  }
  if (name == "N11") {
    return build_circle({"N11", "circle with a Moebius-twisted odd line", 0, 1, false, true,
                         false, true});
  }
  if (name == "K21") {
    return build_circle({"K21", "Moebius strip body with an untwisted odd line", 1, 1, true,
                         false, false, false});
  }
  if (name == "S21") {
    return build_circle({"S21", "Moebius strip body with the odd line twisting along", 1, 1,
                         true, true, false, false});
  }
  if (name == "C32") {
    return product_model(build("N11"), build("K21"), "C32");
  }
  if (name == "T2_pi") {
    return product_model(build("PiS1"), build("PiS1"), "T2_pi");
  }
  if (name == "line") return line_model();
  fail(ErrorKind::Usage, "unknown model '" + name + "'");
}

}  // namespace

std::vector<std::string> registry_names() {
  return {"S1_trivial", "PiS1", "N11", "K21", "S21", "C32", "T2_pi", "line"};
}

SuperManifoldModel registry_model(const std::string& name) { return build(name); }

SuperManifoldModel line_model() {
  SuperManifoldModel model;
  model.name = "line";
  model.description = "the real line, one chart, no gluing";
  model.even_dim = 1;
  model.odd_dim = 0;
  model.compact_body = false;
  model.charts.push_back(Chart{"R", CoordinateSystem::standard(1, 0), {},
                               {{0.0}, {1.0}, {0.5}}, {{-0.5, 1.5}}});
  return model;
}

}  // namespace supergeo
