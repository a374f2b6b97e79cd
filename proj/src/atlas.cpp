#include "supergeo/atlas.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "supergeo/errors.hpp"

namespace supergeo {

int SuperManifoldModel::chart_index(const std::string& id) const {
  for (std::size_t i = 0; i < charts.size(); ++i) {
    if (charts[i].id == id) return static_cast<int>(i);
  }
  fail(ErrorKind::Validation, "unknown chart id '" + id + "' in model '" + name + "'");
}

const Chart& SuperManifoldModel::chart(const std::string& id) const {
  return charts[static_cast<std::size_t>(chart_index(id))];
}

const TransitionMap* SuperManifoldModel::find_transition(const std::string& from,
                                                         const std::string& to) const {
  for (const auto& t : transitions) {
    if (t.from == from && t.to == to) return &t;
  }
  return nullptr;
}

int SuperManifoldModel::pi_partner(int chart, int e) const {
  if (!pi || pi->pairing.empty()) return e;
  return pi->pairing.at(static_cast<std::size_t>(chart)).at(static_cast<std::size_t>(e));
}

const MorphismEntry* MorphismModel::entry_for(const std::string& source_chart,
                                              std::span<const double> point) const {
  for (const auto& e : entries) {
    if (e.source_chart == source_chart && satisfies(e.validity, point)) return &e;
  }
  return nullptr;
}

void ValidationReport::record(std::string label, bool ok, double residual, std::string detail) {
  if (!ok) passed = false;
  if (std::isfinite(residual)) max_residual = std::max(max_residual, residual);
  checks.push_back({std::move(label), ok, residual, std::move(detail)});
}

// ===== helpers =====

std::vector<GrassmannElement> lift_point(std::span<const double> point, int generator_count) {
  std::vector<GrassmannElement> out;
  out.reserve(point.size());
  for (double v : point) out.push_back(GrassmannElement::scalar(generator_count, v));
  return out;
}

std::vector<GrassmannElement> generator_basis_vector(int generator_count) {
  std::vector<GrassmannElement> out;
  out.reserve(static_cast<std::size_t>(generator_count));
  for (int i = 0; i < generator_count; ++i) {
    out.push_back(GrassmannElement::generator(generator_count, i));
  }
  return out;
}

std::vector<GrassmannElement> apply_map_super(const std::vector<SuperExpr>& components,
                                              std::span<const GrassmannElement> even_values,
                                              std::span<const GrassmannElement> odd_values) {
  std::vector<GrassmannElement> out;
  out.reserve(components.size());
  for (const auto& c : components) out.push_back(eval_super(c, even_values, odd_values));
  return out;
}

std::vector<double> apply_map_body(const std::vector<SuperExpr>& even_components,
                                   const CoordinateSystem& coords,
                                   std::span<const double> point) {
  std::vector<double> out;
  out.reserve(even_components.size());
  for (const auto& c : even_components) out.push_back(eval_scalar(body_expr(c, coords), point));
  return out;
}

bool satisfies(const std::vector<SuperExpr>& predicate, std::span<const double> point) {
  for (const auto& p : predicate) {
    if (!(eval_scalar(p, point) > 0.0)) return false;
  }
  return true;
}

Eigen::MatrixXd reduced_even_block(const std::vector<SuperExpr>& even_components,
                                   const CoordinateSystem& coords,
                                   std::span<const double> point) {
  const BlockJacobian j =
      jacobian_blocks(even_components, static_cast<int>(even_components.size()), coords);
  return reduce_block(j.ee, coords, point);
}

Eigen::MatrixXd reduced_odd_block(const std::vector<SuperExpr>& odd_components,
                                  const CoordinateSystem& coords,
                                  std::span<const double> point) {
  const BlockJacobian j = jacobian_blocks(odd_components, 0, coords);
  return reduce_block(j.oo, coords, point);
}

namespace {

std::string point_str(std::span<const double> p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(p[i]);
  }
  return s + ")";
}

// Even components must normalize to even parity; odd ones to odd parity or
// to nothing at all (an identically zero component is a legal odd map).
bool parity_ok(const std::vector<SuperExpr>& comps, const CoordinateSystem& cs, bool want_odd) {
  for (const auto& c : comps) {
    const OddPolynomialForm f = normalize(c, cs);
    if (f.coefficients().empty()) continue;
    const Parity p = parity_of(f);
    if (want_odd ? p != Parity::Odd : p != Parity::Even) return false;
  }
  return true;
}

double max_tuple_diff(const std::vector<GrassmannElement>& a,
                      const std::vector<GrassmannElement>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, max_abs_coefficient_diff(a[i], b[i]));
  }
  return m;
}

void check_structure(const SuperManifoldModel& model) {
  if (model.charts.empty()) {
    fail(ErrorKind::Validation, "model '" + model.name + "' has no charts");
  }
  std::set<std::string> ids;
  for (const auto& ch : model.charts) {
    if (ch.id.empty()) fail(ErrorKind::Validation, "empty chart id in model '" + model.name + "'");
    if (!ids.insert(ch.id).second) {
      fail(ErrorKind::Validation, "duplicate chart id '" + ch.id + "'");
    }
    if (ch.coords.even_count() != model.even_dim || ch.coords.odd_count() != model.odd_dim) {
      fail(ErrorKind::Validation,
           "chart '" + ch.id + "' has dimension " + std::to_string(ch.coords.even_count()) + "|" +
               std::to_string(ch.coords.odd_count()) + ", model declares " +
               std::to_string(model.even_dim) + "|" + std::to_string(model.odd_dim));
    }
  }
  for (const auto& t : model.transitions) {
    model.chart_index(t.from);
    model.chart_index(t.to);
    if (static_cast<int>(t.even_components.size()) != model.even_dim ||
        static_cast<int>(t.odd_components.size()) != model.odd_dim) {
      fail(ErrorKind::Validation, "transition " + t.from + "->" + t.to +
                                      " has the wrong number of components");
    }
  }
  for (const auto& tr : model.triples) {
    for (const auto* leg : {&tr.a, &tr.b, &tr.c}) model.chart_index(*leg);
    if (!model.find_transition(tr.a, tr.b) || !model.find_transition(tr.b, tr.c) ||
        !model.find_transition(tr.a, tr.c)) {
      fail(ErrorKind::Validation, "triple overlap " + tr.a + "," + tr.b + "," + tr.c +
                                      " references a missing transition");
    }
  }
  if (model.pi && !model.pi->pairing.empty()) {
    if (model.even_dim != model.odd_dim) {
      fail(ErrorKind::Validation, "pi pairing requires equal even and odd dimension");
    }
    if (model.pi->pairing.size() != model.charts.size()) {
      fail(ErrorKind::Validation, "pi pairing must list every chart");
    }
    for (const auto& p : model.pi->pairing) {
      std::vector<bool> hit(static_cast<std::size_t>(model.odd_dim), false);
      if (static_cast<int>(p.size()) != model.even_dim) {
        fail(ErrorKind::Validation, "pi pairing row has the wrong length");
      }
      for (int o : p) {
        if (o < 0 || o >= model.odd_dim || hit[static_cast<std::size_t>(o)]) {
          fail(ErrorKind::Validation, "pi pairing row is not a permutation");
        }
        hit[static_cast<std::size_t>(o)] = true;
      }
    }
  }
}

}  // namespace

ValidationReport validate_model(const SuperManifoldModel& model, double tol) {
  check_structure(model);
  ValidationReport rep;
  const int n = model.odd_dim;

  for (const auto& t : model.transitions) {
    const std::string label = t.from + "->" + t.to;
    const Chart& src = model.chart(t.from);
    const Chart& dst = model.chart(t.to);
    const CoordinateSystem& cs = src.coords;

    rep.record("parity:" + label,
               parity_ok(t.even_components, cs, false) && parity_ok(t.odd_components, cs, true),
               0.0);

    const TransitionMap* rev = model.find_transition(t.to, t.from);
    rep.record("reverse-exists:" + label, rev != nullptr, 0.0,
               rev ? "" : "transition set is not closed under inversion");

    for (std::size_t ci = 0; ci < t.overlaps.size(); ++ci) {
      const OverlapComponent& comp = t.overlaps[ci];
      for (std::size_t si = 0; si < comp.samples.size(); ++si) {
        const std::vector<double>& s = comp.samples[si];
        const std::string where =
            label + " component " + std::to_string(ci) + " sample " + std::to_string(si);
        if (static_cast<int>(s.size()) != model.even_dim) {
          fail(ErrorKind::Validation, "sample of the wrong dimension at " + where);
        }
        try {
          rep.record("sample-in-domain:" + where,
                     satisfies(comp.predicate, s) && satisfies(src.domain, s), 0.0,
                     point_str(s));

          const std::vector<double> q = apply_map_body(t.even_components, cs, s);
          rep.record("image-in-target:" + where, satisfies(dst.domain, q), 0.0, point_str(q));

          const Eigen::MatrixXd E = reduced_even_block(t.even_components, cs, s);
          const Eigen::MatrixXd O = reduced_odd_block(t.odd_components, cs, s);
          const double de = model.even_dim ? E.determinant() : 1.0;
          const double dodd = n ? O.determinant() : 1.0;
          rep.record("nonsingular:" + where, std::abs(de) > tol && std::abs(dodd) > tol, 0.0,
                     "det even " + std::to_string(de) + ", det odd " + std::to_string(dodd));

          if (rev) {
            const auto even_in = lift_point(s, n);
            const auto odd_in = generator_basis_vector(n);
            const auto mid_e = apply_map_super(t.even_components, even_in, odd_in);
            const auto mid_o = apply_map_super(t.odd_components, even_in, odd_in);
            const auto back_e = apply_map_super(rev->even_components, mid_e, mid_o);
            const auto back_o = apply_map_super(rev->odd_components, mid_e, mid_o);
            const double r =
                std::max(max_tuple_diff(back_e, even_in), max_tuple_diff(back_o, odd_in));
            rep.record("inverse:" + where, r <= tol, r);

            Eigen::MatrixXd re = Eigen::MatrixXd::Zero(0, 0);
            double rr = 0.0;
            if (model.even_dim) {
              re = reduced_even_block(rev->even_components, dst.coords, q);
              rr = (re * E - Eigen::MatrixXd::Identity(model.even_dim, model.even_dim))
                       .cwiseAbs()
                       .maxCoeff();
            }
            double ro = 0.0;
            if (n) {
              const Eigen::MatrixXd roB = reduced_odd_block(rev->odd_components, dst.coords, q);
              ro = (roB * O - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
            }
            rep.record("block-inverse:" + where, std::max(rr, ro) <= 10 * tol, std::max(rr, ro));
          }

          if (model.pi) {
            const int ci_from = model.chart_index(t.from);
            const int ci_to = model.chart_index(t.to);
            double r = 0.0;
            for (int i = 0; i < model.even_dim; ++i) {
              for (int j = 0; j < model.even_dim; ++j) {
                const double lhs = E(i, j);
                const double rhs = O(model.pi_partner(ci_to, i), model.pi_partner(ci_from, j));
                r = std::max(r, std::abs(lhs - rhs));
              }
            }
            rep.record("pi-blocks:" + where, r <= tol, r);
          }
        } catch (const Error& err) {
          rep.record("evaluation:" + where, false, std::numeric_limits<double>::quiet_NaN(),
                     err.what());
        }
      }
    }
  }

  for (const auto& tr : model.triples) {
    const TransitionMap* ab = model.find_transition(tr.a, tr.b);
    const TransitionMap* bc = model.find_transition(tr.b, tr.c);
    const TransitionMap* ac = model.find_transition(tr.a, tr.c);
    for (std::size_t si = 0; si < tr.samples.size(); ++si) {
      const std::vector<double>& s = tr.samples[si];
      const std::string where =
          tr.a + "->" + tr.b + "->" + tr.c + " sample " + std::to_string(si);
      try {
        const auto even_in = lift_point(s, n);
        const auto odd_in = generator_basis_vector(n);
        const auto mid_e = apply_map_super(ab->even_components, even_in, odd_in);
        const auto mid_o = apply_map_super(ab->odd_components, even_in, odd_in);
        const auto via_e = apply_map_super(bc->even_components, mid_e, mid_o);
        const auto via_o = apply_map_super(bc->odd_components, mid_e, mid_o);
        const auto direct_e = apply_map_super(ac->even_components, even_in, odd_in);
        const auto direct_o = apply_map_super(ac->odd_components, even_in, odd_in);
        const double r =
            std::max(max_tuple_diff(via_e, direct_e), max_tuple_diff(via_o, direct_o));
        rep.record("cocycle:" + where, r <= tol, r);
      } catch (const Error& err) {
        rep.record("cocycle:" + where, false, std::numeric_limits<double>::quiet_NaN(),
                   err.what());
      }
    }
  }
  return rep;
}

ValidationReport validate_morphism(const MorphismModel& f, double tol) {
  check_structure(f.source);
  check_structure(f.target);
  ValidationReport rep;
  const int n_src = f.source.odd_dim;

  for (std::size_t ei = 0; ei < f.entries.size(); ++ei) {
    const MorphismEntry& e = f.entries[ei];
    const Chart& src = f.source.chart(e.source_chart);
    const Chart& dst = f.target.chart(e.target_chart);
    if (static_cast<int>(e.even_components.size()) != f.target.even_dim ||
        static_cast<int>(e.odd_components.size()) != f.target.odd_dim) {
      fail(ErrorKind::Validation, "morphism entry " + e.source_chart + "->" + e.target_chart +
                                      " has the wrong number of components");
    }
    const std::string label =
        e.source_chart + "->" + e.target_chart + " entry " + std::to_string(ei);
    rep.record("parity:" + label,
               parity_ok(e.even_components, src.coords, false) &&
                   parity_ok(e.odd_components, src.coords, true),
               0.0);
    for (std::size_t si = 0; si < e.samples.size(); ++si) {
      const std::vector<double>& s = e.samples[si];
      const std::string where = label + " sample " + std::to_string(si);
      try {
        rep.record("sample-in-domain:" + where,
                   satisfies(e.validity, s) && satisfies(src.domain, s), 0.0, point_str(s));
        const std::vector<double> q = apply_map_body(e.even_components, src.coords, s);
        rep.record("image-in-target:" + where, satisfies(dst.domain, q), 0.0, point_str(q));
      } catch (const Error& err) {
        rep.record("evaluation:" + where, false, std::numeric_limits<double>::quiet_NaN(),
                   err.what());
      }
    }
  }

  // Compatibility across source charts: mapping after a transition must agree
  // with transitioning the image, wherever both entries apply.
  for (const auto& t : f.source.transitions) {
    for (const auto& ei : f.entries) {
      if (ei.source_chart != t.from) continue;
      for (const auto& ej : f.entries) {
        if (ej.source_chart != t.to) continue;
        for (std::size_t ci = 0; ci < t.overlaps.size(); ++ci) {
          const OverlapComponent& comp = t.overlaps[ci];
          for (std::size_t si = 0; si < comp.samples.size(); ++si) {
            const std::vector<double>& p = comp.samples[si];
            const std::string where = ei.source_chart + "->" + ej.source_chart + " component " +
                                      std::to_string(ci) + " sample " + std::to_string(si);
            try {
              if (!satisfies(comp.predicate, p) || !satisfies(ei.validity, p)) continue;
              const CoordinateSystem& cs = f.source.chart(t.from).coords;
              const std::vector<double> pj = apply_map_body(t.even_components, cs, p);
              if (!satisfies(ej.validity, pj)) continue;

              const auto even_in = lift_point(p, n_src);
              const auto odd_in = generator_basis_vector(n_src);
              const auto mid_e = apply_map_super(t.even_components, even_in, odd_in);
              const auto mid_o = apply_map_super(t.odd_components, even_in, odd_in);
              const auto lhs_e = apply_map_super(ej.even_components, mid_e, mid_o);
              const auto lhs_o = apply_map_super(ej.odd_components, mid_e, mid_o);

              auto img_e = apply_map_super(ei.even_components, even_in, odd_in);
              auto img_o = apply_map_super(ei.odd_components, even_in, odd_in);
              if (ei.target_chart != ej.target_chart) {
                const TransitionMap* g =
                    f.target.find_transition(ei.target_chart, ej.target_chart);
                if (!g) {
                  rep.record("compat:" + where, false,
                             std::numeric_limits<double>::quiet_NaN(),
                             "no target transition " + ei.target_chart + "->" + ej.target_chart);
                  continue;
                }
                auto moved_e = apply_map_super(g->even_components, img_e, img_o);
                auto moved_o = apply_map_super(g->odd_components, img_e, img_o);
                img_e = std::move(moved_e);
                img_o = std::move(moved_o);
              }
              const double r =
                  std::max(max_tuple_diff(lhs_e, img_e), max_tuple_diff(lhs_o, img_o));
              rep.record("compat:" + where, r <= tol, r);
            } catch (const Error& err) {
              rep.record("compat:" + where, false, std::numeric_limits<double>::quiet_NaN(),
                         err.what());
            }
          }
        }
      }
    }
  }
  return rep;
}

MorphismValue evaluate_morphism(const MorphismModel& f, const std::string& chart,
                                std::span<const double> point) {
  const MorphismEntry* e = f.entry_for(chart, point);
  if (!e) {
    fail(ErrorKind::Domain, "morphism '" + f.name + "' has no entry covering chart '" + chart +
                                "' at the given point");
  }
  const CoordinateSystem& cs = f.source.chart(chart).coords;
  MorphismValue out;
  out.chart = e->target_chart;
  out.body = apply_map_body(e->even_components, cs, point);
  out.even_block = reduced_even_block(e->even_components, cs, point);
  out.odd_block = reduced_odd_block(e->odd_components, cs, point);
  return out;
}

MorphismModel compose_morphisms(const MorphismModel& f, const MorphismModel& g) {
  if (f.target.even_dim != g.source.even_dim || f.target.odd_dim != g.source.odd_dim) {
    fail(ErrorKind::Validation, "cannot compose '" + f.name + "' into '" + g.name +
                                    "': middle dimensions disagree");
  }
  MorphismModel out;
  out.name = f.name + ";" + g.name;
  out.source = f.source;
  out.target = g.target;
  for (const auto& ef : f.entries) {
    for (const auto& eg : g.entries) {
      if (eg.source_chart != ef.target_chart) continue;
      MorphismEntry e;
      e.source_chart = ef.source_chart;
      e.target_chart = eg.target_chart;
      for (const auto& c : eg.even_components) {
        e.even_components.push_back(substitute(c, ef.even_components, ef.odd_components));
      }
      for (const auto& c : eg.odd_components) {
        e.odd_components.push_back(substitute(c, ef.even_components, ef.odd_components));
      }
      e.validity = ef.validity;
      const CoordinateSystem& cs = f.source.chart(ef.source_chart).coords;
      for (const auto& v : eg.validity) {
        e.validity.push_back(
            body_expr(substitute(v, ef.even_components, ef.odd_components), cs));
      }
      for (const auto& s : ef.samples) {
        bool ok = true;
        try {
          ok = satisfies(e.validity, s);
        } catch (const Error&) {
          ok = false;
        }
        if (ok) e.samples.push_back(s);
      }
      out.entries.push_back(std::move(e));
    }
  }
  return out;
}

MorphismModel identity_morphism(const SuperManifoldModel& model) {
  MorphismModel out;
  out.name = "id_" + model.name;
  out.source = model;
  out.target = model;
  for (const auto& ch : model.charts) {
    MorphismEntry e;
    e.source_chart = ch.id;
    e.target_chart = ch.id;
    for (int i = 0; i < model.even_dim; ++i) e.even_components.push_back(ex::even_var(i));
    for (int i = 0; i < model.odd_dim; ++i) e.odd_components.push_back(ex::odd_var(i));
    e.samples = ch.interior_samples;
    out.entries.push_back(std::move(e));
  }
  return out;
}

namespace {

std::vector<int> iota_vec(int count, int offset) {
  std::vector<int> v(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) v[static_cast<std::size_t>(i)] = offset + i;
  return v;
}

std::vector<std::vector<double>> cross_samples(const std::vector<std::vector<double>>& a,
                                               const std::vector<std::vector<double>>& b) {
  std::vector<std::vector<double>> out;
  for (const auto& x : a) {
    for (const auto& y : b) {
      std::vector<double> s = x;
      s.insert(s.end(), y.begin(), y.end());
      out.push_back(std::move(s));
    }
  }
  return out;
}

std::vector<std::vector<double>> all_overlap_samples(const TransitionMap& t) {
  std::vector<std::vector<double>> out;
  for (const auto& c : t.overlaps) out.insert(out.end(), c.samples.begin(), c.samples.end());
  return out;
}

}  // namespace

SuperManifoldModel product_model(const SuperManifoldModel& left, const SuperManifoldModel& right,
                                 const std::string& name) {
  SuperManifoldModel out;
  out.name = name;
  out.description = "product of " + left.name + " and " + right.name;
  out.even_dim = left.even_dim + right.even_dim;
  out.odd_dim = left.odd_dim + right.odd_dim;
  out.compact_body = left.compact_body && right.compact_body;
  out.product_of = SuperManifoldModel::Product{
      std::make_shared<const SuperManifoldModel>(left),
      std::make_shared<const SuperManifoldModel>(right)};

  const std::vector<int> r_even = iota_vec(right.even_dim, left.even_dim);
  const std::vector<int> r_odd = iota_vec(right.odd_dim, left.odd_dim);
  const auto shift_r = [&](const SuperExpr& e) { return remap_variables(e, r_even, r_odd); };
  const auto shift_all = [&](const std::vector<SuperExpr>& v) {
    std::vector<SuperExpr> out2;
    out2.reserve(v.size());
    for (const auto& e : v) out2.push_back(shift_r(e));
    return out2;
  };

  for (const auto& a : left.charts) {
    for (const auto& b : right.charts) {
      Chart ch{a.id + "." + b.id,
               CoordinateSystem::standard(out.even_dim, out.odd_dim),
               a.domain,
               cross_samples(a.interior_samples, b.interior_samples),
               a.seed_box};
      for (const auto& p : b.domain) ch.domain.push_back(shift_r(p));
      ch.seed_box.insert(ch.seed_box.end(), b.seed_box.begin(), b.seed_box.end());
      out.charts.push_back(std::move(ch));
    }
  }

  // Identity components for a fixed factor chart.
  const auto left_identity = [&](std::vector<SuperExpr>& even, std::vector<SuperExpr>& odd) {
    for (int i = 0; i < left.even_dim; ++i) even.push_back(ex::even_var(i));
    for (int i = 0; i < left.odd_dim; ++i) odd.push_back(ex::odd_var(i));
  };
  const auto right_identity = [&](std::vector<SuperExpr>& even, std::vector<SuperExpr>& odd) {
    for (int i = 0; i < right.even_dim; ++i) even.push_back(ex::even_var(left.even_dim + i));
    for (int i = 0; i < right.odd_dim; ++i) odd.push_back(ex::odd_var(left.odd_dim + i));
  };

  // Left-factor moves, right chart fixed.
  for (const auto& tA : left.transitions) {
    for (const auto& b : right.charts) {
      TransitionMap t;
      t.from = tA.from + "." + b.id;
      t.to = tA.to + "." + b.id;
      t.even_components = tA.even_components;
      t.odd_components = tA.odd_components;
      right_identity(t.even_components, t.odd_components);
      for (const auto& comp : tA.overlaps) {
        OverlapComponent c;
        c.predicate = comp.predicate;
        c.samples = cross_samples(comp.samples, b.interior_samples);
        t.overlaps.push_back(std::move(c));
      }
      out.transitions.push_back(std::move(t));
    }
  }

  // Right-factor moves, left chart fixed.
  for (const auto& a : left.charts) {
    for (const auto& tB : right.transitions) {
      TransitionMap t;
      t.from = a.id + "." + tB.from;
      t.to = a.id + "." + tB.to;
      left_identity(t.even_components, t.odd_components);
      for (const auto& c2 : shift_all(tB.even_components)) t.even_components.push_back(c2);
      for (const auto& c2 : shift_all(tB.odd_components)) t.odd_components.push_back(c2);
      for (const auto& comp : tB.overlaps) {
        OverlapComponent c;
        c.predicate = shift_all(comp.predicate);
        c.samples = cross_samples(a.interior_samples, comp.samples);
        t.overlaps.push_back(std::move(c));
      }
      out.transitions.push_back(std::move(t));
    }
  }

  // Diagonal moves, both factors transitioning at once.
  for (const auto& tA : left.transitions) {
    for (const auto& tB : right.transitions) {
      TransitionMap t;
      t.from = tA.from + "." + tB.from;
      t.to = tA.to + "." + tB.to;
      t.even_components = tA.even_components;
      t.odd_components = tA.odd_components;
      for (const auto& c2 : shift_all(tB.even_components)) t.even_components.push_back(c2);
      for (const auto& c2 : shift_all(tB.odd_components)) t.odd_components.push_back(c2);
      for (const auto& compA : tA.overlaps) {
        for (const auto& compB : tB.overlaps) {
          OverlapComponent c;
          c.predicate = compA.predicate;
          for (const auto& p : shift_all(compB.predicate)) c.predicate.push_back(p);
          c.samples = cross_samples(compA.samples, compB.samples);
          t.overlaps.push_back(std::move(c));
        }
      }
      out.transitions.push_back(std::move(t));

      TripleOverlap tr;
      tr.a = tA.from + "." + tB.from;
      tr.b = tA.to + "." + tB.from;
      tr.c = tA.to + "." + tB.to;
      tr.samples = cross_samples(all_overlap_samples(tA), all_overlap_samples(tB));
      out.triples.push_back(std::move(tr));
    }
  }

  if (left.pi && right.pi) {
    PiStructure pi;
    for (const auto& a : left.charts) {
      for (const auto& b : right.charts) {
        const int ai = left.chart_index(a.id);
        const int bi = right.chart_index(b.id);
        std::vector<int> row;
        row.reserve(static_cast<std::size_t>(out.even_dim));
        for (int e = 0; e < left.even_dim; ++e) row.push_back(left.pi_partner(ai, e));
        for (int e = 0; e < right.even_dim; ++e) {
          row.push_back(left.odd_dim + right.pi_partner(bi, e));
        }
        pi.pairing.push_back(std::move(row));
      }
    }
    out.pi = std::move(pi);
  }
  return out;
}

std::vector<SuperExpr> tangent_lift_odd(const std::vector<SuperExpr>& even_components,
                                        const CoordinateSystem& coords) {
  if (coords.even_count() != coords.odd_count()) {
    fail(ErrorKind::Dimension, "tangent lift needs as many odd as even coordinates");
  }
  std::vector<SuperExpr> out;
  out.reserve(even_components.size());
  for (const auto& g : even_components) {
    std::vector<SuperExpr> terms;
    for (int j = 0; j < coords.even_count(); ++j) {
      terms.push_back(ex::mul(diff_even(g, coords, j), ex::odd_var(j)));
    }
    out.push_back(ex::add(std::move(terms)));
  }
  return out;
}

}  // namespace supergeo
