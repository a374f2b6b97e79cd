#include "supergeo/intersection.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

#include "supergeo/errors.hpp"
#include "supergeo/orientation.hpp"

namespace supergeo {

namespace {

const SubmanifoldSlice* slice_for(const SubmanifoldModel& z, const std::string& chart) {
  for (const auto& s : z.slices) {
    if (s.chart == chart) return &s;
  }
  return nullptr;
}

void check_partition(const std::vector<int>& zero, const std::vector<int>& frame, int dim,
                     const std::string& what, const std::string& chart) {
  std::vector<bool> hit(static_cast<std::size_t>(dim), false);
  const auto take = [&](int i, const char* role) {
    if (i < 0 || i >= dim) {
      fail(ErrorKind::Validation, what + " index " + std::to_string(i) + " out of range on '" +
                                      chart + "'");
    }
    if (hit[static_cast<std::size_t>(i)]) {
      fail(ErrorKind::Validation, what + " coordinate " + std::to_string(i) + " listed twice (" +
                                      role + ") on '" + chart + "'");
    }
    hit[static_cast<std::size_t>(i)] = true;
  };
  for (int i : zero) take(i, "pinned");
  for (int i : frame) take(i, "retained");
  for (int i = 0; i < dim; ++i) {
    if (!hit[static_cast<std::size_t>(i)]) {
      fail(ErrorKind::Validation, what + " coordinate " + std::to_string(i) +
                                      " neither pinned nor retained on '" + chart + "'");
    }
  }
}

void check_submanifold(const SubmanifoldModel& z) {
  if (z.slices.empty()) {
    fail(ErrorKind::Validation, "submanifold '" + z.name + "' has no carrier charts");
  }
  std::set<std::string> seen;
  for (const auto& s : z.slices) {
    z.ambient.chart_index(s.chart);
    if (!seen.insert(s.chart).second) {
      fail(ErrorKind::Validation, "duplicate carrier chart '" + s.chart + "'");
    }
    if (s.zero_even.size() != z.slices[0].zero_even.size() ||
        s.zero_odd.size() != z.slices[0].zero_odd.size()) {
      fail(ErrorKind::Validation, "slice codimension differs between carrier charts of '" +
                                      z.name + "'");
    }
    check_partition(s.zero_even, s.frame_even, z.ambient.even_dim, "even", s.chart);
    check_partition(s.zero_odd, s.frame_odd, z.ambient.odd_dim, "odd", s.chart);
  }
}

void check_setup(const MorphismModel& f, const SubmanifoldModel& z) {
  check_submanifold(z);
  if (f.target.even_dim != z.ambient.even_dim || f.target.odd_dim != z.ambient.odd_dim) {
    fail(ErrorKind::Validation, "morphism target and ambient model dimensions disagree");
  }
  if (f.source.even_dim != z.even_codim() || f.source.odd_dim != z.odd_codim()) {
    fail(ErrorKind::Dimension,
         "source dimension " + std::to_string(f.source.even_dim) + "|" +
             std::to_string(f.source.odd_dim) + " does not complement the slice codimension " +
             std::to_string(z.even_codim()) + "|" + std::to_string(z.odd_codim()));
  }
  if (!f.source.compact_body) {
    fail(ErrorKind::Validation, "intersection counting requires a compact source body");
  }
  if (!z.closed_body) {
    fail(ErrorKind::Validation, "the submanifold body must be declared closed");
  }
}

bool in_box(const Chart& ch, std::span<const double> x, double inflate) {
  for (std::size_t d = 0; d < ch.seed_box.size(); ++d) {
    const auto [lo, hi] = ch.seed_box[d];
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo) * inflate;
    if (std::abs(x[d] - c) > h) return false;
  }
  return true;
}

std::string point_str(std::span<const double> p) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
  os << ")";
  return os.str();
}

// Scalar residual/Jacobian expressions precomputed once per search so the
// Newton loop only evaluates.
struct ScalarSystem {
  std::vector<SuperExpr> f;                   // body expressions
  std::vector<std::vector<SuperExpr>> df;     // df[i][j] = d f_i / d x_j

  static ScalarSystem build(const std::vector<SuperExpr>& comps, const CoordinateSystem& cs) {
    ScalarSystem s;
    for (const auto& c : comps) s.f.push_back(body_expr(c, cs));
    for (const auto& b : s.f) {
      std::vector<SuperExpr> row;
      for (int j = 0; j < cs.even_count(); ++j) row.push_back(diff_even(b, cs, j));
      s.df.push_back(std::move(row));
    }
    return s;
  }

  bool residual(std::span<const double> x, Eigen::VectorXd* out) const {
    out->resize(static_cast<Eigen::Index>(f.size()));
    try {
      for (std::size_t i = 0; i < f.size(); ++i) {
        (*out)(static_cast<Eigen::Index>(i)) = eval_scalar(f[i], x);
      }
    } catch (const Error&) {
      return false;
    }
    return out->allFinite();
  }

  bool jacobian(std::span<const double> x, Eigen::MatrixXd* out) const {
    out->resize(static_cast<Eigen::Index>(df.size()),
                static_cast<Eigen::Index>(df.empty() ? 0 : df[0].size()));
    try {
      for (std::size_t i = 0; i < df.size(); ++i) {
        for (std::size_t j = 0; j < df[i].size(); ++j) {
          (*out)(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
              eval_scalar(df[i][j], x);
        }
      }
    } catch (const Error&) {
      return false;
    }
    return out->allFinite();
  }
};

std::vector<std::vector<double>> grid_newton(
    const Chart& chart, const ScalarSystem& sys,
    const std::function<bool(std::span<const double>)>& admissible, int density,
    double newton_tol, int* skipped) {
  const int dim = chart.coords.even_count();
  if (static_cast<int>(chart.seed_box.size()) != dim) {
    fail(ErrorKind::Validation, "chart '" + chart.id + "' has no usable seed box");
  }
  if (density < 2) fail(ErrorKind::Validation, "grid density must be at least 2");

  std::vector<std::vector<double>> roots;
  std::vector<int> idx(static_cast<std::size_t>(dim), 0);
  while (true) {
    std::vector<double> x(static_cast<std::size_t>(dim));
    for (int d = 0; d < dim; ++d) {
      const auto [lo, hi] = chart.seed_box[static_cast<std::size_t>(d)];
      x[static_cast<std::size_t>(d)] =
          lo + (hi - lo) * (idx[static_cast<std::size_t>(d)] + 0.5) / density;
    }

    bool converged = false, abandoned = false;
    Eigen::VectorXd F;
    Eigen::MatrixXd J;
    for (int it = 0; it < 60; ++it) {
      if (!sys.residual(x, &F)) {
        abandoned = true;
        break;
      }
      if (F.lpNorm<Eigen::Infinity>() < newton_tol) {
        converged = true;
        break;
      }
      if (!sys.jacobian(x, &J)) {
        abandoned = true;
        break;
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
      if (!lu.isInvertible()) {
        abandoned = true;  // singular Newton matrix at this seed
        break;
      }
      const Eigen::VectorXd step = lu.solve(F);
      if (!step.allFinite() || step.lpNorm<Eigen::Infinity>() > 1e8) {
        abandoned = true;
        break;
      }
      for (int d = 0; d < dim; ++d) x[static_cast<std::size_t>(d)] -= step(d);
      if (!in_box(chart, x, 20.0)) {
        abandoned = true;  // wandered far outside the chart's region
        break;
      }
    }
    if (abandoned && skipped) ++*skipped;
    if (converged && admissible(x)) roots.push_back(std::move(x));

    int d = 0;
    for (; d < dim; ++d) {
      if (++idx[static_cast<std::size_t>(d)] < density) break;
      idx[static_cast<std::size_t>(d)] = 0;
    }
    if (d == dim) break;
  }
  return roots;
}

double inf_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Distinct roots must be separated by much more than the merge radius;
// anything in between cannot be told apart reliably.
std::vector<std::vector<double>> cluster(std::vector<std::vector<double>> pts, double merge_r,
                                         double ambiguity_r, const std::string& where) {
  std::sort(pts.begin(), pts.end());
  std::vector<std::vector<double>> centers;
  for (auto& p : pts) {
    bool merged = false;
    for (const auto& c : centers) {
      if (inf_dist(p, c) <= merge_r) {
        merged = true;
        break;
      }
    }
    if (!merged) centers.push_back(std::move(p));
  }
  for (std::size_t i = 0; i < centers.size(); ++i) {
    for (std::size_t j = i + 1; j < centers.size(); ++j) {
      const double d = inf_dist(centers[i], centers[j]);
      if (d < ambiguity_r) {
        fail(ErrorKind::Degeneracy, "two root clusters in " + where + " are only " +
                                        std::to_string(d) +
                                        " apart; refine the grid or the tolerances");
      }
    }
  }
  return centers;
}

// True when an earlier chart's search region also contains this point, in
// which case that chart's search reports it and this copy is dropped.
bool shadowed(const SuperManifoldModel& model, int chart_idx, const std::vector<double>& x,
              const std::function<bool(int, const std::vector<double>&)>& accepts) {
  const Chart& ch = model.charts[static_cast<std::size_t>(chart_idx)];
  for (int j = 0; j < chart_idx; ++j) {
    const TransitionMap* t = model.find_transition(ch.id, model.charts[static_cast<std::size_t>(j)].id);
    if (!t) continue;
    for (const auto& comp : t->overlaps) {
      bool inside = false;
      try {
        inside = satisfies(comp.predicate, x);
      } catch (const Error&) {
      }
      if (!inside) continue;
      try {
        const std::vector<double> q = apply_map_body(t->even_components, ch.coords, x);
        if (accepts(j, q)) return true;
      } catch (const Error&) {
      }
      break;  // overlap components are disjoint
    }
  }
  return false;
}

}  // namespace

int SubmanifoldModel::even_codim() const {
  if (slices.empty()) fail(ErrorKind::Validation, "submanifold has no carrier charts");
  return static_cast<int>(slices[0].zero_even.size());
}

int SubmanifoldModel::odd_codim() const {
  if (slices.empty()) fail(ErrorKind::Validation, "submanifold has no carrier charts");
  return static_cast<int>(slices[0].zero_odd.size());
}

std::vector<IntersectionPoint> find_body_intersections(const MorphismModel& f,
                                                       const SubmanifoldModel& z,
                                                       const ToleranceSet& tols,
                                                       int* skipped_seeds) {
  check_setup(f, z);
  int skipped = 0;
  std::vector<IntersectionPoint> out;

  for (std::size_t ci = 0; ci < f.source.charts.size(); ++ci) {
    const Chart& ch = f.source.charts[ci];
    std::vector<std::vector<double>> chart_roots;
    std::vector<std::string> root_carrier;
    for (const auto& e : f.entries) {
      if (e.source_chart != ch.id) continue;
      const SubmanifoldSlice* sl = slice_for(z, e.target_chart);
      if (!sl) continue;
      std::vector<SuperExpr> pinned;
      for (int zi : sl->zero_even) {
        pinned.push_back(e.even_components[static_cast<std::size_t>(zi)]);
      }
      const ScalarSystem sys = ScalarSystem::build(pinned, ch.coords);
      const auto admissible = [&](std::span<const double> x) {
        try {
          return in_box(ch, x, 1.1) && satisfies(ch.domain, x) && satisfies(e.validity, x);
        } catch (const Error&) {
          return false;
        }
      };
      for (auto& r :
           grid_newton(ch, sys, admissible, tols.grid_density, tols.newton_tol, &skipped)) {
        chart_roots.push_back(std::move(r));
        root_carrier.push_back(e.target_chart);
      }
    }
    // clustering sorts; keep carrier info by re-matching representatives
    const std::vector<std::vector<double>> centers =
        cluster(chart_roots, 10 * tols.newton_tol, 1000 * tols.newton_tol, "chart " + ch.id);
    for (const auto& c : centers) {
      std::string carrier;
      for (std::size_t k = 0; k < chart_roots.size(); ++k) {
        if (inf_dist(chart_roots[k], c) <= 10 * tols.newton_tol) {
          carrier = root_carrier[k];
          break;
        }
      }
      const auto accepts = [&](int j, const std::vector<double>& q) {
        const Chart& cj = f.source.charts[static_cast<std::size_t>(j)];
        if (!in_box(cj, q, 1.1) || !satisfies(cj.domain, q)) return false;
        for (const auto& e2 : f.entries) {
          if (e2.source_chart != cj.id) continue;
          if (!slice_for(z, e2.target_chart)) continue;
          try {
            if (satisfies(e2.validity, q)) return true;
          } catch (const Error&) {
          }
        }
        return false;
      };
      if (!shadowed(f.source, static_cast<int>(ci), c, accepts)) {
        out.push_back(IntersectionPoint{ch.id, c, carrier, {}, 0.0, 0.0});
      }
    }
  }
  if (skipped_seeds) *skipped_seeds = skipped;
  return out;
}

FramePair assemble_intersection_matrices(const MorphismModel& f, const SubmanifoldModel& z,
                                         const std::string& chart,
                                         std::span<const double> point) {
  check_submanifold(z);
  const MorphismEntry* e = f.entry_for(chart, point);
  if (!e) {
    fail(ErrorKind::Domain, "no morphism entry covers chart '" + chart + "' at " +
                                point_str(point));
  }
  const SubmanifoldSlice* sl = slice_for(z, e->target_chart);
  if (!sl) {
    fail(ErrorKind::Validation, "submanifold '" + z.name + "' has no slice on ambient chart '" +
                                    e->target_chart + "'");
  }
  const CoordinateSystem& cs = f.source.chart(chart).coords;
  const int mY = z.ambient.even_dim, nY = z.ambient.odd_dim;
  const int mX = f.source.even_dim, nX = f.source.odd_dim;

  FramePair fp;
  fp.j0 = Eigen::MatrixXd::Zero(mY, mY);
  fp.j0.block(0, 0, mY, mX) = reduced_even_block(e->even_components, cs, point);
  for (std::size_t k = 0; k < sl->frame_even.size(); ++k) {
    fp.j0(sl->frame_even[k], mX + static_cast<int>(k)) = 1.0;
  }
  fp.j1 = Eigen::MatrixXd::Zero(nY, nY);
  if (nY) {
    fp.j1.block(0, 0, nY, nX) = reduced_odd_block(e->odd_components, cs, point);
    for (std::size_t k = 0; k < sl->frame_odd.size(); ++k) {
      fp.j1(sl->frame_odd[k], nX + static_cast<int>(k)) = 1.0;
    }
  }
  return fp;
}

SignPair sign_pair_at(const MorphismModel& f, const SubmanifoldModel& z, const std::string& chart,
                      std::span<const double> point, double sign_tol) {
  const FramePair fp = assemble_intersection_matrices(f, z, chart, point);
  SignPair s;
  const double d0 = fp.j0.rows() ? fp.j0.determinant() : 1.0;
  const double d1 = fp.j1.rows() ? fp.j1.determinant() : 1.0;
  s.delta0 = std::abs(d0) < sign_tol ? 0 : (d0 > 0 ? 1 : -1);
  s.delta1 = std::abs(d1) < sign_tol ? 0 : (d1 > 0 ? 1 : -1);
  return s;
}

namespace {

double condition_number(const Eigen::MatrixXd& m) {
  if (!m.rows()) return 1.0;
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const double lo = svd.singularValues()(svd.singularValues().size() - 1);
  if (lo <= 0.0) return std::numeric_limits<double>::infinity();
  return svd.singularValues()(0) / lo;
}

}  // namespace

IntersectionReport intersection_pair(const MorphismModel& f, const SubmanifoldModel& z,
                                     const ToleranceSet& tols) {
  IntersectionReport rep;
  rep.newton_tol = tols.newton_tol;
  rep.sign_tol = tols.sign_tol;
  rep.points = find_body_intersections(f, z, tols, &rep.skipped_seeds);
  for (auto& p : rep.points) {
    const FramePair fp = assemble_intersection_matrices(f, z, p.chart, p.x);
    p.signs = sign_pair_at(f, z, p.chart, p.x, tols.sign_tol);
    p.cond0 = condition_number(fp.j0);
    p.cond1 = condition_number(fp.j1);
    if (p.signs.delta0 == 0 || p.signs.delta1 == 0) {
      fail(ErrorKind::Degeneracy, "non-transversal intersection at chart '" + p.chart + "' " +
                                      point_str(p.x) +
                                      "; perturb the morphism to restore transversality");
    }
    rep.total0 += p.signs.delta0;
    rep.total1 += p.signs.delta1;
  }
  return rep;
}

namespace {

void require_pi_dims(const SuperManifoldModel& m, const char* role) {
  if (!m.pi) {
    fail(ErrorKind::Validation, std::string("pi structure missing on the ") + role + " model");
  }
  if (m.even_dim != m.odd_dim) {
    fail(ErrorKind::Validation, std::string("pi-symmetric ") + role +
                                    " model needs equal even and odd dimensions");
  }
}

double pi_block_residual(const Eigen::MatrixXd& ee, const Eigen::MatrixXd& oo,
                         const SuperManifoldModel& target, int chart_to,
                         const SuperManifoldModel& source, int chart_from) {
  double r = 0.0;
  for (int i = 0; i < ee.rows(); ++i) {
    for (int j = 0; j < ee.cols(); ++j) {
      r = std::max(r, std::abs(ee(i, j) - oo(target.pi_partner(chart_to, i),
                                              source.pi_partner(chart_from, j))));
    }
  }
  return r;
}

}  // namespace

PiCheckResult check_pi_morphism(const MorphismModel& f, double tol) {
  require_pi_dims(f.source, "source");
  require_pi_dims(f.target, "target");
  PiCheckResult res;
  for (const auto& e : f.entries) {
    const CoordinateSystem& cs = f.source.chart(e.source_chart).coords;
    const int ci_s = f.source.chart_index(e.source_chart);
    const int ci_t = f.target.chart_index(e.target_chart);
    for (const auto& p : e.samples) {
      const Eigen::MatrixXd ee = reduced_even_block(e.even_components, cs, p);
      const Eigen::MatrixXd oo = reduced_odd_block(e.odd_components, cs, p);
      res.max_residual = std::max(
          res.max_residual, pi_block_residual(ee, oo, f.target, ci_t, f.source, ci_s));
    }
  }
  res.ok = res.max_residual <= tol;
  return res;
}

PiCheckResult check_pi_transitions(const SuperManifoldModel& model, double tol) {
  require_pi_dims(model, "given");
  PiCheckResult res;
  for (const auto& t : model.transitions) {
    const CoordinateSystem& cs = model.chart(t.from).coords;
    const int ci_f = model.chart_index(t.from);
    const int ci_t = model.chart_index(t.to);
    for (const auto& comp : t.overlaps) {
      for (const auto& p : comp.samples) {
        const Eigen::MatrixXd ee = reduced_even_block(t.even_components, cs, p);
        const Eigen::MatrixXd oo = reduced_odd_block(t.odd_components, cs, p);
        res.max_residual =
            std::max(res.max_residual, pi_block_residual(ee, oo, model, ci_t, model, ci_f));
      }
    }
  }
  res.ok = res.max_residual <= tol;
  return res;
}

MorphismModel restrict_homotopy(const MorphismModel& h, double t) {
  if (!h.source.product_of) {
    fail(ErrorKind::Validation, "homotopy source must be a product with the line");
  }
  const SuperManifoldModel& x_model = *h.source.product_of->left;
  const SuperManifoldModel& line = *h.source.product_of->right;
  if (line.even_dim != 1 || line.odd_dim != 0 || line.charts.size() != 1) {
    fail(ErrorKind::Validation, "the right product factor must be the 1|0 line");
  }
  const std::string suffix = "." + line.charts[0].id;

  std::vector<SuperExpr> even_repl;
  for (int i = 0; i < x_model.even_dim; ++i) even_repl.push_back(ex::even_var(i));
  even_repl.push_back(ex::constant(t));
  std::vector<SuperExpr> odd_repl;
  for (int i = 0; i < x_model.odd_dim; ++i) odd_repl.push_back(ex::odd_var(i));

  MorphismModel out;
  std::ostringstream name;
  name << h.name << "@t=" << t;
  out.name = name.str();
  out.source = x_model;
  out.target = h.target;
  for (const auto& e : h.entries) {
    if (e.source_chart.size() <= suffix.size() ||
        e.source_chart.compare(e.source_chart.size() - suffix.size(), suffix.size(), suffix) !=
            0) {
      fail(ErrorKind::Validation, "entry chart '" + e.source_chart +
                                      "' does not factor through the line chart");
    }
    MorphismEntry r;
    r.source_chart = e.source_chart.substr(0, e.source_chart.size() - suffix.size());
    r.target_chart = e.target_chart;
    for (const auto& c : e.even_components) {
      r.even_components.push_back(substitute(c, even_repl, odd_repl));
    }
    for (const auto& c : e.odd_components) {
      r.odd_components.push_back(substitute(c, even_repl, odd_repl));
    }
    for (const auto& v : e.validity) r.validity.push_back(substitute(v, even_repl, odd_repl));
    for (const auto& s : e.samples) {
      std::vector<double> s2(s.begin(), s.end() - 1);
      try {
        if (satisfies(r.validity, s2)) r.samples.push_back(std::move(s2));
      } catch (const Error&) {
      }
    }
    out.entries.push_back(std::move(r));
  }
  return out;
}

HomotopyReport homotopy_invariance_check(const MorphismModel& h, const SubmanifoldModel& z,
                                         double t0, double t1, const ToleranceSet& tols) {
  HomotopyReport rep;
  rep.at_start = intersection_pair(restrict_homotopy(h, t0), z, tols);
  rep.at_end = intersection_pair(restrict_homotopy(h, t1), z, tols);
  rep.equal = rep.at_start.total0 == rep.at_end.total0 && rep.at_start.total1 == rep.at_end.total1;
  return rep;
}

std::pair<int, int> euler_pair_pi(const SuperManifoldModel& model, const VectorField& field,
                                  const ToleranceSet& tols) {
  require_pi_dims(model, "given");
  if (!model.compact_body) {
    fail(ErrorKind::Validation, "Euler pairs need a compact body");
  }
  if (classify(model).tag != OrientabilityTag::Orientable) {
    fail(ErrorKind::Validation, "Euler pairs need an orientable model");
  }
  if (field.per_chart.size() != model.charts.size()) {
    fail(ErrorKind::Validation, "vector field must list components for every chart");
  }

  int chi = 0;
  for (std::size_t ci = 0; ci < model.charts.size(); ++ci) {
    const Chart& ch = model.charts[ci];
    const std::vector<SuperExpr>& comps = field.per_chart[ci];
    if (static_cast<int>(comps.size()) != model.even_dim) {
      fail(ErrorKind::Validation, "vector field on chart '" + ch.id +
                                      "' has the wrong number of components");
    }
    for (const auto& c : comps) {
      const OddPolynomialForm fm = normalize(c, ch.coords);
      if (!fm.coefficients().empty() && parity_of(fm) != Parity::Even) {
        fail(ErrorKind::Validation, "vector field components must be even");
      }
    }
    const ScalarSystem sys = ScalarSystem::build(comps, ch.coords);
    const auto admissible = [&](std::span<const double> x) {
      try {
        return in_box(ch, x, 1.1) && satisfies(ch.domain, x);
      } catch (const Error&) {
        return false;
      }
    };
    int skipped = 0;
    auto roots = grid_newton(ch, sys, admissible, tols.grid_density, tols.newton_tol, &skipped);
    const auto centers =
        cluster(std::move(roots), 10 * tols.newton_tol, 1000 * tols.newton_tol,
                "chart " + ch.id);
    const auto accepts = [&](int j, const std::vector<double>& q) {
      const Chart& cj = model.charts[static_cast<std::size_t>(j)];
      try {
        return in_box(cj, q, 1.1) && satisfies(cj.domain, q);
      } catch (const Error&) {
        return false;
      }
    };
    for (const auto& zero : centers) {
      if (shadowed(model, static_cast<int>(ci), zero, accepts)) continue;
      Eigen::MatrixXd J;
      if (!sys.jacobian(zero, &J)) {
        fail(ErrorKind::Degeneracy, "cannot evaluate the field Jacobian at " + point_str(zero));
      }
      const double det = J.determinant();
      if (std::abs(det) < tols.sign_tol) {
        fail(ErrorKind::Degeneracy, "degenerate vector field zero at chart '" + ch.id + "' " +
                                        point_str(zero));
      }
      chi += det > 0 ? 1 : -1;
    }
  }
  return {chi, chi};
}

}  // namespace supergeo
