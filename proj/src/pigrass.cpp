#include "supergeo/pigrass.hpp"

#include <algorithm>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>

#include "supergeo/errors.hpp"
#include "supergeo/grassmann.hpp"

namespace supergeo {

namespace {

// Complex-valued expression; arithmetic keeps factor order so odd entries
// multiply correctly.
struct CExpr {
  SuperExpr re, im;
};

CExpr c_const(double re, double im = 0.0) { return {ex::constant(re), ex::constant(im)}; }

CExpr c_add(const CExpr& a, const CExpr& b) {
  return {ex::add(a.re, b.re), ex::add(a.im, b.im)};
}

CExpr c_neg(const CExpr& a) { return {ex::neg(a.re), ex::neg(a.im)}; }

CExpr c_mul(const CExpr& a, const CExpr& b) {
  return {ex::sub(ex::mul(a.re, b.re), ex::mul(a.im, b.im)),
          ex::add(ex::mul(a.re, b.im), ex::mul(a.im, b.re))};
}

// Reciprocal of an even entry via the conjugate; the modulus denominator is a
// pure even-variable expression, so no nilpotent expansion is needed here.
CExpr c_inv(const CExpr& z) {
  const SuperExpr n = ex::add(ex::mul(z.re, z.re), ex::mul(z.im, z.im));
  return {ex::div(z.re, n), ex::neg(ex::div(z.im, n))};
}

bool expr_is_zero(const SuperExpr& e) {
  return e->kind == NodeKind::Constant && e->constant == 0.0;
}

// Rewrites an entry in odd normal form, which collapses products that vanish
// identically (squares of odd-linear entries and the like) and keeps the
// generated transitions from dragging dead terms along.
SuperExpr prune_expr(const SuperExpr& e, const CoordinateSystem& cs) {
  return form_to_expr(normalize(e, cs));
}

CExpr prune(const CExpr& z, const CoordinateSystem& cs) {
  return {prune_expr(z.re, cs), prune_expr(z.im, cs)};
}

using CMat = std::vector<std::vector<CExpr>>;

CMat cm_zero(int rows, int cols) {
  return CMat(static_cast<std::size_t>(rows),
              std::vector<CExpr>(static_cast<std::size_t>(cols), c_const(0.0)));
}

CMat cm_identity(int n) {
  CMat m = cm_zero(n, n);
  for (int i = 0; i < n; ++i) m[i][i] = c_const(1.0);
  return m;
}

CMat cm_mul(const CMat& a, const CMat& b, const CoordinateSystem& cs) {
  const int rows = static_cast<int>(a.size());
  const int mid = static_cast<int>(b.size());
  const int cols = mid ? static_cast<int>(b[0].size()) : 0;
  CMat out = cm_zero(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      CExpr acc = c_const(0.0);
      for (int t = 0; t < mid; ++t) acc = c_add(acc, c_mul(a[i][t], b[t][j]));
      out[i][j] = prune(acc, cs);
    }
  }
  return out;
}

CMat cm_add(const CMat& a, const CMat& b) {
  CMat out = a;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a[i].size(); ++j) out[i][j] = c_add(a[i][j], b[i][j]);
  }
  return out;
}

CMat cm_neg(const CMat& a) {
  CMat out = a;
  for (auto& row : out) {
    for (auto& z : row) z = c_neg(z);
  }
  return out;
}

CMat cm_block(const CMat& a, int r0, int c0, int rows, int cols) {
  CMat out = cm_zero(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) out[i][j] = a[r0 + i][c0 + j];
  }
  return out;
}

bool cm_is_zero(const CMat& a) {
  for (const auto& row : a) {
    for (const auto& z : row) {
      if (!expr_is_zero(z.re) || !expr_is_zero(z.im)) return false;
    }
  }
  return true;
}

CMat cm_minor(const CMat& a, int row, int col) {
  const int n = static_cast<int>(a.size());
  CMat out = cm_zero(n - 1, n - 1);
  for (int i = 0, oi = 0; i < n; ++i) {
    if (i == row) continue;
    for (int j = 0, oj = 0; j < n; ++j) {
      if (j == col) continue;
      out[oi][oj] = a[i][j];
      ++oj;
    }
    ++oi;
  }
  return out;
}

// Cofactor expansion; the blocks this is used on stay small (k, l <= 3 or so).
CExpr cm_det(const CMat& a) {
  const int n = static_cast<int>(a.size());
  if (n == 0) return c_const(1.0);
  if (n == 1) return a[0][0];
  CExpr acc = c_const(0.0);
  for (int j = 0; j < n; ++j) {
    CExpr term = c_mul(a[0][j], cm_det(cm_minor(a, 0, j)));
    if (j % 2) term = c_neg(term);
    acc = c_add(acc, term);
  }
  return acc;
}

// Inverse of an even block (entries are plain coordinate expressions) through
// the adjugate.
CMat cm_inverse_even(const CMat& a, const CoordinateSystem& cs) {
  const int n = static_cast<int>(a.size());
  if (n == 0) return a;
  const CExpr inv_det = c_inv(cm_det(a));
  CMat out = cm_zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      CExpr cof = cm_det(cm_minor(a, j, i));
      if ((i + j) % 2) cof = c_neg(cof);
      out[i][j] = prune(c_mul(cof, inv_det), cs);
    }
  }
  return out;
}

// Inverse of the bordered matrix [[P, Q], [R, S]] with odd off-diagonal
// blocks: Schur complement around P, with the nilpotent correction summed as
// a geometric series that terminates because the odd entries square away.
CMat super_inverse(const CMat& m, int k, int l, const CoordinateSystem& cs) {
  if (l == 0) return cm_inverse_even(m, cs);
  if (k == 0) return cm_inverse_even(m, cs);
  const CMat p = cm_block(m, 0, 0, k, k);
  const CMat q = cm_block(m, 0, k, k, l);
  const CMat r = cm_block(m, k, 0, l, k);
  const CMat s = cm_block(m, k, k, l, l);
  const CMat pinv = cm_inverse_even(p, cs);
  const CMat sinv = cm_inverse_even(s, cs);
  const CMat x = cm_mul(sinv, cm_mul(cm_mul(r, pinv, cs), q, cs), cs);  // S^-1 R P^-1 Q
  CMat series = cm_identity(l);
  CMat power = cm_identity(l);
  for (int step = 0; step < 16; ++step) {
    power = cm_mul(power, x, cs);
    if (cm_is_zero(power)) break;
    series = cm_add(series, power);
  }
  const CMat delta_inv = cm_mul(series, sinv, cs);  // (S - R P^-1 Q)^-1
  const CMat pq = cm_mul(pinv, q, cs);
  const CMat rp = cm_mul(r, pinv, cs);
  const CMat tl = cm_add(pinv, cm_mul(cm_mul(pq, delta_inv, cs), rp, cs));
  const CMat tr = cm_neg(cm_mul(pq, delta_inv, cs));
  const CMat bl = cm_neg(cm_mul(delta_inv, rp, cs));

  CMat out = cm_zero(k + l, k + l);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) out[i][j] = tl[i][j];
    for (int j = 0; j < l; ++j) out[i][k + j] = tr[i][j];
  }
  for (int i = 0; i < l; ++i) {
    for (int j = 0; j < k; ++j) out[k + i][j] = bl[i][j];
    for (int j = 0; j < l; ++j) out[k + i][k + j] = delta_inv[i][j];
  }
  return out;
}

// ===== cell atlas assembly =====

struct CellChart {
  std::string id;
  std::vector<int> even_set;  // normalized even columns
  std::vector<int> odd_set;   // normalized odd columns
  // Free entry positions of the plane matrix, in coordinate order; each
  // complex position owns the real coordinate pair (2t, 2t+1).
  std::vector<std::pair<int, int>> even_positions;
  std::vector<std::pair<int, int>> odd_positions;
  CMat w;  // normalized plane matrix over this chart's own coordinates
};

struct CellFamily {
  std::string name;
  int row_even = 0;  // k
  int row_odd = 0;   // l
  int col_even = 0;  // m
  int col_odd = 0;   // n
  bool pi = false;
  std::vector<CellChart> charts;
  CoordinateSystem coords = CoordinateSystem::standard(0, 0);
};

std::vector<std::vector<int>> subsets(int m, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> pick;
  const auto rec = [&](auto&& self, int next) -> void {
    if (static_cast<int>(pick.size()) == k) {
      out.push_back(pick);
      return;
    }
    for (int c = next; c <= m - (k - static_cast<int>(pick.size())); ++c) {
      pick.push_back(c);
      self(self, c + 1);
      pick.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

std::string digits(const std::vector<int>& s) {
  std::string out;
  for (int v : s) out += static_cast<char>('0' + v);
  return out;
}

std::vector<int> complement(int m, const std::vector<int>& s) {
  std::vector<int> out;
  for (int c = 0; c < m; ++c) {
    if (!std::binary_search(s.begin(), s.end(), c)) out.push_back(c);
  }
  return out;
}

CExpr even_pair(int t) { return {ex::even_var(2 * t), ex::even_var(2 * t + 1)}; }
CExpr odd_pair(int t) { return {ex::odd_var(2 * t), ex::odd_var(2 * t + 1)}; }

CellChart make_general_chart(int k, int l, int m, int n, const std::vector<int>& iset,
                             const std::vector<int>& jset) {
  CellChart ch;
  ch.id = digits(iset) + (n > 0 || l > 0 ? "|" + digits(jset) : "");
  ch.even_set = iset;
  ch.odd_set = jset;
  ch.w = cm_zero(k + l, m + n);
  for (int p = 0; p < k; ++p) ch.w[p][iset[p]] = c_const(1.0);
  for (int q = 0; q < l; ++q) ch.w[k + q][m + jset[q]] = c_const(1.0);

  const std::vector<int> ifree = complement(m, iset);
  const std::vector<int> jfree = complement(n, jset);
  int t = 0;  // complex even coordinate counter
  for (int r = 0; r < k; ++r) {
    for (int c : ifree) {
      ch.even_positions.emplace_back(r, c);
      ch.w[r][c] = even_pair(t++);
    }
  }
  for (int r = 0; r < l; ++r) {
    for (int c : jfree) {
      ch.even_positions.emplace_back(k + r, m + c);
      ch.w[k + r][m + c] = even_pair(t++);
    }
  }
  int s = 0;  // complex odd coordinate counter
  for (int r = 0; r < k; ++r) {
    for (int c : jfree) {
      ch.odd_positions.emplace_back(r, m + c);
      ch.w[r][m + c] = odd_pair(s++);
    }
  }
  for (int r = 0; r < l; ++r) {
    for (int c : ifree) {
      ch.odd_positions.emplace_back(k + r, c);
      ch.w[k + r][c] = odd_pair(s++);
    }
  }
  return ch;
}

CellChart make_pi_chart(int k, int m, const std::vector<int>& iset) {
  CellChart ch;
  ch.id = digits(iset);
  ch.even_set = iset;
  ch.odd_set = iset;
  ch.w = cm_zero(2 * k, 2 * m);
  for (int p = 0; p < k; ++p) {
    ch.w[p][iset[p]] = c_const(1.0);
    ch.w[k + p][m + iset[p]] = c_const(1.0);
  }
  const std::vector<int> ifree = complement(m, iset);
  int t = 0;
  for (int r = 0; r < k; ++r) {
    for (int c : ifree) {
      ch.even_positions.emplace_back(r, c);
      const CExpr a = even_pair(t);
      const CExpr b = odd_pair(t);
      ++t;
      ch.w[r][c] = a;
      ch.w[k + r][m + c] = a;
      ch.odd_positions.emplace_back(r, m + c);
      ch.w[r][m + c] = b;
      ch.w[k + r][c] = c_neg(b);
    }
  }
  return ch;
}

std::uint32_t fnv1a(const std::string& s) {
  std::uint32_t h = 2166136261u;
  for (const unsigned char c : s) {
    h ^= c;
    h *= 16777619u;
  }
  return h;
}

// Deterministic body samples inside the seed box; a sample is usable for an
// overlap when every invertibility predicate sits clearly above zero.
class SampleDraw {
public:
  SampleDraw(const std::string& tag, const std::vector<std::pair<double, double>>& box)
      : rng_(fnv1a(tag)), box_(box) {}

  std::vector<double> next() {
    std::vector<double> x(box_.size());
    for (std::size_t d = 0; d < box_.size(); ++d) {
      const double r = static_cast<double>(rng_()) / 4294967296.0;
      x[d] = box_[d].first + (box_[d].second - box_[d].first) * r;
    }
    return x;
  }

private:
  std::mt19937 rng_;
  std::vector<std::pair<double, double>> box_;
};

// The floor is applied to squared determinant moduli, so 1e-12 corresponds to
// rejecting |det| below 1e-6.  kPreferredFloor asks for well-conditioned
// points first; the hard floor is only a fallback.
constexpr double kHardFloor = 1e-12;
constexpr double kPreferredFloor = 1e-2;

bool predicates_clear(const std::vector<SuperExpr>& preds, std::span<const double> x,
                      double floor_value) {
  for (const auto& p : preds) {
    if (eval_scalar(p, x) < floor_value) return false;
  }
  return true;
}

struct BuiltTransition {
  TransitionMap map;
  std::vector<SuperExpr> predicate;  // kept for triple sample selection
};

BuiltTransition build_transition(const CellFamily& fam, const CellChart& src,
                                 const CellChart& dst,
                                 const std::vector<std::pair<double, double>>& box) {
  const int k = fam.row_even, l = fam.row_odd, m = fam.col_even;
  const int rows = k + l;
  CMat sub = cm_zero(rows, rows);
  for (int r = 0; r < rows; ++r) {
    for (int p = 0; p < k; ++p) sub[r][p] = src.w[r][dst.even_set[p]];
    for (int q = 0; q < l; ++q) sub[r][k + q] = src.w[r][m + dst.odd_set[q]];
  }

  BuiltTransition out;
  out.map.from = src.id;
  out.map.to = dst.id;

  const CMat inv = super_inverse(sub, k, l, fam.coords);
  const CMat wp = cm_mul(inv, src.w, fam.coords);
  for (const auto& [r, c] : dst.even_positions) {
    const CExpr z = prune(wp[r][c], fam.coords);
    out.map.even_components.push_back(z.re);
    out.map.even_components.push_back(z.im);
  }
  for (const auto& [r, c] : dst.odd_positions) {
    const CExpr z = prune(wp[r][c], fam.coords);
    out.map.odd_components.push_back(z.re);
    out.map.odd_components.push_back(z.im);
  }

  const auto modulus_sq = [&](const CMat& block) {
    const CExpr d = cm_det(block);
    return prune_expr(ex::add(ex::mul(d.re, d.re), ex::mul(d.im, d.im)), fam.coords);
  };
  if (k > 0) out.predicate.push_back(modulus_sq(cm_block(sub, 0, 0, k, k)));
  if (l > 0) out.predicate.push_back(modulus_sq(cm_block(sub, k, k, l, l)));

  OverlapComponent comp;
  comp.predicate = out.predicate;
  SampleDraw draw(fam.name + "|" + src.id + "|" + dst.id, box);
  for (int attempt = 0; attempt < 500 && comp.samples.size() < 2; ++attempt) {
    const std::vector<double> x = draw.next();
    const double floor_value = attempt < 400 ? kPreferredFloor : kHardFloor;
    if (predicates_clear(comp.predicate, x, floor_value)) comp.samples.push_back(x);
  }
  if (comp.samples.size() < 2) {
    fail(ErrorKind::Validation, "no usable overlap sample for " + src.id + " -> " + dst.id +
                                    " in " + fam.name);
  }
  out.map.overlaps.push_back(std::move(comp));
  return out;
}

SuperManifoldModel assemble(const CellFamily& fam, const std::string& description) {
  // In the blocked form the lower rows repeat the upper ones, so only the
  // upper A and B entries are free coordinates.
  const int even_complex =
      fam.pi ? fam.row_even * (fam.col_even - fam.row_even)
             : fam.row_even * (fam.col_even - fam.row_even) +
                   fam.row_odd * (fam.col_odd - fam.row_odd);
  const int odd_complex =
      fam.pi ? even_complex
             : fam.row_even * (fam.col_odd - fam.row_odd) +
                   fam.row_odd * (fam.col_even - fam.row_even);

  SuperManifoldModel model;
  model.name = fam.name;
  model.description = description;
  model.even_dim = 2 * even_complex;
  model.odd_dim = 2 * odd_complex;
  model.compact_body = true;
  if (fam.pi) model.pi = PiStructure{};

  std::vector<std::pair<double, double>> box(static_cast<std::size_t>(model.even_dim),
                                             {-1.5, 1.5});
  std::vector<double> origin(static_cast<std::size_t>(model.even_dim), 0.0);
  std::vector<double> off(static_cast<std::size_t>(model.even_dim));
  for (int d = 0; d < model.even_dim; ++d) off[d] = (d % 2 ? -0.2 : 0.3) / (1 + d / 2);

  for (const auto& cell : fam.charts) {
    model.charts.push_back(Chart{cell.id, CoordinateSystem::standard(model.even_dim, model.odd_dim),
                                 {}, {origin, off}, box});
  }

  std::vector<BuiltTransition> built;
  built.reserve(fam.charts.size() * fam.charts.size());
  for (const auto& src : fam.charts) {
    for (const auto& dst : fam.charts) {
      if (src.id == dst.id) continue;
      built.push_back(build_transition(fam, src, dst, box));
    }
  }
  const auto find_built = [&](const std::string& from, const std::string& to) {
    for (const auto& b : built) {
      if (b.map.from == from && b.map.to == to) return &b;
    }
    return static_cast<const BuiltTransition*>(nullptr);
  };

  // Commuting-square declarations: one well-separated sample per ordered
  // triple, accepted only where all three hops are defined.
  if (fam.charts.size() >= 3) {
    for (const auto& a : fam.charts) {
      for (const auto& b : fam.charts) {
        for (const auto& c : fam.charts) {
          if (a.id == b.id || a.id == c.id || b.id == c.id) continue;
          const BuiltTransition* ab = find_built(a.id, b.id);
          const BuiltTransition* ac = find_built(a.id, c.id);
          const BuiltTransition* bc = find_built(b.id, c.id);
          SampleDraw draw(fam.name + "#" + a.id + "#" + b.id + "#" + c.id, box);
          bool placed = false;
          for (int attempt = 0; attempt < 500 && !placed; ++attempt) {
            const std::vector<double> x = draw.next();
            const double floor_value = attempt < 400 ? kPreferredFloor : kHardFloor;
            if (!predicates_clear(ab->predicate, x, floor_value) ||
                !predicates_clear(ac->predicate, x, floor_value)) {
              continue;
            }
            const std::vector<double> y =
                apply_map_body(ab->map.even_components, model.charts[0].coords, x);
            if (!predicates_clear(bc->predicate, y, floor_value)) continue;
            model.triples.push_back(TripleOverlap{a.id, b.id, c.id, {x}});
            placed = true;
          }
          if (!placed) {
            fail(ErrorKind::Validation, "no usable triple sample for " + a.id + "," + b.id +
                                            "," + c.id + " in " + fam.name);
          }
        }
      }
    }
  }

  for (auto& b : built) model.transitions.push_back(std::move(b.map));
  return model;
}

void check_bounds(int k, int l, int m, int n) {
  if (m < 1 || m > 9 || n < 0 || n > 9) {
    fail(ErrorKind::Validation, "column counts must be within 1..9 even, 0..9 odd");
  }
  if (k < 0 || l < 0 || k > m || l > n || k + l < 1) {
    fail(ErrorKind::Validation, "row counts must satisfy 0 <= k <= m, 0 <= l <= n, k + l >= 1");
  }
}

}  // namespace

SuperManifoldModel build_supergrassmannian(int k, int l, int m, int n) {
  check_bounds(k, l, m, n);
  CellFamily fam;
  fam.name = "Gr(" + std::to_string(k) + "|" + std::to_string(l) + "," + std::to_string(m) +
             "|" + std::to_string(n) + ")";
  fam.row_even = k;
  fam.row_odd = l;
  fam.col_even = m;
  fam.col_odd = n;
  const int even_complex = k * (m - k) + l * (n - l);
  const int odd_complex = k * (n - l) + l * (m - k);
  if (2 * odd_complex > GrassmannElement::kMaxGenerators) {
    fail(ErrorKind::Dimension, "realified model would exceed the generator cap");
  }
  fam.coords = CoordinateSystem::standard(2 * even_complex, 2 * odd_complex);
  for (const auto& iset : subsets(m, k)) {
    for (const auto& jset : subsets(n, l)) {
      fam.charts.push_back(make_general_chart(k, l, m, n, iset, jset));
    }
  }
  return assemble(fam, "realified complex Grassmannian of " + std::to_string(k) + "|" +
                           std::to_string(l) + " planes in C^" + std::to_string(m) + "|" +
                           std::to_string(n));
}

SuperManifoldModel build_pi_grassmannian(int k, int m) {
  if (m < 1 || m > 9 || k < 1 || k > m) {
    fail(ErrorKind::Validation, "pi Grassmannian needs 1 <= k <= m <= 9");
  }
  CellFamily fam;
  fam.name = "PiGr(" + std::to_string(k) + "," + std::to_string(m) + ")";
  fam.row_even = k;
  fam.row_odd = k;
  fam.col_even = m;
  fam.col_odd = m;
  fam.pi = true;
  const int complex_dim = k * (m - k);
  if (2 * complex_dim > GrassmannElement::kMaxGenerators) {
    fail(ErrorKind::Dimension, "realified model would exceed the generator cap");
  }
  fam.coords = CoordinateSystem::standard(2 * complex_dim, 2 * complex_dim);
  for (const auto& iset : subsets(m, k)) fam.charts.push_back(make_pi_chart(k, m, iset));
  return assemble(fam, "realified pi-symmetric Grassmannian of " + std::to_string(k) + "|" +
                           std::to_string(k) + " planes in C^" + std::to_string(m) + "|" +
                           std::to_string(m) + "; body Gr(" + std::to_string(k) + "," +
                           std::to_string(m) + ")");
}

VectorField standard_morse_field(const SuperManifoldModel& model,
                                 const std::vector<double>& constants) {
  if (constants.size() != model.charts.size()) {
    fail(ErrorKind::Validation, "need one Morse constant per chart");
  }
  for (std::size_t i = 0; i < constants.size(); ++i) {
    for (std::size_t j = i + 1; j < constants.size(); ++j) {
      if (constants[i] == constants[j]) {
        fail(ErrorKind::Validation, "Morse constants must be pairwise distinct");
      }
    }
  }
  const int m = static_cast<int>(model.charts.size());
  if (model.even_dim != 2 * (m - 1)) {
    fail(ErrorKind::Validation,
         "the standard Morse field is defined for k=1 pi Grassmannians only");
  }

  VectorField field;
  for (const auto& ch : model.charts) {
    if (ch.id.size() != 1 || ch.id[0] < '0' || ch.id[0] > '8') {
      fail(ErrorKind::Validation, "chart id '" + ch.id + "' is not a single column index");
    }
    const int i = ch.id[0] - '0';
    if (i >= m) fail(ErrorKind::Validation, "chart id '" + ch.id + "' out of range");

    // Free columns in ascending order mirror the chart's coordinate order.
    std::vector<int> cols;
    for (int c = 0; c < m; ++c) {
      if (c != i) cols.push_back(c);
    }
    std::vector<SuperExpr> dterms{ex::constant(1.0)};
    std::vector<SuperExpr> nterms{ex::constant(constants[static_cast<std::size_t>(i)])};
    for (std::size_t t = 0; t < cols.size(); ++t) {
      const SuperExpr r2 = ex::add(ex::pow(ex::even_var(2 * static_cast<int>(t)), 2),
                                   ex::pow(ex::even_var(2 * static_cast<int>(t) + 1), 2));
      dterms.push_back(r2);
      nterms.push_back(
          ex::mul(ex::constant(constants[static_cast<std::size_t>(cols[t])]), r2));
    }
    const SuperExpr den = ex::add(dterms);
    const SuperExpr num = ex::add(nterms);
    // The honest gradient of N/D carries a 1/D^2 factor; dropping it leaves a
    // positive rescaling with the same zeros and the same Jacobian signs
    // there, and the polynomial components keep Newton basins large.
    std::vector<SuperExpr> comps;
    for (std::size_t t = 0; t < cols.size(); ++t) {
      const SuperExpr weight =
          ex::sub(ex::mul(ex::constant(constants[static_cast<std::size_t>(cols[t])]), den),
                  num);
      comps.push_back(
          ex::mul({ex::constant(2.0), ex::even_var(2 * static_cast<int>(t)), weight}));
      comps.push_back(
          ex::mul({ex::constant(2.0), ex::even_var(2 * static_cast<int>(t) + 1), weight}));
    }
    field.per_chart.push_back(std::move(comps));
  }
  return field;
}

}  // namespace supergeo
