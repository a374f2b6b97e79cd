#include "supergeo/orientation.hpp"

#include <algorithm>
#include <cmath>

#include "supergeo/errors.hpp"

namespace supergeo {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) {
    for (int i = 0; i < n; ++i) parent[static_cast<std::size_t>(i)] = i;
  }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  void unite(int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); }
};

// Per-component transition signs, shared by the full cover and the one-factor
// views.
struct SignedEdge {
  int from_chart = 0;
  int to_chart = 0;
  std::string transition;
  int component = 0;
  int sigma0 = 1;
  int sigma1 = 1;
};

std::vector<SignedEdge> edge_signs(const SuperManifoldModel& model, double tol) {
  std::vector<SignedEdge> out;
  for (const auto& t : model.transitions) {
    const int from = model.chart_index(t.from);
    const int to = model.chart_index(t.to);
    const CoordinateSystem& cs = model.chart(t.from).coords;
    const std::string label = t.from + "->" + t.to;
    for (std::size_t ci = 0; ci < t.overlaps.size(); ++ci) {
      const OverlapComponent& comp = t.overlaps[ci];
      if (comp.samples.empty()) {
        fail(ErrorKind::Validation,
             "overlap component " + std::to_string(ci) + " of " + label + " has no samples");
      }
      int s0 = 0, s1 = 0;
      for (std::size_t si = 0; si < comp.samples.size(); ++si) {
        const std::vector<double>& p = comp.samples[si];
        const double de =
            model.even_dim ? reduced_even_block(t.even_components, cs, p).determinant() : 1.0;
        const double dodd =
            model.odd_dim ? reduced_odd_block(t.odd_components, cs, p).determinant() : 1.0;
        if (std::abs(de) < tol || std::abs(dodd) < tol) {
          fail(ErrorKind::Degeneracy, "reduced block of " + label + " is singular at sample " +
                                          std::to_string(si) + " of component " +
                                          std::to_string(ci));
        }
        const int c0 = de > 0 ? 1 : -1;
        const int c1 = dodd > 0 ? 1 : -1;
        if (si == 0) {
          s0 = c0;
          s1 = c1;
        } else if (c0 != s0 || c1 != s1) {
          fail(ErrorKind::Validation,
               "sign of " + label + " is not constant on declared component " +
                   std::to_string(ci) + "; the component cannot be connected");
        }
      }
      out.push_back({from, to, label, static_cast<int>(ci), s0, s1});
    }
  }
  return out;
}

std::vector<int> normalize_components(UnionFind& uf, int node_count, int* count_out) {
  std::vector<int> comp(static_cast<std::size_t>(node_count), -1);
  int next = 0;
  std::vector<int> root_label(static_cast<std::size_t>(node_count), -1);
  for (int i = 0; i < node_count; ++i) {
    const int r = uf.find(i);
    if (root_label[static_cast<std::size_t>(r)] < 0) {
      root_label[static_cast<std::size_t>(r)] = next++;
    }
    comp[static_cast<std::size_t>(i)] = root_label[static_cast<std::size_t>(r)];
  }
  *count_out = next;
  return comp;
}

// Connectivity of the two-node-per-chart view that keeps only one sign
// factor; true when the base chart's two signs stay separated.
bool one_factor_orientable(const SuperManifoldModel& model,
                           const std::vector<SignedEdge>& edges, bool use_odd) {
  const int node_count = 2 * static_cast<int>(model.charts.size());
  UnionFind uf(node_count);
  for (const auto& e : edges) {
    const int sigma = use_odd ? e.sigma1 : e.sigma0;
    for (int s : {0, 1}) {  // 0 encodes +, 1 encodes -
      const int image = sigma > 0 ? s : 1 - s;
      uf.unite(e.from_chart * 2 + s, e.to_chart * 2 + image);
    }
  }
  return uf.find(0) != uf.find(1);
}

}  // namespace

int deck_action(int a, int b, int node_id) {
  const int chart = OrientingCover::node_chart(node_id);
  const int s0 = OrientingCover::node_s0(node_id) * (a % 2 ? -1 : 1);
  const int s1 = OrientingCover::node_s1(node_id) * (b % 2 ? -1 : 1);
  return OrientingCover::node_id(chart, s0, s1);
}

const char* orientability_tag_name(OrientabilityTag tag) {
  switch (tag) {
    case OrientabilityTag::Orientable: return "Orientable";
    case OrientabilityTag::SemiOrientable: return "SemiOrientable";
    case OrientabilityTag::Nonorientable: return "Nonorientable";
  }
  return "?";
}

OrientingCover build_orienting_cover(const SuperManifoldModel& model, double tol) {
  if (model.charts.empty()) fail(ErrorKind::Validation, "model has no charts");
  OrientingCover cover;
  for (const auto& ch : model.charts) cover.chart_ids.push_back(ch.id);
  const int node_count = 4 * static_cast<int>(model.charts.size());
  UnionFind uf(node_count);

  for (const auto& e : edge_signs(model, tol)) {
    for (int s0 : {1, -1}) {
      for (int s1 : {1, -1}) {
        const int u = OrientingCover::node_id(e.from_chart, s0, s1);
        const int v = OrientingCover::node_id(e.to_chart, s0 * e.sigma0, s1 * e.sigma1);
        uf.unite(u, v);
        cover.edges.push_back({u, v, e.transition, e.component, e.sigma0, e.sigma1});
      }
    }
  }
  cover.component_of = normalize_components(uf, node_count, &cover.component_count);
  return cover;
}

OrientabilityClass classify(const SuperManifoldModel& model, double tol) {
  const OrientingCover cover = build_orienting_cover(model, tol);
  OrientabilityClass out;
  out.component_count = cover.component_count;

  const int base = OrientingCover::node_id(0, 1, 1);
  const int base_comp = cover.component_of[static_cast<std::size_t>(base)];
  std::vector<std::pair<int, int>> stabilizer;
  for (int a : {0, 1}) {
    for (int b : {0, 1}) {
      const int image = deck_action(a, b, base);
      if (cover.component_of[static_cast<std::size_t>(image)] == base_comp) {
        stabilizer.emplace_back(a, b);
      }
    }
  }
  switch (stabilizer.size()) {
    case 1: out.tag = OrientabilityTag::Orientable; break;
    case 2:
      out.tag = OrientabilityTag::SemiOrientable;
      out.generator = stabilizer[0] == std::pair{0, 0} ? stabilizer[1] : stabilizer[0];
      break;
    default: out.tag = OrientabilityTag::Nonorientable; break;
  }

  const auto edges = edge_signs(model, tol);
  out.body_orientable = one_factor_orientable(model, edges, false);
  out.bundle_orientable = one_factor_orientable(model, edges, true);
  return out;
}

bool bundle_view_check(const SuperManifoldModel& model, double tol) {
  const OrientabilityClass c = classify(model, tol);
  return (c.tag == OrientabilityTag::Orientable) == (c.body_orientable && c.bundle_orientable);
}

ComponentTable component_action_table(const OrientingCover& cover) {
  if (cover.component_count != 4) {
    fail(ErrorKind::Validation, "component table requires all four components distinct, got " +
                                    std::to_string(cover.component_count));
  }
  ComponentTable table;
  table.label.assign(4, {-1, -1});
  for (int a : {0, 1}) {
    for (int b : {0, 1}) {
      const int node = OrientingCover::node_id(0, a ? -1 : 1, b ? -1 : 1);
      table.label[static_cast<std::size_t>(cover.component_of[static_cast<std::size_t>(node)])] = {
          a, b};
    }
  }
  for (int a : {0, 1}) {
    for (int b : {0, 1}) {
      auto& row = table.action[static_cast<std::size_t>(a * 2 + b)];
      row.assign(4, -1);
      for (std::size_t node = 0; node < cover.component_of.size(); ++node) {
        const int image = deck_action(a, b, static_cast<int>(node));
        const int from = cover.component_of[node];
        const int to = cover.component_of[static_cast<std::size_t>(image)];
        if (row[static_cast<std::size_t>(from)] < 0) {
          row[static_cast<std::size_t>(from)] = to;
        } else if (row[static_cast<std::size_t>(from)] != to) {
          fail(ErrorKind::Validation, "deck action is not constant on a component");
        }
      }
    }
  }
  return table;
}

}  // namespace supergeo
