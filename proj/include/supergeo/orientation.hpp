#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "supergeo/atlas.hpp"

namespace supergeo {

// Four sign-decorated copies of every chart, glued by the signs of the
// reduced transition blocks.  Node ids pack (chart, signs) as
// chart*4 + 2*[s0 < 0] + [s1 < 0].
struct CoverEdge {
  int from_node = 0;
  int to_node = 0;
  std::string transition;  // "from->to"
  int component = 0;       // overlap component index within that transition
  int sigma0 = 1;
  int sigma1 = 1;
};

struct OrientingCover {
  std::vector<std::string> chart_ids;
  std::vector<CoverEdge> edges;
  std::vector<int> component_of;  // node id -> component, numbered by first appearance
  int component_count = 0;

  static int node_id(int chart, int s0, int s1) {
    return chart * 4 + (s0 < 0 ? 2 : 0) + (s1 < 0 ? 1 : 0);
  }
  static int node_chart(int id) { return id / 4; }
  static int node_s0(int id) { return (id & 2) ? -1 : 1; }
  static int node_s1(int id) { return (id & 1) ? -1 : 1; }
};

// (a,b) acts by flipping the even sign a times and the odd sign b times.
int deck_action(int a, int b, int node_id);

enum class OrientabilityTag { Orientable, SemiOrientable, Nonorientable };
const char* orientability_tag_name(OrientabilityTag tag);

struct OrientabilityClass {
  OrientabilityTag tag = OrientabilityTag::Orientable;
  int component_count = 0;
  // The deck element generating the stabilizer of the base component; set
  // exactly in the semi-orientable case.
  std::optional<std::pair<int, int>> generator;
  bool body_orientable = false;
  bool bundle_orientable = false;
};

// Signs are read off at the first sample of each overlap component and must
// agree across the remaining samples (a disagreement means the declared
// component was not actually connected).  |det| below tol is a degeneracy.
OrientingCover build_orienting_cover(const SuperManifoldModel& model, double tol = 1e-9);

// Tag from the stabilizer of the base component under the deck action:
// trivial -> Orientable, order 2 -> SemiOrientable, full -> Nonorientable.
// body/bundle orientability use the same edge signs restricted to one factor.
OrientabilityClass classify(const SuperManifoldModel& model, double tol = 1e-9);

// Orientable tag must coincide with body and bundle being simultaneously
// orientable.
bool bundle_view_check(const SuperManifoldModel& model, double tol = 1e-9);

// Induced deck action on components, for covers with all four components
// distinct.  label[c] is the (a,b) with (-1)^a, (-1)^b the signs of the
// chart-0 node in component c; action[a*2+b][c] is the image component.
struct ComponentTable {
  std::vector<std::pair<int, int>> label;
  std::array<std::vector<int>, 4> action;
};
ComponentTable component_action_table(const OrientingCover& cover);

}  // namespace supergeo
