#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "supergeo/superexpr.hpp"

namespace supergeo {

// One coordinate patch.  The body domain is a conjunction of strict
// inequalities `expr > 0` over the even coordinates; an empty list means the
// whole R^m.  interior_samples are points known to lie in the domain; they
// seed identity-factor overlaps in products and similar constructions.
// seed_box bounds the region searched when grid-seeding zero finders; it must
// contain every point of the model not covered more conveniently by another
// chart.
struct Chart {
  std::string id;
  CoordinateSystem coords;
  std::vector<SuperExpr> domain;
  std::vector<std::vector<double>> interior_samples;
  std::vector<std::pair<double, double>> seed_box;
};

// A connected piece of an overlap, with the sample points the validators and
// the sign computations evaluate at.  Sign data is taken from the first
// sample; consistency across the rest is checked separately.
struct OverlapComponent {
  std::vector<SuperExpr> predicate;
  std::vector<std::vector<double>> samples;
};

struct TransitionMap {
  std::string from;
  std::string to;
  std::vector<SuperExpr> even_components;
  std::vector<SuperExpr> odd_components;
  std::vector<OverlapComponent> overlaps;
};

// Declared triple overlap: check map(a->c) against map(b->c) after map(a->b)
// at sample points given in chart a coordinates.
struct TripleOverlap {
  std::string a;
  std::string b;
  std::string c;
  std::vector<std::vector<double>> samples;
};

// Declared pairing between even and odd coordinate directions, one list per
// chart: pairing[chart][e] = odd index paired with even index e.  An empty
// outer vector means the index-aligned pairing in every chart.
struct PiStructure {
  std::vector<std::vector<int>> pairing;
};

struct SuperManifoldModel {
  std::string name;
  std::string description;
  int even_dim = 0;
  int odd_dim = 0;
  std::vector<Chart> charts;
  std::vector<TransitionMap> transitions;
  std::vector<TripleOverlap> triples;
  bool compact_body = false;
  std::optional<PiStructure> pi;

  // Set when the model was built as a product; restriction operations use it
  // to recover the factors.  Chart ids of a product are "<left>.<right>".
  struct Product {
    std::shared_ptr<const SuperManifoldModel> left;
    std::shared_ptr<const SuperManifoldModel> right;
  };
  std::optional<Product> product_of;

  int chart_index(const std::string& id) const;  // Validation error if absent
  const Chart& chart(const std::string& id) const;
  const TransitionMap* find_transition(const std::string& from, const std::string& to) const;
  // Odd index paired with even index `e` in the given chart (identity when no
  // explicit pairing is stored).
  int pi_partner(int chart, int e) const;
};

// One chart-to-chart piece of a morphism.  Components express the target
// chart's coordinates over the source chart's coordinate system; validity is
// a predicate list like Chart::domain restricting where this piece applies.
struct MorphismEntry {
  std::string source_chart;
  std::string target_chart;
  std::vector<SuperExpr> even_components;
  std::vector<SuperExpr> odd_components;
  std::vector<SuperExpr> validity;
  std::vector<std::vector<double>> samples;
};

struct MorphismModel {
  std::string name;
  SuperManifoldModel source;
  SuperManifoldModel target;
  std::vector<MorphismEntry> entries;

  const MorphismEntry* entry_for(const std::string& source_chart,
                                 std::span<const double> point) const;
};

struct CheckRecord {
  std::string label;
  bool passed = false;
  double residual = 0.0;
  std::string detail;
};

struct ValidationReport {
  bool passed = true;
  double max_residual = 0.0;
  std::vector<CheckRecord> checks;

  void record(std::string label, bool ok, double residual, std::string detail = "");
};

// Sample-based gluing checks: component parities, samples inside their
// predicates, mapped samples inside the target domain, nonsingular reduced
// diagonal blocks, reverse map undoing the forward map (full Grassmann
// evaluation, not just the body), reduced-block inverse consistency, declared
// triple overlaps, and (when a pi structure is declared) equality of the
// reduced even and odd blocks in the paired frames.  Structural defects
// (unknown chart ids, wrong component counts) throw Validation errors; math
// failures land in the report.
ValidationReport validate_model(const SuperManifoldModel& model, double tol = 1e-9);

// Parity, validity-at-samples, and chart compatibility: for entries on
// overlapping source charts, mapping then transitioning must agree with
// transitioning then mapping at the overlap samples.
ValidationReport validate_morphism(const MorphismModel& f, double tol = 1e-9);

struct MorphismValue {
  std::string chart;
  std::vector<double> body;
  Eigen::MatrixXd even_block;  // reduced d(target even)/d(source even)
  Eigen::MatrixXd odd_block;   // reduced d(target odd)/d(source odd)
};

// Evaluate at a body point of the named source chart.  Domain error when no
// entry's validity covers the point.
MorphismValue evaluate_morphism(const MorphismModel& f, const std::string& chart,
                                std::span<const double> point);

// Applies f first, then g.
MorphismModel compose_morphisms(const MorphismModel& f, const MorphismModel& g);

MorphismModel identity_morphism(const SuperManifoldModel& model);

// Product atlas: charts "<a>.<b>", coordinates of the left factor first.
// Transitions cover left-only, right-only, and diagonal moves; triple
// overlaps for the commuting squares are declared automatically.
SuperManifoldModel product_model(const SuperManifoldModel& left,
                                 const SuperManifoldModel& right, const std::string& name);

// Odd components of the tangent lift through a body map: for even components
// g_i over an m|m chart, returns sum_j d g_i/d x_j * xi_j.  Together with the
// g_i these form a pi-compatible morphism piece.
std::vector<SuperExpr> tangent_lift_odd(const std::vector<SuperExpr>& even_components,
                                        const CoordinateSystem& coords);

// ===== evaluation helpers shared by the sign machinery =====

// Real point lifted to Grassmann scalars.
std::vector<GrassmannElement> lift_point(std::span<const double> point, int generator_count);

// xi_0 .. xi_{n-1} as elements of the n-generator algebra.
std::vector<GrassmannElement> generator_basis_vector(int generator_count);

// Map a tuple of expressions over Grassmann-valued arguments.
std::vector<GrassmannElement> apply_map_super(const std::vector<SuperExpr>& components,
                                              std::span<const GrassmannElement> even_values,
                                              std::span<const GrassmannElement> odd_values);

// Body of the even components at a real point.
std::vector<double> apply_map_body(const std::vector<SuperExpr>& even_components,
                                   const CoordinateSystem& coords,
                                   std::span<const double> point);

bool satisfies(const std::vector<SuperExpr>& predicate, std::span<const double> point);

// Reduced diagonal Jacobian blocks of a coordinate map at a body point.
Eigen::MatrixXd reduced_even_block(const std::vector<SuperExpr>& even_components,
                                   const CoordinateSystem& coords, std::span<const double> point);
Eigen::MatrixXd reduced_odd_block(const std::vector<SuperExpr>& odd_components,
                                  const CoordinateSystem& coords, std::span<const double> point);

}  // namespace supergeo
