#pragma once

#include <string>
#include <vector>

#include "supergeo/atlas.hpp"

namespace supergeo {

// A coordinate-slice submanifold of an ambient model: on each carrier chart,
// the listed even/odd ambient coordinates are pinned to zero and the retained
// ones, in the order given, form the positively oriented frames.
struct SubmanifoldSlice {
  std::string chart;
  std::vector<int> zero_even;
  std::vector<int> zero_odd;
  std::vector<int> frame_even;
  std::vector<int> frame_odd;
};

struct SubmanifoldModel {
  std::string name;
  SuperManifoldModel ambient;
  std::vector<SubmanifoldSlice> slices;
  bool closed_body = true;

  int even_codim() const;  // consistent across slices, checked
  int odd_codim() const;
};

struct SignPair {
  int delta0 = 0;  // 0 marks a degenerate (non-transversal) direction
  int delta1 = 0;
};

struct IntersectionPoint {
  std::string chart;          // chart of the source model
  std::vector<double> x;      // body coordinates there
  std::string ambient_chart;  // carrier chart the equations were solved in
  SignPair signs;
  double cond0 = 0.0;  // condition numbers of the two frame matrices
  double cond1 = 0.0;
};

struct IntersectionReport {
  std::vector<IntersectionPoint> points;
  int total0 = 0;
  int total1 = 0;
  int skipped_seeds = 0;  // grid seeds abandoned on singular Newton steps
  double newton_tol = 0.0;
  double sign_tol = 0.0;
};

struct ToleranceSet {
  double newton_tol = 1e-10;
  double sign_tol = 1e-9;
  int grid_density = 64;  // seeds per dimension
};

// Body intersection points of f with Z: zeros of the pinned even coordinates
// of the image, found chart by chart by grid-seeded Newton and deduplicated
// (within one chart by clustering, across charts by preferring the earliest
// chart whose search region contains the point).  Requires complementary
// dimensions, a compact source body, and a closed Z.
std::vector<IntersectionPoint> find_body_intersections(const MorphismModel& f,
                                                       const SubmanifoldModel& z,
                                                       const ToleranceSet& tols,
                                                       int* skipped_seeds = nullptr);

// The two frame-comparison matrices at a body intersection point: columns are
// the mapped source frame followed by Z's retained frame, rows the ambient
// chart frame.  j0 compares even frames through the reduced even Jacobian,
// j1 odd frames through the reduced odd block.
struct FramePair {
  Eigen::MatrixXd j0;
  Eigen::MatrixXd j1;
};
FramePair assemble_intersection_matrices(const MorphismModel& f, const SubmanifoldModel& z,
                                         const std::string& chart,
                                         std::span<const double> point);

// Signs of the two determinants; zero when |det| < sign_tol.
SignPair sign_pair_at(const MorphismModel& f, const SubmanifoldModel& z,
                      const std::string& chart, std::span<const double> point,
                      double sign_tol = 1e-9);

// Full oriented count.  Any degenerate point is an error advising a
// perturbation of f; transversality is not generic and is never forced here.
IntersectionReport intersection_pair(const MorphismModel& f, const SubmanifoldModel& z,
                                     const ToleranceSet& tols = {});

// Whether the reduced even and odd blocks of f agree in the pi-paired frames
// at every entry sample.  Both models must declare a pi structure.
struct PiCheckResult {
  bool ok = false;
  double max_residual = 0.0;
};
PiCheckResult check_pi_morphism(const MorphismModel& f, double tol = 1e-8);

// Same check for every transition of a single pi model.
PiCheckResult check_pi_transitions(const SuperManifoldModel& model, double tol = 1e-8);

// H must be a morphism out of product(X, line).  The restriction pins the
// line coordinate and forgets the line factor, turning "P.R" entries into
// entries on X's chart "P".
MorphismModel restrict_homotopy(const MorphismModel& h, double t);

struct HomotopyReport {
  IntersectionReport at_start;
  IntersectionReport at_end;
  bool equal = false;
};
HomotopyReport homotopy_invariance_check(const MorphismModel& h, const SubmanifoldModel& z,
                                         double t0 = 0.0, double t1 = 1.0,
                                         const ToleranceSet& tols = {});

// Even vector field components, one list per chart, index-aligned with the
// model's chart list.
struct VectorField {
  std::vector<std::vector<SuperExpr>> per_chart;
};

// Euler pair of a pi-symmetric model with compact oriented body: both slots
// carry the sum of the vector field's zero indices (sign of the reduced field
// Jacobian determinant at each nondegenerate zero), zeros being located by
// the same grid-and-Newton search and cross-chart deduplication as above.
std::pair<int, int> euler_pair_pi(const SuperManifoldModel& model, const VectorField& field,
                                  const ToleranceSet& tols = {});

}  // namespace supergeo
