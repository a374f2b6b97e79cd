#include <cmath>
#include <vector>

#include "doctest.h"
#include "supergeo/errors.hpp"
#include "supergeo/intersection.hpp"
#include "supergeo/registry.hpp"
#include "support/torus_fixtures.hpp"

using namespace supergeo;
using namespace supergeo::fixtures;

#define CHECK_THROWS_KIND(stmt, k)                     \
  do {                                                 \
    bool thrown_ = false;                              \
    try {                                              \
      stmt;                                            \
    } catch (const supergeo::Error& e_) {              \
      thrown_ = true;                                  \
      CHECK(e_.kind() == (k));                         \
    }                                                  \
    CHECK_MESSAGE(thrown_, "expected a thrown Error"); \
  } while (0)

namespace {

// Classical degree of the left-circle part of the image: walk the source
// circle once, unwrap the image angle, divide by 2 pi.  Independent of all
// sign machinery; only the body of the even components is evaluated.
int winding_oracle(const MorphismModel& f) {
  const int n = 720;
  double prev = 0.0, total = 0.0;
  bool have_prev = false;
  for (int k = 0; k <= n; ++k) {
    const double theta = 0.013 + 2.0 * M_PI * k / n;
    const double u = std::tan(theta / 2.0);
    const std::string chart = std::abs(u) <= 2.0 ? "P" : "Q";
    const std::vector<double> pt{std::abs(u) <= 2.0 ? u : -1.0 / u};
    const MorphismEntry* e = f.entry_for(chart, pt);
    if (!e) continue;  // outside this entry's validity; skip the sample
    const auto img = apply_map_body(e->even_components, f.source.chart(chart).coords, pt);
    const double phi = 2.0 * std::atan(img[0]) + (e->target_chart[0] == 'P' ? 0.0 : M_PI);
    if (have_prev) {
      double d = phi - prev;
      while (d > M_PI) d -= 2.0 * M_PI;
      while (d < -M_PI) d += 2.0 * M_PI;
      total += d;
    }
    prev = phi;
    have_prev = true;
  }
  return static_cast<int>(std::lround(total / (2.0 * M_PI)));
}

}  // namespace

TEST_CASE("vertical circle slice has codimension 1|1") {
  const auto z = vertical_circle(registry_model("T2_pi"));
  CHECK(z.even_codim() == 1);
  CHECK(z.odd_codim() == 1);
}

TEST_CASE("torus case maps are consistent morphisms") {
  const auto x = registry_model("PiS1");
  const auto y = registry_model("T2_pi");
  for (const TorusCase c : {TorusCase::Inclusion, TorusCase::OddFlip, TorusCase::Empty,
                            TorusCase::DoubleWrap, TorusCase::Cancellation}) {
    const auto f = torus_case_morphism(x, y, c);
    const auto rep = validate_morphism(f);
    for (const auto& ck : rep.checks) {
      CAPTURE(f.name);
      CAPTURE(ck.label);
      CAPTURE(ck.detail);
      CHECK(ck.passed);
    }
    CHECK(rep.passed);
  }
}

TEST_CASE("inclusion crosses the vertical circle once, positively") {
  const auto x = registry_model("PiS1");
  const auto y = registry_model("T2_pi");
  const auto f = torus_case_morphism(x, y, TorusCase::Inclusion);
  const auto z = vertical_circle(y);
  const auto rep = intersection_pair(f, z);
  REQUIRE(rep.points.size() == 1);
  CHECK(rep.points[0].chart == "P");
  CHECK(std::abs(rep.points[0].x[0]) < 1e-8);
  CHECK(rep.points[0].ambient_chart == "P.P");
  CHECK(rep.points[0].signs.delta0 == 1);
  CHECK(rep.points[0].signs.delta1 == 1);
  CHECK(rep.points[0].cond0 >= 1.0);
  CHECK(std::isfinite(rep.points[0].cond1));
  CHECK(rep.total0 == 1);
  CHECK(rep.total1 == 1);
  CHECK(rep.skipped_seeds == 0);
  CHECK(rep.newton_tol == doctest::Approx(1e-10));
  CHECK(rep.sign_tol == doctest::Approx(1e-9));
}

TEST_CASE("inclusion frame matrices are the identity at the crossing") {
  const auto y = registry_model("T2_pi");
  const auto f = torus_case_morphism(registry_model("PiS1"), y, TorusCase::Inclusion);
  const auto z = vertical_circle(y);
  const auto fp = assemble_intersection_matrices(f, z, "P", std::vector<double>{0.0});
  CHECK((fp.j0 - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-12);
  CHECK((fp.j1 - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-12);
}

TEST_CASE("odd flip keeps the body count and flips the odd sign") {
  const auto y = registry_model("T2_pi");
  const auto f = torus_case_morphism(registry_model("PiS1"), y, TorusCase::OddFlip);
  const auto rep = intersection_pair(f, vertical_circle(y));
  REQUIRE(rep.points.size() == 1);
  CHECK(rep.points[0].signs.delta0 == 1);
  CHECK(rep.points[0].signs.delta1 == -1);
  CHECK(rep.total0 == 1);
  CHECK(rep.total1 == -1);
}

TEST_CASE("constant map misses the circle") {
  const auto y = registry_model("T2_pi");
  const auto f = torus_case_morphism(registry_model("PiS1"), y, TorusCase::Empty);
  const auto rep = intersection_pair(f, vertical_circle(y));
  CHECK(rep.points.empty());
  CHECK(rep.total0 == 0);
  CHECK(rep.total1 == 0);
}

TEST_CASE("double wrap crosses twice, once per chart, both positive") {
  const auto y = registry_model("T2_pi");
  const auto f = torus_case_morphism(registry_model("PiS1"), y, TorusCase::DoubleWrap);
  const auto rep = intersection_pair(f, vertical_circle(y));
  REQUIRE(rep.points.size() == 2);
  CHECK(rep.points[0].chart == "P");
  CHECK(rep.points[1].chart == "Q");
  for (const auto& p : rep.points) {
    CHECK(std::abs(p.x[0]) < 1e-8);
    CHECK(p.signs.delta0 == 1);
    CHECK(p.signs.delta1 == 1);
  }
  CHECK(rep.total0 == 2);
  CHECK(rep.total1 == 2);
}

TEST_CASE("cancelling pair sums to zero with opposite member signs") {
  const auto y = registry_model("T2_pi");
  const auto f = torus_case_morphism(registry_model("PiS1"), y, TorusCase::Cancellation);
  const auto rep = intersection_pair(f, vertical_circle(y));
  REQUIRE(rep.points.size() == 2);
  CHECK(rep.total0 == 0);
  CHECK(rep.total1 == 0);
  for (const auto& p : rep.points) {
    CHECK(p.signs.delta0 != 0);
    CHECK(p.signs.delta0 == p.signs.delta1);  // lifted members agree slotwise
  }
  CHECK(rep.points[0].signs.delta0 * rep.points[1].signs.delta0 == -1);
}

TEST_CASE("body totals match the winding number of the image") {
  const auto x = registry_model("PiS1");
  const auto y = registry_model("T2_pi");
  const auto z = vertical_circle(y);
  const TorusCase cases[] = {TorusCase::Inclusion, TorusCase::OddFlip, TorusCase::Empty,
                             TorusCase::DoubleWrap, TorusCase::Cancellation};
  const int expected[] = {1, 1, 0, 2, 0};
  for (int i = 0; i < 5; ++i) {
    const auto f = torus_case_morphism(x, y, cases[i]);
    CAPTURE(f.name);
    const int w = winding_oracle(f);
    CHECK(w == expected[i]);
    CHECK(intersection_pair(f, z).total0 == w);
  }
}

TEST_CASE("pi pairing check separates lifted maps from the odd flip") {
  const auto x = registry_model("PiS1");
  const auto y = registry_model("T2_pi");
  for (const TorusCase c :
       {TorusCase::Inclusion, TorusCase::DoubleWrap, TorusCase::Cancellation}) {
    const auto res = check_pi_morphism(torus_case_morphism(x, y, c));
    CAPTURE(torus_case_name(c));
    CHECK(res.ok);
    CHECK(res.max_residual < 1e-10);
  }
  const auto flipped = check_pi_morphism(torus_case_morphism(x, y, TorusCase::OddFlip));
  CHECK_FALSE(flipped.ok);
  CHECK(flipped.max_residual == doctest::Approx(2.0));

  CHECK(check_pi_morphism(identity_morphism(y)).ok);
  CHECK(check_pi_transitions(y).ok);
  CHECK(check_pi_transitions(y).max_residual < 1e-10);
  CHECK_THROWS_KIND((void)check_pi_transitions(registry_model("N11")),
                    ErrorKind::Validation);
}

TEST_CASE("frame order carries the orientation signs") {
  const auto y = registry_model("T2_pi");
  const auto f = point_morphism(y);
  const std::vector<double> pt{};

  const auto s1 = sign_pair_at(f, full_torus_slice(y, {0, 1}, {0, 1}), "pt", pt);
  CHECK(s1.delta0 == 1);
  CHECK(s1.delta1 == 1);
  const auto s2 = sign_pair_at(f, full_torus_slice(y, {1, 0}, {0, 1}), "pt", pt);
  CHECK(s2.delta0 == -1);
  CHECK(s2.delta1 == 1);
  const auto s3 = sign_pair_at(f, full_torus_slice(y, {0, 1}, {1, 0}), "pt", pt);
  CHECK(s3.delta0 == 1);
  CHECK(s3.delta1 == -1);
  const auto s4 = sign_pair_at(f, full_torus_slice(y, {1, 0}, {1, 0}), "pt", pt);
  CHECK(s4.delta0 == -1);
  CHECK(s4.delta1 == -1);

  const auto rep = intersection_pair(f, full_torus_slice(y, {1, 0}, {0, 1}));
  REQUIRE(rep.points.size() == 1);
  CHECK(rep.total0 == -1);
  CHECK(rep.total1 == 1);
}

TEST_CASE("rotating homotopy preserves the crossing pair") {
  const auto x = registry_model("PiS1");
  const auto y = registry_model("T2_pi");
  const auto h = rotating_homotopy(x, y);
  const auto vrep = validate_morphism(h);
  for (const auto& ck : vrep.checks) {
    CAPTURE(ck.label);
    CAPTURE(ck.detail);
    CHECK(ck.passed);
  }

  const auto r0 = restrict_homotopy(h, 0.0);
  CHECK(r0.source.name == "PiS1");
  REQUIRE(r0.entries.size() == 2);
  CHECK(r0.entries[0].source_chart == "P");
  CHECK(r0.entries[1].source_chart == "Q");
  const auto incl = torus_case_morphism(x, y, TorusCase::Inclusion);
  for (const double u : {0.7, -0.4}) {
    const auto a = evaluate_morphism(r0, "P", std::vector<double>{u});
    const auto b = evaluate_morphism(incl, "P", std::vector<double>{u});
    CHECK(a.chart == b.chart);
    CHECK(a.body[0] == doctest::Approx(b.body[0]).epsilon(1e-12));
    CHECK(a.body[1] == doctest::Approx(b.body[1]).epsilon(1e-12));
    CHECK((a.even_block - b.even_block).norm() < 1e-12);
    CHECK((a.odd_block - b.odd_block).norm() < 1e-12);
  }

  const auto hr = homotopy_invariance_check(h, vertical_circle(y));
  CHECK(hr.equal);
  CHECK(hr.at_start.total0 == 1);
  CHECK(hr.at_start.total1 == 1);
  CHECK(hr.at_end.total0 == 1);
  CHECK(hr.at_end.total1 == 1);
  REQUIRE(hr.at_end.points.size() == 1);
  CHECK(hr.at_end.points[0].x[0] ==
        doctest::Approx(-std::tan(0.3)).epsilon(1e-8));
}

TEST_CASE("cancelling homotopy stays at zero while the points vanish") {
  const auto x = registry_model("PiS1");
  const auto y = registry_model("T2_pi");
  const auto h = cancellation_homotopy(x, y);
  CHECK(validate_morphism(h).passed);
  const auto hr = homotopy_invariance_check(h, vertical_circle(y));
  CHECK(hr.equal);
  CHECK(hr.at_start.total0 == 0);
  CHECK(hr.at_start.total1 == 0);
  CHECK(hr.at_start.points.size() == 2);
  CHECK(hr.at_end.points.empty());
}

TEST_CASE("euler pair of the pi torus vanishes") {
  const auto y = registry_model("T2_pi");
  VectorField constant_field;
  for (std::size_t i = 0; i < y.charts.size(); ++i) {
    constant_field.per_chart.push_back({ex::constant(1.0), ex::constant(1.0)});
  }
  const auto pair = euler_pair_pi(y, constant_field);
  CHECK(pair.first == 0);
  CHECK(pair.second == 0);
}

TEST_CASE("circle field zeros cancel and cross-chart duplicates are dropped") {
  const auto x = registry_model("PiS1");
  const CoordinateSystem cs = CoordinateSystem::standard(1, 1);
  VectorField field;
  field.per_chart.push_back({parse("x1^2 - 1", cs)});  // chart P: zeros at +-1
  field.per_chart.push_back({parse("1 - x1^2", cs)});  // same field in chart Q
  const auto pair = euler_pair_pi(x, field);
  CHECK(pair.first == 0);
  CHECK(pair.second == 0);
}

TEST_CASE("degenerate data is refused, not absorbed") {
  const auto x = registry_model("PiS1");
  const auto y = registry_model("T2_pi");
  const auto z = vertical_circle(y);

  SUBCASE("tangential crossing") {
    MorphismModel f;
    f.name = "tangential";
    f.source = x;
    f.target = y;
    f.entries.push_back(lifted_entry("P", "P.P", "x1^2"));
    ToleranceSet tols;
    tols.sign_tol = 1e-4;
    CHECK_THROWS_KIND((void)intersection_pair(f, z, tols), ErrorKind::Degeneracy);
  }

  SUBCASE("pinching vector field") {
    const CoordinateSystem cs = CoordinateSystem::standard(1, 1);
    VectorField field;
    field.per_chart.push_back({parse("x1^2", cs)});
    field.per_chart.push_back({ex::constant(1.0)});
    ToleranceSet tols;
    tols.sign_tol = 1e-4;
    CHECK_THROWS_KIND((void)euler_pair_pi(x, field, tols), ErrorKind::Degeneracy);
  }

  SUBCASE("preconditions") {
    const auto incl = torus_case_morphism(x, y, TorusCase::Inclusion);

    auto open_z = z;
    open_z.closed_body = false;
    CHECK_THROWS_KIND((void)intersection_pair(incl, open_z), ErrorKind::Validation);

    auto noncompact = incl;
    noncompact.source.compact_body = false;
    CHECK_THROWS_KIND((void)intersection_pair(noncompact, z), ErrorKind::Validation);

    auto wrong_codim = z;
    for (auto& s : wrong_codim.slices) {
      s.zero_odd.clear();
      s.frame_odd = {0, 1};
    }
    CHECK_THROWS_KIND((void)intersection_pair(incl, wrong_codim), ErrorKind::Dimension);

    auto doubled = z;
    doubled.slices[0].frame_even = {0};
    CHECK_THROWS_KIND((void)intersection_pair(incl, doubled), ErrorKind::Validation);

    auto gap = z;
    gap.slices[0].frame_even.clear();
    CHECK_THROWS_KIND((void)intersection_pair(incl, gap), ErrorKind::Validation);

    auto lost = z;
    lost.slices[0].chart = "nowhere";
    CHECK_THROWS_KIND((void)intersection_pair(incl, lost), ErrorKind::Validation);

    CHECK_THROWS_KIND((void)restrict_homotopy(incl, 0.5), ErrorKind::Validation);

    const auto wrap = torus_case_morphism(x, y, TorusCase::DoubleWrap);
    CHECK_THROWS_KIND((void)sign_pair_at(wrap, z, "P", std::vector<double>{1.0}),
                      ErrorKind::Domain);

    VectorField short_field;
    short_field.per_chart.push_back({ex::constant(1.0)});
    CHECK_THROWS_KIND((void)euler_pair_pi(x, short_field), ErrorKind::Validation);

    VectorField odd_field;
    const CoordinateSystem cs = CoordinateSystem::standard(1, 1);
    odd_field.per_chart.push_back({parse("xi1", cs)});
    odd_field.per_chart.push_back({parse("xi1", cs)});
    CHECK_THROWS_KIND((void)euler_pair_pi(x, odd_field), ErrorKind::Validation);

    VectorField ok_field;
    ok_field.per_chart.push_back({ex::constant(1.0)});
    ok_field.per_chart.push_back({ex::constant(1.0)});
    CHECK_THROWS_KIND((void)euler_pair_pi(registry_model("N11"), ok_field),
                      ErrorKind::Validation);
  }
}
