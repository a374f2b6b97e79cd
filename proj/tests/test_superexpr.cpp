#include "supergeo/superexpr.hpp"

#include <cmath>
#include <random>

#include "doctest.h"
#include "support/finite_diff.hpp"

using namespace supergeo;

namespace {

const CoordinateSystem& coords22() {
  static const CoordinateSystem cs = CoordinateSystem::standard(2, 2);
  return cs;
}

GrassmannElement gen(int n, int i) { return GrassmannElement::generator(n, i); }

std::vector<GrassmannElement> generator_basis(int n) {
  std::vector<GrassmannElement> out;
  for (int i = 0; i < n; ++i) out.push_back(gen(n, i));
  return out;
}

double body_at(const SuperExpr& e, const CoordinateSystem& cs, std::vector<double> pt) {
  return eval_scalar(body_expr(e, cs), pt);
}

// Random expressions for property tests: polynomial-ish so they are defined
// everywhere, with an optional transcendental layer.
SuperExpr random_expr(std::mt19937& rng, const CoordinateSystem& cs, int depth,
                      bool transcendental) {
  std::uniform_real_distribution<double> coeff(-2.0, 2.0);
  std::uniform_int_distribution<int> pick(0, 5);
  if (depth == 0) {
    switch (pick(rng) % 3) {
      case 0: return ex::constant(coeff(rng));
      case 1: return ex::even_var(static_cast<int>(rng() % cs.even_count()));
      default: return ex::odd_var(static_cast<int>(rng() % cs.odd_count()));
    }
  }
  const SuperExpr a = random_expr(rng, cs, depth - 1, transcendental);
  const SuperExpr b = random_expr(rng, cs, depth - 1, transcendental);
  switch (pick(rng)) {
    case 0: return ex::add(a, b);
    case 1: return ex::sub(a, b);
    case 2: return ex::mul(a, b);
    case 3: return ex::neg(a);
    case 4:
      if (transcendental) return ex::apply(UnaryFunc::Sin, ex::mul(a, b));
      return ex::mul(a, b);
    default:
      // keep denominators bounded away from zero: 2 + (even body)^2 would be
      // costly to arrange, so divide by a positive constant shift instead
      return ex::div(a, ex::constant(2.0 + std::abs(coeff(rng))));
  }
}

}  // namespace

// ===== parsing =====

TEST_CASE("parse handles the documented grammar") {
  const auto& cs = coords22();
  const SuperExpr e = parse("x1 + x2*xi1 - sin(x1)*xi1*xi2", cs);
  const OddPolynomialForm f = normalize(e, cs);
  CHECK(eval_scalar(f.coefficient(0), std::vector<double>{0.3, 0.0}) == doctest::Approx(0.3));
  CHECK(eval_scalar(f.coefficient(0b01), std::vector<double>{0.3, 1.7}) == doctest::Approx(1.7));
  CHECK(eval_scalar(f.coefficient(0b11), std::vector<double>{0.5, 0.0}) ==
        doctest::Approx(-std::sin(0.5)));
}

TEST_CASE("parse rejects malformed input with a position") {
  const auto& cs = coords22();
  CHECK_THROWS_WITH_AS(parse("x1 + * x2", cs), doctest::Contains("position 5"), Error);
  CHECK_THROWS_WITH_AS(parse("x1^2.5", cs), doctest::Contains("integer"), Error);
  CHECK_THROWS_WITH_AS(parse("y1 + 1", cs), doctest::Contains("unknown identifier"), Error);
  CHECK_THROWS_AS(parse("sin x1", cs), Error);
  CHECK_THROWS_AS(parse("(x1", cs), Error);
  CHECK_THROWS_AS(parse("x1^2^3", cs), Error);
}

TEST_CASE("numbers parse in decimal and exponent notation") {
  const auto& cs = coords22();
  CHECK(eval_scalar(parse("1.5e-3 + 2", cs), std::vector<double>{0, 0}) ==
        doctest::Approx(2.0015));
  CHECK(eval_scalar(parse("0.25*4", cs), std::vector<double>{0, 0}) == doctest::Approx(1.0));
}

TEST_CASE("to_string round-trips through parse") {
  const auto& cs = coords22();
  std::mt19937 rng(424242);
  const std::vector<double> pt{0.7, -0.4};
  const auto basis = generator_basis(2);
  for (int trial = 0; trial < 40; ++trial) {
    const SuperExpr e = random_expr(rng, cs, 3, true);
    const SuperExpr back = parse(to_string(e, cs), cs);
    const GrassmannElement a = eval(e, cs, pt, basis);
    const GrassmannElement b = eval(back, cs, pt, basis);
    CHECK(max_abs_coefficient_diff(a, b) < 1e-12);
  }
}

// ===== normal form =====

TEST_CASE("repeated odd factor collapses to zero") {
  const auto& cs = coords22();
  const OddPolynomialForm f = normalize(parse("xi1*xi1", cs), cs);
  CHECK(f.coefficients().empty());
}

TEST_CASE("odd factors are put into ascending order with signs") {
  const auto& cs = coords22();
  // x1*xi2*xi1 = -x1 xi1 xi2
  const OddPolynomialForm f = normalize(parse("x1*xi2*xi1", cs), cs);
  REQUIRE(f.coefficients().size() == 1);
  CHECK(eval_scalar(f.coefficient(0b11), std::vector<double>{2.0, 0.0}) == doctest::Approx(-2.0));
}

TEST_CASE("normalize expands quotients by nilpotent souls") {
  const auto& cs = coords22();
  // 1/(1 + xi1*xi2) = 1 - xi1*xi2 because the soul squares to zero
  const OddPolynomialForm f = normalize(parse("1/(1 + xi1*xi2)", cs), cs);
  CHECK(eval_scalar(f.coefficient(0), std::vector<double>{0, 0}) == doctest::Approx(1.0));
  CHECK(eval_scalar(f.coefficient(0b11), std::vector<double>{0, 0}) == doctest::Approx(-1.0));
}

TEST_CASE("division by a zero-body expression is rejected at normalize time") {
  const auto& cs = coords22();
  CHECK_THROWS_AS(normalize(parse("1/xi1", cs), cs), Error);
  CHECK_THROWS_AS(normalize(parse("x1/(xi1*xi2)", cs), cs), Error);
}

TEST_CASE("normalize then re-normalize is numerically idempotent") {
  const auto& cs = coords22();
  std::mt19937 rng(1618);
  const auto basis = generator_basis(2);
  for (int trial = 0; trial < 30; ++trial) {
    const SuperExpr e = random_expr(rng, cs, 3, true);
    const SuperExpr once = form_to_expr(normalize(e, cs));
    const SuperExpr twice = form_to_expr(normalize(once, cs));
    for (const std::vector<double>& pt : {std::vector<double>{0.3, 0.9},
                                         std::vector<double>{-1.1, 0.2}}) {
      const GrassmannElement a = eval(once, cs, pt, basis);
      const GrassmannElement b = eval(twice, cs, pt, basis);
      CHECK(max_abs_coefficient_diff(a, b) < 1e-10);
    }
  }
}

TEST_CASE("parity classification") {
  const auto& cs = coords22();
  CHECK(parity_of(parse("x1 + x2^2 + xi1*xi2", cs), cs) == Parity::Even);
  CHECK(parity_of(parse("xi1 + x1*xi2", cs), cs) == Parity::Odd);
  CHECK(parity_of(parse("x1 + xi1", cs), cs) == Parity::Mixed);
  CHECK(parity_of(parse("0", cs), cs) == Parity::Even);
}

// ===== differentiation =====

TEST_CASE("even derivative examples") {
  const auto& cs = coords22();
  const SuperExpr d = diff_even(parse("sin(x1)*xi1", cs), cs, 0);
  // expect cos(x1) * xi1
  const OddPolynomialForm f = normalize(d, cs);
  CHECK(eval_scalar(f.coefficient(0b01), std::vector<double>{0.4, 0.0}) ==
        doctest::Approx(std::cos(0.4)));
}

TEST_CASE("left odd derivative signs") {
  const auto& cs = coords22();
  const SuperExpr e = parse("xi1*xi2", cs);

  const OddPolynomialForm d1 = normalize(diff_odd(e, cs, 0), cs);
  CHECK(eval_scalar(d1.coefficient(0b10), std::vector<double>{0, 0}) == doctest::Approx(1.0));

  const OddPolynomialForm d2 = normalize(diff_odd(e, cs, 1), cs);
  CHECK(eval_scalar(d2.coefficient(0b01), std::vector<double>{0, 0}) == doctest::Approx(-1.0));
}

TEST_CASE("odd derivatives square to zero and anticommute") {
  const auto& cs = coords22();
  std::mt19937 rng(3141);
  for (int trial = 0; trial < 25; ++trial) {
    const SuperExpr e = random_expr(rng, cs, 3, false);
    const SuperExpr dd = diff_odd(diff_odd(e, cs, 0), cs, 0);
    CHECK(normalize(dd, cs).coefficients().empty());

    const SuperExpr ab = diff_odd(diff_odd(e, cs, 0), cs, 1);
    const SuperExpr ba = diff_odd(diff_odd(e, cs, 1), cs, 0);
    const SuperExpr sum = ex::add(ab, ba);
    CHECK(normalize(sum, cs).coefficients().empty());
  }
}

TEST_CASE("graded Leibniz rule for the left odd derivative") {
  const auto& cs = coords22();
  std::mt19937 rng(2718);
  const auto basis = generator_basis(2);
  const std::vector<double> pt{0.8, -0.3};
  for (int trial = 0; trial < 30; ++trial) {
    // homogeneous left factor: either even or odd
    const bool left_odd = (trial % 2) == 1;
    const SuperExpr f = left_odd ? parse("xi1 + x1*xi2", cs) : random_expr(rng, cs, 2, false);
    const SuperExpr f_h = left_odd ? f : form_to_expr([&] {
      OddPolynomialForm form = normalize(f, cs);
      OddPolynomialForm even_part(form.even_count(), form.odd_count());
      for (const auto& [mask, coeff] : form.coefficients()) {
        if (std::popcount(mask) % 2 == 0) even_part.set_coefficient(mask, coeff);
      }
      return even_part;
    }());
    const SuperExpr g = random_expr(rng, cs, 2, false);
    for (int j = 0; j < 2; ++j) {
      const SuperExpr lhs = diff_odd(ex::mul(f_h, g), cs, j);
      SuperExpr rhs = ex::mul(diff_odd(f_h, cs, j), g);
      SuperExpr second = ex::mul(f_h, diff_odd(g, cs, j));
      if (left_odd) second = ex::neg(second);
      rhs = ex::add(rhs, second);
      const GrassmannElement a = eval(lhs, cs, pt, basis);
      const GrassmannElement b = eval(rhs, cs, pt, basis);
      CHECK(max_abs_coefficient_diff(a, b) < 1e-9);
    }
  }
}

TEST_CASE("even derivative matches finite differences on coefficients") {
  const auto& cs = coords22();
  const SuperExpr e = parse("sin(x2)*xi2 + x1^2*x2 + exp(x1)*xi1*xi2", cs);
  const std::vector<double> pt{0.7, 0.4};
  for (int wrt = 0; wrt < 2; ++wrt) {
    const SuperExpr de = diff_even(e, cs, wrt);
    const OddPolynomialForm fe = normalize(e, cs);
    const OddPolynomialForm fd_form = normalize(de, cs);
    for (const std::uint64_t mask : {0b00ULL, 0b01ULL, 0b10ULL, 0b11ULL}) {
      const SuperExpr coeff = fe.coefficient(mask);
      const double got = eval_scalar(fd_form.coefficient(mask), pt);
      const double want = fd::derivative(
          [&](const std::vector<double>& x) { return eval_scalar(coeff, x); }, pt, wrt);
      CHECK(fd::rel_err(got, want) < 1e-6);
    }
  }
}

TEST_CASE("unary derivative tables match finite differences") {
  for (const UnaryFunc f : {UnaryFunc::Sin, UnaryFunc::Cos, UnaryFunc::Exp, UnaryFunc::Log,
                            UnaryFunc::Sqrt, UnaryFunc::Atan}) {
    const double at = 0.9;
    const auto table = unary_derivatives(f, at, 4);
    for (int p = 1; p <= 3; ++p) {
      const double h = 1e-5;
      const double up = unary_derivatives(f, at + h, p - 1)[p - 1];
      const double dn = unary_derivatives(f, at - h, p - 1)[p - 1];
      CHECK(fd::rel_err(table[p], (up - dn) / (2 * h)) < 1e-5);
    }
  }
}

// ===== evaluation =====

TEST_CASE("eval substitutes Grassmann values for odd variables") {
  const CoordinateSystem cs = CoordinateSystem::standard(0, 1);
  const SuperExpr e = parse("1/(2 + xi1)", cs);
  const GrassmannElement val = eval(e, cs, std::vector<double>{}, generator_basis(1));
  CHECK(val.coefficient(0) == doctest::Approx(0.5));
  CHECK(val.coefficient(1) == doctest::Approx(-0.25));
}

TEST_CASE("eval applies smooth functions through the soul") {
  const auto& cs = coords22();
  // exp(x1 + xi1*xi2) = exp(x1)(1 + xi1 xi2)
  const SuperExpr e = parse("exp(x1 + xi1*xi2)", cs);
  const GrassmannElement val = eval(e, cs, std::vector<double>{0.5, 0.0}, generator_basis(2));
  CHECK(val.coefficient(0) == doctest::Approx(std::exp(0.5)));
  CHECK(val.coefficient(0b11) == doctest::Approx(std::exp(0.5)));
}

TEST_CASE("eval_super accepts even arguments with soul") {
  const auto& cs = coords22();
  const SuperExpr e = parse("1/x1 + x2", cs);
  const int n = 2;
  // x1 -> 2 + xi1 xi2 (even with soul), x2 -> 1
  const GrassmannElement x1 = GrassmannElement::scalar(n, 2.0) + gen(n, 0) * gen(n, 1);
  const GrassmannElement x2 = GrassmannElement::scalar(n, 1.0);
  const GrassmannElement got = eval_super(e, std::vector<GrassmannElement>{x1, x2},
                                          generator_basis(n));
  // 1/(2 + s) = 1/2 - s/4
  CHECK(got.coefficient(0) == doctest::Approx(1.5));
  CHECK(got.coefficient(0b11) == doctest::Approx(-0.25));
}

TEST_CASE("eval_super agrees with form evaluation on soul-free points") {
  const auto& cs = coords22();
  std::mt19937 rng(99);
  const auto basis = generator_basis(2);
  for (int trial = 0; trial < 30; ++trial) {
    const SuperExpr e = random_expr(rng, cs, 3, true);
    const std::vector<double> pt{0.6, 1.2};
    std::vector<GrassmannElement> evens{GrassmannElement::scalar(2, pt[0]),
                                        GrassmannElement::scalar(2, pt[1])};
    const GrassmannElement a = eval(e, cs, pt, basis);
    const GrassmannElement b = eval_super(e, evens, basis);
    CHECK(max_abs_coefficient_diff(a, b) < 1e-10);
  }
}

TEST_CASE("domain errors surface at evaluation") {
  const auto& cs = coords22();
  CHECK_THROWS_AS(eval_scalar(parse("1/x1", cs), std::vector<double>{0.0, 1.0}), Error);
  CHECK_THROWS_AS(eval_scalar(parse("log(x1)", cs), std::vector<double>{-1.0, 0.0}), Error);
  CHECK_THROWS_AS(eval_scalar(parse("sqrt(x1)", cs), std::vector<double>{-4.0, 0.0}), Error);
  CHECK_THROWS_AS(eval_scalar(parse("x1^-1", cs), std::vector<double>{0.0, 0.0}), Error);

  // sqrt with soul present needs a strictly positive body
  const SuperExpr e = parse("sqrt(x1 + xi1*xi2)", cs);
  CHECK_THROWS_AS(eval(e, cs, std::vector<double>{0.0, 0.0}, generator_basis(2)), Error);
}

// ===== substitution and composition =====

TEST_CASE("substitute composes maps") {
  const auto& cs = coords22();
  // outer lives on a 1|1 system; plug in y1 = x1^2, eta1 = x1*xi1
  const SuperExpr outer = parse("x1 + x1*xi1", CoordinateSystem::standard(1, 1));
  const SuperExpr composed =
      substitute(outer, {parse("x1^2", cs)}, {parse("x1*xi1", cs)});
  const OddPolynomialForm f = normalize(composed, cs);
  CHECK(eval_scalar(f.coefficient(0), std::vector<double>{1.5, 0}) == doctest::Approx(2.25));
  // x1^2 * (x1 * xi1) coefficient: x1^3
  CHECK(eval_scalar(f.coefficient(0b01), std::vector<double>{1.5, 0}) ==
        doctest::Approx(std::pow(1.5, 3)));
}

TEST_CASE("remap_variables relocates a factor into a product chart") {
  const CoordinateSystem small = CoordinateSystem::standard(1, 1);
  const CoordinateSystem big = CoordinateSystem::standard(2, 2);
  const SuperExpr e = parse("-1/x1 + x1*xi1", small);
  const SuperExpr moved = remap_variables(e, {1}, {1});
  const OddPolynomialForm f = normalize(moved, big);
  CHECK(eval_scalar(f.coefficient(0), std::vector<double>{9.0, 2.0}) == doctest::Approx(-0.5));
  CHECK(eval_scalar(f.coefficient(0b10), std::vector<double>{9.0, 2.0}) == doctest::Approx(2.0));
}

// ===== Jacobians =====

TEST_CASE("jacobian blocks of a 1|1 chart change") {
  const CoordinateSystem cs = CoordinateSystem::standard(1, 1);
  const std::vector<SuperExpr> comps{parse("-1/x1", cs), parse("xi1/x1^2", cs)};
  const BlockJacobian jb = jacobian_blocks(comps, 1, cs);

  const std::vector<double> pt{2.0};
  const Eigen::MatrixXd ee = reduce_block(jb.ee, cs, pt);
  const Eigen::MatrixXd oo = reduce_block(jb.oo, cs, pt);
  CHECK(ee(0, 0) == doctest::Approx(0.25));
  CHECK(oo(0, 0) == doctest::Approx(0.25));

  // off-parity blocks reduce to zero
  CHECK(reduce_block(jb.eo, cs, pt)(0, 0) == doctest::Approx(0.0));
  CHECK(reduce_block(jb.oe, cs, pt)(0, 0) == doctest::Approx(0.0));
}

TEST_CASE("jacobian rejects mixed-parity components") {
  const CoordinateSystem cs = CoordinateSystem::standard(1, 1);
  CHECK_THROWS_AS(jacobian_blocks({parse("x1 + xi1", cs), parse("xi1", cs)}, 1, cs), Error);
  CHECK_THROWS_AS(jacobian_blocks({parse("x1", cs), parse("x1", cs)}, 1, cs), Error);
}

TEST_CASE("reduced blocks match finite-difference Jacobians") {
  const CoordinateSystem cs = CoordinateSystem::standard(2, 2);
  const std::vector<SuperExpr> comps{
      parse("x1*x2 + xi1*xi2", cs), parse("x1^2 - x2", cs),
      parse("x2*xi1", cs), parse("sin(x1)*xi2 + xi1", cs)};
  const BlockJacobian jb = jacobian_blocks(comps, 2, cs);
  const std::vector<double> pt{0.8, -0.6};

  const Eigen::MatrixXd got = reduce_block(jb.ee, cs, pt);
  const Eigen::MatrixXd want = fd::jacobian(
      [&](const std::vector<double>& x) {
        return std::vector<double>{body_at(comps[0], cs, x), body_at(comps[1], cs, x)};
      },
      pt);
  CHECK((got - want).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("reduced chain rule for composed maps") {
  // f: (x1) -> (x1^2 + 1), g: (y1) -> (1/y1); both 1|1 with matching odd parts
  const CoordinateSystem cs = CoordinateSystem::standard(1, 1);
  const std::vector<SuperExpr> f{parse("x1^2 + 1", cs), parse("x1*xi1", cs)};
  const std::vector<SuperExpr> g{parse("1/x1", cs), parse("xi1/x1", cs)};
  std::vector<SuperExpr> comp;
  for (const auto& c : g) comp.push_back(substitute(c, {f[0]}, {f[1]}));

  const std::vector<double> pt{1.3};
  const std::vector<double> mid{1.3 * 1.3 + 1};
  const Eigen::MatrixXd lhs = reduce_block(jacobian_blocks(comp, 1, cs).ee, cs, pt);
  const Eigen::MatrixXd a = reduce_block(jacobian_blocks(g, 1, cs).ee, cs, mid);
  const Eigen::MatrixXd b = reduce_block(jacobian_blocks(f, 1, cs).ee, cs, pt);
  CHECK(std::abs(lhs(0, 0) - (a * b)(0, 0)) < 1e-8);

  const Eigen::MatrixXd lhs_oo = reduce_block(jacobian_blocks(comp, 1, cs).oo, cs, pt);
  const Eigen::MatrixXd a_oo = reduce_block(jacobian_blocks(g, 1, cs).oo, cs, mid);
  const Eigen::MatrixXd b_oo = reduce_block(jacobian_blocks(f, 1, cs).oo, cs, pt);
  CHECK(std::abs(lhs_oo(0, 0) - (a_oo * b_oo)(0, 0)) < 1e-8);
}
