#pragma once

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "supergeo/grassmann.hpp"

namespace supergeo {

// Named even/odd coordinates of one chart.  Even and odd names share one
// namespace and must be pairwise distinct.
class CoordinateSystem {
public:
  CoordinateSystem(std::vector<std::string> even_names, std::vector<std::string> odd_names);

  // x1..xm / xi1..xin
  static CoordinateSystem standard(int even_count, int odd_count);

  int even_count() const noexcept { return static_cast<int>(even_.size()); }
  int odd_count() const noexcept { return static_cast<int>(odd_.size()); }
  const std::vector<std::string>& even_names() const noexcept { return even_; }
  const std::vector<std::string>& odd_names() const noexcept { return odd_; }
  const std::string& even_name(int i) const { return even_.at(i); }
  const std::string& odd_name(int i) const { return odd_.at(i); }

  // (is_odd, index), or nullopt for an unknown name.
  std::optional<std::pair<bool, int>> find(const std::string& name) const;

private:
  std::vector<std::string> even_, odd_;
};

enum class NodeKind { Constant, EvenVar, OddVar, Add, Mul, Div, Pow, Neg, Func };
enum class UnaryFunc { Sin, Cos, Exp, Log, Sqrt, Atan };

struct ExprNode;
using SuperExpr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  NodeKind kind = NodeKind::Constant;
  double constant = 0.0;             // Constant
  int var_index = -1;                // EvenVar / OddVar
  int exponent = 0;                  // Pow
  UnaryFunc func = UnaryFunc::Sin;   // Func
  std::vector<SuperExpr> children;   // Add / Mul: n-ary; Div: 2; Pow/Neg/Func: 1
};

// ===== expression builders (fold constants, drop units/zeros) =====

namespace ex {
SuperExpr constant(double value);
SuperExpr even_var(int index);
SuperExpr odd_var(int index);
SuperExpr add(std::vector<SuperExpr> terms);
SuperExpr add(const SuperExpr& a, const SuperExpr& b);
SuperExpr sub(const SuperExpr& a, const SuperExpr& b);
SuperExpr neg(const SuperExpr& a);
SuperExpr mul(std::vector<SuperExpr> factors);
SuperExpr mul(const SuperExpr& a, const SuperExpr& b);
SuperExpr div(const SuperExpr& a, const SuperExpr& b);
SuperExpr pow(const SuperExpr& a, int exponent);
SuperExpr apply(UnaryFunc f, const SuperExpr& a);
}  // namespace ex

// Grammar (see docs/expression-grammar.md):
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := ('+'|'-') factor | power
//   power  := atom ('^' ('-')? integer)?
//   atom   := number | name | name '(' expr ')' | '(' expr ')'
// Names resolve against `coords`; sin cos exp log sqrt atan are reserved.
SuperExpr parse(const std::string& text, const CoordinateSystem& coords);

// Round-trips through parse(); used when models are serialized.
std::string to_string(const SuperExpr& e, const CoordinateSystem& coords);

// ===== normal form =====

// Expansion over the odd variables: sum_I c_I(x) xi^I with strictly
// ascending index order inside each monomial.  Coefficients are scalar
// expressions in the even variables only.
class OddPolynomialForm {
public:
  OddPolynomialForm(int even_count, int odd_count)
      : even_count_(even_count), odd_count_(odd_count) {}

  int even_count() const noexcept { return even_count_; }
  int odd_count() const noexcept { return odd_count_; }
  const std::map<std::uint64_t, SuperExpr>& coefficients() const noexcept { return coeffs_; }

  SuperExpr coefficient(std::uint64_t mask) const;  // constant 0 if absent
  void set_coefficient(std::uint64_t mask, const SuperExpr& c);

private:
  int even_count_, odd_count_;
  std::map<std::uint64_t, SuperExpr> coeffs_;
};

OddPolynomialForm normalize(const SuperExpr& e, const CoordinateSystem& coords);
SuperExpr form_to_expr(const OddPolynomialForm& form);

Parity parity_of(const OddPolynomialForm& form);
Parity parity_of(const SuperExpr& e, const CoordinateSystem& coords);

// Coefficient of the empty odd monomial, as an even-variable expression.
SuperExpr body_expr(const SuperExpr& e, const CoordinateSystem& coords);

// ===== differentiation =====

SuperExpr diff_even(const SuperExpr& e, const CoordinateSystem& coords, int even_index);

// Left derivative with respect to xi_j: moving d/dxi_j past each odd factor
// in front of xi_j flips the sign once.
SuperExpr diff_odd(const SuperExpr& e, const CoordinateSystem& coords, int odd_index);

// ===== substitution =====

// Replace every variable by the given expression (index-aligned; expressions
// are over the caller's target coordinate system).
SuperExpr substitute(const SuperExpr& e, const std::vector<SuperExpr>& even_repl,
                     const std::vector<SuperExpr>& odd_repl);

// Renumber variables, e.g. when embedding a factor into a product chart.
SuperExpr remap_variables(const SuperExpr& e, const std::vector<int>& even_map,
                          const std::vector<int>& odd_map);

// ===== evaluation =====

// Evaluate an even-variable-only expression at a real point.  Division by
// zero and log/sqrt of a non-positive argument are Domain errors.
double eval_scalar(const SuperExpr& e, std::span<const double> even_values);

// Substitute numbers for the even variables and Grassmann elements for the
// odd ones.  All odd values must be odd-parity elements of one algebra.
GrassmannElement eval(const OddPolynomialForm& form, std::span<const double> even_values,
                      std::span<const GrassmannElement> odd_values);
GrassmannElement eval(const SuperExpr& e, const CoordinateSystem& coords,
                      std::span<const double> even_values,
                      std::span<const GrassmannElement> odd_values);

// Full Grassmann-valued evaluation: even variables may carry soul.  Smooth
// unary functions are pushed through by the (finite) Taylor series in the
// soul of their argument.
GrassmannElement eval_super(const SuperExpr& e, std::span<const GrassmannElement> even_values,
                            std::span<const GrassmannElement> odd_values);

// p-th derivative values f^(0..order)(at) of a unary function; used by the
// Taylor evaluation and exposed for tests.
std::vector<double> unary_derivatives(UnaryFunc f, double at, int order);

// ===== Jacobians =====

// Partial derivatives of a coordinate-tuple-valued map, split by parity.
//   ee[i][j] = d even_out_i / d even_in_j     (even entries)
//   eo[i][j] = d even_out_i / d odd_in_j      (odd entries)
//   oe[i][j] = d odd_out_i  / d even_in_j     (odd entries)
//   oo[i][j] = d odd_out_i  / d odd_in_j      (even entries; left derivative)
struct BlockJacobian {
  std::vector<std::vector<SuperExpr>> ee, eo, oe, oo;
};

// `components` lists the even target components first, then the odd ones.
// Each component must be homogeneous of the matching parity.
BlockJacobian jacobian_blocks(const std::vector<SuperExpr>& components, int even_out_count,
                              const CoordinateSystem& coords);

// Entrywise body of a block, evaluated at a real even point.
Eigen::MatrixXd reduce_block(const std::vector<std::vector<SuperExpr>>& block,
                             const CoordinateSystem& coords,
                             std::span<const double> even_values);

}  // namespace supergeo
