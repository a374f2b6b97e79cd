#include "supergeo/superexpr.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <unordered_map>

namespace supergeo {

// ===== CoordinateSystem =====

CoordinateSystem::CoordinateSystem(std::vector<std::string> even_names,
                                   std::vector<std::string> odd_names)
    : even_(std::move(even_names)), odd_(std::move(odd_names)) {
  std::unordered_map<std::string, int> seen;
  for (const auto& n : even_) {
    if (n.empty() || ++seen[n] > 1) {
      fail(ErrorKind::Dimension, "duplicate or empty coordinate name '" + n + "'");
    }
  }
  for (const auto& n : odd_) {
    if (n.empty() || ++seen[n] > 1) {
      fail(ErrorKind::Dimension, "duplicate or empty coordinate name '" + n + "'");
    }
  }
  if (odd_.size() > 62) fail(ErrorKind::Dimension, "too many odd coordinates");
}

CoordinateSystem CoordinateSystem::standard(int even_count, int odd_count) {
  std::vector<std::string> even, odd;
  for (int i = 1; i <= even_count; ++i) even.push_back("x" + std::to_string(i));
  for (int i = 1; i <= odd_count; ++i) odd.push_back("xi" + std::to_string(i));
  return CoordinateSystem(std::move(even), std::move(odd));
}

std::optional<std::pair<bool, int>> CoordinateSystem::find(const std::string& name) const {
  for (int i = 0; i < even_count(); ++i) {
    if (even_[i] == name) return std::make_pair(false, i);
  }
  for (int i = 0; i < odd_count(); ++i) {
    if (odd_[i] == name) return std::make_pair(true, i);
  }
  return std::nullopt;
}

// ===== builders =====

namespace ex {

namespace {

SuperExpr make(ExprNode node) { return std::make_shared<const ExprNode>(std::move(node)); }

bool is_const(const SuperExpr& e, double v) {
  return e->kind == NodeKind::Constant && e->constant == v;
}

}  // namespace

SuperExpr constant(double value) {
  ExprNode n;
  n.kind = NodeKind::Constant;
  n.constant = value;
  return make(std::move(n));
}

SuperExpr even_var(int index) {
  ExprNode n;
  n.kind = NodeKind::EvenVar;
  n.var_index = index;
  return make(std::move(n));
}

SuperExpr odd_var(int index) {
  ExprNode n;
  n.kind = NodeKind::OddVar;
  n.var_index = index;
  return make(std::move(n));
}

namespace {

// Name-independent serialization used to match like terms in add().
void structural_key(const SuperExpr& e, std::string& out) {
  switch (e->kind) {
    case NodeKind::Constant: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "c%a", e->constant);
      out += buf;
      break;
    }
    case NodeKind::EvenVar: out += 'e'; out += std::to_string(e->var_index); break;
    case NodeKind::OddVar: out += 'o'; out += std::to_string(e->var_index); break;
    case NodeKind::Add: out += "A("; break;
    case NodeKind::Mul: out += "M("; break;
    case NodeKind::Div: out += "D("; break;
    case NodeKind::Neg: out += "N("; break;
    case NodeKind::Pow: out += "P"; out += std::to_string(e->exponent); out += '('; break;
    case NodeKind::Func: out += 'F'; out += std::to_string(static_cast<int>(e->func)); out += '('; break;
  }
  if (!e->children.empty() || e->kind == NodeKind::Add || e->kind == NodeKind::Mul) {
    for (const auto& c : e->children) {
      structural_key(c, out);
      out += ',';
    }
    out += ')';
  }
}

// Splits a term into a real multiplier and the rest of the product.
std::pair<double, SuperExpr> split_multiplier(const SuperExpr& t) {
  if (t->kind == NodeKind::Neg) {
    auto inner = split_multiplier(t->children[0]);
    inner.first = -inner.first;
    return inner;
  }
  if (t->kind == NodeKind::Mul && t->children[0]->kind == NodeKind::Constant) {
    // mul() folds all numeric factors into a single leading constant.
    if (t->children.size() == 2) return {t->children[0]->constant, t->children[1]};
    ExprNode core;
    core.kind = NodeKind::Mul;
    core.children.assign(t->children.begin() + 1, t->children.end());
    return {t->children[0]->constant, make(std::move(core))};
  }
  return {1.0, t};
}

SuperExpr scale_term(double k, const SuperExpr& core) {
  if (k == 1.0) return core;
  if (k == -1.0) {
    ExprNode n;
    n.kind = NodeKind::Neg;
    n.children = {core};
    return make(std::move(n));
  }
  ExprNode n;
  n.kind = NodeKind::Mul;
  n.children = {constant(k)};
  if (core->kind == NodeKind::Mul) {
    n.children.insert(n.children.end(), core->children.begin(), core->children.end());
  } else {
    n.children.push_back(core);
  }
  return make(std::move(n));
}

}  // namespace

SuperExpr add(std::vector<SuperExpr> terms) {
  std::vector<SuperExpr> flat;
  double const_sum = 0.0;
  for (auto& t : terms) {
    if (t->kind == NodeKind::Add) {
      for (const auto& c : t->children) {
        if (c->kind == NodeKind::Constant) const_sum += c->constant;
        else flat.push_back(c);
      }
    } else if (t->kind == NodeKind::Constant) {
      const_sum += t->constant;
    } else {
      flat.push_back(std::move(t));
    }
  }
  // Collect like terms so that f - f drops out structurally. Addition of
  // superfunctions commutes regardless of parity, so regrouping is safe
  // (unlike in mul(), where factor order carries signs).
  std::vector<std::pair<SuperExpr, double>> collected;
  std::unordered_map<std::string, std::size_t> index_of;
  for (const auto& t : flat) {
    const auto [k, core] = split_multiplier(t);
    std::string key;
    structural_key(core, key);
    const auto [it, fresh] = index_of.try_emplace(std::move(key), collected.size());
    if (fresh) collected.emplace_back(core, k);
    else collected[it->second].second += k;
  }
  std::vector<SuperExpr> out;
  out.reserve(collected.size() + 1);
  for (const auto& [core, k] : collected) {
    if (k == 0.0) continue;
    out.push_back(scale_term(k, core));
  }
  if (const_sum != 0.0) out.push_back(constant(const_sum));
  if (out.empty()) return constant(0.0);
  if (out.size() == 1) return out[0];
  ExprNode n;
  n.kind = NodeKind::Add;
  n.children = std::move(out);
  return make(std::move(n));
}

SuperExpr add(const SuperExpr& a, const SuperExpr& b) { return add(std::vector<SuperExpr>{a, b}); }

SuperExpr neg(const SuperExpr& a) {
  if (a->kind == NodeKind::Constant) return constant(-a->constant);
  if (a->kind == NodeKind::Neg) return a->children[0];
  if (a->kind == NodeKind::Add) {
    // Distribute over sums so negation has one canonical shape; scalar -1 is
    // even, so this commutes past everything.
    std::vector<SuperExpr> ts;
    ts.reserve(a->children.size());
    for (const auto& c : a->children) ts.push_back(neg(c));
    return add(std::move(ts));
  }
  if (a->kind == NodeKind::Mul && a->children[0]->kind == NodeKind::Constant) {
    ExprNode n;
    n.kind = NodeKind::Mul;
    n.children = a->children;
    n.children[0] = constant(-a->children[0]->constant);
    return make(std::move(n));
  }
  ExprNode n;
  n.kind = NodeKind::Neg;
  n.children = {a};
  return make(std::move(n));
}

SuperExpr sub(const SuperExpr& a, const SuperExpr& b) { return add(a, neg(b)); }

SuperExpr mul(std::vector<SuperExpr> factors) {
  // Flattening keeps the left-to-right factor order: odd factors anticommute,
  // so no reordering happens here.
  std::vector<SuperExpr> flat;
  double const_prod = 1.0;
  bool saw_zero = false;
  for (auto& f : factors) {
    if (f->kind == NodeKind::Mul) {
      for (const auto& c : f->children) {
        if (c->kind == NodeKind::Constant) const_prod *= c->constant;
        else flat.push_back(c);
      }
    } else if (f->kind == NodeKind::Constant) {
      const_prod *= f->constant;
      if (f->constant == 0.0) saw_zero = true;
    } else {
      flat.push_back(std::move(f));
    }
  }
  if (saw_zero || const_prod == 0.0) return constant(0.0);
  if (const_prod != 1.0) flat.insert(flat.begin(), constant(const_prod));
  if (flat.empty()) return constant(1.0);
  if (flat.size() == 1) return flat[0];
  ExprNode n;
  n.kind = NodeKind::Mul;
  n.children = std::move(flat);
  return make(std::move(n));
}

SuperExpr mul(const SuperExpr& a, const SuperExpr& b) { return mul(std::vector<SuperExpr>{a, b}); }

SuperExpr div(const SuperExpr& a, const SuperExpr& b) {
  if (is_const(a, 0.0) && !(b->kind == NodeKind::Constant && b->constant == 0.0)) {
    return constant(0.0);
  }
  if (b->kind == NodeKind::Constant && b->constant != 0.0) {
    if (b->constant == 1.0) return a;
    if (a->kind == NodeKind::Constant) return constant(a->constant / b->constant);
    return mul(constant(1.0 / b->constant), a);
  }
  ExprNode n;
  n.kind = NodeKind::Div;
  n.children = {a, b};
  return make(std::move(n));
}

SuperExpr pow(const SuperExpr& a, int exponent) {
  if (exponent == 0) return constant(1.0);
  if (exponent == 1) return a;
  if (a->kind == NodeKind::Constant) {
    if (!(a->constant == 0.0 && exponent < 0)) {
      return constant(std::pow(a->constant, exponent));
    }
  }
  ExprNode n;
  n.kind = NodeKind::Pow;
  n.exponent = exponent;
  n.children = {a};
  return make(std::move(n));
}

SuperExpr apply(UnaryFunc f, const SuperExpr& a) {
  if (a->kind == NodeKind::Constant) {
    const double v = a->constant;
    switch (f) {
      case UnaryFunc::Sin: return constant(std::sin(v));
      case UnaryFunc::Cos: return constant(std::cos(v));
      case UnaryFunc::Exp: return constant(std::exp(v));
      case UnaryFunc::Atan: return constant(std::atan(v));
      case UnaryFunc::Log:
        if (v > 0) return constant(std::log(v));
        break;  // out of domain: keep symbolic, error surfaces at evaluation
      case UnaryFunc::Sqrt:
        if (v >= 0) return constant(std::sqrt(v));
        break;
    }
  }
  ExprNode n;
  n.kind = NodeKind::Func;
  n.func = f;
  n.children = {a};
  return make(std::move(n));
}

}  // namespace ex

// ===== parser =====

namespace {

const char* func_name(UnaryFunc f) {
  switch (f) {
    case UnaryFunc::Sin: return "sin";
    case UnaryFunc::Cos: return "cos";
    case UnaryFunc::Exp: return "exp";
    case UnaryFunc::Log: return "log";
    case UnaryFunc::Sqrt: return "sqrt";
    case UnaryFunc::Atan: return "atan";
  }
  return "?";
}

std::optional<UnaryFunc> func_by_name(const std::string& s) {
  if (s == "sin") return UnaryFunc::Sin;
  if (s == "cos") return UnaryFunc::Cos;
  if (s == "exp") return UnaryFunc::Exp;
  if (s == "log") return UnaryFunc::Log;
  if (s == "sqrt") return UnaryFunc::Sqrt;
  if (s == "atan") return UnaryFunc::Atan;
  return std::nullopt;
}

struct Token {
  enum Kind { Num, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End } kind;
  std::string text;
  double number = 0.0;
  bool integral = false;
  int pos = 0;
};

class Parser {
public:
  Parser(const std::string& text, const CoordinateSystem& coords) : coords_(coords) {
    tokenize(text);
  }

  SuperExpr run() {
    SuperExpr e = expr();
    expect(Token::End, "end of input");
    return e;
  }

private:
  [[noreturn]] void error(const std::string& what, int pos) {
    fail(ErrorKind::Parse, "syntax error at position " + std::to_string(pos) + ": " + what);
  }

  void tokenize(const std::string& s) {
    size_t i = 0;
    while (i < s.size()) {
      const char c = s[i];
      const int pos = static_cast<int>(i);
      if (std::isspace(static_cast<unsigned char>(c))) { ++i; continue; }
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        size_t j = i;
        bool integral = true;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
        if (j < s.size() && s[j] == '.') {
          integral = false;
          ++j;
          while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
        }
        if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
          integral = false;
          size_t k = j + 1;
          if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
          if (k >= s.size() || !std::isdigit(static_cast<unsigned char>(s[k]))) {
            error("malformed number exponent", static_cast<int>(j));
          }
          while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) ++k;
          j = k;
        }
        const std::string text = s.substr(i, j - i);
        if (text == ".") error("lone '.'", pos);
        tokens_.push_back({Token::Num, text, std::stod(text), integral, pos});
        i = j;
        continue;
      }
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        size_t j = i;
        while (j < s.size() &&
               (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) {
          ++j;
        }
        tokens_.push_back({Token::Ident, s.substr(i, j - i), 0.0, false, pos});
        i = j;
        continue;
      }
      Token::Kind k;
      switch (c) {
        case '+': k = Token::Plus; break;
        case '-': k = Token::Minus; break;
        case '*': k = Token::Star; break;
        case '/': k = Token::Slash; break;
        case '^': k = Token::Caret; break;
        case '(': k = Token::LParen; break;
        case ')': k = Token::RParen; break;
        default: error(std::string("unexpected character '") + c + "'", pos);
      }
      tokens_.push_back({k, std::string(1, c), 0.0, false, pos});
      ++i;
    }
    tokens_.push_back({Token::End, "", 0.0, false, static_cast<int>(s.size())});
  }

  const Token& peek() const { return tokens_[cursor_]; }
  Token next() { return tokens_[cursor_++]; }

  void expect(Token::Kind k, const std::string& what) {
    if (peek().kind != k) error("expected " + what + ", got '" + peek().text + "'", peek().pos);
    ++cursor_;
  }

  SuperExpr expr() {
    SuperExpr acc = term();
    while (peek().kind == Token::Plus || peek().kind == Token::Minus) {
      const Token op = next();
      SuperExpr rhs = term();
      acc = (op.kind == Token::Plus) ? ex::add(acc, rhs) : ex::sub(acc, rhs);
    }
    return acc;
  }

  SuperExpr term() {
    SuperExpr acc = factor();
    while (peek().kind == Token::Star || peek().kind == Token::Slash) {
      const Token op = next();
      SuperExpr rhs = factor();
      acc = (op.kind == Token::Star) ? ex::mul(acc, rhs) : ex::div(acc, rhs);
    }
    return acc;
  }

  SuperExpr factor() {
    if (peek().kind == Token::Minus) {
      next();
      return ex::neg(factor());
    }
    if (peek().kind == Token::Plus) {
      next();
      return factor();
    }
    return power();
  }

  SuperExpr power() {
    SuperExpr base = atom();
    if (peek().kind != Token::Caret) return base;
    next();
    int sign = 1;
    if (peek().kind == Token::Minus) { next(); sign = -1; }
    else if (peek().kind == Token::Plus) { next(); }
    const Token t = peek();
    if (t.kind != Token::Num) error("expected integer exponent, got '" + t.text + "'", t.pos);
    if (!t.integral) error("exponent must be an integer, got '" + t.text + "'", t.pos);
    next();
    if (peek().kind == Token::Caret) error("chained '^' needs parentheses", peek().pos);
    return ex::pow(base, sign * static_cast<int>(t.number));
  }

  SuperExpr atom() {
    const Token t = peek();
    switch (t.kind) {
      case Token::Num:
        next();
        return ex::constant(t.number);
      case Token::LParen: {
        next();
        SuperExpr e = expr();
        expect(Token::RParen, "')'");
        return e;
      }
      case Token::Ident: {
        next();
        if (auto f = func_by_name(t.text)) {
          expect(Token::LParen, "'(' after function name");
          SuperExpr arg = expr();
          expect(Token::RParen, "')'");
          return ex::apply(*f, arg);
        }
        if (auto hit = coords_.find(t.text)) {
          return hit->first ? ex::odd_var(hit->second) : ex::even_var(hit->second);
        }
        error("unknown identifier '" + t.text + "'", t.pos);
      }
      default:
        error("unexpected token '" + t.text + "'", t.pos);
    }
  }

  const CoordinateSystem& coords_;
  std::vector<Token> tokens_;
  size_t cursor_ = 0;
};

}  // namespace

SuperExpr parse(const std::string& text, const CoordinateSystem& coords) {
  return Parser(text, coords).run();
}

// ===== printer =====

namespace {

// Larger binds tighter.
int precedence(const ExprNode& n) {
  switch (n.kind) {
    case NodeKind::Add: return 1;
    case NodeKind::Neg: return 2;
    case NodeKind::Mul:
    case NodeKind::Div: return 3;
    case NodeKind::Pow: return 4;
    default: return 5;
  }
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

void print_expr(std::ostream& os, const SuperExpr& e, const CoordinateSystem& coords,
                int parent_prec) {
  const int prec = precedence(*e);
  const bool parens = prec < parent_prec;
  if (parens) os << "(";
  switch (e->kind) {
    case NodeKind::Constant:
      if (e->constant < 0) {
        os << "(" << format_double(e->constant) << ")";
      } else {
        os << format_double(e->constant);
      }
      break;
    case NodeKind::EvenVar:
      os << coords.even_name(e->var_index);
      break;
    case NodeKind::OddVar:
      os << coords.odd_name(e->var_index);
      break;
    case NodeKind::Add: {
      bool first = true;
      for (const auto& c : e->children) {
        if (!first && c->kind == NodeKind::Neg) {
          os << " - ";
          print_expr(os, c->children[0], coords, prec + 1);
        } else if (!first && c->kind == NodeKind::Constant && c->constant < 0) {
          os << " - " << format_double(-c->constant);
        } else {
          if (!first) os << " + ";
          print_expr(os, c, coords, prec);
        }
        first = false;
      }
      break;
    }
    case NodeKind::Neg:
      os << "-";
      // Unary minus parses as a factor prefix, so a product or quotient
      // operand needs parentheses to read back as the same tree.
      print_expr(os, e->children[0], coords, precedence(*e) + 2);
      break;
    case NodeKind::Mul: {
      bool first = true;
      for (const auto& c : e->children) {
        if (!first) os << "*";
        print_expr(os, c, coords, prec + (first ? 0 : 1));
        first = false;
      }
      break;
    }
    case NodeKind::Div:
      print_expr(os, e->children[0], coords, prec);
      os << "/";
      print_expr(os, e->children[1], coords, prec + 1);
      break;
    case NodeKind::Pow:
      print_expr(os, e->children[0], coords, prec + 1);
      os << "^" << e->exponent;
      break;
    case NodeKind::Func:
      os << func_name(e->func) << "(";
      print_expr(os, e->children[0], coords, 0);
      os << ")";
      break;
  }
  if (parens) os << ")";
}

}  // namespace

std::string to_string(const SuperExpr& e, const CoordinateSystem& coords) {
  std::ostringstream os;
  print_expr(os, e, coords, 0);
  return os.str();
}

// ===== substitution / remapping =====

SuperExpr substitute(const SuperExpr& e, const std::vector<SuperExpr>& even_repl,
                     const std::vector<SuperExpr>& odd_repl) {
  switch (e->kind) {
    case NodeKind::Constant:
      return e;
    case NodeKind::EvenVar:
      if (e->var_index < 0 || e->var_index >= static_cast<int>(even_repl.size())) {
        fail(ErrorKind::Dimension, "substitute: missing replacement for even variable " +
                                       std::to_string(e->var_index));
      }
      return even_repl[e->var_index];
    case NodeKind::OddVar:
      if (e->var_index < 0 || e->var_index >= static_cast<int>(odd_repl.size())) {
        fail(ErrorKind::Dimension, "substitute: missing replacement for odd variable " +
                                       std::to_string(e->var_index));
      }
      return odd_repl[e->var_index];
    default: {
      std::vector<SuperExpr> kids;
      kids.reserve(e->children.size());
      for (const auto& c : e->children) kids.push_back(substitute(c, even_repl, odd_repl));
      switch (e->kind) {
        case NodeKind::Add: return ex::add(std::move(kids));
        case NodeKind::Mul: return ex::mul(std::move(kids));
        case NodeKind::Div: return ex::div(kids[0], kids[1]);
        case NodeKind::Pow: return ex::pow(kids[0], e->exponent);
        case NodeKind::Neg: return ex::neg(kids[0]);
        case NodeKind::Func: return ex::apply(e->func, kids[0]);
        default: break;
      }
    }
  }
  fail(ErrorKind::Parse, "substitute: unreachable node kind");
}

SuperExpr remap_variables(const SuperExpr& e, const std::vector<int>& even_map,
                          const std::vector<int>& odd_map) {
  std::vector<SuperExpr> even_repl, odd_repl;
  even_repl.reserve(even_map.size());
  odd_repl.reserve(odd_map.size());
  for (int idx : even_map) even_repl.push_back(ex::even_var(idx));
  for (int idx : odd_map) odd_repl.push_back(ex::odd_var(idx));
  return substitute(e, even_repl, odd_repl);
}

// ===== even differentiation (plain AST recursion) =====

SuperExpr diff_even(const SuperExpr& e, const CoordinateSystem& coords, int even_index) {
  if (even_index < 0 || even_index >= coords.even_count()) {
    fail(ErrorKind::Dimension, "diff_even: index out of range");
  }
  switch (e->kind) {
    case NodeKind::Constant:
    case NodeKind::OddVar:
      return ex::constant(0.0);
    case NodeKind::EvenVar:
      return ex::constant(e->var_index == even_index ? 1.0 : 0.0);
    case NodeKind::Add: {
      std::vector<SuperExpr> kids;
      for (const auto& c : e->children) kids.push_back(diff_even(c, coords, even_index));
      return ex::add(std::move(kids));
    }
    case NodeKind::Neg:
      return ex::neg(diff_even(e->children[0], coords, even_index));
    case NodeKind::Mul: {
      // d/dx commutes with odd factors, so the plain Leibniz rule applies
      // with factors kept in place.
      std::vector<SuperExpr> terms;
      for (size_t i = 0; i < e->children.size(); ++i) {
        std::vector<SuperExpr> factors = e->children;
        factors[i] = diff_even(e->children[i], coords, even_index);
        terms.push_back(ex::mul(std::move(factors)));
      }
      return ex::add(std::move(terms));
    }
    case NodeKind::Div: {
      const SuperExpr& a = e->children[0];
      const SuperExpr& b = e->children[1];
      SuperExpr da = diff_even(a, coords, even_index);
      SuperExpr db = diff_even(b, coords, even_index);
      return ex::div(ex::sub(ex::mul(da, b), ex::mul(a, db)), ex::pow(b, 2));
    }
    case NodeKind::Pow: {
      const SuperExpr& a = e->children[0];
      SuperExpr da = diff_even(a, coords, even_index);
      return ex::mul({ex::constant(e->exponent), ex::pow(a, e->exponent - 1), da});
    }
    case NodeKind::Func: {
      const SuperExpr& a = e->children[0];
      SuperExpr da = diff_even(a, coords, even_index);
      SuperExpr outer;
      switch (e->func) {
        case UnaryFunc::Sin: outer = ex::apply(UnaryFunc::Cos, a); break;
        case UnaryFunc::Cos: outer = ex::neg(ex::apply(UnaryFunc::Sin, a)); break;
        case UnaryFunc::Exp: outer = ex::apply(UnaryFunc::Exp, a); break;
        case UnaryFunc::Log: outer = ex::div(ex::constant(1.0), a); break;
        case UnaryFunc::Sqrt:
          outer = ex::div(ex::constant(1.0), ex::mul(ex::constant(2.0), ex::apply(UnaryFunc::Sqrt, a)));
          break;
        case UnaryFunc::Atan:
          outer = ex::div(ex::constant(1.0), ex::add(ex::constant(1.0), ex::pow(a, 2)));
          break;
      }
      return ex::mul(outer, da);
    }
  }
  fail(ErrorKind::Parse, "diff_even: unreachable node kind");
}

// ===== normal form =====

namespace {

using FMap = std::map<std::uint64_t, SuperExpr>;

void fmap_accumulate(FMap& into, std::uint64_t mask, const SuperExpr& c) {
  auto it = into.find(mask);
  if (it == into.end()) {
    if (!(c->kind == NodeKind::Constant && c->constant == 0.0)) into.emplace(mask, c);
    return;
  }
  SuperExpr merged = ex::add(it->second, c);
  if (merged->kind == NodeKind::Constant && merged->constant == 0.0) {
    into.erase(it);
  } else {
    it->second = merged;
  }
}

class FormBuilder {
public:
  explicit FormBuilder(const CoordinateSystem& coords) : coords_(coords) {}

  FMap build(const SuperExpr& e) {
    switch (e->kind) {
      case NodeKind::Constant:
        return e->constant == 0.0 ? FMap{} : FMap{{0, e}};
      case NodeKind::EvenVar:
        if (e->var_index >= coords_.even_count()) {
          fail(ErrorKind::Dimension, "even variable index out of range for coordinate system");
        }
        return FMap{{0, e}};
      case NodeKind::OddVar: {
        if (e->var_index >= coords_.odd_count()) {
          fail(ErrorKind::Dimension, "odd variable index out of range for coordinate system");
        }
        return FMap{{std::uint64_t{1} << e->var_index, ex::constant(1.0)}};
      }
      case NodeKind::Add: {
        FMap acc;
        for (const auto& c : e->children) {
          for (const auto& [mask, coeff] : build(c)) fmap_accumulate(acc, mask, coeff);
        }
        return acc;
      }
      case NodeKind::Neg: {
        FMap acc = build(e->children[0]);
        for (auto& [mask, coeff] : acc) coeff = ex::neg(coeff);
        return acc;
      }
      case NodeKind::Mul: {
        FMap acc{{0, ex::constant(1.0)}};
        for (const auto& c : e->children) acc = product(acc, build(c));
        return acc;
      }
      case NodeKind::Div:
        return product(build(e->children[0]), invert(build(e->children[1])));
      case NodeKind::Pow: {
        const int k = e->exponent;
        FMap base = build(e->children[0]);
        if (k < 0) base = invert(base);
        FMap acc{{0, ex::constant(1.0)}};
        for (int i = 0; i < std::abs(k); ++i) acc = product(acc, base);
        return acc;
      }
      case NodeKind::Func:
        return taylor(e->func, build(e->children[0]));
    }
    fail(ErrorKind::Parse, "normalize: unreachable node kind");
  }

  FMap product(const FMap& a, const FMap& b) {
    FMap acc;
    for (const auto& [ma, ca] : a) {
      for (const auto& [mb, cb] : b) {
        if ((ma & mb) != 0) continue;
        SuperExpr c = ex::mul(ca, cb);
        if (reorder_sign(ma, mb) < 0) c = ex::neg(c);
        fmap_accumulate(acc, ma | mb, c);
      }
    }
    return acc;
  }

  FMap invert(const FMap& f) {
    auto it = f.find(0);
    if (it == f.end()) {
      fail(ErrorKind::Domain,
           "division by an expression whose even body part is identically zero");
    }
    const SuperExpr inv0 = ex::div(ex::constant(1.0), it->second);
    FMap soul = f;
    soul.erase(0);
    // (c0 + s)^-1 = c0^-1 sum_p (-s/c0)^p, truncated by nilpotency.
    FMap step;
    for (const auto& [mask, coeff] : soul) {
      step.emplace(mask, ex::neg(ex::mul(coeff, inv0)));
    }
    FMap acc{{0, ex::constant(1.0)}};
    FMap power{{0, ex::constant(1.0)}};
    for (int p = 1; p <= coords_.odd_count(); ++p) {
      power = product(power, step);
      if (power.empty()) break;
      for (const auto& [mask, coeff] : power) fmap_accumulate(acc, mask, coeff);
    }
    for (auto& [mask, coeff] : acc) coeff = ex::mul(coeff, inv0);
    return acc;
  }

  FMap taylor(UnaryFunc g, const FMap& arg) {
    SuperExpr c0 = ex::constant(0.0);
    if (auto it = arg.find(0); it != arg.end()) c0 = it->second;
    FMap soul = arg;
    soul.erase(0);
    if (soul.empty()) return FMap{{0, ex::apply(g, c0)}};

    // Symbolic derivatives g^(p) are built in a one-variable scratch system
    // and then evaluated at the body part c0.
    const CoordinateSystem scratch({"u"}, {});
    SuperExpr gp = ex::apply(g, ex::even_var(0));
    FMap acc;
    FMap power{{0, ex::constant(1.0)}};
    double factorial = 1.0;
    for (int p = 0; p <= coords_.odd_count(); ++p) {
      if (p > 0) {
        power = product(power, soul);
        if (power.empty()) break;
        factorial *= p;
        gp = diff_even(gp, scratch, 0);
      }
      const SuperExpr coeff = ex::mul(ex::constant(1.0 / factorial), substitute(gp, {c0}, {}));
      for (const auto& [mask, c] : power) fmap_accumulate(acc, mask, ex::mul(coeff, c));
    }
    return acc;
  }

private:
  const CoordinateSystem& coords_;
};

}  // namespace

SuperExpr OddPolynomialForm::coefficient(std::uint64_t mask) const {
  auto it = coeffs_.find(mask);
  return it == coeffs_.end() ? ex::constant(0.0) : it->second;
}

void OddPolynomialForm::set_coefficient(std::uint64_t mask, const SuperExpr& c) {
  if (c->kind == NodeKind::Constant && c->constant == 0.0) {
    coeffs_.erase(mask);
  } else {
    coeffs_[mask] = c;
  }
}

OddPolynomialForm normalize(const SuperExpr& e, const CoordinateSystem& coords) {
  FormBuilder fb(coords);
  OddPolynomialForm form(coords.even_count(), coords.odd_count());
  for (const auto& [mask, coeff] : fb.build(e)) form.set_coefficient(mask, coeff);
  return form;
}

SuperExpr form_to_expr(const OddPolynomialForm& form) {
  std::vector<SuperExpr> terms;
  for (const auto& [mask, coeff] : form.coefficients()) {
    std::vector<SuperExpr> factors{coeff};
    std::uint64_t m = mask;
    while (m != 0) {
      const int bit = std::countr_zero(m);
      m &= m - 1;
      factors.push_back(ex::odd_var(bit));
    }
    terms.push_back(ex::mul(std::move(factors)));
  }
  return ex::add(std::move(terms));
}

Parity parity_of(const OddPolynomialForm& form) {
  bool has_even = false, has_odd = false;
  for (const auto& [mask, coeff] : form.coefficients()) {
    (std::popcount(mask) % 2 == 0 ? has_even : has_odd) = true;
  }
  if (has_even && has_odd) return Parity::Mixed;
  if (has_odd) return Parity::Odd;
  return Parity::Even;
}

Parity parity_of(const SuperExpr& e, const CoordinateSystem& coords) {
  return parity_of(normalize(e, coords));
}

SuperExpr body_expr(const SuperExpr& e, const CoordinateSystem& coords) {
  return normalize(e, coords).coefficient(0);
}

SuperExpr diff_odd(const SuperExpr& e, const CoordinateSystem& coords, int odd_index) {
  if (odd_index < 0 || odd_index >= coords.odd_count()) {
    fail(ErrorKind::Dimension, "diff_odd: index out of range");
  }
  const OddPolynomialForm form = normalize(e, coords);
  OddPolynomialForm out(coords.even_count(), coords.odd_count());
  const std::uint64_t bit = std::uint64_t{1} << odd_index;
  for (const auto& [mask, coeff] : form.coefficients()) {
    if ((mask & bit) == 0) continue;
    // xi factors in front of xi_j each contribute one sign flip.
    const int preceding = std::popcount(mask & (bit - 1));
    out.set_coefficient(mask & ~bit, (preceding % 2 == 0) ? coeff : ex::neg(coeff));
  }
  return form_to_expr(out);
}

// ===== evaluation =====

double eval_scalar(const SuperExpr& e, std::span<const double> even_values) {
  switch (e->kind) {
    case NodeKind::Constant:
      return e->constant;
    case NodeKind::EvenVar:
      if (e->var_index < 0 || e->var_index >= static_cast<int>(even_values.size())) {
        fail(ErrorKind::Dimension, "eval_scalar: even variable index out of range");
      }
      return even_values[e->var_index];
    case NodeKind::OddVar:
      fail(ErrorKind::Domain, "eval_scalar: odd variable in a scalar-only context");
    case NodeKind::Add: {
      double acc = 0;
      for (const auto& c : e->children) acc += eval_scalar(c, even_values);
      return acc;
    }
    case NodeKind::Neg:
      return -eval_scalar(e->children[0], even_values);
    case NodeKind::Mul: {
      double acc = 1;
      for (const auto& c : e->children) acc *= eval_scalar(c, even_values);
      return acc;
    }
    case NodeKind::Div: {
      const double num = eval_scalar(e->children[0], even_values);
      const double den = eval_scalar(e->children[1], even_values);
      if (den == 0.0) fail(ErrorKind::Domain, "division by zero while evaluating");
      return num / den;
    }
    case NodeKind::Pow: {
      const double base = eval_scalar(e->children[0], even_values);
      if (base == 0.0 && e->exponent < 0) {
        fail(ErrorKind::Domain, "zero raised to a negative power while evaluating");
      }
      return std::pow(base, e->exponent);
    }
    case NodeKind::Func: {
      const double a = eval_scalar(e->children[0], even_values);
      switch (e->func) {
        case UnaryFunc::Sin: return std::sin(a);
        case UnaryFunc::Cos: return std::cos(a);
        case UnaryFunc::Exp: return std::exp(a);
        case UnaryFunc::Atan: return std::atan(a);
        case UnaryFunc::Log:
          if (a <= 0.0) fail(ErrorKind::Domain, "log of a non-positive value while evaluating");
          return std::log(a);
        case UnaryFunc::Sqrt:
          if (a < 0.0) fail(ErrorKind::Domain, "sqrt of a negative value while evaluating");
          return std::sqrt(a);
      }
    }
  }
  fail(ErrorKind::Parse, "eval_scalar: unreachable node kind");
}

std::vector<double> unary_derivatives(UnaryFunc f, double at, int order) {
  std::vector<double> out(order + 1, 0.0);
  switch (f) {
    case UnaryFunc::Sin:
      for (int p = 0; p <= order; ++p) out[p] = std::sin(at + p * M_PI_2);
      break;
    case UnaryFunc::Cos:
      for (int p = 0; p <= order; ++p) out[p] = std::cos(at + p * M_PI_2);
      break;
    case UnaryFunc::Exp: {
      const double v = std::exp(at);
      for (int p = 0; p <= order; ++p) out[p] = v;
      break;
    }
    case UnaryFunc::Log: {
      if (at <= 0.0) fail(ErrorKind::Domain, "log needs a positive body");
      out[0] = std::log(at);
      double pw = 1.0, fact = 1.0;  // (p-1)! (-1)^(p-1) / at^p
      for (int p = 1; p <= order; ++p) {
        pw *= at;
        if (p >= 2) fact *= -(p - 1);
        out[p] = fact / pw;
      }
      break;
    }
    case UnaryFunc::Sqrt: {
      if (at < 0.0 || (at == 0.0 && order >= 1)) {
        fail(ErrorKind::Domain, "sqrt needs a positive body");
      }
      out[0] = std::sqrt(at);
      double coeff = 1.0, pw = out[0];
      for (int p = 1; p <= order; ++p) {
        coeff *= 0.5 - (p - 1);
        pw /= at;  // at^(1/2 - p)
        out[p] = coeff * pw;
      }
      break;
    }
    case UnaryFunc::Atan: {
      // atan^(p)(x) = P_p(x) / (1+x^2)^p with
      // P_{p+1} = P_p' (1+x^2) - 2 p x P_p, P_1 = 1.
      out[0] = std::atan(at);
      std::vector<double> poly{1.0};
      const double base = 1.0 + at * at;
      double denom = 1.0;
      for (int p = 1; p <= order; ++p) {
        denom *= base;
        double value = 0.0, pw = 1.0;
        for (double c : poly) { value += c * pw; pw *= at; }
        out[p] = value / denom;
        // advance P_p -> P_{p+1}
        std::vector<double> nxt(poly.size() + 1, 0.0);
        for (size_t i = 1; i < poly.size(); ++i) {  // P' * (1 + x^2)
          nxt[i - 1] += i * poly[i];
          nxt[i + 1] += i * poly[i];
        }
        for (size_t i = 0; i < poly.size(); ++i) nxt[i + 1] -= 2.0 * p * poly[i];
        poly = std::move(nxt);
      }
      break;
    }
  }
  return out;
}

namespace {

int algebra_size(std::span<const GrassmannElement> even_values,
                 std::span<const GrassmannElement> odd_values) {
  int n = -1;
  for (const auto& g : even_values) {
    if (n < 0) n = g.num_generators();
    else if (n != g.num_generators()) fail(ErrorKind::Dimension, "mixed Grassmann algebras");
  }
  for (const auto& g : odd_values) {
    if (n < 0) n = g.num_generators();
    else if (n != g.num_generators()) fail(ErrorKind::Dimension, "mixed Grassmann algebras");
  }
  return n < 0 ? 0 : n;
}

GrassmannElement taylor_apply(UnaryFunc f, const GrassmannElement& arg) {
  const int n = arg.num_generators();
  const double b = arg.body();
  const GrassmannElement s = arg.soul();
  if (s.is_zero()) {
    return GrassmannElement::scalar(n, unary_derivatives(f, b, 0)[0]);
  }
  const std::vector<double> derivs = unary_derivatives(f, b, n);
  GrassmannElement acc = GrassmannElement::scalar(n, derivs[0]);
  GrassmannElement power = GrassmannElement::scalar(n, 1.0);
  double factorial = 1.0;
  for (int p = 1; p <= n; ++p) {
    power = power * s;
    if (power.is_zero()) break;
    factorial *= p;
    acc = acc + power * (derivs[p] / factorial);
  }
  return acc;
}

}  // namespace

GrassmannElement eval_super(const SuperExpr& e, std::span<const GrassmannElement> even_values,
                            std::span<const GrassmannElement> odd_values) {
  const int n = algebra_size(even_values, odd_values);
  switch (e->kind) {
    case NodeKind::Constant:
      return GrassmannElement::scalar(n, e->constant);
    case NodeKind::EvenVar: {
      if (e->var_index < 0 || e->var_index >= static_cast<int>(even_values.size())) {
        fail(ErrorKind::Dimension, "eval_super: even variable index out of range");
      }
      const GrassmannElement& v = even_values[e->var_index];
      if (v.parity() != Parity::Even) {
        fail(ErrorKind::Dimension, "eval_super: even variable bound to a non-even value");
      }
      return v;
    }
    case NodeKind::OddVar: {
      if (e->var_index < 0 || e->var_index >= static_cast<int>(odd_values.size())) {
        fail(ErrorKind::Dimension, "eval_super: odd variable index out of range");
      }
      const GrassmannElement& v = odd_values[e->var_index];
      if (!v.is_zero() && v.parity() != Parity::Odd) {
        fail(ErrorKind::Dimension, "eval_super: odd variable bound to a non-odd value");
      }
      return v;
    }
    case NodeKind::Add: {
      GrassmannElement acc(n);
      for (const auto& c : e->children) acc = acc + eval_super(c, even_values, odd_values);
      return acc;
    }
    case NodeKind::Neg:
      return -eval_super(e->children[0], even_values, odd_values);
    case NodeKind::Mul: {
      GrassmannElement acc = GrassmannElement::scalar(n, 1.0);
      for (const auto& c : e->children) acc = acc * eval_super(c, even_values, odd_values);
      return acc;
    }
    case NodeKind::Div:
      return eval_super(e->children[0], even_values, odd_values) *
             eval_super(e->children[1], even_values, odd_values).invert();
    case NodeKind::Pow:
      return eval_super(e->children[0], even_values, odd_values).pow(e->exponent);
    case NodeKind::Func:
      return taylor_apply(e->func, eval_super(e->children[0], even_values, odd_values));
  }
  fail(ErrorKind::Parse, "eval_super: unreachable node kind");
}

GrassmannElement eval(const OddPolynomialForm& form, std::span<const double> even_values,
                      std::span<const GrassmannElement> odd_values) {
  if (static_cast<int>(even_values.size()) < form.even_count() ||
      static_cast<int>(odd_values.size()) < form.odd_count()) {
    fail(ErrorKind::Dimension, "eval: not enough values for the coordinate system");
  }
  const int n = algebra_size({}, odd_values);
  for (const auto& g : odd_values) {
    if (!g.is_zero() && g.parity() != Parity::Odd) {
      fail(ErrorKind::Dimension, "eval: odd variable bound to a non-odd value");
    }
  }
  GrassmannElement acc(n);
  for (const auto& [mask, coeff] : form.coefficients()) {
    GrassmannElement term = GrassmannElement::scalar(n, eval_scalar(coeff, even_values));
    std::uint64_t m = mask;
    while (m != 0) {
      const int bit = std::countr_zero(m);
      m &= m - 1;
      term = term * odd_values[bit];
    }
    acc = acc + term;
  }
  return acc;
}

GrassmannElement eval(const SuperExpr& e, const CoordinateSystem& coords,
                      std::span<const double> even_values,
                      std::span<const GrassmannElement> odd_values) {
  return eval(normalize(e, coords), even_values, odd_values);
}

// ===== Jacobians =====

BlockJacobian jacobian_blocks(const std::vector<SuperExpr>& components, int even_out_count,
                              const CoordinateSystem& coords) {
  const int total = static_cast<int>(components.size());
  if (even_out_count < 0 || even_out_count > total) {
    fail(ErrorKind::Dimension, "jacobian_blocks: bad even component count");
  }
  const int odd_out_count = total - even_out_count;
  for (int i = 0; i < total; ++i) {
    const Parity p = parity_of(components[i], coords);
    const bool want_even = i < even_out_count;
    const bool zero = normalize(components[i], coords).coefficients().empty();
    if (zero) continue;
    if (want_even && p != Parity::Even) {
      fail(ErrorKind::Dimension, "jacobian_blocks: component " + std::to_string(i) +
                                     " must be even, found " + parity_name(p));
    }
    if (!want_even && p != Parity::Odd) {
      fail(ErrorKind::Dimension, "jacobian_blocks: component " + std::to_string(i) +
                                     " must be odd, found " + parity_name(p));
    }
  }
  BlockJacobian out;
  out.ee.resize(even_out_count);
  out.eo.resize(even_out_count);
  out.oe.resize(odd_out_count);
  out.oo.resize(odd_out_count);
  for (int i = 0; i < even_out_count; ++i) {
    for (int j = 0; j < coords.even_count(); ++j) {
      out.ee[i].push_back(diff_even(components[i], coords, j));
    }
    for (int j = 0; j < coords.odd_count(); ++j) {
      out.eo[i].push_back(diff_odd(components[i], coords, j));
    }
  }
  for (int i = 0; i < odd_out_count; ++i) {
    const SuperExpr& comp = components[even_out_count + i];
    for (int j = 0; j < coords.even_count(); ++j) {
      out.oe[i].push_back(diff_even(comp, coords, j));
    }
    for (int j = 0; j < coords.odd_count(); ++j) {
      out.oo[i].push_back(diff_odd(comp, coords, j));
    }
  }
  return out;
}

Eigen::MatrixXd reduce_block(const std::vector<std::vector<SuperExpr>>& block,
                             const CoordinateSystem& coords,
                             std::span<const double> even_values) {
  const int rows = static_cast<int>(block.size());
  const int cols = rows == 0 ? 0 : static_cast<int>(block[0].size());
  Eigen::MatrixXd out(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(block[i].size()) != cols) {
      fail(ErrorKind::Dimension, "reduce_block: ragged block");
    }
    for (int j = 0; j < cols; ++j) {
      out(i, j) = eval_scalar(body_expr(block[i][j], coords), even_values);
    }
  }
  return out;
}

}  // namespace supergeo
