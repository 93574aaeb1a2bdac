#include "microlocal/scalar_field.hpp"

#include "microlocal/errors.hpp"

#include <json.hpp>

#include <cctype>
#include <cmath>
#include <functional>
#include <unordered_map>

namespace microlocal {

struct ScalarField::Node {
  Kind kind = Kind::Const;
  Rational value;
  Variable var;
  int exponent = 0;
  NodePtr a, b, c, d;
};

namespace {

using Node = ScalarField::Node;
using NodePtr = ScalarField::NodePtr;
using Kind = ScalarField::Kind;

NodePtr make_const(const Rational& v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Const;
  n->value = v;
  return n;
}

NodePtr make_node(Kind k, NodePtr a, NodePtr b = nullptr) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

bool is_const(const NodePtr& n, int v) { return n->kind == Kind::Const && n->value == v; }
bool is_const(const NodePtr& n) { return n->kind == Kind::Const; }

Rational int_power(const Rational& base, int k) {
  if (k < 0) {
    if (sgn(base) == 0) throw Error(ErrorCode::DivisionByZero, "zero raised to a negative power");
    return Rational(1) / int_power(base, -k);
  }
  Rational out = 1;
  for (int i = 0; i < k; ++i) out *= base;
  return out;
}

NodePtr add(const NodePtr& a, const NodePtr& b) {
  if (is_const(a) && is_const(b)) return make_const(a->value + b->value);
  if (is_const(a, 0)) return b;
  if (is_const(b, 0)) return a;
  return make_node(Kind::Add, a, b);
}

NodePtr neg(const NodePtr& a) {
  if (is_const(a)) return make_const(-a->value);
  if (a->kind == Kind::Neg) return a->a;
  return make_node(Kind::Neg, a);
}

NodePtr sub(const NodePtr& a, const NodePtr& b) {
  if (is_const(a) && is_const(b)) return make_const(a->value - b->value);
  if (is_const(b, 0)) return a;
  if (is_const(a, 0)) return neg(b);
  return make_node(Kind::Sub, a, b);
}

NodePtr mul(const NodePtr& a, const NodePtr& b) {
  if (is_const(a) && is_const(b)) return make_const(a->value * b->value);
  if (is_const(a, 0) || is_const(b, 0)) return make_const(0);
  if (is_const(a, 1)) return b;
  if (is_const(b, 1)) return a;
  if (is_const(a, -1)) return neg(b);
  if (is_const(b, -1)) return neg(a);
  return make_node(Kind::Mul, a, b);
}

NodePtr div(const NodePtr& a, const NodePtr& b) {
  if (is_const(a) && is_const(b) && sgn(b->value) != 0) return make_const(a->value / b->value);
  if (is_const(b, 1)) return a;
  return make_node(Kind::Div, a, b);
}

NodePtr power(const NodePtr& a, int k) {
  if (k == 0) return make_const(1);
  if (k == 1) return a;
  if (is_const(a) && (k > 0 || sgn(a->value) != 0)) return make_const(int_power(a->value, k));
  auto n = make_node(Kind::Pow, a);
  std::const_pointer_cast<Node>(n)->exponent = k;
  return n;
}

NodePtr minmax(Kind k, const NodePtr& a, const NodePtr& b) {
  if (is_const(a) && is_const(b)) return make_const(k == Kind::Min ? std::min(a->value, b->value)
                                                                   : std::max(a->value, b->value));
  return make_node(k, a, b);
}

NodePtr kink_select(const NodePtr& l, const NodePtr& r, const NodePtr& on_less, const NodePtr& on_greater) {
  if (on_less == on_greater) return on_less;
  if (is_const(on_less) && is_const(on_greater) && on_less->value == on_greater->value) return on_less;
  auto n = std::make_shared<Node>();
  n->kind = Kind::KinkSelect;
  n->a = l;
  n->b = r;
  n->c = on_less;
  n->d = on_greater;
  return n;
}

[[noreturn]] void tie_error() {
  throw Error(ErrorCode::NonDifferentiable, "evaluation at a min/max kink");
}

template <typename T>
struct Evaluator {
  const std::vector<T>& x;
  const std::vector<T>& xi;
  std::unordered_map<const Node*, T> memo;

  T operator()(const NodePtr& n) {
    if (n->kind == Kind::Const) return convert(n->value);
    if (auto it = memo.find(n.get()); it != memo.end()) return it->second;
    T out = compute(*n);
    memo.emplace(n.get(), out);
    return out;
  }

  static T convert(const Rational& r) {
    if constexpr (std::is_same_v<T, double>) {
      return r.get_d();
    } else {
      return r;
    }
  }

  T variable(const Variable& v) const {
    const auto& src = v.fiber ? xi : x;
    if (v.index >= src.size()) throw Error(ErrorCode::DimensionMismatch, "variable index exceeds the point dimension");
    return src[v.index];
  }

  T compute(const Node& n) {
    switch (n.kind) {
      case Kind::Const: return convert(n.value);
      case Kind::Var: return variable(n.var);
      case Kind::Add: return (*this)(n.a) + (*this)(n.b);
      case Kind::Sub: return (*this)(n.a) - (*this)(n.b);
      case Kind::Mul: return (*this)(n.a) * (*this)(n.b);
      case Kind::Neg: return -(*this)(n.a);
      case Kind::Div: {
        T den = (*this)(n.b);
        if (den == T(0)) throw Error(ErrorCode::DivisionByZero, "division by zero during evaluation");
        return (*this)(n.a) / den;
      }
      case Kind::Pow: {
        T base = (*this)(n.a);
        if constexpr (std::is_same_v<T, double>) {
          if (base == 0.0 && n.exponent < 0) throw Error(ErrorCode::DivisionByZero, "zero raised to a negative power");
          return std::pow(base, n.exponent);
        } else {
          return int_power(base, n.exponent);
        }
      }
      case Kind::Min: {
        T l = (*this)(n.a), r = (*this)(n.b);
        return l < r ? l : r;
      }
      case Kind::Max: {
        T l = (*this)(n.a), r = (*this)(n.b);
        return l < r ? r : l;
      }
      case Kind::KinkSelect: {
        T l = (*this)(n.a), r = (*this)(n.b);
        if (l < r) return (*this)(n.c);
        if (r < l) return (*this)(n.d);
        tie_error();
      }
    }
    throw Error(ErrorCode::InvalidArgument, "unknown expression node");
  }
};

struct Dual {
  Rational value;
  Vec grad;
};

struct GradientEvaluator {
  const Vec& x;
  const Vec& xi;
  std::size_t n;
  std::unordered_map<const Node*, Dual> memo;

  const Dual& operator()(const NodePtr& node) {
    if (auto it = memo.find(node.get()); it != memo.end()) return it->second;
    Dual out = compute(*node);
    return memo.emplace(node.get(), std::move(out)).first->second;
  }

  Dual constant(const Rational& v) const { return {v, zeros(2 * n)}; }

  static void axpy(Vec& y, const Rational& a, const Vec& x) {
    if (sgn(a) == 0) return;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (sgn(x[i]) != 0) y[i] += a * x[i];
    }
  }

  Dual compute(const Node& node) {
    switch (node.kind) {
      case Kind::Const: return constant(node.value);
      case Kind::Var: {
        const auto& src = node.var.fiber ? xi : x;
        if (node.var.index >= src.size()) {
          throw Error(ErrorCode::DimensionMismatch, "variable index exceeds the point dimension");
        }
        Dual out = constant(src[node.var.index]);
        out.grad[(node.var.fiber ? n : 0) + node.var.index] = 1;
        return out;
      }
      case Kind::Add:
      case Kind::Sub: {
        const Dual& a = (*this)(node.a);
        const Dual& b = (*this)(node.b);
        const int s = node.kind == Kind::Add ? 1 : -1;
        Dual out{s > 0 ? Rational(a.value + b.value) : Rational(a.value - b.value), a.grad};
        axpy(out.grad, s, b.grad);
        return out;
      }
      case Kind::Neg: {
        const Dual& a = (*this)(node.a);
        return {-a.value, negate(a.grad)};
      }
      case Kind::Mul: {
        const Dual& a = (*this)(node.a);
        const Dual& b = (*this)(node.b);
        Dual out{a.value * b.value, zeros(2 * n)};
        axpy(out.grad, b.value, a.grad);
        axpy(out.grad, a.value, b.grad);
        return out;
      }
      case Kind::Div: {
        const Dual& a = (*this)(node.a);
        const Dual& b = (*this)(node.b);
        if (sgn(b.value) == 0) throw Error(ErrorCode::DivisionByZero, "division by zero during evaluation");
        Rational q = a.value / b.value;
        Dual out{q, zeros(2 * n)};
        Rational inv = Rational(1) / b.value;
        axpy(out.grad, inv, a.grad);
        axpy(out.grad, -q * inv, b.grad);
        return out;
      }
      case Kind::Pow: {
        const Dual& a = (*this)(node.a);
        const int k = node.exponent;
        Dual out{int_power(a.value, k), zeros(2 * n)};
        axpy(out.grad, Rational(k) * int_power(a.value, k - 1), a.grad);
        return out;
      }
      case Kind::Min:
      case Kind::Max: {
        const Dual& a = (*this)(node.a);
        const Dual& b = (*this)(node.b);
        if (a.value == b.value) tie_error();
        const bool pick_a = (a.value < b.value) == (node.kind == Kind::Min);
        return pick_a ? a : b;
      }
      case Kind::KinkSelect: {
        const Dual& l = (*this)(node.a);
        const Dual& r = (*this)(node.b);
        if (l.value == r.value) tie_error();
        return l.value < r.value ? Dual((*this)(node.c)) : Dual((*this)(node.d));
      }
    }
    throw Error(ErrorCode::InvalidArgument, "unknown expression node");
  }
};

class Differentiator {
 public:
  explicit Differentiator(Variable v) : v_(v) {}

  NodePtr operator()(const NodePtr& n) {
    if (auto it = memo_.find(n.get()); it != memo_.end()) return it->second;
    NodePtr out = compute(n);
    memo_.emplace(n.get(), out);
    return out;
  }

 private:
  NodePtr compute(const NodePtr& n) {
    switch (n->kind) {
      case Kind::Const: return make_const(0);
      case Kind::Var: return make_const(n->var == v_ ? 1 : 0);
      case Kind::Add: return add((*this)(n->a), (*this)(n->b));
      case Kind::Sub: return sub((*this)(n->a), (*this)(n->b));
      case Kind::Neg: return neg((*this)(n->a));
      case Kind::Mul: return add(mul((*this)(n->a), n->b), mul(n->a, (*this)(n->b)));
      case Kind::Div:
        return div(sub(mul((*this)(n->a), n->b), mul(n->a, (*this)(n->b))), power(n->b, 2));
      case Kind::Pow:
        return mul(mul(make_const(n->exponent), power(n->a, n->exponent - 1)), (*this)(n->a));
      case Kind::Min: return kink_select(n->a, n->b, (*this)(n->a), (*this)(n->b));
      case Kind::Max: return kink_select(n->a, n->b, (*this)(n->b), (*this)(n->a));
      case Kind::KinkSelect: return kink_select(n->a, n->b, (*this)(n->c), (*this)(n->d));
    }
    throw Error(ErrorCode::InvalidArgument, "unknown expression node");
  }

  Variable v_;
  std::unordered_map<const Node*, NodePtr> memo_;
};

template <typename F>
void visit_all(const NodePtr& root, F&& f) {
  std::unordered_map<const Node*, bool> seen;
  std::function<void(const NodePtr&)> rec = [&](const NodePtr& n) {
    if (!n || seen[n.get()]) return;
    seen[n.get()] = true;
    f(*n);
    rec(n->a);
    rec(n->b);
    rec(n->c);
    rec(n->d);
  };
  rec(root);
}

// --- parsing -----------------------------------------------------------------

Variable parse_variable(std::string_view name) {
  static const std::pair<std::string_view, Variable> aliases[] = {
      {"x", {false, 0}}, {"y", {false, 1}}, {"z", {false, 2}},
      {"xi", {true, 0}}, {"eta", {true, 1}}, {"zeta", {true, 2}},
  };
  for (const auto& [alias, v] : aliases) {
    if (name == alias) return v;
  }
  const bool fiber = name.rfind("xi", 0) == 0;
  std::string_view digits = name.substr(fiber ? 2 : 1);
  if ((!fiber && name.rfind('x', 0) != 0) || digits.empty()) {
    throw Error(ErrorCode::Parse, "unknown symbol '" + std::string(name) + "'");
  }
  std::size_t index = 0;
  for (char ch : digits) {
    if (!std::isdigit(static_cast<unsigned char>(ch))) {
      throw Error(ErrorCode::Parse, "unknown symbol '" + std::string(name) + "'");
    }
    index = index * 10 + static_cast<std::size_t>(ch - '0');
  }
  if (index == 0) throw Error(ErrorCode::Parse, "variable indices start at 1: '" + std::string(name) + "'");
  return {fiber, index - 1};
}

bool looks_numeric(std::string_view t) {
  if (t.empty()) return false;
  char c = t[0];
  if (c == '-' || c == '+') return t.size() > 1 && (std::isdigit(static_cast<unsigned char>(t[1])) || t[1] == '.');
  return std::isdigit(static_cast<unsigned char>(c)) || c == '.';
}

NodePtr atom(std::string_view token) {
  if (looks_numeric(token)) return make_const(parse_rational(token));
  auto n = std::make_shared<Node>();
  n->kind = Kind::Var;
  n->var = parse_variable(token);
  return n;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr parse_all() {
    NodePtr out = parse_expr();
    skip_space();
    if (pos_ != text_.size()) fail("trailing input");
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::Parse, "expression parse error at offset " + std::to_string(pos_) + ": " + what);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string_view token() {
    skip_space();
    std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != '(' &&
           text_[pos_] != ')') {
      ++pos_;
    }
    if (start == pos_) fail("expected a token");
    return text_.substr(start, pos_ - start);
  }

  NodePtr parse_expr() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    if (text_[pos_] == ')') fail("unexpected ')'");
    if (text_[pos_] != '(') return atom(token());
    ++pos_;
    std::string op(token());
    std::vector<NodePtr> args;
    int exponent = 0;
    for (;;) {
      skip_space();
      if (pos_ >= text_.size()) fail("missing ')'");
      if (text_[pos_] == ')') {
        ++pos_;
        break;
      }
      if (op == "^" && args.size() == 1) {
        std::string_view t = token();
        Rational e = parse_rational(t);
        if (e.get_den() != 1 || abs(e) > 64) fail("exponent must be an integer literal of size <= 64");
        exponent = static_cast<int>(e.get_num().get_si());
        args.push_back(nullptr);
        continue;
      }
      args.push_back(parse_expr());
    }
    auto need = [&](std::size_t lo, std::size_t hi) {
      if (args.size() < lo || args.size() > hi) fail("wrong number of arguments for '" + op + "'");
    };
    auto fold = [&](NodePtr (*f)(const NodePtr&, const NodePtr&)) {
      NodePtr acc = args[0];
      for (std::size_t i = 1; i < args.size(); ++i) acc = f(acc, args[i]);
      return acc;
    };
    if (op == "+") {
      need(1, SIZE_MAX);
      return fold(add);
    }
    if (op == "*") {
      need(1, SIZE_MAX);
      return fold(mul);
    }
    if (op == "-") {
      need(1, SIZE_MAX);
      return args.size() == 1 ? neg(args[0]) : fold(sub);
    }
    if (op == "/") {
      need(2, SIZE_MAX);
      return fold(div);
    }
    if (op == "^") {
      need(2, 2);
      return power(args[0], exponent);
    }
    if (op == "min" || op == "max") {
      need(1, SIZE_MAX);
      NodePtr acc = args[0];
      for (std::size_t i = 1; i < args.size(); ++i) acc = minmax(op == "min" ? Kind::Min : Kind::Max, acc, args[i]);
      return acc;
    }
    if (op == "kink") {
      need(4, 4);
      return kink_select(args[0], args[1], args[2], args[3]);
    }
    fail("unknown operator '" + op + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

NodePtr from_json(const nlohmann::json& j) {
  if (j.is_number_integer()) return make_const(Rational(j.get<long>()));
  if (j.is_number()) return make_const(approximate(j.get<double>(), 40));
  if (j.is_string()) return atom(j.get<std::string>());
  if (!j.is_object()) throw Error(ErrorCode::Schema, "expression: expected an object, string, or number");
  for (const auto& [key, value] : j.items()) {
    if (key != "const" && key != "var" && key != "op" && key != "args" && key != "exp") {
      throw Error(ErrorCode::Schema, "expression: unknown field '" + key + "'");
    }
    (void)value;
  }
  if (j.contains("const")) {
    const auto& c = j["const"];
    if (c.is_string()) return make_const(parse_rational(c.get<std::string>()));
    if (c.is_number_integer()) return make_const(Rational(c.get<long>()));
    throw Error(ErrorCode::Schema, "expression: 'const' must be a rational string or integer");
  }
  if (j.contains("var")) {
    if (!j["var"].is_string()) throw Error(ErrorCode::Schema, "expression: 'var' must be a string");
    auto n = std::make_shared<Node>();
    n->kind = Kind::Var;
    n->var = parse_variable(j["var"].get<std::string>());
    return n;
  }
  if (!j.contains("op") || !j["op"].is_string()) throw Error(ErrorCode::Schema, "expression: missing 'op'");
  if (!j.contains("args") || !j["args"].is_array()) throw Error(ErrorCode::Schema, "expression: missing 'args'");
  std::vector<NodePtr> args;
  for (const auto& a : j["args"]) args.push_back(from_json(a));
  const std::string op = j["op"].get<std::string>();
  auto fold = [&](auto f) {
    if (args.empty()) throw Error(ErrorCode::Schema, "expression: empty 'args'");
    NodePtr acc = args[0];
    for (std::size_t i = 1; i < args.size(); ++i) acc = f(acc, args[i]);
    return acc;
  };
  if (op == "+") return fold(add);
  if (op == "*") return fold(mul);
  if (op == "-") return args.size() == 1 ? neg(args[0]) : fold(sub);
  if (op == "/") return fold(div);
  if (op == "min") return fold([](const NodePtr& a, const NodePtr& b) { return minmax(Kind::Min, a, b); });
  if (op == "max") return fold([](const NodePtr& a, const NodePtr& b) { return minmax(Kind::Max, a, b); });
  if (op == "^") {
    if (args.size() != 1 || !j.contains("exp") || !j["exp"].is_number_integer()) {
      throw Error(ErrorCode::Schema, "expression: '^' needs one argument and an integer 'exp'");
    }
    return power(args[0], j["exp"].get<int>());
  }
  throw Error(ErrorCode::Schema, "expression: unknown op '" + op + "'");
}

void print(const NodePtr& n, std::string& out) {
  auto binary = [&](const char* op) {
    out += '(';
    out += op;
    out += ' ';
    print(n->a, out);
    out += ' ';
    print(n->b, out);
    out += ')';
  };
  switch (n->kind) {
    case Kind::Const: out += to_string(n->value); return;
    case Kind::Var:
      out += n->var.fiber ? "xi" : "x";
      out += std::to_string(n->var.index + 1);
      return;
    case Kind::Add: binary("+"); return;
    case Kind::Sub: binary("-"); return;
    case Kind::Mul: binary("*"); return;
    case Kind::Div: binary("/"); return;
    case Kind::Min: binary("min"); return;
    case Kind::Max: binary("max"); return;
    case Kind::Neg:
      out += "(- ";
      print(n->a, out);
      out += ')';
      return;
    case Kind::Pow:
      out += "(^ ";
      print(n->a, out);
      out += ' ' + std::to_string(n->exponent) + ')';
      return;
    case Kind::KinkSelect:
      out += "(kink ";
      print(n->a, out);
      out += ' ';
      print(n->b, out);
      out += ' ';
      print(n->c, out);
      out += ' ';
      print(n->d, out);
      out += ')';
      return;
  }
}

}  // namespace

ScalarField::ScalarField() : node_(make_const(0)) {}

ScalarField ScalarField::constant(const Rational& value) { return ScalarField(make_const(value)); }

ScalarField ScalarField::variable(Variable v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Var;
  n->var = v;
  return ScalarField(n);
}

ScalarField ScalarField::x(std::size_t i) { return variable({false, i}); }
ScalarField ScalarField::xi(std::size_t i) { return variable({true, i}); }

ScalarField ScalarField::parse(std::string_view text) { return ScalarField(Parser(text).parse_all()); }

ScalarField ScalarField::from_json_text(std::string_view json) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("expression JSON: ") + e.what());
  }
  return ScalarField(from_json(j));
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) { return ScalarField(add(a.node(), b.node())); }
ScalarField operator-(const ScalarField& a, const ScalarField& b) { return ScalarField(sub(a.node(), b.node())); }
ScalarField operator*(const ScalarField& a, const ScalarField& b) { return ScalarField(mul(a.node(), b.node())); }
ScalarField operator/(const ScalarField& a, const ScalarField& b) { return ScalarField(div(a.node(), b.node())); }
ScalarField operator-(const ScalarField& a) { return ScalarField(neg(a.node())); }
ScalarField pow(const ScalarField& a, int exponent) { return ScalarField(power(a.node(), exponent)); }
ScalarField min(const ScalarField& a, const ScalarField& b) { return ScalarField(minmax(Kind::Min, a.node(), b.node())); }
ScalarField max(const ScalarField& a, const ScalarField& b) { return ScalarField(minmax(Kind::Max, a.node(), b.node())); }

ScalarField::Kind ScalarField::kind() const { return node_->kind; }

const Rational& ScalarField::constant_value() const {
  if (node_->kind != Kind::Const) throw Error(ErrorCode::InvalidArgument, "expression is not a constant");
  return node_->value;
}

Rational ScalarField::evaluate(const Vec& x, const Vec& xi) const {
  Evaluator<Rational> ev{x, xi, {}};
  return ev(node_);
}

double ScalarField::evaluate_double(const std::vector<double>& x, const std::vector<double>& xi) const {
  Evaluator<double> ev{x, xi, {}};
  return ev(node_);
}

std::pair<Rational, Vec> ScalarField::value_and_gradient(const Vec& x, const Vec& xi) const {
  if (x.size() != xi.size()) throw Error(ErrorCode::DimensionMismatch, "base and fiber dimensions differ");
  GradientEvaluator ev{x, xi, x.size(), {}};
  const Dual& d = ev(node_);
  return {d.value, d.grad};
}

ScalarField ScalarField::derivative(Variable v) const {
  Differentiator d(v);
  return ScalarField(d(node_));
}

std::size_t ScalarField::dimension() const {
  std::size_t n = 0;
  visit_all(node_, [&](const Node& node) {
    if (node.kind == Kind::Var) n = std::max(n, node.var.index + 1);
  });
  return n;
}

bool ScalarField::uses_fiber_variables() const {
  bool found = false;
  visit_all(node_, [&](const Node& node) { found = found || (node.kind == Kind::Var && node.var.fiber); });
  return found;
}

bool ScalarField::division_free() const {
  bool ok = true;
  visit_all(node_, [&](const Node& node) {
    ok = ok && node.kind != Kind::Div && !(node.kind == Kind::Pow && node.exponent < 0);
  });
  return ok;
}

bool ScalarField::has_kinks() const {
  bool found = false;
  visit_all(node_, [&](const Node& node) {
    found = found || node.kind == Kind::Min || node.kind == Kind::Max || node.kind == Kind::KinkSelect;
  });
  return found;
}

std::string ScalarField::to_string() const {
  std::string out;
  print(node_, out);
  return out;
}

namespace {

// Deterministic probe points for polarization checks.
std::vector<Vec> probe_points(std::size_t n) {
  std::vector<Vec> out;
  const long seeds[] = {3, -7, 11, -2, 5, 13, -17, 19};
  for (int k = 0; k < 4; ++k) {
    Vec p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = ratio(seeds[(k + 3 * i) % 8] * (k + 1), 7 + 2 * static_cast<long>(i));
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

std::optional<AffineForm> as_affine(const ScalarField& f, std::size_t n) {
  if (f.uses_fiber_variables() || f.has_kinks() || f.dimension() > n) return std::nullopt;
  const Vec zero = zeros(n);
  try {
    AffineForm out{zeros(n), f.evaluate(zero, zero)};
    for (std::size_t i = 0; i < n; ++i) out.linear[i] = f.evaluate(unit_vector(n, i), zero) - out.offset;
    for (const auto& p : probe_points(n)) {
      if (f.evaluate(p, zero) != dot(out.linear, p) + out.offset) return std::nullopt;
    }
    return out;
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::optional<QuadraticForm> as_quadratic(const ScalarField& f, std::size_t n) {
  if (f.uses_fiber_variables() || f.has_kinks() || f.dimension() > n) return std::nullopt;
  const Vec zero = zeros(n);
  try {
    auto at = [&](const Vec& p) { return f.evaluate(p, zero); };
    QuadraticForm out{std::vector<Vec>(n, zeros(n)), zeros(n), at(zero)};
    for (std::size_t i = 0; i < n; ++i) {
      Rational plus = at(unit_vector(n, i)), minus = at(negate(unit_vector(n, i)));
      out.q[i][i] = plus + minus - 2 * out.offset;
      out.linear[i] = (plus - minus) / 2;
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        Rational v = at(add(unit_vector(n, i), unit_vector(n, j))) - at(unit_vector(n, i)) - at(unit_vector(n, j)) +
                     out.offset;
        out.q[i][j] = v;
        out.q[j][i] = v;
      }
    }
    for (const auto& p : probe_points(n)) {
      Rational expected = dot(out.linear, p) + out.offset;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) expected += out.q[i][j] * p[i] * p[j] / 2;
      }
      if (at(p) != expected) return std::nullopt;
    }
    return out;
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace microlocal
