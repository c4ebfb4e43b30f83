#include "wagner/expr.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <set>

namespace wagner::expr {

VarSet VarSet::chart_vars(int m) {
  VarSet vs;
  const int n = 2 * m + 1;
  for (int i = 1; i <= n; ++i) vs.names.push_back("x" + std::to_string(i));
  return vs;
}

VarSet VarSet::fiber_vars(int m) {
  VarSet vs = chart_vars(m);
  for (int i = 1; i <= 2 * m; ++i) vs.names.push_back("v" + std::to_string(i));
  return vs;
}

VarSet VarSet::curve_vars() {
  VarSet vs;
  vs.names.push_back("t");
  return vs;
}

std::optional<int> VarSet::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<int>(i);
  }
  return std::nullopt;
}

namespace detail {

enum class Op { Add, Sub, Mul, Div, Pow };
enum class Func { Sqrt, Exp, Log, Sin, Cos };

struct Node {
  enum class Kind { Number, Var, Neg, Binary, Call } kind;
  double number = 0.0;
  int slot = -1;
  std::string var_name;
  Op op = Op::Add;
  Func func = Func::Sqrt;
  std::shared_ptr<const Node> a, b;
};

using NodePtr = std::shared_ptr<const Node>;

NodePtr make_number(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Number;
  n->number = v;
  return n;
}

NodePtr make_var(int slot, std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Var;
  n->slot = slot;
  n->var_name = std::move(name);
  return n;
}

NodePtr make_neg(NodePtr a) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Neg;
  n->a = std::move(a);
  return n;
}

NodePtr make_binary(Op op, NodePtr a, NodePtr b) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Binary;
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr make_call(Func f, NodePtr a) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Call;
  n->func = f;
  n->a = std::move(a);
  return n;
}

// ---------------------------------------------------------------------------
// Tokenizer

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
  Tok kind;
  std::size_t offset;
  double number = 0.0;
  std::string_view text;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }

  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) {
      ++pos_;
    }
    tok_.offset = pos_;
    if (pos_ >= src_.size()) {
      tok_.kind = Tok::End;
      return;
    }
    const char c = src_[pos_];
    switch (c) {
      case '+': tok_.kind = Tok::Plus; ++pos_; return;
      case '-': tok_.kind = Tok::Minus; ++pos_; return;
      case '*': tok_.kind = Tok::Star; ++pos_; return;
      case '/': tok_.kind = Tok::Slash; ++pos_; return;
      case '^': tok_.kind = Tok::Caret; ++pos_; return;
      case '(': tok_.kind = Tok::LParen; ++pos_; return;
      case ')': tok_.kind = Tok::RParen; ++pos_; return;
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      lex_number();
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t end = pos_;
      while (end < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[end])) || src_[end] == '_')) {
        ++end;
      }
      tok_.kind = Tok::Ident;
      tok_.text = src_.substr(pos_, end - pos_);
      pos_ = end;
      return;
    }
    throw ParseError("unexpected character '" + std::string(1, c) + "'", pos_);
  }

  void lex_number() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t mark = pos_;
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      } else {
        pos_ = mark;  // "2e" is the number 2 followed by identifier e
      }
    }
    const std::string text(src_.substr(start, pos_ - start));
    if (text == ".") {
      throw ParseError("malformed number", start);
    }
    try {
      tok_.number = std::stod(text);
    } catch (const std::exception&) {
      throw ParseError("malformed number '" + text + "'", start);
    }
    tok_.kind = Tok::Number;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  Token tok_;
};

// ---------------------------------------------------------------------------
// Recursive-descent parser
//
//   expr   := term (('+' | '-') term)*
//   term   := factor (('*' | '/') factor)*
//   factor := '-' factor | power
//   power  := atom ('^' factor)?
//   atom   := NUMBER | IDENT | IDENT '(' expr ')' | '(' expr ')'

class Parser {
 public:
  Parser(std::string_view src, const VarSet& vars) : lex_(src), vars_(vars) {}

  NodePtr parse() {
    NodePtr e = parse_expr();
    const Token& t = lex_.peek();
    if (t.kind != Tok::End) {
      throw ParseError("unexpected trailing input", t.offset);
    }
    return e;
  }

 private:
  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    while (true) {
      const Tok k = lex_.peek().kind;
      if (k == Tok::Plus || k == Tok::Minus) {
        lex_.take();
        NodePtr rhs = parse_term();
        lhs = make_binary(k == Tok::Plus ? Op::Add : Op::Sub, lhs, rhs);
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_factor();
    while (true) {
      const Tok k = lex_.peek().kind;
      if (k == Tok::Star || k == Tok::Slash) {
        lex_.take();
        NodePtr rhs = parse_factor();
        lhs = make_binary(k == Tok::Star ? Op::Mul : Op::Div, lhs, rhs);
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_factor() {
    if (lex_.peek().kind == Tok::Minus) {
      lex_.take();
      return make_neg(parse_factor());
    }
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_atom();
    if (lex_.peek().kind == Tok::Caret) {
      lex_.take();
      // Right-associative; the exponent may carry its own unary minus.
      NodePtr exponent = parse_factor();
      return make_binary(Op::Pow, base, exponent);
    }
    return base;
  }

  NodePtr parse_atom() {
    Token t = lex_.take();
    switch (t.kind) {
      case Tok::Number:
        return make_number(t.number);
      case Tok::LParen: {
        NodePtr inner = parse_expr();
        expect(Tok::RParen, ")");
        return inner;
      }
      case Tok::Ident: {
        if (lex_.peek().kind == Tok::LParen) {
          const Func f = function_named(t.text, t.offset);
          lex_.take();
          NodePtr arg = parse_expr();
          expect(Tok::RParen, ")");
          return make_call(f, arg);
        }
        if (auto slot = vars_.index_of(t.text)) {
          return make_var(*slot, std::string(t.text));
        }
        throw ParseError("unknown variable '" + std::string(t.text) +
                             "' (permitted: " + permitted() + ")",
                         t.offset);
      }
      case Tok::End:
        throw ParseError("unexpected end of input (expected a value)", t.offset);
      default:
        throw ParseError("unexpected token (expected a value)", t.offset);
    }
  }

  Func function_named(std::string_view name, std::size_t offset) const {
    if (name == "sqrt") return Func::Sqrt;
    if (name == "exp") return Func::Exp;
    if (name == "log") return Func::Log;
    if (name == "sin") return Func::Sin;
    if (name == "cos") return Func::Cos;
    throw ParseError("unknown function '" + std::string(name) +
                         "' (supported: sqrt, exp, log, sin, cos)",
                     offset);
  }

  void expect(Tok kind, const char* what) {
    const Token& t = lex_.peek();
    if (t.kind != kind) {
      throw ParseError(std::string("expected '") + what + "'", t.offset);
    }
    lex_.take();
  }

  std::string permitted() const {
    std::string out;
    for (std::size_t i = 0; i < vars_.names.size(); ++i) {
      if (i) out += ", ";
      out += vars_.names[i];
    }
    return out;
  }

  Lexer lex_;
  const VarSet& vars_;
};

// ---------------------------------------------------------------------------
// Evaluation

// Scalar adapters so one walker covers doubles and jets.
struct DoubleOps {
  using Value = double;
  static double constant(double v, std::span<const double>) { return v; }
  static double neg(const double& a) { return -a; }
  static double add(const double& a, const double& b) { return a + b; }
  static double sub(const double& a, const double& b) { return a - b; }
  static double mul(const double& a, const double& b) { return a * b; }
  static double div(const double& a, const double& b) {
    if (b == 0.0) throw EvalError("division by zero");
    return a / b;
  }
  static double call(Func f, const double& a) {
    switch (f) {
      case Func::Sqrt:
        if (a < 0.0) throw EvalError("sqrt of a negative value");
        return std::sqrt(a);
      case Func::Exp:
        return std::exp(a);
      case Func::Log:
        if (a <= 0.0) throw EvalError("log of a non-positive value");
        return std::log(a);
      case Func::Sin:
        return std::sin(a);
      case Func::Cos:
        return std::cos(a);
    }
    throw EvalError("unreachable function kind");
  }
  static double pow_general(const double& a, const double& b) {
    const double r = std::round(b);
    if (r == b && std::abs(b) < 64.0) {
      double acc = 1.0;
      double base = a;
      long long e = static_cast<long long>(r);
      const bool invert = e < 0;
      e = invert ? -e : e;
      for (; e > 0; e >>= 1) {
        if (e & 1) acc *= base;
        if (e > 1) base *= base;
      }
      if (invert) {
        if (acc == 0.0) throw EvalError("zero raised to a negative power");
        return 1.0 / acc;
      }
      return acc;
    }
    if (a <= 0.0) {
      throw EvalError("non-integer power of a non-positive base");
    }
    return std::pow(a, b);
  }
};

struct JetOps {
  using Value = jets::Jet;
  static jets::Jet constant(double v, std::span<const jets::Jet> env) {
    if (env.empty()) throw EvalError("jet evaluation needs at least one binding");
    return jets::Jet::constant(env[0].context(), v);
  }
  static jets::Jet neg(const jets::Jet& a) { return -a; }
  static jets::Jet add(const jets::Jet& a, const jets::Jet& b) { return a + b; }
  static jets::Jet sub(const jets::Jet& a, const jets::Jet& b) { return a - b; }
  static jets::Jet mul(const jets::Jet& a, const jets::Jet& b) { return a * b; }
  static jets::Jet div(const jets::Jet& a, const jets::Jet& b) { return a / b; }
  static jets::Jet call(Func f, const jets::Jet& a) {
    switch (f) {
      case Func::Sqrt: return sqrt(a);
      case Func::Exp: return exp(a);
      case Func::Log: return log(a);
      case Func::Sin: return sin(a);
      case Func::Cos: return cos(a);
    }
    throw EvalError("unreachable function kind");
  }
  static jets::Jet pow_general(const jets::Jet& a, const jets::Jet& b) {
    // Non-constant exponents fall back to exp(b log a).
    return exp(b * log(a));
  }
};

// Constant-fold detection for exponents: a plain number or its negation.
std::optional<double> constant_exponent(const Node* n) {
  if (n->kind == Node::Kind::Number) return n->number;
  if (n->kind == Node::Kind::Neg && n->a->kind == Node::Kind::Number) {
    return -n->a->number;
  }
  return std::nullopt;
}

template <class Ops>
typename Ops::Value eval_node(const Node* n, std::span<const typename Ops::Value> env) {
  switch (n->kind) {
    case Node::Kind::Number:
      return Ops::constant(n->number, env);
    case Node::Kind::Var:
      if (n->slot < 0 || static_cast<std::size_t>(n->slot) >= env.size()) {
        throw EvalError("variable binding missing for slot " + std::to_string(n->slot));
      }
      return env[n->slot];
    case Node::Kind::Neg:
      return Ops::neg(eval_node<Ops>(n->a.get(), env));
    case Node::Kind::Call:
      return Ops::call(n->func, eval_node<Ops>(n->a.get(), env));
    case Node::Kind::Binary: {
      if (n->op == Op::Pow) {
        auto base = eval_node<Ops>(n->a.get(), env);
        if (auto p = constant_exponent(n->b.get())) {
          if constexpr (std::is_same_v<typename Ops::Value, jets::Jet>) {
            return jets::pow(base, *p);
          } else {
            return DoubleOps::pow_general(base, *p);
          }
        }
        return Ops::pow_general(base, eval_node<Ops>(n->b.get(), env));
      }
      auto a = eval_node<Ops>(n->a.get(), env);
      auto b = eval_node<Ops>(n->b.get(), env);
      switch (n->op) {
        case Op::Add: return Ops::add(a, b);
        case Op::Sub: return Ops::sub(a, b);
        case Op::Mul: return Ops::mul(a, b);
        case Op::Div: return Ops::div(a, b);
        case Op::Pow: break;
      }
      throw EvalError("unreachable operator");
    }
  }
  throw EvalError("unreachable node kind");
}

// ---------------------------------------------------------------------------
// Printing: minimal parentheses, stable under re-parsing.

int precedence(const Node* n) {
  switch (n->kind) {
    case Node::Kind::Number:
      return n->number < 0 ? 1 : 4;  // negative literals print like negations
    case Node::Kind::Var:
    case Node::Kind::Call:
      return 4;
    case Node::Kind::Neg:
      return 1;
    case Node::Kind::Binary:
      switch (n->op) {
        case Op::Add: case Op::Sub: return 0;
        case Op::Mul: case Op::Div: return 2;
        case Op::Pow: return 3;
      }
  }
  return 4;
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void print_node(const Node* n, std::string& out);

void print_child(const Node* c, int min_prec, std::string& out) {
  if (precedence(c) < min_prec) {
    out += '(';
    print_node(c, out);
    out += ')';
  } else {
    print_node(c, out);
  }
}

void print_node(const Node* n, std::string& out) {
  switch (n->kind) {
    case Node::Kind::Number:
      out += format_number(n->number);
      return;
    case Node::Kind::Var:
      out += n->var_name;
      return;
    case Node::Kind::Neg:
      out += '-';
      print_child(n->a.get(), 1, out);
      return;
    case Node::Kind::Call: {
      switch (n->func) {
        case Func::Sqrt: out += "sqrt"; break;
        case Func::Exp: out += "exp"; break;
        case Func::Log: out += "log"; break;
        case Func::Sin: out += "sin"; break;
        case Func::Cos: out += "cos"; break;
      }
      out += '(';
      print_node(n->a.get(), out);
      out += ')';
      return;
    }
    case Node::Kind::Binary: {
      switch (n->op) {
        case Op::Add:
          print_child(n->a.get(), 0, out);
          out += " + ";
          print_child(n->b.get(), 1, out);
          return;
        case Op::Sub:
          print_child(n->a.get(), 0, out);
          out += " - ";
          print_child(n->b.get(), 1, out);
          return;
        case Op::Mul:
          print_child(n->a.get(), 2, out);
          out += "*";
          print_child(n->b.get(), 2, out);
          return;
        case Op::Div:
          print_child(n->a.get(), 2, out);
          out += "/";
          print_child(n->b.get(), 3, out);
          return;
        case Op::Pow:
          print_child(n->a.get(), 4, out);
          out += "^";
          print_child(n->b.get(), 1, out);
          return;
      }
    }
  }
}

void collect_vars(const Node* n, std::set<int>& out) {
  if (!n) return;
  if (n->kind == Node::Kind::Var) out.insert(n->slot);
  collect_vars(n->a.get(), out);
  collect_vars(n->b.get(), out);
}

NodePtr substitute_node(const Node* n, int slot, const NodePtr& replacement) {
  switch (n->kind) {
    case Node::Kind::Number:
      return make_number(n->number);
    case Node::Kind::Var:
      if (n->slot == slot) return replacement;
      return make_var(n->slot, n->var_name);
    case Node::Kind::Neg:
      return make_neg(substitute_node(n->a.get(), slot, replacement));
    case Node::Kind::Call:
      return make_call(n->func, substitute_node(n->a.get(), slot, replacement));
    case Node::Kind::Binary:
      return make_binary(n->op, substitute_node(n->a.get(), slot, replacement),
                         substitute_node(n->b.get(), slot, replacement));
  }
  throw EvalError("unreachable node kind");
}

NodePtr substitute_all_node(const Node* n,
                            std::span<const NodePtr> replacements) {
  switch (n->kind) {
    case Node::Kind::Number:
      return make_number(n->number);
    case Node::Kind::Var:
      if (n->slot >= 0 &&
          static_cast<std::size_t>(n->slot) < replacements.size() &&
          replacements[n->slot]) {
        return replacements[n->slot];
      }
      return make_var(n->slot, n->var_name);
    case Node::Kind::Neg:
      return make_neg(substitute_all_node(n->a.get(), replacements));
    case Node::Kind::Call:
      return make_call(n->func, substitute_all_node(n->a.get(), replacements));
    case Node::Kind::Binary:
      return make_binary(n->op, substitute_all_node(n->a.get(), replacements),
                         substitute_all_node(n->b.get(), replacements));
  }
  throw EvalError("unreachable node kind");
}

bool same_node(const Node* x, const Node* y) {
  if (x == y) return true;
  if (!x || !y || x->kind != y->kind) return false;
  switch (x->kind) {
    case Node::Kind::Number:
      return x->number == y->number;
    case Node::Kind::Var:
      return x->slot == y->slot;
    case Node::Kind::Neg:
      return same_node(x->a.get(), y->a.get());
    case Node::Kind::Call:
      return x->func == y->func && same_node(x->a.get(), y->a.get());
    case Node::Kind::Binary:
      return x->op == y->op && same_node(x->a.get(), y->a.get()) &&
             same_node(x->b.get(), y->b.get());
  }
  return false;
}

}  // namespace detail

Expr Expr::parse(std::string_view text, const VarSet& vars) {
  detail::Parser p(text, vars);
  return Expr(p.parse());
}

Expr Expr::number(double value) { return Expr(detail::make_number(value)); }

Expr Expr::squared(const Expr& base) {
  return Expr(detail::make_binary(detail::Op::Pow, base.root_,
                                  detail::make_number(2.0)));
}

std::string Expr::str() const {
  if (!root_) return "";
  std::string out;
  detail::print_node(root_.get(), out);
  return out;
}

std::vector<int> Expr::free_vars() const {
  std::set<int> slots;
  detail::collect_vars(root_.get(), slots);
  return {slots.begin(), slots.end()};
}

double Expr::evaluate(std::span<const double> values) const {
  if (!root_) throw EvalError("evaluation of an empty expression");
  return detail::eval_node<detail::DoubleOps>(root_.get(), values);
}

jets::Jet Expr::evaluate(std::span<const jets::Jet> values) const {
  if (!root_) throw EvalError("evaluation of an empty expression");
  return detail::eval_node<detail::JetOps>(root_.get(), values);
}

Expr Expr::substitute(int slot, const Expr& replacement) const {
  if (!root_ || !replacement.root_) {
    throw EvalError("substitute on an empty expression");
  }
  return Expr(detail::substitute_node(root_.get(), slot, replacement.root_));
}

Expr Expr::substitute_all(std::span<const Expr> replacements) const {
  if (!root_) {
    throw EvalError("substitute on an empty expression");
  }
  std::vector<detail::NodePtr> roots;
  roots.reserve(replacements.size());
  for (const Expr& r : replacements) roots.push_back(r.root_);
  return Expr(detail::substitute_all_node(root_.get(), roots));
}

Expr operator+(const Expr& a, const Expr& b) {
  if (!a.root_ || !b.root_) {
    throw EvalError("arithmetic on an empty expression");
  }
  return Expr(detail::make_binary(detail::Op::Add, a.root_, b.root_));
}

Expr operator*(const Expr& a, const Expr& b) {
  if (!a.root_ || !b.root_) {
    throw EvalError("arithmetic on an empty expression");
  }
  return Expr(detail::make_binary(detail::Op::Mul, a.root_, b.root_));
}

bool Expr::same_tree(const Expr& other) const {
  return detail::same_node(root_.get(), other.root_.get());
}

}  // namespace wagner::expr
