#include "neharisp/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

namespace neharisp {

class ExprParser {
 public:
  explicit ExprParser(const std::string& text) : text_(text) {}

  Expr run() {
    Expr e;
    e.source_ = text_;
    nodes_ = &e.nodes_;
    e.root_ = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  using Op = Expr::Op;

  [[noreturn]] void fail(const std::string& what) const {
    throw ExprError("expression error at column " + std::to_string(pos_ + 1) +
                    " in '" + text_ + "': " + what);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(unsigned(text_[pos_]))) ++pos_;
  }

  bool consume(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  int add(Op op, int a = -1, int b = -1, double v = 0.0) {
    nodes_->push_back({op, a, b, v});
    return int(nodes_->size()) - 1;
  }

  int parse_expr() {
    int lhs = parse_term();
    for (;;) {
      if (consume('+')) {
        lhs = add(Op::Add, lhs, parse_term());
      } else if (consume('-')) {
        lhs = add(Op::Sub, lhs, parse_term());
      } else {
        return lhs;
      }
    }
  }

  int parse_term() {
    int lhs = parse_unary();
    for (;;) {
      if (consume('*')) {
        lhs = add(Op::Mul, lhs, parse_unary());
      } else if (consume('/')) {
        lhs = add(Op::Div, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  int parse_unary() {
    if (consume('-')) return add(Op::Neg, parse_unary());
    return parse_power();
  }

  int parse_power() {
    int base = parse_atom();
    if (consume('^')) {
      // right associative; exponent may carry its own unary minus
      return add(Op::Pow, base, parse_unary());
    }
    return base;
  }

  int parse_atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("expected a value");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      int e = parse_expr();
      if (!consume(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(unsigned(c)) || c == '.') return parse_number();
    if (std::isalpha(unsigned(c))) return parse_ident();
    fail(std::string("unexpected character '") + c + "'");
  }

  int parse_number() {
    const char* start = text_.c_str() + pos_;
    char* end = nullptr;
    double v = std::strtod(start, &end);
    if (end == start) fail("malformed number");
    pos_ += std::size_t(end - start);
    return add(Op::Num, -1, -1, v);
  }

  int parse_ident() {
    std::size_t s = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(unsigned(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string name = text_.substr(s, pos_ - s);
    if (name == "x") return add(Op::X);
    if (name == "y") return add(Op::Y);
    if (name == "z") return add(Op::Z);

    Op op;
    int arity = 1;
    if (name == "exp") op = Op::Exp;
    else if (name == "tanh") op = Op::Tanh;
    else if (name == "abs") op = Op::Abs;
    else if (name == "min") { op = Op::Min; arity = 2; }
    else if (name == "max") { op = Op::Max; arity = 2; }
    else fail("unknown identifier '" + name + "'");

    if (!consume('(')) fail("expected '(' after '" + name + "'");
    int a = parse_expr();
    int b = -1;
    if (arity == 2) {
      if (!consume(',')) fail("'" + name + "' takes two arguments");
      b = parse_expr();
    }
    if (!consume(')')) fail("expected ')'");
    return add(op, a, b);
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  std::vector<Expr::Node>* nodes_ = nullptr;
};

Expr Expr::parse(const std::string& text) { return ExprParser(text).run(); }

double Expr::eval_node(int i, double x, double y, double z) const {
  const Node& n = nodes_[std::size_t(i)];
  switch (n.op) {
    case Op::Num: return n.value;
    case Op::X: return x;
    case Op::Y: return y;
    case Op::Z: return z;
    case Op::Add: return eval_node(n.a, x, y, z) + eval_node(n.b, x, y, z);
    case Op::Sub: return eval_node(n.a, x, y, z) - eval_node(n.b, x, y, z);
    case Op::Mul: return eval_node(n.a, x, y, z) * eval_node(n.b, x, y, z);
    case Op::Div: return eval_node(n.a, x, y, z) / eval_node(n.b, x, y, z);
    case Op::Pow: return std::pow(eval_node(n.a, x, y, z), eval_node(n.b, x, y, z));
    case Op::Neg: return -eval_node(n.a, x, y, z);
    case Op::Exp: return std::exp(eval_node(n.a, x, y, z));
    case Op::Tanh: return std::tanh(eval_node(n.a, x, y, z));
    case Op::Abs: return std::fabs(eval_node(n.a, x, y, z));
    case Op::Min:
      return std::min(eval_node(n.a, x, y, z), eval_node(n.b, x, y, z));
    case Op::Max:
      return std::max(eval_node(n.a, x, y, z), eval_node(n.b, x, y, z));
  }
  return 0.0;
}

double Expr::eval(double x, double y, double z) const {
  if (root_ < 0) throw ExprError("eval of empty expression");
  return eval_node(root_, x, y, z);
}

}  // namespace neharisp
