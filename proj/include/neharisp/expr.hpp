#pragma once

#include <string>
#include <vector>

#include "neharisp/common.hpp"

namespace neharisp {

/// Small arithmetic expressions over the spatial point (x, y, z):
/// literals, + - * / ^, unary minus, exp, tanh, abs, min, max.
/// '^' is right-associative and binds tighter than unary minus.
class Expr {
 public:
  Expr() = default;

  static Expr parse(const std::string& text);

  double eval(double x, double y, double z) const;
  double eval(const Vec3& p) const { return eval(p[0], p[1], p[2]); }

  const std::string& source() const { return source_; }
  bool empty() const { return nodes_.empty(); }

 private:
  enum class Op : std::uint8_t {
    Num, X, Y, Z, Add, Sub, Mul, Div, Pow, Neg, Exp, Tanh, Abs, Min, Max
  };
  struct Node {
    Op op;
    int a = -1, b = -1;
    double value = 0.0;
  };

  double eval_node(int i, double x, double y, double z) const;

  std::vector<Node> nodes_;
  int root_ = -1;
  std::string source_;

  friend class ExprParser;
};

}  // namespace neharisp
