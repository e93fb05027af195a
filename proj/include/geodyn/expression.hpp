#pragma once

#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "geodyn/chart_field.hpp"
#include "geodyn/errors.hpp"

namespace geodyn {

/// Syntax error in an expression; `column` is 1-based.
class ExpressionError : public Error {
 public:
  ExpressionError(const std::string& message, int column)
      : Error(message + " at column " + std::to_string(column)), column_(column) {}
  int column() const { return column_; }

 private:
  int column_;
};

/// Arithmetic over chart coordinates:
///
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := ('+' | '-') unary | power
///   power   := primary ('^' unary)?
///   primary := number | name | func '(' expr ')' | '(' expr ')'
///   func    := sin | cos | tan | exp | log | sqrt
///
/// Names are the coordinate variables, `pi` and any named constants. `^` is
/// right associative and binds tighter than unary minus (-x^2 = -(x^2)).
class Expression {
 public:
  Expression() = default;
  /// Throws ExpressionError on syntax errors and unknown names.
  static Expression parse(const std::string& text, const std::vector<std::string>& variables,
                          const std::map<std::string, double>& constants = {});

  const std::string& text() const { return text_; }
  int variables() const { return variables_; }
  /// True when no coordinate appears.
  bool is_constant() const;

  template <typename S>
  S evaluate(std::span<const S> x) const;
  double operator()(std::span<const double> x) const { return evaluate<double>(x); }

 private:
  enum class Op { Const, Var, Neg, Add, Sub, Mul, Div, Pow, IntPow, Sin, Cos, Tan, Exp, Log, Sqrt };
  struct Node {
    Op op;
    double value = 0.0;
    int index = 0;
  };
  friend class ExpressionParser;

  std::string text_;
  int variables_ = 0;
  std::vector<Node> code_;  // postfix
};

template <typename S>
S Expression::evaluate(std::span<const S> x) const {
  using std::cos;
  using std::exp;
  using std::log;
  using std::pow;
  using std::sin;
  using std::sqrt;
  using std::tan;
  std::vector<S> stack;
  stack.reserve(code_.size());
  auto pop = [&stack] {
    S v = stack.back();
    stack.pop_back();
    return v;
  };
  for (const Node& n : code_) {
    switch (n.op) {
      case Op::Const:
        stack.push_back(S(n.value));
        break;
      case Op::Var:
        stack.push_back(x[static_cast<std::size_t>(n.index)]);
        break;
      case Op::Neg:
        stack.back() = -stack.back();
        break;
      case Op::IntPow:
        stack.back() = ipow(stack.back(), n.index);
        break;
      case Op::Sin:
        stack.back() = sin(stack.back());
        break;
      case Op::Cos:
        stack.back() = cos(stack.back());
        break;
      case Op::Tan:
        stack.back() = tan(stack.back());
        break;
      case Op::Exp:
        stack.back() = exp(stack.back());
        break;
      case Op::Log:
        stack.back() = log(stack.back());
        break;
      case Op::Sqrt:
        stack.back() = sqrt(stack.back());
        break;
      default: {
        const S b = pop();
        const S a = pop();
        switch (n.op) {
          case Op::Add:
            stack.push_back(a + b);
            break;
          case Op::Sub:
            stack.push_back(a - b);
            break;
          case Op::Mul:
            stack.push_back(a * b);
            break;
          case Op::Div:
            stack.push_back(a / b);
            break;
          default:
            stack.push_back(pow(a, b));
            break;
        }
      }
    }
  }
  return stack.back();
}

/// Generic field whose components are the given expressions in row-major
/// order. Throws DimensionError when the count does not match the shape.
ChartField expression_field(int dimension, std::vector<IndexSlot> shape, std::vector<Expression> components);

}  // namespace geodyn
