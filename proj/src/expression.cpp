#include "geodyn/expression.hpp"

#include <cctype>
#include <cstdlib>
#include <numbers>

namespace geodyn {

class ExpressionParser {
 public:
  ExpressionParser(const std::string& text, const std::vector<std::string>& variables,
                   const std::map<std::string, double>& constants)
      : s_(text), vars_(variables), consts_(constants) {}

  std::vector<Expression::Node> run() {
    skip();
    if (pos_ >= s_.size()) fail("empty expression");
    expr();
    skip();
    if (pos_ < s_.size()) fail(std::string("unexpected '") + s_[pos_] + "'");
    return std::move(code_);
  }

 private:
  using Op = Expression::Op;

  [[noreturn]] void fail(const std::string& msg) const { throw ExpressionError(msg, static_cast<int>(pos_) + 1); }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void emit(Op op, double value = 0.0, int index = 0) { code_.push_back({op, value, index}); }

  void expr() {
    term();
    for (;;) {
      if (accept('+')) {
        term();
        emit(Op::Add);
      } else if (accept('-')) {
        term();
        emit(Op::Sub);
      } else {
        return;
      }
    }
  }

  void term() {
    unary();
    for (;;) {
      if (accept('*')) {
        unary();
        emit(Op::Mul);
      } else if (accept('/')) {
        unary();
        emit(Op::Div);
      } else {
        return;
      }
    }
  }

  void unary() {
    if (accept('-')) {
      unary();
      emit(Op::Neg);
    } else if (accept('+')) {
      unary();
    } else {
      power();
    }
  }

  void power() {
    primary();
    if (accept('^')) {
      const std::size_t start = code_.size();
      unary();
      if (code_.size() == start + 1 && code_.back().op == Op::Const) {
        const double e = code_.back().value;
        if (e == static_cast<int>(e) && std::abs(e) <= 64.0) {
          code_.pop_back();
          emit(Op::IntPow, 0.0, static_cast<int>(e));
          return;
        }
      }
      emit(Op::Pow);
    }
  }

  void primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      expr();
      if (!accept(')')) fail("expected ')'");
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("malformed number");
      pos_ += static_cast<std::size_t>(end - begin);
      emit(Op::Const, v);
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      const std::string name = s_.substr(start, pos_ - start);
      static const std::map<std::string, Op> funcs = {{"sin", Op::Sin}, {"cos", Op::Cos},  {"tan", Op::Tan},
                                                      {"exp", Op::Exp}, {"log", Op::Log}, {"sqrt", Op::Sqrt}};
      if (const auto f = funcs.find(name); f != funcs.end()) {
        if (!accept('(')) fail("expected '(' after " + name);
        expr();
        if (!accept(')')) fail("expected ')'");
        emit(f->second);
        return;
      }
      for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (vars_[i] == name) {
          emit(Op::Var, 0.0, static_cast<int>(i));
          return;
        }
      }
      if (name == "pi") {
        emit(Op::Const, std::numbers::pi);
        return;
      }
      if (const auto k = consts_.find(name); k != consts_.end()) {
        emit(Op::Const, k->second);
        return;
      }
      pos_ = start;
      std::string known;
      for (const auto& v : vars_) known += (known.empty() ? "" : ", ") + v;
      for (const auto& [k, v] : consts_) known += (known.empty() ? "" : ", ") + k;
      fail("unknown name '" + name + "' (known: " + (known.empty() ? "none" : known) + ", pi)");
    }
    fail(std::string("unexpected '") + c + "'");
  }

  const std::string& s_;
  const std::vector<std::string>& vars_;
  const std::map<std::string, double>& consts_;
  std::size_t pos_ = 0;
  std::vector<Expression::Node> code_;
};

Expression Expression::parse(const std::string& text, const std::vector<std::string>& variables,
                             const std::map<std::string, double>& constants) {
  Expression e;
  e.text_ = text;
  e.variables_ = static_cast<int>(variables.size());
  e.code_ = ExpressionParser(text, variables, constants).run();
  return e;
}

bool Expression::is_constant() const {
  for (const auto& n : code_)
    if (n.op == Op::Var) return false;
  return true;
}

ChartField expression_field(int dimension, std::vector<IndexSlot> shape, std::vector<Expression> components) {
  std::size_t expected = 1;
  for (const auto& s : shape) expected *= static_cast<std::size_t>(s.extent);
  if (components.size() != expected) {
    throw DimensionError("expected " + std::to_string(expected) + " expressions, got " +
                         std::to_string(components.size()));
  }
  for (const auto& c : components) {
    if (c.variables() != dimension) throw DimensionError("expression '" + c.text() + "' has the wrong variable count");
  }
  return ChartField::generic(dimension, std::move(shape), [components](auto x, auto out) {
    using S = std::remove_cvref_t<decltype(out[0])>;
    for (std::size_t i = 0; i < components.size(); ++i) out[i] = components[i].template evaluate<S>(x);
  });
}

}  // namespace geodyn
