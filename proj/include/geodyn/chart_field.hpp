#pragma once

#include <functional>
#include <span>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "geodyn/hyperdual.hpp"
#include "geodyn/tensor.hpp"

namespace geodyn {

/// Chart coordinates x^mu.
using Point = Eigen::VectorXd;

/// Diagonal frame metric eta_ab with entries +1 or -1.
class Signature {
 public:
  Signature() = default;
  explicit Signature(std::vector<int> signs);

  static Signature euclidean(int n);
  /// diag(-1, +1, ..., +1)
  static Signature lorentzian(int n);

  int dimension() const { return static_cast<int>(signs_.size()); }
  int operator[](int a) const { return signs_[static_cast<std::size_t>(a)]; }
  const std::vector<int>& signs() const { return signs_; }
  bool is_euclidean() const;
  Eigen::MatrixXd matrix() const;

 private:
  std::vector<int> signs_;
};

enum class DerivativeMode { Dual, FiniteDifference };

/// A smooth real-valued tensor field on a chart. Complex-valued quantities are
/// carried as separate real components by the fields that need them.
///
/// Fields built with `generic` carry a hyper-dual evaluator and differentiate
/// exactly; fields built with `real_only` always use central differences.
class ChartField {
 public:
  using DualEval = std::function<void(std::span<const Dual2>, std::span<Dual2>)>;
  using RealEval = std::function<void(std::span<const double>, std::span<double>)>;

  ChartField() = default;

  /// `f` must be callable as f(std::span<const S> x, std::span<S> out) for
  /// S = double and S = Dual2.
  template <typename F>
  static ChartField generic(int dimension, std::vector<IndexSlot> shape, F f) {
    ChartField field(dimension, std::move(shape));
    field.real_ = [f](std::span<const double> x, std::span<double> out) { f(x, out); };
    field.dual_ = [f](std::span<const Dual2> x, std::span<Dual2> out) { f(x, out); };
    field.mode_ = DerivativeMode::Dual;
    return field;
  }

  static ChartField real_only(int dimension, std::vector<IndexSlot> shape, RealEval f);

  int dimension() const { return dimension_; }
  const std::vector<IndexSlot>& shape() const { return shape_; }
  int components() const { return components_; }
  bool has_dual() const { return static_cast<bool>(dual_); }

  DerivativeMode mode() const { return mode_; }
  double fd_step() const { return fd_step_; }
  /// Copy with a different derivative mode. Dual mode requires a dual evaluator.
  ChartField with_mode(DerivativeMode mode, double fd_step = 1e-5) const;

  std::vector<double> evaluate(const Point& p) const;
  RealTensor value(const Point& p) const;
  void evaluate(std::span<const double> x, std::span<double> out) const;
  void evaluate_dual(std::span<const Dual2> x, std::span<Dual2> out) const;

 private:
  ChartField(int dimension, std::vector<IndexSlot> shape);

  int dimension_ = 0;
  std::vector<IndexSlot> shape_;
  int components_ = 0;
  RealEval real_;
  DualEval dual_;
  DerivativeMode mode_ = DerivativeMode::FiniteDifference;
  double fd_step_ = 1e-5;
};

/// Value and coordinate derivatives of every component at one point.
struct FieldJet {
  int n = 0;
  int components = 0;
  int order = 0;
  std::vector<double> value;   // [c]
  std::vector<double> first;   // [c][mu]
  std::vector<double> second;  // [c][mu][nu]

  double d(int c, int mu) const { return first[static_cast<std::size_t>(c * n + mu)]; }
  double dd(int c, int mu, int nu) const {
    return second[static_cast<std::size_t>((c * n + mu) * n + nu)];
  }
};

/// Jet to the requested order (0, 1 or 2) using the field's derivative mode.
FieldJet jet(const ChartField& f, const Point& p, int order);
FieldJet jet_dual(const ChartField& f, const Point& p, int order);
FieldJet jet_finite_difference(const ChartField& f, const Point& p, int order, double rel_step);

/// Appends `order` covariant coordinate indices holding the derivatives.
RealTensor differentiate(const ChartField& f, const Point& p, int order);

/// Evaluates `f` in the arithmetic of S (double or Dual2). Used to compose
/// fields into new generic fields.
template <typename S>
void evaluate_as(const ChartField& f, std::span<const S> x, std::span<S> out) {
  if constexpr (std::is_same_v<S, Dual2>) {
    f.evaluate_dual(x, out);
  } else {
    f.evaluate(x, out);
  }
}

/// Central-difference step along coordinate x: rel_step * max(1, |x|).
double fd_step_for(double x, double rel_step);

}  // namespace geodyn
