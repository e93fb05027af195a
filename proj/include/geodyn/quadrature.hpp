#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace geodyn {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // absolute error estimate
  int evaluations = 0;
};

/// Adaptive 15-point Gauss-Kronrod integration on [a, b]. Throws
/// EvaluationError when the tolerance is not met within `max_intervals`.
QuadratureResult gauss_kronrod(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-12,
                               double abs_tol = 1e-14, int max_intervals = 4000);

/// Integral over [a, inf) through u = a + t/(1 - t). Throws EvaluationError
/// when the integrand does not decay (divergent tail).
QuadratureResult integrate_half_line(const std::function<double(double)>& f, double a = 0.0,
                                     double rel_tol = 1e-12, double abs_tol = 1e-14);

/// Sum with pairwise (cascade) reduction in index order.
double pairwise_sum(std::span<const double> v);

/// Worker count from GEODYN_THREADS, else the hardware concurrency.
int thread_count();

/// Calls fn(i) for i in [0, count) on up to thread_count() threads. The first
/// exception by index is rethrown after all workers finish.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

/// Coordinate box [lo, hi] with optional periodic identification per axis.
struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
  std::vector<bool> periodic;  // empty means no periodic axes

  int dimension() const { return static_cast<int>(lo.size()); }
  bool is_periodic(int axis) const;
  double volume() const;
  static Box unit(int n);
};

/// Trapezoid integrals of several components over a box with a Richardson
/// error estimate. The coarse grid has `n` nodes per axis (endpoints included,
/// or n equispaced nodes on periodic axes); the fine grid halves the spacing.
struct GridIntegral {
  std::vector<double> value;        // fine-grid trapezoid values
  std::vector<double> coarse;       // coarse-grid trapezoid values
  std::vector<double> extrapolated;  // fine + (fine - coarse)/3
  std::vector<double> error;        // |fine - coarse|/3 plus a rounding floor
  int n = 0;                        // coarse nodes per axis
  std::size_t points = 0;           // fine-grid evaluations
};

using GridIntegrand = std::function<void(const Eigen::VectorXd& x, std::span<double> out)>;

/// Throws InvalidArgument for n < 2, an empty or inverted box, or
/// mismatched periodic flags.
GridIntegral integrate_box(const Box& box, int n, int components, const GridIntegrand& f);

}  // namespace geodyn
