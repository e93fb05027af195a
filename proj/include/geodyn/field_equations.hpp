#pragma once

#include <optional>
#include <string>

#include "geodyn/lagrangian.hpp"

namespace geodyn {

/// Field-equation residual at one point. Variations are taken with respect
/// to the inverse metric gamma^{mu nu} with the curvature components held
/// fixed in the index positions noted per form, so only the algebraic
/// (non-derivative) part of the variation is represented.
struct FieldEquationResidual {
  std::string form;  // "universal" or "standard-model"
  Eigen::MatrixXd lhs;
  Eigen::MatrixXd rhs;
  Eigen::MatrixXd residual;  // lhs - rhs
  double symmetry_residual = 0.0;  // max |residual - residual^T|
  double lagrangian = 0.0;         // density L without sqrt|gamma|

  /// Analytic delta(L sqrt|gamma|)/delta gamma^{mu nu} and its central
  /// difference counterpart under gamma^{mu nu} -> gamma^{mu nu} + eps e_(mu nu).
  Eigen::MatrixXd variation;
  Eigen::MatrixXd fd_variation;
  double fd_deviation = 0.0;        // max |variation - fd_variation| / max(1, max |fd_variation|)
  /// Same comparison for the variation implied by the displayed equation.
  Eigen::MatrixXd displayed_variation;
  double displayed_fd_deviation = 0.0;

  /// Only for the universal form: the equation with the trace terms from
  /// delta sqrt|gamma| = -1/2 sqrt|gamma| gamma_{mu nu} delta gamma^{mu nu}:
  /// 4 R_mu^{s r l} R_{nu s r l} - 1/2 gamma R.R = kappa0 T + gamma kappa0 tau0.
  Eigen::MatrixXd variational_lhs;
  Eigen::MatrixXd variational_rhs;
  Eigen::MatrixXd variational_residual;

  std::string note;
};

/// tau0 and kappa0 of the compact action int (tau0 + R.R/2kappa0) sqrt|gamma|.
struct UniversalConstants {
  double tau0 = 0.0;
  double kappa0 = 1.0;
};

UniversalConstants universal_constants(double M4, double M0, double lambda2, double sigma2);

/// Displayed form 4 R_mu^{s r l} R_{nu s r l} + 1/2 gamma_{mu nu} R.R = kappa0 T - gamma kappa0 tau0
/// with R the Riemann tensor of the generalized metric, held fixed with all
/// indices down. `T` is a covariant rank-2 field (zero when absent). Throws
/// SingularMetricError at degenerate points and InvalidArgument for kappa0 <= 0.
FieldEquationResidual universal_field_equation(const ConnectionForm& a, const Point& p, UniversalConstants k,
                                               const std::optional<ChartField>& T = std::nullopt,
                                               double fd_step = 1e-4);

/// N_{mu nu} - 1/2 gamma_{mu nu} L = 1/2 T_{mu nu} for the canonically
/// normalized Lagrangian, with
///   N = 2 alpha0 R_{ab mu a} R^{ab}_nu^a - 1/2 sum_F F_mu^a F_{nu a} + Re <D_mu Hn, D_nu Hn>.
/// Frame curvature R_{ab mu nu}, F_{mu nu} and D_mu H are held fixed.
FieldEquationResidual sm_field_equation(const ConnectionForm& a, const Point& p, const NormalizedSM& s,
                                        const std::optional<ChartField>& T = std::nullopt, double fd_step = 1e-4);

}  // namespace geodyn
