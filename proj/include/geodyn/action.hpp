#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "geodyn/builtin_metrics.hpp"
#include "geodyn/lagrangian.hpp"
#include "geodyn/quadrature.hpp"

namespace geodyn {

/// Non-negative cutoff f(u) on [0, inf).
class CutoffFunction {
 public:
  enum class Kind { Exponential, Sharp, Gaussian, Tabulated };

  static CutoffFunction exponential();  // e^{-u}
  static CutoffFunction sharp();        // 1 on [0, 1], 0 after
  static CutoffFunction gaussian();     // e^{-u^2}
  /// Piecewise linear through (u_i, f_i), zero beyond the last node. Requires
  /// u_0 = 0, strictly increasing nodes and f_i >= 0.
  static CutoffFunction tabulated(std::vector<double> u, std::vector<double> f);
  /// "exponential", "sharp", "gaussian". Throws InvalidArgument otherwise.
  static CutoffFunction builtin(const std::string& name);

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  double operator()(double u) const;
  /// Interior points where f or its derivative jumps.
  std::vector<double> breakpoints() const;
  /// End of the support, or infinity.
  double support() const;

 private:
  Kind kind_ = Kind::Exponential;
  std::string name_ = "exponential";
  std::vector<double> u_, f_;
};

/// M4 = int f(u) u du multiplies Lambda^4 a0, M2 = int f(u) du multiplies
/// Lambda^2 a2 and M0 = f(0) multiplies a4.
struct Moments {
  double M4 = 0.0;
  double M2 = 0.0;
  double M0 = 0.0;
  double M4_error = 0.0;  // absolute quadrature error estimates
  double M2_error = 0.0;
};

/// Throws EvaluationError when an integral diverges.
Moments moments(const CutoffFunction& f, double rel_tol = 1e-12);

/// Data of the Laplace-type operator: the generalized connection, an optional
/// scalar endomorphism term E (zero when absent) and the reparametrization.
struct HeatKernelInput {
  ConnectionForm connection;
  std::optional<ChartField> E;
  Reparametrization reparam;
};

struct Region {
  Box box;
  int grid = 5;  // coarse nodes per axis
};

/// Integrals over the region of the densities entering a0, a2 and a4, each
/// weighted by sqrt|det gamma|.
struct HeatKernelIntegrals {
  double volume = 0.0;
  double E = 0.0;
  double E2 = 0.0;
  double laplacian_E = 0.0;  // g^{mu nu}(d_mu d_nu E - Gamma^l_{mu nu} d_l E)
  double RR = 0.0;
  double BB = 0.0;
  double WW = 0.0;
  double GG = 0.0;
  double DH2 = 0.0;
  double potential = 0.0;
  GridIntegral grid;  // raw quadrature output, components in the order above
};

inline constexpr int kHeatKernelComponents = 10;

struct HeatKernelCoefficients {
  double a0 = 0.0;
  double a2 = 0.0;
  double a4 = 0.0;
  double a0_error = 0.0;
  double a2_error = 0.0;
  double a4_error = 0.0;
  HeatKernelIntegrals integrals;
  Couplings couplings;
  ConnectionConstants consts;
  Reparametrization reparam;
  Signature eta;
};

/// a0 = (1/16 pi^2) int sqrt|g|, a2 = (1/16 pi^2) int E sqrt|g|,
/// a4 = (1/192 pi^2) int (6 E^2 + 2 Laplacian E + F.F) sqrt|g| with F.F the
/// reparametrized curvature square (including lambda0). Throws
/// SingularMetricError when the metric degenerates inside the region.
HeatKernelCoefficients heat_kernel_coefficients(const HeatKernelInput& in, const Region& region);

struct ActionTerm {
  std::string name;
  double coefficient = 0.0;
  double integral = 0.0;
  double integral_error = 0.0;
  double value = 0.0;  // coefficient * integral
};

struct ActionReport {
  std::string kind;  // "spectral" or "riemannian-limit"
  std::vector<ActionTerm> terms;
  double total = 0.0;
  double total_error = 0.0;
  std::vector<std::pair<std::string, double>> constants;
  std::vector<std::string> moment_map;  // how each constant depends on the moments
  std::vector<std::string> notes;
  int grid = 0;
  std::size_t points = 0;

  const ActionTerm& term(const std::string& name) const;
  double constant(const std::string& name) const;
  void add(ActionTerm t);
};

/// Total = M4 Lambda^4 a0 + M2 Lambda^2 a2 + M0 a4, broken down per term.
/// Throws InvalidArgument for lambda2 <= 0.
ActionReport spectral_action(const Moments& m, const HeatKernelCoefficients& c, double lambda2);

/// Compact form int (tau0 + (1/2 kappa0) R.R) sqrt|g| with
/// tau0 = M4 Lambda^4/16 pi^2 and 1/2kappa0 = sigma2 M0/192 pi^2.
struct UniversalForm {
  double tau0 = 0.0;
  double kappa0 = 0.0;
  double sigma2 = 0.0;
  double folded_RR = 0.0;        // int (6E^2 + 2 Laplacian E + F.F) sqrt|g| / sigma2
  double compact_total = 0.0;    // tau0 vol + folded_RR / 2kappa0
  double a2_term = 0.0;          // M2 Lambda^2 a2, absent from the compact form
  double literal_RR = 0.0;       // int R_{ab mu nu} R^{ab mu nu} sqrt|g|
  double literal_total = 0.0;    // tau0 vol + literal_RR / 2kappa0
};

/// Throws InvalidArgument for sigma2 == 0.
UniversalForm universal_action_form(const Moments& m, const HeatKernelCoefficients& c, double lambda2,
                                    double sigma2);

/// Riemannian limit with the derivative perturbed by the Levi-Civita
/// connection. The generalized metric is built from the vielbein and
/// compared with the analytic metric.
struct LimitInput {
  BuiltinGeometry geometry;
  std::optional<FrameConnection> omega;  // must equal the Riemannian spin connection when given
  SMGaugeConfig sm;
  HiggsField higgs;
  ConnectionConstants consts;
  Reparametrization reparam;
};

struct LimitChecks {
  double metric_residual = 0.0;   // max |gamma - g|
  double riemann_residual = 0.0;  // max |Rhat^r_{m n l} - R^r_{m n l}|
  double frame_residual = 0.0;    // max |(d omega + omega ^ omega) - E R E^-1|
  double omega_residual = 0.0;    // max compatibility residual of the supplied omega
  std::size_t points = 0;
};

/// Identity checks at the coarse grid nodes of the region.
LimitChecks riemannian_limit_checks(const LimitInput& in, const Region& region);

/// Emits delta0, Einstein-Hilbert (M2 Lambda^2/64 pi^2), R.R, the gauge and
/// Higgs terms, eta0 Box R, zeta0 R^2 and -beta0 (Ric^2 + Riem^2). Throws
/// InvalidArgument when the supplied omega is not the Riemannian spin
/// connection (compatibility residual above `omega_tol`).
ActionReport riemannian_limit_action(const LimitInput& in, const Region& region, const Moments& m, double lambda2,
                                     double omega_tol = 1e-6);

/// Lambda^2 = 4 pi c^4 / M2. Throws InvalidArgument for M2 <= 0.
double unification_scale(double M2, double c = 1.0);
/// M2 Lambda^2 / 64 pi^2.
double einstein_hilbert_coefficient(double M2, double lambda2);

/// Rows "name,coefficient,integral,value" at 17 significant digits.
std::string action_csv(const ActionReport& r);
std::string action_text(const ActionReport& r);

}  // namespace geodyn
