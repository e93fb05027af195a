#pragma once

#include <array>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "geodyn/chart_field.hpp"
#include "geodyn/geometry.hpp"

namespace geodyn {

/// Matrix-valued one-form A_mu with size x size complex entries. Real
/// components are laid out as [mu][i][j][re, im].
struct MatrixOneForm {
  ChartField field;
  int size = 0;

  int dimension() const { return field.dimension(); }
  std::vector<Eigen::MatrixXcd> at(const Point& p) const;
};

inline std::size_t one_form_index(int mu, int i, int j, int part, int size) {
  return static_cast<std::size_t>(((mu * size + i) * size + j) * 2 + part);
}

/// `f(x, out)` fills the layout described on MatrixOneForm for S = double and Dual2.
template <typename F>
MatrixOneForm make_matrix_one_form(int n, int size, F f) {
  return {ChartField::generic(n, {down(n), up(size, IndexKind::Frame), down(size, IndexKind::Frame), up(2, IndexKind::Frame)},
                              f),
          size};
}

/// Curvature F_{mu nu} = d_mu A_nu - d_nu A_mu + [A_mu, A_nu] of a matrix one-form.
struct FieldStrength {
  int n = 0;
  std::vector<Eigen::MatrixXcd> a;   // A_mu
  std::vector<Eigen::MatrixXcd> da;  // d_l A_mu at l*n+mu
  std::vector<Eigen::MatrixXcd> f;   // F_{mu nu} at mu*n+nu
  std::vector<Eigen::MatrixXcd> df;  // d_l F_{mu nu} at (l*n+mu)*n+nu, only with derivatives

  const Eigen::MatrixXcd& operator()(int mu, int nu) const { return f[static_cast<std::size_t>(mu * n + nu)]; }
};

FieldStrength field_strength(const MatrixOneForm& a, const Point& p, bool with_derivative = false);

/// Largest entry of the cyclic sum D_l F_{mu nu} + D_mu F_{nu l} + D_nu F_{l mu}
/// with D_l X = d_l X + [A_l, X]. Requires a field strength with derivatives.
double bianchi_residual(const FieldStrength& fs);

/// Tr(F_{mu nu} F_{ab}) ginv^{mu a} ginv^{nu b}.
std::complex<double> trace_square(const std::vector<Eigen::MatrixXcd>& f, int n, const Eigen::MatrixXd& ginv);

/// Largest |F_{mu nu} + F_{nu mu}|.
double antisymmetry_residual(const std::vector<Eigen::MatrixXcd>& f, int n);

struct Couplings {
  double g1 = 1.0;
  double g2 = 1.0;
  double g3 = 1.0;
};

/// Hypercharge, weak and strong potentials on a chart of dimension n.
/// B has shape (n), W has (3, n) with W^a_mu at a*n+mu, G has (8, n).
struct SMGaugeConfig {
  ChartField B;
  ChartField W;
  ChartField G;
  Couplings couplings;

  int dimension() const { return B.dimension(); }
  static SMGaugeConfig zero(int n, Couplings g = {});
};

/// Quaternion-valued Higgs field H = [[x, y], [-conj(y), conj(x)]] stored as
/// (Re x, Im x, Re y, Im y).
struct HiggsField {
  ChartField H;
  double c = 0.0;

  int dimension() const { return H.dimension(); }
  static HiggsField zero(int n, double c = 0.0);
};

Eigen::Matrix2cd quaternion(double xr, double xi, double yr, double yi);
/// 0.5 Tr(H^dagger H) = |x|^2 + |y|^2.
double higgs_norm2(const Eigen::Matrix2cd& h);

/// Offsets of the Lambda (1x1), Q (2x2) and V (3x3) blocks in the 6x6 gauge block.
inline constexpr int kLambdaBlock = 0;
inline constexpr int kQBlock = 1;
inline constexpr int kVBlock = 3;
inline constexpr int kGaugeBlockSize = 6;

/// The block-diagonal gauge connection Lambda + Q + V with
///   Lambda_mu = (i g1/2) B_mu,
///   Q_mu = (g2/2) W_mu,      W_mu = -i W^a_mu sigma_a,
///   V_mu = -V'_mu - Lambda_mu/3,  V'_mu = (g3/2) G_mu,  G_mu = -i G^a_mu lambda_a.
MatrixOneForm sm_gauge_one_form(const SMGaugeConfig& sm);

/// Component field strengths extracted from the matrix curvature:
/// B_{mu nu} = -2i Lambda_{mu nu}/g1, W^a = i Tr(sigma_a Q)/g2,
/// G^a = -i Tr(lambda_a (V + Lambda/3))/g3.
struct SMFieldStrengths {
  int n = 0;
  Eigen::MatrixXd B;
  std::array<Eigen::MatrixXd, 3> W;
  std::array<Eigen::MatrixXd, 8> G;
  FieldStrength block;
};

SMFieldStrengths sm_field_strengths(const SMGaugeConfig& sm, const Point& p, bool with_derivative = false);

/// D_mu H = d_mu H - (i g1/2) B_mu H - (i g2/2) W^a_mu sigma_a H for every mu.
std::vector<Eigen::Matrix2cd> higgs_covariant_derivative(const SMGaugeConfig& sm, const HiggsField& higgs,
                                                         const Point& p);

struct ConnectionConstants {
  double alpha = 1.0;
  double c = 0.0;
  int N = 4;  // multiplicity of the spinor block
  int D = 1;  // multiplicity of the gauge block
  Eigen::MatrixXcd chi = Eigen::MatrixXcd{{0.0, 1.0}, {1.0, 0.0}};

  /// <chi, chi> = Tr(chi^dagger chi)
  double eta() const;
};

/// Gravity, gauge and Higgs blocks of the generalized derivative.
struct ConnectionForm {
  Vielbein vielbein;
  FrameConnection omega;  // omega_mu^a_b, slots (coordinate, frame up, frame down)
  SMGaugeConfig sm;
  MatrixOneForm gauge;
  HiggsField higgs;
  ConnectionConstants consts;

  int dimension() const { return vielbein.dimension(); }
};

/// Assembles the generalized derivative. An empty `omega` selects the
/// Riemannian spin connection of `e`. Throws InvalidArgument on mismatched
/// charts or non-positive couplings or alpha.
ConnectionForm assemble_connection(const Vielbein& e, FrameConnection omega, SMGaugeConfig sm, HiggsField higgs,
                                   ConnectionConstants consts);

/// Pointwise matrices of the generalized derivative.
struct ConnectionValue {
  std::vector<Eigen::MatrixXd> omega;   // omega_mu^a_b
  std::vector<Eigen::MatrixXcd> gauge;  // 6x6 gauge block per mu
  Eigen::Matrix4cd higgs_block;         // [[i c I, H], [H^dagger, i c I]]
  Eigen::MatrixXcd higgs_term;          // (1/alpha) Phi (x) chi
};

ConnectionValue connection_value(const ConnectionForm& a, const Point& p);

/// Blocks of F = dA + A ^ A at a point.
struct CurvatureForm {
  int n = 0;
  Eigen::MatrixXd metric;
  Eigen::MatrixXd inverse_metric;
  std::vector<Eigen::MatrixXd> gravity;  // R^a_b{mu nu} at mu*n+nu, from d omega + omega ^ omega
  SMFieldStrengths gauge;
  std::vector<Eigen::Matrix2cd> higgs_kinetic;  // D_mu H
  Eigen::Matrix2cd higgs;
  double higgs_norm2 = 0.0;
  double higgs_potential = 0.0;  // |H|^2 - c^2
};

CurvatureForm curvature(const ConnectionForm& a, const Point& p);

/// R^a_b{mu nu} = E^a_rho R^rho_{sigma mu nu} E^sigma_b from the metric Riemann tensor.
std::vector<Eigen::MatrixXd> riemann_two_form(const Vielbein& e, const Point& p);

}  // namespace geodyn
