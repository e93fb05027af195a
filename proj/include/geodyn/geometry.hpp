#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "geodyn/chart_field.hpp"

namespace geodyn {

/// Frame field E^a_mu: component (a, mu) of a rank-2 field with a frame row
/// index and a coordinate column index.
struct Vielbein {
  ChartField frame;
  Signature eta;

  int dimension() const { return frame.dimension(); }
  Eigen::MatrixXd at(const Point& p) const;
};

/// Builds a vielbein field from a generic callable E(x) -> n*n row-major.
template <typename F>
Vielbein make_vielbein(int n, Signature eta, F f) {
  return {ChartField::generic(n, {up(n, IndexKind::Frame), down(n)}, f), std::move(eta)};
}

/// Symmetric covariant metric field gamma_{mu nu}.
struct GeneralizedMetric {
  ChartField gamma;
  Signature signature;

  int dimension() const { return gamma.dimension(); }
};

template <typename F>
GeneralizedMetric make_metric(int n, Signature signature, F f) {
  return {ChartField::generic(n, {down(n), down(n)}, f), std::move(signature)};
}

/// Metric value, inverse and coordinate derivatives at a point.
struct MetricJet {
  int n = 0;
  Eigen::MatrixXd g;
  Eigen::MatrixXd ginv;
  double det = 0.0;
  std::vector<Eigen::MatrixXd> dg;   // dg[l](a,b) = d_l g_ab
  std::vector<Eigen::MatrixXd> ddg;  // ddg[l*n+m](a,b) = d_l d_m g_ab
};

/// Throws SingularMetricError when |det m| < 1e-13 * (max row norm)^n.
void require_nonsingular(const Eigen::MatrixXd& m, const char* what);

MetricJet metric_jet(const GeneralizedMetric& g, const Point& p, int order);

/// gamma_{mu nu} = E^a_mu E^b_nu eta_ab, composed exactly in dual arithmetic.
GeneralizedMetric metric_from_vielbein(const Vielbein& e);

/// Christoffel symbols {mu over alpha beta}, slots (up, down, down).
RealTensor christoffel(const GeneralizedMetric& g, const Point& p);
RealTensor christoffel_from_jet(const MetricJet& j);
/// d_nu Gamma^rho_{alpha beta}, slots (down nu, up rho, down alpha, down beta).
RealTensor christoffel_derivative_from_jet(const MetricJet& j);

struct CurvatureTensors {
  RealTensor riemann;  // R^rho_{mu nu lambda}
  RealTensor ricci;    // R_{mu lambda} = R^rho_{mu rho lambda}
  double scalar = 0.0;
};

CurvatureTensors riemann(const GeneralizedMetric& g, const Point& p);
CurvatureTensors curvature_from_jet(const MetricJet& j);

/// Fully covariant R_{rho mu nu lambda}.
RealTensor lower_riemann(const RealTensor& riemann, const Eigen::MatrixXd& g);
/// R_{abcd} R^{abcd}.
double kretschmann(const RealTensor& riemann_lower, const Eigen::MatrixXd& ginv);

/// Ricci tensor from the one-line formula valid when sqrt|gamma| = 1 and
/// {beta over beta alpha} = 0. Throws CoordinateConditionError otherwise.
RealTensor ricci_simplified(const GeneralizedMetric& g, const Point& p, double tol = 1e-8);

struct VolumeElement {
  double value = 0.0;
  bool lorentzian = false;  // det < 0, value = sqrt(-det)
};

VolumeElement volume_element(const GeneralizedMetric& g, const Point& p);
VolumeElement volume_element(const Eigen::MatrixXd& g);

struct SpinConnection {
  RealTensor omega_up;  // omega^{ab}_mu, slots (frame up, frame up, coordinate down)
  RealTensor mixed;     // omega_mu^a_b, slots (coordinate down, frame up, frame down)
  /// sigma_ab omega^{ab}_mu per coordinate direction (empty for odd n).
  std::vector<Eigen::MatrixXcd> spinor;
};

SpinConnection spin_connection(const Vielbein& e, const Point& p);

/// Frame-index connection field A_nu^a_b, slots (coordinate down, frame up, frame down).
using FrameConnection = ChartField;

/// The frame connection of the Riemannian spin connection of `e`, evaluated
/// pointwise (derivatives by central differences).
FrameConnection riemannian_frame_connection(const Vielbein& e);

/// Residual d_nu E^a_mu - Gamma^l_{nu mu} E^a_l + A_nu^a_b E^b_mu with slots
/// (frame a, coordinate mu, coordinate nu). Zero iff E is a vielbein of A.
RealTensor compatibility_residual(const Vielbein& e, const FrameConnection& a, const Point& p);

/// Transports a frame along x(t) = origin + t * direction solving
/// dE/dt = -direction^nu A_nu E with classical RK4. Returns E at every node.
std::vector<Eigen::MatrixXd> transport_frame_along_line(const FrameConnection& a,
                                                        const Eigen::MatrixXd& e0,
                                                        const Point& origin,
                                                        const Eigen::VectorXd& direction,
                                                        double length, int steps);

struct DiracMatrices {
  std::vector<Eigen::MatrixXcd> gammas;  // Gamma^mu = E^mu_a gamma^a
  double anticommutator_residual = 0.0;  // max |{G^mu,G^nu} - 2 gamma^{mu nu} I|
  double literal_residual = 0.0;         // max |{G^mu,G^nu} - gamma_{mu nu} I|
};

DiracMatrices dirac_matrices(const Vielbein& e, const Point& p);

}  // namespace geodyn
