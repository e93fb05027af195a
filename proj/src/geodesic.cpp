#include "geodyn/geodesic.hpp"

#include <cmath>

namespace geodyn {

Eigen::VectorXd geodesic_acceleration(const GeneralizedMetric& g, const Point& x,
                                      const Eigen::VectorXd& v) {
  const int n = g.dimension();
  const RealTensor gam = christoffel(g, x);
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
  for (int m = 0; m < n; ++m)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) acc[m] -= gam(m, a, b) * v[a] * v[b];
  return acc;
}

double geodesic_norm(const GeneralizedMetric& g, const Point& x, const Eigen::VectorXd& v) {
  const MetricJet j = metric_jet(g, x, 0);
  return v.dot(j.g * v);
}

GeodesicState geodesic_step(const GeneralizedMetric& g, const GeodesicState& s, double dtau) {
  const Eigen::VectorXd k1x = s.v;
  const Eigen::VectorXd k1v = geodesic_acceleration(g, s.x, s.v);
  const Eigen::VectorXd k2x = s.v + 0.5 * dtau * k1v;
  const Eigen::VectorXd k2v = geodesic_acceleration(g, s.x + 0.5 * dtau * k1x, k2x);
  const Eigen::VectorXd k3x = s.v + 0.5 * dtau * k2v;
  const Eigen::VectorXd k3v = geodesic_acceleration(g, s.x + 0.5 * dtau * k2x, k3x);
  const Eigen::VectorXd k4x = s.v + dtau * k3v;
  const Eigen::VectorXd k4v = geodesic_acceleration(g, s.x + dtau * k3x, k4x);

  GeodesicState out;
  out.x = s.x + (dtau / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
  out.v = s.v + (dtau / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
  out.tau = s.tau + dtau;
  for (int k = 0; k < out.x.size(); ++k) {
    if (!std::isfinite(out.x[k]) || !std::isfinite(out.v[k])) {
      throw EvaluationError("non-finite geodesic state");
    }
  }
  return out;
}

GeodesicResult geodesic_integrate(const GeneralizedMetric& g, const GeodesicState& s0, double dtau,
                                  int steps, int record_every) {
  if (steps < 0 || record_every < 1) throw InvalidArgument("invalid geodesic step counts");
  if (s0.x.size() != g.dimension() || s0.v.size() != g.dimension()) {
    throw DimensionError("geodesic state dimension does not match metric");
  }
  GeodesicResult r;
  GeodesicState s = s0;
  r.trajectory.push_back(s);
  try {
    const double norm0 = geodesic_norm(g, s.x, s.v);
    for (int k = 1; k <= steps; ++k) {
      s = geodesic_step(g, s, dtau);
      r.max_norm_drift = std::max(r.max_norm_drift, std::abs(geodesic_norm(g, s.x, s.v) - norm0));
      if (k % record_every == 0 || k == steps) r.trajectory.push_back(s);
    }
  } catch (const Error& e) {
    r.completed = false;
    r.error = e.what();
    if (r.trajectory.back().tau != s.tau) r.trajectory.push_back(s);
  }
  return r;
}

}  // namespace geodyn
