#pragma once

#include <string>
#include <vector>

#include "geodyn/geometry.hpp"

namespace geodyn {

struct GeodesicState {
  Point x;
  Eigen::VectorXd v;  // dx/dtau
  double tau = 0.0;
};

struct GeodesicResult {
  std::vector<GeodesicState> trajectory;
  double max_norm_drift = 0.0;  // max |gamma(v,v)(tau) - gamma(v,v)(0)|
  bool completed = true;
  std::string error;  // set when the run stopped at a metric singularity
};

/// -Gamma^mu_{alpha beta} v^alpha v^beta
Eigen::VectorXd geodesic_acceleration(const GeneralizedMetric& g, const Point& x,
                                      const Eigen::VectorXd& v);

double geodesic_norm(const GeneralizedMetric& g, const Point& x, const Eigen::VectorXd& v);

/// One classical RK4 step of x'' + Gamma x' x' = 0.
GeodesicState geodesic_step(const GeneralizedMetric& g, const GeodesicState& s, double dtau);

/// Integrates `steps` RK4 steps, keeping every `record_every`-th state plus
/// the final one.
GeodesicResult geodesic_integrate(const GeneralizedMetric& g, const GeodesicState& s0, double dtau,
                                  int steps, int record_every = 1);

}  // namespace geodyn
