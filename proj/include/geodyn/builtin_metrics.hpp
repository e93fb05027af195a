#pragma once

#include <string>
#include <vector>

#include "geodyn/geometry.hpp"

namespace geodyn {

/// A reference geometry given both as an analytic metric g and as a
/// Riemannian (diagonal) vielbein of g.
struct BuiltinGeometry {
  std::string name;
  std::vector<std::string> coordinates;
  Vielbein vielbein;
  GeneralizedMetric metric;
};

BuiltinGeometry flat_geometry(int n, Signature signature);
/// (r, theta): diag(1, r^2)
BuiltinGeometry polar_geometry();
/// (theta, phi): radius^2 diag(1, sin^2 theta)
BuiltinGeometry sphere2_geometry(double radius = 1.0);
/// (t, r, theta, phi), exterior Schwarzschild with mass parameter m.
BuiltinGeometry schwarzschild_geometry(double mass = 1.0);
/// (theta, phi, z, w): unit-radius sphere times a flat plane.
BuiltinGeometry sphere2_flat_geometry(double radius = 1.0);

/// Looks up "flat", "minkowski", "polar", "sphere2", "schwarzschild",
/// "sphere2-flat" with an optional parameter (radius or mass).
BuiltinGeometry builtin_geometry(const std::string& name, double parameter, int dimension = 4);

std::vector<std::string> builtin_geometry_names();

}  // namespace geodyn
