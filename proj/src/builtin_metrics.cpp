#include "geodyn/builtin_metrics.hpp"

#include <cmath>

namespace geodyn {

namespace {

using std::sin;
using std::sqrt;

template <typename S>
void zero(std::span<S> out) {
  for (auto& v : out) v = S(0.0);
}

}  // namespace

BuiltinGeometry flat_geometry(int n, Signature signature) {
  const auto signs = signature.signs();
  auto frame = [n](auto x, auto out) {
    using S = std::remove_cvref_t<decltype(out[0])>;
    (void)x;
    zero(out);
    for (int a = 0; a < n; ++a) out[static_cast<std::size_t>(a * n + a)] = S(1.0);
  };
  auto metric = [n, signs](auto x, auto out) {
    using S = std::remove_cvref_t<decltype(out[0])>;
    (void)x;
    zero(out);
    for (int a = 0; a < n; ++a) {
      out[static_cast<std::size_t>(a * n + a)] = S(static_cast<double>(signs[static_cast<std::size_t>(a)]));
    }
  };
  std::vector<std::string> coords;
  for (int a = 0; a < n; ++a) coords.push_back("x" + std::to_string(a));
  return {signature.is_euclidean() ? "flat" : "minkowski", coords, make_vielbein(n, signature, frame),
          make_metric(n, signature, metric)};
}

BuiltinGeometry polar_geometry() {
  auto frame = [](auto x, auto out) {
    using S = std::remove_cvref_t<decltype(out[0])>;
    zero(out);
    out[0] = S(1.0);
    out[3] = x[0];
  };
  auto metric = [](auto x, auto out) {
    using S = std::remove_cvref_t<decltype(out[0])>;
    zero(out);
    out[0] = S(1.0);
    out[3] = x[0] * x[0];
  };
  const Signature eta = Signature::euclidean(2);
  return {"polar", {"r", "theta"}, make_vielbein(2, eta, frame), make_metric(2, eta, metric)};
}

BuiltinGeometry sphere2_geometry(double radius) {
  auto frame = [radius](auto x, auto out) {
    using S = std::remove_cvref_t<decltype(out[0])>;
    zero(out);
    out[0] = S(radius);
    out[3] = radius * sin(x[0]);
  };
  auto metric = [radius](auto x, auto out) {
    using S = std::remove_cvref_t<decltype(out[0])>;
    zero(out);
    out[0] = S(radius * radius);
    const S s = sin(x[0]);
    out[3] = radius * radius * s * s;
  };
  const Signature eta = Signature::euclidean(2);
  return {"sphere2", {"theta", "phi"}, make_vielbein(2, eta, frame), make_metric(2, eta, metric)};
}

BuiltinGeometry schwarzschild_geometry(double mass) {
  auto frame = [mass](auto x, auto out) {
    using S = std::remove_cvref_t<decltype(out[0])>;
    zero(out);
    const S f = S(1.0) - 2.0 * mass / x[1];
    const S rf = sqrt(f);
    out[0] = rf;
    out[5] = S(1.0) / rf;
    out[10] = x[1];
    out[15] = x[1] * sin(x[2]);
  };
  auto metric = [mass](auto x, auto out) {
    using S = std::remove_cvref_t<decltype(out[0])>;
    zero(out);
    const S f = S(1.0) - 2.0 * mass / x[1];
    const S s = sin(x[2]);
    out[0] = -f;
    out[5] = S(1.0) / f;
    out[10] = x[1] * x[1];
    out[15] = x[1] * x[1] * s * s;
  };
  const Signature eta = Signature::lorentzian(4);
  return {"schwarzschild", {"t", "r", "theta", "phi"}, make_vielbein(4, eta, frame),
          make_metric(4, eta, metric)};
}

BuiltinGeometry sphere2_flat_geometry(double radius) {
  auto frame = [radius](auto x, auto out) {
    using S = std::remove_cvref_t<decltype(out[0])>;
    zero(out);
    out[0] = S(radius);
    out[5] = radius * sin(x[0]);
    out[10] = S(1.0);
    out[15] = S(1.0);
  };
  auto metric = [radius](auto x, auto out) {
    using S = std::remove_cvref_t<decltype(out[0])>;
    zero(out);
    const S s = sin(x[0]);
    out[0] = S(radius * radius);
    out[5] = radius * radius * s * s;
    out[10] = S(1.0);
    out[15] = S(1.0);
  };
  const Signature eta = Signature::euclidean(4);
  return {"sphere2-flat", {"theta", "phi", "z", "w"}, make_vielbein(4, eta, frame),
          make_metric(4, eta, metric)};
}

BuiltinGeometry builtin_geometry(const std::string& name, double parameter, int dimension) {
  if (name == "flat") return flat_geometry(dimension, Signature::euclidean(dimension));
  if (name == "minkowski") return flat_geometry(dimension, Signature::lorentzian(dimension));
  if (name == "polar") return polar_geometry();
  if (name == "sphere2") return sphere2_geometry(parameter);
  if (name == "schwarzschild") return schwarzschild_geometry(parameter);
  if (name == "sphere2-flat") return sphere2_flat_geometry(parameter);
  throw InvalidArgument("unknown builtin geometry '" + name + "'");
}

std::vector<std::string> builtin_geometry_names() {
  return {"flat", "minkowski", "polar", "sphere2", "schwarzschild", "sphere2-flat"};
}

}  // namespace geodyn
