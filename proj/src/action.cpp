#include "geodyn/action.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

#include "geodyn/clifford.hpp"

namespace geodyn {

namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void require_region(const Region& region, int n) {
  if (region.box.dimension() != n) {
    throw DimensionError("integration box has dimension " + std::to_string(region.box.dimension()) +
                         " but the chart has dimension " + std::to_string(n));
  }
}

double laplacian(const FieldJet& j, const RealTensor& gamma, const Eigen::MatrixXd& ginv) {
  const int n = j.n;
  double s = 0.0;
  for (int m = 0; m < n; ++m)
    for (int k = 0; k < n; ++k) {
      double v = j.dd(0, m, k);
      for (int l = 0; l < n; ++l) v -= gamma(l, m, k) * j.d(0, l);
      s += ginv(m, k) * v;
    }
  return s;
}

// Curvature form carrying only the gauge and Higgs blocks.
CurvatureForm matter_form(const ConnectionForm& c, const Point& p, const Eigen::MatrixXd& g,
                          const Eigen::MatrixXd& ginv) {
  const int n = c.dimension();
  CurvatureForm f;
  f.n = n;
  f.metric = g;
  f.inverse_metric = ginv;
  f.gravity.assign(static_cast<std::size_t>(n * n), Eigen::MatrixXd::Zero(n, n));
  f.gauge = sm_field_strengths(c.sm, p);
  f.higgs_kinetic = higgs_covariant_derivative(c.sm, c.higgs, p);
  const auto hv = c.higgs.H.evaluate(p);
  f.higgs = quaternion(hv[0], hv[1], hv[2], hv[3]);
  f.higgs_norm2 = higgs_norm2(f.higgs);
  f.higgs_potential = f.higgs_norm2 - c.consts.c * c.consts.c;
  return f;
}

double sigma2_for(const Signature& eta) {
  if (eta.dimension() % 2 == 0 && eta.dimension() >= 2) return sigma_squared(eta);
  return sigma_squared(Signature::euclidean(4));
}

// Coefficients of the curvature-square terms, independent of the fields.
LagrangianBreakdown unit_coefficients(const Couplings& g, const ConnectionConstants& k, const Reparametrization& r) {
  return curvature_squared(CurvatureInvariants{}, g, k, r);
}

void add_constants(ActionReport& rep, const Moments& m, double lambda2, const ConnectionConstants& k,
                   const Reparametrization& r, double sigma2) {
  const double l4 = lambda2 * lambda2;
  const double pref = m.M0 / (192.0 * kPi2);
  rep.constants = {
      {"M4", m.M4},
      {"M2", m.M2},
      {"M0", m.M0},
      {"Lambda2", lambda2},
      {"tau0", m.M4 * l4 / (16.0 * kPi2)},
      {"sigma2", sigma2},
      {"kappa0", m.M0 > 0.0 && sigma2 != 0.0 ? 96.0 * kPi2 / (sigma2 * m.M0)
                                              : std::numeric_limits<double>::infinity()},
      {"alpha0", pref * k.N / (4.0 * r.NR * r.NR)},
      {"mu0", m.M0 > 0.0 ? 192.0 * kPi2 / m.M0 : std::numeric_limits<double>::infinity()},
      {"z", std::sqrt(k.eta() * pref / (k.alpha * k.alpha * r.NH * r.NH)) * k.c},
      {"delta0", (12.0 * m.M4 * l4 + m.M0 * r.lambda0) / (192.0 * kPi2)},
      {"beta0", m.M0 / (2880.0 * kPi2)},
      {"eta0", m.M0 / (480.0 * kPi2)},
      {"zeta0", m.M0 / (1152.0 * kPi2)},
      {"einstein_hilbert", m.M2 * lambda2 / (64.0 * kPi2)},
  };
  rep.moment_map = {
      "a0 term = M4 Lambda^4 a0, a2 term = M2 Lambda^2 a2, a4 term = M0 a4",
      "M4 = int f(u) u du, M2 = int f(u) du, M0 = f(0)",
      "tau0 = M4 Lambda^4 / 16 pi^2",
      "1/(2 kappa0) = sigma2 M0 / 192 pi^2",
      "alpha0 = M0 N / (4 N_R^2 192 pi^2)",
      "mu0 = 192 pi^2 / M0",
      "z = c sqrt(eta M0 / (alpha^2 N_H^2 192 pi^2))",
      "delta0 = (12 M4 Lambda^4 + M0 lambda0) / 192 pi^2",
      "beta0 = M0 / 2880 pi^2, eta0 = M0 / 480 pi^2, zeta0 = M0 / 1152 pi^2",
      "Einstein-Hilbert coefficient = M2 Lambda^2 / 64 pi^2",
  };
}

}  // namespace

CutoffFunction CutoffFunction::exponential() { return CutoffFunction{}; }

CutoffFunction CutoffFunction::sharp() {
  CutoffFunction f;
  f.kind_ = Kind::Sharp;
  f.name_ = "sharp";
  return f;
}

CutoffFunction CutoffFunction::gaussian() {
  CutoffFunction f;
  f.kind_ = Kind::Gaussian;
  f.name_ = "gaussian";
  return f;
}

CutoffFunction CutoffFunction::tabulated(std::vector<double> u, std::vector<double> v) {
  if (u.size() != v.size() || u.size() < 2) {
    throw InvalidArgument("tabulated cutoff needs matching node and value lists with at least two entries");
  }
  if (u.front() != 0.0) throw InvalidArgument("tabulated cutoff must start at u = 0");
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!std::isfinite(u[i]) || !std::isfinite(v[i])) throw InvalidArgument("tabulated cutoff has non-finite entries");
    if (v[i] < 0.0) throw InvalidArgument("tabulated cutoff must be non-negative");
    if (i > 0 && !(u[i] > u[i - 1])) throw InvalidArgument("tabulated cutoff nodes must increase strictly");
  }
  CutoffFunction f;
  f.kind_ = Kind::Tabulated;
  f.name_ = "tabulated";
  f.u_ = std::move(u);
  f.f_ = std::move(v);
  return f;
}

CutoffFunction CutoffFunction::builtin(const std::string& name) {
  if (name == "exponential") return exponential();
  if (name == "sharp") return sharp();
  if (name == "gaussian") return gaussian();
  throw InvalidArgument("unknown cutoff function '" + name + "' (expected exponential, sharp or gaussian)");
}

double CutoffFunction::operator()(double u) const {
  if (u < 0.0) return 0.0;
  switch (kind_) {
    case Kind::Exponential:
      return std::exp(-u);
    case Kind::Sharp:
      return u <= 1.0 ? 1.0 : 0.0;
    case Kind::Gaussian:
      return std::exp(-u * u);
    case Kind::Tabulated: {
      if (u >= u_.back()) return u == u_.back() ? f_.back() : 0.0;
      const auto it = std::upper_bound(u_.begin(), u_.end(), u);
      const auto i = static_cast<std::size_t>(it - u_.begin()) - 1;
      const double t = (u - u_[i]) / (u_[i + 1] - u_[i]);
      return (1.0 - t) * f_[i] + t * f_[i + 1];
    }
  }
  return 0.0;
}

std::vector<double> CutoffFunction::breakpoints() const {
  if (kind_ == Kind::Tabulated) return {u_.begin() + 1, u_.end() - 1};
  return {};
}

double CutoffFunction::support() const {
  if (kind_ == Kind::Sharp) return 1.0;
  if (kind_ == Kind::Tabulated) return u_.back();
  return std::numeric_limits<double>::infinity();
}

Moments moments(const CutoffFunction& f, double rel_tol) {
  auto integrate = [&](const std::function<double(double)>& g) {
    std::vector<double> cuts{0.0};
    for (double b : f.breakpoints()) cuts.push_back(b);
    QuadratureResult total;
    const double end = f.support();
    if (std::isfinite(end)) cuts.push_back(end);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const auto r = gauss_kronrod(g, cuts[i], cuts[i + 1], rel_tol, 1e-15);
      total.value += r.value;
      total.error += r.error;
      total.evaluations += r.evaluations;
    }
    if (!std::isfinite(end)) {
      const auto r = integrate_half_line(g, cuts.back(), rel_tol, 1e-15);
      total.value += r.value;
      total.error += r.error;
      total.evaluations += r.evaluations;
    }
    return total;
  };
  const auto m4 = integrate([&](double u) { return f(u) * u; });
  const auto m2 = integrate([&](double u) { return f(u); });
  return {m4.value, m2.value, f(0.0), m4.error, m2.error};
}

HeatKernelCoefficients heat_kernel_coefficients(const HeatKernelInput& in, const Region& region) {
  const ConnectionForm& conn = in.connection;
  const int n = conn.dimension();
  require_region(region, n);
  if (in.E && (in.E->dimension() != n || in.E->components() != 1)) {
    throw DimensionError("the endomorphism term E must be a scalar field on the chart");
  }
  const GeneralizedMetric gm = metric_from_vielbein(conn.vielbein);
  const Signature eta = conn.vielbein.eta;

  auto integrand = [&](const Eigen::VectorXd& x, std::span<double> out) {
    const CurvatureForm cf = curvature(conn, x);
    const double vol = volume_element(cf.metric).value;
    const CurvatureInvariants inv = curvature_invariants(cf, eta);
    double e = 0.0, lap = 0.0;
    if (in.E) {
      const FieldJet j = jet(*in.E, x, 2);
      e = j.value[0];
      lap = laplacian(j, christoffel(gm, x), cf.inverse_metric);
    }
    const double v[kHeatKernelComponents] = {1.0,    e,      e * e,  lap,    inv.RR,
                                             inv.BB, inv.WW, inv.GG, inv.DH2, inv.potential};
    for (int k = 0; k < kHeatKernelComponents; ++k) out[static_cast<std::size_t>(k)] = v[k] * vol;
  };

  HeatKernelCoefficients c;
  c.couplings = conn.sm.couplings;
  c.consts = conn.consts;
  c.reparam = in.reparam;
  c.eta = eta;
  HeatKernelIntegrals& I = c.integrals;
  I.grid = integrate_box(region.box, region.grid, kHeatKernelComponents, integrand);
  const auto& v = I.grid.value;
  I.volume = v[0];
  I.E = v[1];
  I.E2 = v[2];
  I.laplacian_E = v[3];
  I.RR = v[4];
  I.BB = v[5];
  I.WW = v[6];
  I.GG = v[7];
  I.DH2 = v[8];
  I.potential = v[9];

  const LagrangianBreakdown k = unit_coefficients(c.couplings, c.consts, c.reparam);
  const double f2 = k.term("RR").coefficient * I.RR + k.term("BB").coefficient * I.BB +
                    k.term("WW").coefficient * I.WW + k.term("GG").coefficient * I.GG +
                    k.term("DH2").coefficient * I.DH2 + k.term("potential").coefficient * I.potential +
                    in.reparam.lambda0 * I.volume;
  const auto& err = I.grid.error;
  const double f2_err = std::abs(k.term("RR").coefficient) * err[4] + std::abs(k.term("BB").coefficient) * err[5] +
                        std::abs(k.term("WW").coefficient) * err[6] + std::abs(k.term("GG").coefficient) * err[7] +
                        std::abs(k.term("DH2").coefficient) * err[8] +
                        std::abs(k.term("potential").coefficient) * err[9] + std::abs(in.reparam.lambda0) * err[0];
  c.a0 = I.volume / (16.0 * kPi2);
  c.a2 = I.E / (16.0 * kPi2);
  c.a4 = (6.0 * I.E2 + 2.0 * I.laplacian_E + f2) / (192.0 * kPi2);
  c.a0_error = err[0] / (16.0 * kPi2);
  c.a2_error = err[1] / (16.0 * kPi2);
  c.a4_error = (6.0 * err[2] + 2.0 * err[3] + f2_err) / (192.0 * kPi2);
  return c;
}

const ActionTerm& ActionReport::term(const std::string& name) const {
  for (const auto& t : terms)
    if (t.name == name) return t;
  throw InvalidArgument("no action term named '" + name + "'");
}

double ActionReport::constant(const std::string& name) const {
  for (const auto& [k, v] : constants)
    if (k == name) return v;
  throw InvalidArgument("no constant named '" + name + "'");
}

void ActionReport::add(ActionTerm t) {
  t.value = t.coefficient * t.integral;
  total += t.value;
  total_error += std::abs(t.coefficient) * t.integral_error;
  terms.push_back(std::move(t));
}

ActionReport spectral_action(const Moments& m, const HeatKernelCoefficients& c, double lambda2) {
  if (!(lambda2 > 0.0)) throw InvalidArgument("Lambda^2 must be positive");
  const HeatKernelIntegrals& I = c.integrals;
  const auto& err = I.grid.error;
  const double pref = m.M0 / (192.0 * kPi2);
  const double l4 = lambda2 * lambda2;
  const LagrangianBreakdown k = unit_coefficients(c.couplings, c.consts, c.reparam);

  ActionReport rep;
  rep.kind = "spectral";
  rep.grid = I.grid.n;
  rep.points = I.grid.points;
  // delta0 vol = M4 Lambda^4 a0 + M0 lambda0 vol / 192 pi^2
  rep.add({"delta0", (12.0 * m.M4 * l4 + m.M0 * c.reparam.lambda0) / (192.0 * kPi2), I.volume, err[0]});
  rep.add({"E", m.M2 * lambda2 / (16.0 * kPi2), I.E, err[1]});
  rep.add({"E2", 6.0 * pref, I.E2, err[2]});
  rep.add({"laplacian_E", 2.0 * pref, I.laplacian_E, err[3]});
  const char* names[] = {"RR", "BB", "WW", "GG", "DH2", "potential"};
  const double integrals[] = {I.RR, I.BB, I.WW, I.GG, I.DH2, I.potential};
  for (int i = 0; i < 6; ++i) {
    rep.add({names[i], pref * k.term(names[i]).coefficient, integrals[i], err[static_cast<std::size_t>(4 + i)]});
  }
  add_constants(rep, m, lambda2, c.consts, c.reparam, sigma2_for(c.eta));
  rep.notes.push_back("sigma2 computed from the gamma matrices of the frame signature");
  return rep;
}

UniversalForm universal_action_form(const Moments& m, const HeatKernelCoefficients& c, double lambda2,
                                    double sigma2) {
  if (sigma2 == 0.0) throw InvalidArgument("sigma^2 must be non-zero");
  if (!(lambda2 > 0.0)) throw InvalidArgument("Lambda^2 must be positive");
  UniversalForm u;
  u.sigma2 = sigma2;
  u.tau0 = m.M4 * lambda2 * lambda2 / (16.0 * kPi2);
  const double inv_2k = sigma2 * m.M0 / (192.0 * kPi2);
  u.kappa0 = inv_2k != 0.0 ? 1.0 / (2.0 * inv_2k) : std::numeric_limits<double>::infinity();
  u.folded_RR = 192.0 * kPi2 * c.a4 / sigma2;
  u.compact_total = u.tau0 * c.integrals.volume + inv_2k * u.folded_RR;
  u.a2_term = m.M2 * lambda2 * c.a2;
  u.literal_RR = c.integrals.RR;
  u.literal_total = u.tau0 * c.integrals.volume + inv_2k * u.literal_RR;
  return u;
}

LimitChecks riemannian_limit_checks(const LimitInput& in, const Region& region) {
  const BuiltinGeometry& geo = in.geometry;
  const int n = geo.vielbein.dimension();
  require_region(region, n);
  const GeneralizedMetric gamma = metric_from_vielbein(geo.vielbein);
  const ConnectionForm conn =
      assemble_connection(geo.vielbein, in.omega ? *in.omega : FrameConnection{}, in.sm, in.higgs, in.consts);

  std::vector<Eigen::VectorXd> pts;
  const int m = region.grid;
  std::size_t total = 1;
  for (int k = 0; k < n; ++k) total *= static_cast<std::size_t>(m);
  for (std::size_t flat = 0; flat < total; ++flat) {
    Eigen::VectorXd x(n);
    std::size_t r = flat;
    for (int k = n - 1; k >= 0; --k) {
      const int i = static_cast<int>(r % static_cast<std::size_t>(m));
      r /= static_cast<std::size_t>(m);
      const bool per = region.box.is_periodic(k);
      const double len = region.box.hi(k) - region.box.lo(k);
      x(k) = region.box.lo(k) + i * (per ? len / m : len / (m - 1));
    }
    pts.push_back(x);
  }

  std::vector<std::array<double, 4>> res(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    const Point& p = pts[i];
    const Eigen::MatrixXd g0 = to_matrix(geo.metric.gamma.value(p));
    const Eigen::MatrixXd g1 = to_matrix(gamma.gamma.value(p));
    const CurvatureTensors r0 = riemann(geo.metric, p);
    const CurvatureTensors r1 = riemann(gamma, p);
    const auto two_form = riemann_two_form(geo.vielbein, p);
    const CurvatureForm cf = curvature(conn, p);
    double frame = 0.0;
    for (std::size_t k = 0; k < two_form.size(); ++k) {
      frame = std::max(frame, (cf.gravity[k] - two_form[k]).cwiseAbs().maxCoeff());
    }
    double omega = 0.0;
    if (in.omega) omega = compatibility_residual(geo.vielbein, *in.omega, p).max_abs();
    res[i] = {(g1 - g0).cwiseAbs().maxCoeff(), (r1.riemann - r0.riemann).max_abs(), frame, omega};
  });

  LimitChecks out;
  out.points = pts.size();
  for (const auto& r : res) {
    out.metric_residual = std::max(out.metric_residual, r[0]);
    out.riemann_residual = std::max(out.riemann_residual, r[1]);
    out.frame_residual = std::max(out.frame_residual, r[2]);
    out.omega_residual = std::max(out.omega_residual, r[3]);
  }
  return out;
}

ActionReport riemannian_limit_action(const LimitInput& in, const Region& region, const Moments& m, double lambda2,
                                     double omega_tol) {
  if (!(lambda2 > 0.0)) throw InvalidArgument("Lambda^2 must be positive");
  const BuiltinGeometry& geo = in.geometry;
  const int n = geo.vielbein.dimension();
  require_region(region, n);
  LimitChecks checks;
  if (in.omega) {
    checks = riemannian_limit_checks(in, region);
    if (checks.omega_residual > omega_tol) {
      throw InvalidArgument("the supplied spin connection is not the Riemannian spin connection (residual " +
                            fmt(checks.omega_residual) + ")");
    }
  }
  const ConnectionForm conn =
      assemble_connection(geo.vielbein, in.omega ? *in.omega : FrameConnection{}, in.sm, in.higgs, in.consts);
  const GeneralizedMetric gamma = metric_from_vielbein(geo.vielbein);
  const Signature eta = geo.vielbein.eta;
  const ChartField scalar = ChartField::real_only(n, {}, [&gamma](std::span<const double> x, std::span<double> out) {
    Point p(static_cast<Eigen::Index>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) p(static_cast<Eigen::Index>(i)) = x[i];
    out[0] = riemann(gamma, p).scalar;
  });

  constexpr int kc = 12;
  auto integrand = [&](const Eigen::VectorXd& x, std::span<double> out) {
    const MetricJet mj = metric_jet(gamma, x, 2);
    const CurvatureTensors ct = curvature_from_jet(mj);
    const double vol = volume_element(mj.g).value;
    const CurvatureForm cf = matter_form(conn, x, mj.g, mj.ginv);
    const CurvatureInvariants inv = curvature_invariants(cf, eta);
    const double riem2 = kretschmann(lower_riemann(ct.riemann, mj.g), mj.ginv);
    const Eigen::MatrixXd ric = to_matrix(ct.ricci);
    const double ric2 = (ric * mj.ginv * ric.transpose() * mj.ginv).trace();
    const FieldJet rj = jet_finite_difference(scalar, x, 2, 1e-3);
    const double box_r = laplacian(rj, christoffel_from_jet(mj), mj.ginv);
    const double v[kc] = {1.0,    ct.scalar, riem2,         inv.BB, inv.WW, inv.GG, inv.DH2,
                          inv.potential, box_r, ct.scalar * ct.scalar, ric2, riem2};
    for (int k = 0; k < kc; ++k) out[static_cast<std::size_t>(k)] = v[k] * vol;
  };
  const GridIntegral gi = integrate_box(region.box, region.grid, kc, integrand);
  const auto& v = gi.value;
  const auto& e = gi.error;

  const double pref = m.M0 / (192.0 * kPi2);
  const double l4 = lambda2 * lambda2;
  const LagrangianBreakdown k = unit_coefficients(in.sm.couplings, conn.consts, in.reparam);
  ActionReport rep;
  rep.kind = "riemannian-limit";
  rep.grid = gi.n;
  rep.points = gi.points;
  rep.add({"delta0", (12.0 * m.M4 * l4 + m.M0 * in.reparam.lambda0) / (192.0 * kPi2), v[0], e[0]});
  rep.add({"einstein_hilbert", m.M2 * lambda2 / (64.0 * kPi2), v[1], e[1]});
  const char* names[] = {"RR", "BB", "WW", "GG", "DH2", "potential"};
  for (int i = 0; i < 6; ++i) {
    const auto s = static_cast<std::size_t>(2 + i);
    rep.add({names[i], pref * k.term(names[i]).coefficient, v[s], e[s]});
  }
  rep.add({"box_R", m.M0 / (480.0 * kPi2), v[8], e[8]});
  rep.add({"R2", m.M0 / (1152.0 * kPi2), v[9], e[9]});
  rep.add({"Ric2", -m.M0 / (2880.0 * kPi2), v[10], e[10]});
  rep.add({"Riem2", -m.M0 / (2880.0 * kPi2), v[11], e[11]});
  add_constants(rep, m, lambda2, conn.consts, in.reparam, sigma2_for(eta));
  rep.notes.push_back("curvature terms use the Levi-Civita curvature of the generalized metric");
  rep.notes.push_back("box_R is a total derivative, expected to vanish only on periodic or closed regions");
  rep.notes.push_back("box_R uses central differences of the scalar curvature with relative step 1e-3");
  if (in.omega) {
    rep.constants.push_back({"omega_residual", checks.omega_residual});
  }
  return rep;
}

double unification_scale(double M2, double c) {
  if (!(M2 > 0.0)) throw InvalidArgument("unification scale needs M2 > 0");
  return 4.0 * std::numbers::pi * std::pow(c, 4) / M2;
}

double einstein_hilbert_coefficient(double M2, double lambda2) { return M2 * lambda2 / (64.0 * kPi2); }

std::string action_csv(const ActionReport& r) {
  std::ostringstream os;
  os << "name,coefficient,integral,value\n";
  for (const auto& t : r.terms) {
    os << t.name << ',' << fmt(t.coefficient) << ',' << fmt(t.integral) << ',' << fmt(t.value) << '\n';
  }
  os << "total,,," << fmt(r.total) << '\n';
  return os.str();
}

std::string action_text(const ActionReport& r) {
  std::ostringstream os;
  os << "action (" << r.kind << "), grid " << r.grid << " coarse nodes per axis, " << r.points << " points\n";
  char line[256];
  std::snprintf(line, sizeof line, "  %-18s %24s %24s %24s\n", "term", "coefficient", "integral", "value");
  os << line;
  for (const auto& t : r.terms) {
    std::snprintf(line, sizeof line, "  %-18s %24.15g %24.15g %24.15g\n", t.name.c_str(), t.coefficient, t.integral,
                  t.value);
    os << line;
  }
  std::snprintf(line, sizeof line, "  %-18s %74.15g  (error estimate %.3g)\n", "total", r.total, r.total_error);
  os << line << "constants\n";
  for (const auto& [k, v] : r.constants) {
    std::snprintf(line, sizeof line, "  %-18s %24.15g\n", k.c_str(), v);
    os << line;
  }
  os << "moment map\n";
  for (const auto& s : r.moment_map) os << "  " << s << '\n';
  for (const auto& s : r.notes) os << "note: " << s << '\n';
  return os.str();
}

}  // namespace geodyn
