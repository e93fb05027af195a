#include "geodyn/field_equations.hpp"

#include <cmath>
#include <functional>
#include <numbers>

namespace geodyn {

namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

double sqrt_det_from_inverse(const Eigen::MatrixXd& ginv) { return 1.0 / std::sqrt(std::abs(ginv.determinant())); }

Eigen::MatrixXd source(const std::optional<ChartField>& T, const Point& p, int n) {
  if (!T) return Eigen::MatrixXd::Zero(n, n);
  if (T->dimension() != n || T->components() != n * n) {
    throw DimensionError("energy-momentum field must be a rank-2 field on the chart");
  }
  const auto v = T->evaluate(p);
  Eigen::MatrixXd t(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) t(i, j) = v[static_cast<std::size_t>(i * n + j)];
  return t;
}

/// Applies ginv to every slot of a rank-4 array stored as [a][b][c][d],
/// starting at slot `first`.
std::vector<double> raise_slots(const std::vector<double>& r, const Eigen::MatrixXd& ginv, int n, int first) {
  std::vector<double> cur = r;
  std::size_t stride = 1;
  for (int s = 3; s >= 0; --s) {
    if (s >= first) {
      std::vector<double> next(cur.size(), 0.0);
      for (std::size_t flat = 0; flat < cur.size(); ++flat) {
        const int i = static_cast<int>((flat / stride) % static_cast<std::size_t>(n));
        const std::size_t base = flat - static_cast<std::size_t>(i) * stride;
        double acc = 0.0;
        for (int k = 0; k < n; ++k) acc += ginv(i, k) * cur[base + static_cast<std::size_t>(k) * stride];
        next[flat] = acc;
      }
      cur = std::move(next);
    }
    stride *= static_cast<std::size_t>(n);
  }
  return cur;
}

/// Central differences of rho(ginv) along symmetric unit perturbations.
Eigen::MatrixXd fd_variation(const std::function<double(const Eigen::MatrixXd&)>& rho, const Eigen::MatrixXd& ginv,
                             double step) {
  const auto n = ginv.rows();
  const double eps = step * std::max(1.0, ginv.cwiseAbs().maxCoeff());
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
      s(i, j) += 0.5;
      s(j, i) += 0.5;
      const double d = (rho(ginv + eps * s) - rho(ginv - eps * s)) / (2.0 * eps);
      out(i, j) = d;
      out(j, i) = d;
    }
  }
  return out;
}

double deviation(const Eigen::MatrixXd& a, const Eigen::MatrixXd& fd) {
  return (a - fd).cwiseAbs().maxCoeff() / std::max(1.0, fd.cwiseAbs().maxCoeff());
}

void finish(FieldEquationResidual& r) {
  r.residual = r.lhs - r.rhs;
  r.symmetry_residual = (r.residual - r.residual.transpose()).cwiseAbs().maxCoeff();
  r.fd_deviation = deviation(r.variation, r.fd_variation);
  r.displayed_fd_deviation = deviation(r.displayed_variation, r.fd_variation);
}

}  // namespace

UniversalConstants universal_constants(double M4, double M0, double lambda2, double sigma2) {
  if (sigma2 == 0.0 || M0 == 0.0) throw InvalidArgument("kappa0 needs sigma2 != 0 and M0 != 0");
  return {M4 * lambda2 * lambda2 / (16.0 * kPi2), 96.0 * kPi2 / (sigma2 * M0)};
}

FieldEquationResidual universal_field_equation(const ConnectionForm& a, const Point& p, UniversalConstants k,
                                               const std::optional<ChartField>& T, double fd_step) {
  if (!(k.kappa0 > 0.0)) throw InvalidArgument("kappa0 must be positive");
  const int n = a.dimension();
  const MetricJet mj = metric_jet(metric_from_vielbein(a.vielbein), p, 2);
  const CurvatureTensors ct = curvature_from_jet(mj);
  const RealTensor low = lower_riemann(ct.riemann, mj.g);
  const std::vector<double>& rl = low.data();
  const Eigen::MatrixXd& g = mj.g;
  const Eigen::MatrixXd& gi = mj.ginv;
  const auto nn = static_cast<std::size_t>(n);

  // M_{mu nu} = R_mu^{s r l} R_{nu s r l}
  const std::vector<double> mixed = raise_slots(rl, gi, n, 1);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  const std::size_t block = nn * nn * nn;
  for (int mu = 0; mu < n; ++mu)
    for (int nu = 0; nu < n; ++nu) {
      double s = 0.0;
      for (std::size_t r = 0; r < block; ++r) s += mixed[static_cast<std::size_t>(mu) * block + r] * rl[static_cast<std::size_t>(nu) * block + r];
      M(mu, nu) = s;
    }
  auto square = [&](const Eigen::MatrixXd& ginv) {
    const std::vector<double> up = raise_slots(rl, ginv, n, 0);
    double s = 0.0;
    for (std::size_t i = 0; i < rl.size(); ++i) s += rl[i] * up[i];
    return s;
  };
  const double K = square(gi);
  const double vol = sqrt_det_from_inverse(gi);
  const Eigen::MatrixXd t = source(T, p, n);

  FieldEquationResidual r;
  r.form = "universal";
  r.lagrangian = K / (2.0 * k.kappa0) + k.tau0;
  r.lhs = 4.0 * M + 0.5 * K * g;
  r.rhs = k.kappa0 * t - k.kappa0 * k.tau0 * g;
  r.variational_lhs = 4.0 * M - 0.5 * K * g;
  r.variational_rhs = k.kappa0 * t + k.kappa0 * k.tau0 * g;
  r.variational_residual = r.variational_lhs - r.variational_rhs;
  r.variation = vol * ((4.0 * M - 0.5 * K * g) / (2.0 * k.kappa0) - 0.5 * k.tau0 * g);
  r.displayed_variation = vol * ((4.0 * M + 0.5 * K * g) / (2.0 * k.kappa0) + 0.5 * k.tau0 * g);
  r.fd_variation = fd_variation(
      [&](const Eigen::MatrixXd& G) { return (square(G) / (2.0 * k.kappa0) + k.tau0) * sqrt_det_from_inverse(G); },
      gi, fd_step);
  r.note = "algebraic variation only: R_{abcd} held fixed, derivative-of-metric terms omitted";
  finish(r);
  return r;
}

FieldEquationResidual sm_field_equation(const ConnectionForm& a, const Point& p, const NormalizedSM& s,
                                        const std::optional<ChartField>& T, double fd_step) {
  const int n = a.dimension();
  const CurvatureForm cf = curvature(a, p);
  const Signature& eta = a.vielbein.eta;
  const Eigen::MatrixXd& g = cf.metric;
  const Eigen::MatrixXd& gi = cf.inverse_metric;
  const double h2 = s.higgs_scale * s.higgs_scale;

  // Frame-traced products P_{mu a, nu b} = sum eta_a eta_b R^a_b{mu a} R^a_b{nu b}.
  auto frame_dot = [&](int mu, int al, int nu, int be) {
    const Eigen::MatrixXd& r1 = cf.gravity[static_cast<std::size_t>(mu * n + al)];
    const Eigen::MatrixXd& r2 = cf.gravity[static_cast<std::size_t>(nu * n + be)];
    double v = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) v += eta[i] * eta[j] * r1(i, j) * r2(i, j);
    return v;
  };
  std::vector<double> rr(static_cast<std::size_t>(n * n * n * n));
  for (int mu = 0; mu < n; ++mu)
    for (int al = 0; al < n; ++al)
      for (int nu = 0; nu < n; ++nu)
        for (int be = 0; be < n; ++be)
          rr[static_cast<std::size_t>(((mu * n + al) * n + nu) * n + be)] = frame_dot(mu, al, nu, be);
  auto rr_at = [&](int mu, int al, int nu, int be) { return rr[static_cast<std::size_t>(((mu * n + al) * n + nu) * n + be)]; };

  std::vector<const Eigen::MatrixXd*> fields{&cf.gauge.B};
  for (const auto& w : cf.gauge.W) fields.push_back(&w);
  for (const auto& gg : cf.gauge.G) fields.push_back(&gg);
  Eigen::MatrixXd P(n, n);
  for (int mu = 0; mu < n; ++mu)
    for (int nu = 0; nu < n; ++nu)
      P(mu, nu) = 0.5 * (cf.higgs_kinetic[static_cast<std::size_t>(mu)].adjoint() *
                         cf.higgs_kinetic[static_cast<std::size_t>(nu)])
                            .trace()
                            .real();
  const double pot = cf.higgs_potential * cf.higgs_potential;

  auto lagrangian = [&](const Eigen::MatrixXd& G) {
    double rsq = 0.0;
    for (int mu = 0; mu < n; ++mu)
      for (int nu = 0; nu < n; ++nu)
        for (int al = 0; al < n; ++al)
          for (int be = 0; be < n; ++be) rsq += G(mu, al) * G(nu, be) * rr_at(mu, nu, al, be);
    double fsq = 0.0;
    for (const auto* f : fields) fsq += (f->transpose() * G * *f * G).trace();
    const double kin = (G.cwiseProduct(P)).sum();
    return s.alpha0 * rsq - 0.25 * fsq + h2 * kin - s.mu0 * h2 * h2 * pot + s.delta0;
  };

  Eigen::MatrixXd N = Eigen::MatrixXd::Zero(n, n);
  for (int mu = 0; mu < n; ++mu)
    for (int nu = 0; nu < n; ++nu) {
      double v = 0.0;
      for (int al = 0; al < n; ++al)
        for (int be = 0; be < n; ++be) v += gi(al, be) * rr_at(mu, al, nu, be);
      N(mu, nu) = 2.0 * s.alpha0 * v;
    }
  for (const auto* f : fields) N -= 0.5 * (*f * gi * f->transpose());
  N += h2 * 0.5 * (P + P.transpose());

  const double L = lagrangian(gi);
  const double vol = sqrt_det_from_inverse(gi);
  FieldEquationResidual r;
  r.form = "standard-model";
  r.lagrangian = L;
  r.lhs = N - 0.5 * L * g;
  r.rhs = 0.5 * source(T, p, n);
  r.variation = vol * (N - 0.5 * L * g);
  r.displayed_variation = r.variation;
  r.fd_variation =
      fd_variation([&](const Eigen::MatrixXd& G) { return lagrangian(G) * sqrt_det_from_inverse(G); }, gi, fd_step);
  r.note = "algebraic variation only: R_{ab mu nu}, F_{mu nu} and D_mu H held fixed";
  finish(r);
  return r;
}

}  // namespace geodyn
