#include "geodyn/lagrangian.hpp"

#include <cmath>
#include <numbers>

#include "geodyn/clifford.hpp"

namespace geodyn {

namespace {

using cd = std::complex<double>;
constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

double raised_square(const Eigen::MatrixXd& f, const Eigen::MatrixXd& ginv) {
  // f_{mu nu} f_{ab} g^{mu a} g^{nu b} = Tr(f^T ginv f ginv) for symmetric ginv.
  return (f.transpose() * ginv * f * ginv).trace();
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0)) throw InvalidArgument(std::string(name) + " must be positive");
}

}  // namespace

CurvatureInvariants curvature_invariants(const CurvatureForm& f, const Signature& eta) {
  const int n = f.n;
  const Eigen::MatrixXd& gi = f.inverse_metric;
  CurvatureInvariants inv;
  for (int mu = 0; mu < n; ++mu)
    for (int nu = 0; nu < n; ++nu)
      for (int al = 0; al < n; ++al)
        for (int be = 0; be < n; ++be) {
          const double w = gi(mu, al) * gi(nu, be);
          if (w == 0.0) continue;
          const Eigen::MatrixXd& r1 = f.gravity[static_cast<std::size_t>(mu * n + nu)];
          const Eigen::MatrixXd& r2 = f.gravity[static_cast<std::size_t>(al * n + be)];
          double s = 0.0;
          for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) s += eta[a] * eta[b] * r1(a, b) * r2(a, b);
          inv.RR += w * s;
        }
  inv.BB = raised_square(f.gauge.B, gi);
  for (const auto& w : f.gauge.W) inv.WW += raised_square(w, gi);
  for (const auto& g : f.gauge.G) inv.GG += raised_square(g, gi);
  for (int mu = 0; mu < n; ++mu)
    for (int nu = 0; nu < n; ++nu) {
      if (gi(mu, nu) == 0.0) continue;
      const auto& a = f.higgs_kinetic[static_cast<std::size_t>(mu)];
      const auto& b = f.higgs_kinetic[static_cast<std::size_t>(nu)];
      inv.DH2 += gi(mu, nu) * 0.5 * (a.adjoint() * b).trace().real();
    }
  inv.potential = f.higgs_potential * f.higgs_potential;
  return inv;
}

const LagrangianTerm& LagrangianBreakdown::term(const std::string& name) const {
  for (const auto& t : terms)
    if (t.name == name) return t;
  throw InvalidArgument("no Lagrangian term named '" + name + "'");
}

void LagrangianBreakdown::add(std::string name, double coefficient, double invariant) {
  const double value = coefficient * invariant;
  terms.push_back({std::move(name), coefficient, invariant, value});
  total += value;
}

LagrangianBreakdown curvature_squared_raw(const CurvatureInvariants& inv, const Couplings& g,
                                          const ConnectionConstants& k) {
  require_positive(k.alpha, "alpha");
  const double eta = k.eta();
  const double a2 = k.alpha * k.alpha;
  LagrangianBreakdown out;
  out.add("RR", k.N / 4.0, inv.RR);
  out.add("BB", -0.75 * g.g1 * g.g1, inv.BB);
  out.add("WW", -0.25 * g.g2 * g.g2, inv.WW);
  out.add("GG", -0.75 * g.g3 * g.g3, inv.GG);
  out.add("DH2", eta / a2, inv.DH2);
  out.add("potential", eta * eta / (a2 * a2), inv.potential);
  return out;
}

LagrangianBreakdown curvature_squared(const CurvatureInvariants& inv, const Couplings& g,
                                      const ConnectionConstants& k, const Reparametrization& r) {
  require_positive(k.alpha, "alpha");
  require_positive(r.NR, "N_R");
  require_positive(r.NB, "N_B");
  require_positive(r.NW, "N_W");
  require_positive(r.NG, "N_G");
  require_positive(r.NH, "N_H");
  const double eta = k.eta();
  const double a2 = k.alpha * k.alpha;
  const double nh2 = r.NH * r.NH;
  LagrangianBreakdown out;
  out.add("RR", k.N / (4.0 * r.NR * r.NR), inv.RR);
  out.add("BB", -0.75 * g.g1 * g.g1 / (r.NB * r.NB), inv.BB);
  out.add("WW", -0.25 * g.g2 * g.g2 / (r.NW * r.NW), inv.WW);
  out.add("GG", -0.75 * g.g3 * g.g3 / (r.NG * r.NG), inv.GG);
  out.add("DH2", eta / (a2 * nh2), inv.DH2);
  out.add("potential", -eta * eta / (a2 * a2 * nh2 * nh2), inv.potential);
  out.add("lambda0", 1.0, r.lambda0);
  return out;
}

double vacuum_lambda0(const ConnectionConstants& k, const Reparametrization& r) {
  const double eta = k.eta();
  const double c4 = std::pow(k.c, 4);
  const double a4 = std::pow(k.alpha, 4);
  return eta * eta / a4 * c4 * (1.0 + 1.0 / std::pow(r.NH, 4));
}

NormalizedSM normalize_sm(double f0, double f4_lambda4, const Couplings& g, const ConnectionConstants& k, double NR,
                          double NH, double lambda0) {
  require_positive(f0, "f0");
  require_positive(NR, "N_R");
  require_positive(NH, "N_H");
  require_positive(k.alpha, "alpha");
  NormalizedSM s;
  s.f0 = f0;
  s.f4_lambda4 = f4_lambda4;
  s.reparam.NR = NR;
  s.reparam.NH = NH;
  s.reparam.lambda0 = lambda0;
  s.reparam.NB = std::sqrt(f0 * g.g1 * g.g1 / (64.0 * kPi2));
  s.reparam.NW = std::sqrt(f0 * g.g2 * g.g2 / (192.0 * kPi2));
  s.reparam.NG = std::sqrt(f0 * g.g3 * g.g3 / (64.0 * kPi2));
  const double pref = f0 / (192.0 * kPi2);
  s.alpha0 = pref * k.N / (4.0 * NR * NR);
  s.mu0 = 192.0 * kPi2 / f0;
  s.delta0 = (12.0 * f4_lambda4 + f0 * lambda0) / (192.0 * kPi2);
  s.higgs_scale = std::sqrt(k.eta() * pref / (k.alpha * k.alpha * NH * NH));
  s.z = s.higgs_scale * k.c;
  return s;
}

LagrangianBreakdown sm_lagrangian_normalized(const CurvatureInvariants& inv, const NormalizedSM& s) {
  const double h2 = s.higgs_scale * s.higgs_scale;
  LagrangianBreakdown out;
  out.add("RR", s.alpha0, inv.RR);
  out.add("BB", -0.25, inv.BB);
  out.add("WW", -0.25, inv.WW);
  out.add("GG", -0.25, inv.GG);
  out.add("DH2", 1.0, h2 * inv.DH2);
  out.add("potential", -s.mu0, h2 * h2 * inv.potential);
  out.add("delta0", 1.0, s.delta0);
  return out;
}

SectorTraces sector_traces(const SMFieldStrengths& f, const Eigen::MatrixXd& ginv) {
  const int n = f.n;
  std::vector<Eigen::MatrixXcd> lam, q, v, wm;
  for (int mu = 0; mu < n; ++mu) {
    for (int nu = 0; nu < n; ++nu) {
      const Eigen::MatrixXcd& m = f.block(mu, nu);
      lam.push_back(m.block(kLambdaBlock, kLambdaBlock, 1, 1));
      q.push_back(m.block(kQBlock, kQBlock, 2, 2));
      v.push_back(m.block(kVBlock, kVBlock, 3, 3));
      Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(2, 2);
      for (int a = 0; a < 3; ++a) w += cd(0.0, -f.W[static_cast<std::size_t>(a)](mu, nu)) * pauli(a + 1);
      wm.push_back(std::move(w));
    }
  }
  SectorTraces t;
  t.lambda = trace_square(lam, n, ginv).real();
  t.q = trace_square(q, n, ginv).real();
  t.v = trace_square(v, n, ginv).real();
  t.w_matrix = trace_square(wm, n, ginv).real();
  t.BB = raised_square(f.B, ginv);
  for (const auto& w : f.W) t.WW += raised_square(w, ginv);
  for (const auto& g : f.G) t.GG += raised_square(g, ginv);
  return t;
}

VSectorFit fit_v_sector(const std::vector<SectorTraces>& samples) {
  if (samples.size() < 2) throw InvalidArgument("V-sector fit needs at least two samples");
  Eigen::MatrixXd a(static_cast<Eigen::Index>(samples.size()), 2);
  Eigen::VectorXd b(static_cast<Eigen::Index>(samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    a(k, 0) = samples[i].GG;
    a(k, 1) = samples[i].BB;
    b(k) = samples[i].v;
  }
  const Eigen::Vector2d x = a.colPivHouseholderQr().solve(b);
  VSectorFit fit{x(0), x(1), (a * x - b).cwiseAbs().maxCoeff()};
  return fit;
}

BlockTraceCoefficients block_trace_coefficients(const Couplings& g, double w_lambda, double w_q, double w_v) {
  const cd i(0.0, 1.0);
  // Unit component of each field in a single (mu, nu) slot; the trace of the
  // square of that slot is the coefficient of the component square.
  const cd lam = i * g.g1 / 2.0;
  const Eigen::Matrix3cd v_b = -(lam / 3.0) * Eigen::Matrix3cd::Identity();
  const Eigen::Matrix2cd q_w = (g.g2 / 2.0) * (-i * pauli(1));
  const Eigen::Matrix3cd v_g = -(g.g3 / 2.0) * (-i * gell_mann(1));
  BlockTraceCoefficients c;
  c.kB = (w_lambda * lam * lam + w_v * (v_b * v_b).trace()).real();
  c.kW = w_q * (q_w * q_w).trace().real();
  c.kG = w_v * (v_g * v_g).trace().real();
  return c;
}

}  // namespace geodyn
