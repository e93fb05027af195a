#pragma once

#include <string>
#include <vector>

#include "geodyn/gauge.hpp"

namespace geodyn {

/// Scalar invariants of a curvature form at one point, indices raised with
/// the generalized metric.
struct CurvatureInvariants {
  double RR = 0.0;         // R_{ab mu nu} R^{ab mu nu}
  double BB = 0.0;         // B_{mu nu} B^{mu nu}
  double WW = 0.0;         // sum_a W^a_{mu nu} W^{a mu nu}
  double GG = 0.0;         // sum_a G^a_{mu nu} G^{a mu nu}
  double DH2 = 0.0;        // g^{mu nu} Re 0.5 Tr(D_mu H^dagger D_nu H)
  double potential = 0.0;  // (|H|^2 - c^2)^2
};

CurvatureInvariants curvature_invariants(const CurvatureForm& f, const Signature& eta);

struct LagrangianTerm {
  std::string name;
  double coefficient = 0.0;
  double invariant = 0.0;
  double value = 0.0;  // coefficient * invariant
};

struct LagrangianBreakdown {
  std::vector<LagrangianTerm> terms;
  double total = 0.0;

  /// Throws InvalidArgument for an unknown term.
  const LagrangianTerm& term(const std::string& name) const;
  void add(std::string name, double coefficient, double invariant);
};

struct Reparametrization {
  double NR = 1.0;
  double NB = 1.0;
  double NW = 1.0;
  double NG = 1.0;
  double NH = 1.0;
  double lambda0 = 0.0;
};

/// F^2 = (N/4) R.R - (3/4) g1^2 B.B - (1/4) g2^2 W.W - (3/4) g3^2 G.G
///       + (eta/alpha^2) |DH|^2 + (eta^2/alpha^4) (|H|^2 - c^2)^2
LagrangianBreakdown curvature_squared_raw(const CurvatureInvariants& inv, const Couplings& g,
                                          const ConnectionConstants& k);

/// Reparametrized form with N_R .. N_H dividing the corresponding terms, the
/// potential entering with a minus sign and the constant lambda0 added.
/// Throws InvalidArgument for non-positive constants.
LagrangianBreakdown curvature_squared(const CurvatureInvariants& inv, const Couplings& g,
                                      const ConnectionConstants& k, const Reparametrization& r);

/// lambda0 for which the reparametrized and raw forms agree at the vacuum
/// (all field strengths zero, H = 0): (eta^2/alpha^4) c^4 (1 + 1/N_H^4).
double vacuum_lambda0(const ConnectionConstants& k, const Reparametrization& r);

/// Constants of the canonically normalized Standard Model form
///   alpha0 R.R - B.B/4 - W.W/4 - G.G/4 + |D Hn|^2 - mu0 (|Hn|^2 - z^2)^2 + delta0.
struct NormalizedSM {
  double f0 = 0.0;
  double f4_lambda4 = 0.0;  // f4 Lambda^4 entering delta0
  Reparametrization reparam;  // N_B, N_W, N_G fixed by the normalization
  double alpha0 = 0.0;
  double mu0 = 0.0;
  double delta0 = 0.0;
  double higgs_scale = 0.0;  // Hn = higgs_scale * H
  double z = 0.0;
};

/// N_B^2 = f0 g1^2/(64 pi^2), N_W^2 = f0 g2^2/(192 pi^2), N_G^2 = f0 g3^2/(64 pi^2),
/// higgs_scale^2 = eta f0/(alpha^2 N_H^2 192 pi^2), mu0 = 192 pi^2/f0,
/// alpha0 = f0 N/(4 N_R^2 192 pi^2), delta0 = (12 f4 Lambda^4 + f0 lambda0)/(192 pi^2).
NormalizedSM normalize_sm(double f0, double f4_lambda4, const Couplings& g, const ConnectionConstants& k,
                          double NR = 1.0, double NH = 1.0, double lambda0 = 0.0);

LagrangianBreakdown sm_lagrangian_normalized(const CurvatureInvariants& inv, const NormalizedSM& s);

/// Matrix traces of the gauge-block curvature with indices raised by ginv.
struct SectorTraces {
  double lambda = 0.0;  // Tr(Lambda_{mu nu} Lambda^{mu nu})
  double q = 0.0;       // Tr(Q_{mu nu} Q^{mu nu})
  double v = 0.0;       // Tr(V_{mu nu} V^{mu nu})
  double w_matrix = 0.0;  // Tr(W_{mu nu} W^{mu nu}) with W = -i W^a sigma_a rebuilt from components
  double BB = 0.0, WW = 0.0, GG = 0.0;
};

SectorTraces sector_traces(const SMFieldStrengths& f, const Eigen::MatrixXd& ginv);

/// Least-squares coefficients (kG, kB) of Tr(V.V) = kG G.G + kB B.B over samples.
struct VSectorFit {
  double kG = 0.0;
  double kB = 0.0;
  double residual = 0.0;  // max |fit - trace| over the samples
};

VSectorFit fit_v_sector(const std::vector<SectorTraces>& samples);

/// Coefficients of the multiplicity-weighted block trace
/// w_L Tr(Lambda.Lambda) + w_Q Tr(Q.Q) + w_V Tr(V.V) = kB B.B + kW W.W + kG G.G.
struct BlockTraceCoefficients {
  double kB = 0.0;
  double kW = 0.0;
  double kG = 0.0;
};

BlockTraceCoefficients block_trace_coefficients(const Couplings& g, double w_lambda = 1.0, double w_q = 1.0,
                                                double w_v = 1.0);

}  // namespace geodyn
