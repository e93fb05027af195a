#pragma once

#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace geodyn {

/// Signs in J^2 = eps, J D = eps' D J, J gamma = eps'' gamma J.
struct SignTriple {
  int epsilon = 1;
  int epsilon_prime = 1;
  int epsilon_double_prime = 1;
};

/// Finite spectral triple. The real structure acts as J v = K conj(v).
struct FiniteTriple {
  std::string name;
  std::vector<Eigen::MatrixXcd> generators;  // representation of a basis of the algebra
  Eigen::MatrixXcd D;
  std::optional<Eigen::MatrixXcd> grading;
  std::optional<Eigen::MatrixXcd> K;
  SignTriple signs;
  bool claims_order_zero = false;
  bool claims_first_order = false;

  int dim() const { return static_cast<int>(D.rows()); }
};

/// J A J^{-1} = K conj(A) K^dagger for unitary K.
Eigen::MatrixXcd conjugate_by_j(const Eigen::MatrixXcd& K, const Eigen::MatrixXcd& a);

struct AxiomResult {
  std::string name;
  bool claimed = false;
  bool passed = false;
  double residual = 0.0;
};

struct AxiomReport {
  std::vector<AxiomResult> results;
  double commutator_bound = 0.0;  // max operator norm of [D, a] over generators

  const AxiomResult& get(const std::string& name) const;
  /// True when every claimed axiom passes.
  bool claimed_pass() const;
};

/// Checks D = D^dagger, gamma = gamma^dagger, gamma^2 = 1, gamma D = -D gamma,
/// [gamma, a] = 0, K unitary, J^2 = eps, J D = eps' D J, J gamma = eps'' gamma J,
/// order zero and first order. Residuals are max absolute entries.
/// Throws DimensionError when the matrices disagree in size.
AxiomReport check_axioms(const FiniteTriple& t, double tol = 1e-12);

struct FluctuationElement {
  std::vector<std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd>> pairs;
  Eigen::MatrixXcd A;  // sum a_i [D, b_i]
};

FluctuationElement inner_fluctuations(const FiniteTriple& t,
                                      std::vector<std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd>> pairs);

Eigen::MatrixXcd hermitian_part(const Eigen::MatrixXcd& a);

enum class Projection { Hermitian, Raw };

struct FluctuatedTriple {
  FiniteTriple triple;                // D replaced by D' = D + A + J A J^{-1}
  Eigen::MatrixXcd A;                 // the fluctuation actually used
  double hermiticity_residual = 0.0;  // max |D' - D'^dagger|
  double first_order_residual = 0.0;  // max |[[D', a], J b J^{-1}]| over generators
};

/// Throws InvalidArgument when the triple has no real structure.
FluctuatedTriple fluctuate(const FiniteTriple& t, const Eigen::MatrixXcd& A,
                           Projection projection = Projection::Hermitian);

/// Span of the one-forms a [D, b] over all generator pairs.
struct OneFormSpan {
  int rank = 0;
  std::vector<Eigen::MatrixXcd> basis;  // orthonormal in the Frobenius inner product
  double closure_residual = 0.0;        // max distance of g * basis element from the span
};

OneFormSpan one_form_span(const FiniteTriple& t, double rel_tol = 1e-10);
/// Frobenius distance of `m` from the span.
double span_distance(const OneFormSpan& s, const Eigen::MatrixXcd& m);

/// A - (Tr A / dim) I
Eigen::MatrixXcd unimodular_projection(const Eigen::MatrixXcd& A);

/// Unimodular projection of a gauge block Lambda (1) + Q (2) + V (3): Q is
/// made traceless and (Lambda, V) shifted so that Lambda + Tr V = 0. Returns
/// V' = -V - Lambda/3 I, which is then traceless.
struct SMUnimodular {
  Eigen::MatrixXcd A;
  std::complex<double> lambda;
  Eigen::Matrix2cd Q;
  Eigen::Matrix3cd V;
  Eigen::Matrix3cd V_prime;
};

SMUnimodular unimodular_projection_sm(const Eigen::MatrixXcd& A);

/// Element (lambda, q, m) of C + H + M3(C).
struct AlgebraElement {
  std::complex<double> lambda;
  Eigen::Matrix2cd q;
  Eigen::Matrix3cd m;

  /// Throws InvalidArgument if q is not of the form [[x, y], [-conj y, conj x]].
  static AlgebraElement make(std::complex<double> lambda, const Eigen::Matrix2cd& q, const Eigen::Matrix3cd& m);
  AlgebraElement operator*(const AlgebraElement& o) const;
  AlgebraElement operator+(const AlgebraElement& o) const;
  /// Defining representation diag(lambda, q, m) on C^6.
  Eigen::MatrixXcd rep() const;
};

bool is_quaternion(const Eigen::Matrix2cd& q, double tol = 1e-12);

/// H = C^2, D = [[0, m], [m, 0]], gamma = diag(1, -1) (or diag(1, 1) when
/// `broken_grading`), algebra diag(l1, l2), J = sigma_1 conj with signs (1, 1, -1).
FiniteTriple two_point_triple(double m, bool broken_grading = false);

/// Y = [[0, k], [conj(k), 0]] with 3x3 generation blocks.
Eigen::MatrixXcd lepton_yukawa(const Eigen::MatrixXcd& ke);

/// Lepton sector on particles + antiparticles (dimension 12): D = diag(Y, conj Y),
/// gamma = diag(g, -g) with g = diag(I3, -I3), J swaps particles and
/// antiparticles. The algebra is generated by (lambda, mu) acting as
/// diag(lambda I3, mu I3) on particles and lambda I6 on antiparticles.
FiniteTriple lepton_triple(const Eigen::MatrixXcd& ke);

struct YukawaData {
  Eigen::MatrixXcd ku = Eigen::MatrixXcd::Zero(3, 3);
  Eigen::MatrixXcd kd = Eigen::MatrixXcd::Zero(3, 3);
  Eigen::MatrixXcd ke = Eigen::MatrixXcd::Zero(3, 3);
};

struct SMFinite {
  Eigen::MatrixXcd Yq;  // 9x9: [[0, kd, ku], [conj kd, 0, 0], [conj ku, 0, 0]]
  Eigen::MatrixXcd Yl;  // 6x6
  Eigen::MatrixXcd Y;   // (Yq (x) I3) + Yl as a direct sum, 33x33
  Eigen::MatrixXcd DY;  // diag(Y, conj Y), 66x66
  int quark_dim = 27;
  int lepton_dim = 6;
  double hermiticity_residual = 0.0;
  FiniteTriple triple;
};

/// Throws DimensionError for Yukawa matrices that are not 3x3.
SMFinite build_sm_finite(const YukawaData& y);

}  // namespace geodyn
