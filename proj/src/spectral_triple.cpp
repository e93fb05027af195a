#include "geodyn/spectral_triple.hpp"

#include <algorithm>
#include <cmath>

#include "geodyn/errors.hpp"

namespace geodyn {

namespace {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;

double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

Mat comm(const Mat& a, const Mat& b) { return a * b - b * a; }

void require_square(const Mat& m, int dim, const char* what) {
  if (m.rows() != dim || m.cols() != dim) {
    throw DimensionError(std::string(what) + " must be " + std::to_string(dim) + "x" + std::to_string(dim));
  }
}

Mat block_diag(std::initializer_list<Mat> blocks) {
  Eigen::Index n = 0;
  for (const auto& b : blocks) n += b.rows();
  Mat out = Mat::Zero(n, n);
  Eigen::Index o = 0;
  for (const auto& b : blocks) {
    out.block(o, o, b.rows(), b.cols()) = b;
    o += b.rows();
  }
  return out;
}

Mat swap_blocks(int half) {
  Mat k = Mat::Zero(2 * half, 2 * half);
  k.topRightCorner(half, half).setIdentity();
  k.bottomLeftCorner(half, half).setIdentity();
  return k;
}

Eigen::VectorXcd vec(const Mat& m) { return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size()); }

void add(AxiomReport& r, std::string name, bool claimed, double residual, double tol) {
  r.results.push_back({std::move(name), claimed, residual <= tol, residual});
}

}  // namespace

Mat conjugate_by_j(const Mat& K, const Mat& a) { return K * a.conjugate() * K.adjoint(); }

const AxiomResult& AxiomReport::get(const std::string& name) const {
  for (const auto& r : results)
    if (r.name == name) return r;
  throw InvalidArgument("no axiom named '" + name + "'");
}

bool AxiomReport::claimed_pass() const {
  return std::all_of(results.begin(), results.end(), [](const AxiomResult& r) { return !r.claimed || r.passed; });
}

AxiomReport check_axioms(const FiniteTriple& t, double tol) {
  const int n = t.dim();
  require_square(t.D, n, "D");
  for (const auto& g : t.generators) require_square(g, n, "algebra generator");
  AxiomReport r;
  add(r, "D hermitian", true, max_abs(t.D - t.D.adjoint()), tol);
  for (const auto& g : t.generators) {
    r.commutator_bound = std::max(r.commutator_bound, comm(t.D, g).operatorNorm());
  }
  const Mat id = Mat::Identity(n, n);
  if (t.grading) {
    const Mat& g = *t.grading;
    require_square(g, n, "grading");
    add(r, "gamma hermitian", true, max_abs(g - g.adjoint()), tol);
    add(r, "gamma squared", true, max_abs(g * g - id), tol);
    add(r, "gamma anticommutes with D", true, max_abs(g * t.D + t.D * g), tol);
    double ga = 0.0;
    for (const auto& a : t.generators) ga = std::max(ga, max_abs(comm(g, a)));
    add(r, "gamma commutes with algebra", true, ga, tol);
  }
  if (t.K) {
    const Mat& k = *t.K;
    require_square(k, n, "real structure");
    const SignTriple s = t.signs;
    add(r, "J unitary", true, max_abs(k * k.adjoint() - id), tol);
    add(r, "J squared", true, max_abs(k * k.conjugate() - double(s.epsilon) * id), tol);
    add(r, "J commutes with D", true, max_abs(k * t.D.conjugate() - double(s.epsilon_prime) * t.D * k), tol);
    if (t.grading) {
      add(r, "J commutes with gamma", true,
          max_abs(k * t.grading->conjugate() - double(s.epsilon_double_prime) * *t.grading * k), tol);
    }
    double zero = 0.0, first = 0.0;
    for (const auto& a : t.generators) {
      for (const auto& b : t.generators) {
        const Mat jb = conjugate_by_j(k, b);
        zero = std::max(zero, max_abs(comm(a, jb)));
        first = std::max(first, max_abs(comm(comm(t.D, a), jb)));
      }
    }
    add(r, "order zero", t.claims_order_zero, zero, tol);
    add(r, "first order", t.claims_first_order, first, tol);
  }
  return r;
}

FluctuationElement inner_fluctuations(const FiniteTriple& t, std::vector<std::pair<Mat, Mat>> pairs) {
  if (pairs.empty()) throw InvalidArgument("inner fluctuation needs at least one pair");
  const int n = t.dim();
  FluctuationElement f;
  f.A = Mat::Zero(n, n);
  for (const auto& [a, b] : pairs) {
    require_square(a, n, "a");
    require_square(b, n, "b");
    f.A += a * comm(t.D, b);
  }
  f.pairs = std::move(pairs);
  return f;
}

Mat hermitian_part(const Mat& a) { return 0.5 * (a + a.adjoint()); }

FluctuatedTriple fluctuate(const FiniteTriple& t, const Mat& A, Projection projection) {
  if (!t.K) throw InvalidArgument("fluctuation needs a real structure J");
  require_square(A, t.dim(), "fluctuation");
  FluctuatedTriple out;
  out.A = projection == Projection::Hermitian ? hermitian_part(A) : A;
  out.triple = t;
  out.triple.D = t.D + out.A + conjugate_by_j(*t.K, out.A);
  out.hermiticity_residual = max_abs(out.triple.D - out.triple.D.adjoint());
  for (const auto& a : t.generators)
    for (const auto& b : t.generators)
      out.first_order_residual =
          std::max(out.first_order_residual, max_abs(comm(comm(out.triple.D, a), conjugate_by_j(*t.K, b))));
  return out;
}

OneFormSpan one_form_span(const FiniteTriple& t, double rel_tol) {
  const int n = t.dim();
  std::vector<Mat> forms;
  for (const auto& a : t.generators)
    for (const auto& b : t.generators) forms.push_back(a * comm(t.D, b));
  OneFormSpan s;
  if (forms.empty()) return s;
  Mat stack(static_cast<Eigen::Index>(n) * n, static_cast<Eigen::Index>(forms.size()));
  for (std::size_t i = 0; i < forms.size(); ++i) stack.col(static_cast<Eigen::Index>(i)) = vec(forms[i]);
  const Eigen::JacobiSVD<Mat> svd(stack, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double cut = rel_tol * std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) <= cut) break;
    ++s.rank;
    const Eigen::VectorXcd u = svd.matrixU().col(i);
    s.basis.push_back(Eigen::Map<const Mat>(u.data(), n, n));
  }
  for (const auto& g : t.generators)
    for (const auto& b : s.basis) s.closure_residual = std::max(s.closure_residual, span_distance(s, g * b));
  return s;
}

double span_distance(const OneFormSpan& s, const Mat& m) {
  Eigen::VectorXcd v = vec(m);
  for (const auto& b : s.basis) {
    const Eigen::VectorXcd u = vec(b);
    v -= u.dot(v) * u;
  }
  return v.norm();
}

Mat unimodular_projection(const Mat& A) {
  if (A.rows() != A.cols()) throw DimensionError("unimodular projection needs a square matrix");
  const auto n = A.rows();
  return A - (A.trace() / double(n)) * Mat::Identity(n, n);
}

SMUnimodular unimodular_projection_sm(const Mat& A) {
  require_square(A, 6, "gauge block");
  SMUnimodular u;
  u.Q = A.block(1, 1, 2, 2);
  u.Q -= (u.Q.trace() / 2.0) * Eigen::Matrix2cd::Identity();
  const cd t = A(0, 0) + A.block(3, 3, 3, 3).trace();
  u.lambda = A(0, 0) - t / 4.0;
  u.V = A.block(3, 3, 3, 3);
  u.V -= (t / 4.0) * Eigen::Matrix3cd::Identity();
  u.V_prime = -u.V - (u.lambda / 3.0) * Eigen::Matrix3cd::Identity();
  u.A = A;
  u.A(0, 0) = u.lambda;
  u.A.block(1, 1, 2, 2) = u.Q;
  u.A.block(3, 3, 3, 3) = u.V;
  return u;
}

bool is_quaternion(const Eigen::Matrix2cd& q, double tol) {
  return std::abs(q(1, 1) - std::conj(q(0, 0))) <= tol && std::abs(q(1, 0) + std::conj(q(0, 1))) <= tol;
}

AlgebraElement AlgebraElement::make(cd lambda, const Eigen::Matrix2cd& q, const Eigen::Matrix3cd& m) {
  if (!is_quaternion(q)) throw InvalidArgument("q is not a quaternion matrix");
  return {lambda, q, m};
}

AlgebraElement AlgebraElement::operator*(const AlgebraElement& o) const { return {lambda * o.lambda, q * o.q, m * o.m}; }

AlgebraElement AlgebraElement::operator+(const AlgebraElement& o) const { return {lambda + o.lambda, q + o.q, m + o.m}; }

Mat AlgebraElement::rep() const { return block_diag({Mat::Constant(1, 1, lambda), Mat(q), Mat(m)}); }

FiniteTriple two_point_triple(double m, bool broken_grading) {
  FiniteTriple t;
  t.name = broken_grading ? "two-point-broken" : "two-point";
  t.D = Mat::Zero(2, 2);
  t.D(0, 1) = m;
  t.D(1, 0) = m;
  Mat g = Mat::Zero(2, 2);
  g(0, 0) = 1.0;
  g(1, 1) = broken_grading ? 1.0 : -1.0;
  t.grading = g;
  Mat e1 = Mat::Zero(2, 2), e2 = Mat::Zero(2, 2);
  e1(0, 0) = 1.0;
  e2(1, 1) = 1.0;
  t.generators = {e1, e2};
  t.K = swap_blocks(1);
  t.signs = {1, 1, -1};
  t.claims_order_zero = true;
  return t;
}

Mat lepton_yukawa(const Mat& ke) {
  if (ke.rows() != 3 || ke.cols() != 3) throw DimensionError("Yukawa matrices must be 3x3");
  Mat y = Mat::Zero(6, 6);
  y.block(0, 3, 3, 3) = ke;
  y.block(3, 0, 3, 3) = ke.conjugate();
  return y;
}

FiniteTriple lepton_triple(const Mat& ke) {
  const Mat y = lepton_yukawa(ke);
  const Mat i3 = Mat::Identity(3, 3), z3 = Mat::Zero(3, 3);
  FiniteTriple t;
  t.name = "lepton";
  t.D = block_diag({y, Mat(y.conjugate())});
  const Mat g = block_diag({i3, Mat(-i3)});
  t.grading = block_diag({g, Mat(-g)});
  t.K = swap_blocks(6);
  t.signs = {1, 1, -1};
  t.generators = {block_diag({i3, z3, Mat::Identity(6, 6)}), block_diag({z3, i3, Mat::Zero(6, 6)})};
  t.claims_order_zero = true;
  t.claims_first_order = true;
  return t;
}

SMFinite build_sm_finite(const YukawaData& yd) {
  for (const Mat* k : {&yd.ku, &yd.kd, &yd.ke}) {
    if (k->rows() != 3 || k->cols() != 3) throw DimensionError("Yukawa matrices must be 3x3");
  }
  SMFinite s;
  s.Yq = Mat::Zero(9, 9);
  s.Yq.block(0, 3, 3, 3) = yd.kd;
  s.Yq.block(0, 6, 3, 3) = yd.ku;
  s.Yq.block(3, 0, 3, 3) = yd.kd.conjugate();
  s.Yq.block(6, 0, 3, 3) = yd.ku.conjugate();
  s.Yl = lepton_yukawa(yd.ke);
  Mat yq3 = Mat::Zero(27, 27);
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j) yq3.block(3 * i, 3 * j, 3, 3) = s.Yq(i, j) * Mat::Identity(3, 3);
  s.Y = block_diag({yq3, s.Yl});
  s.DY = block_diag({s.Y, Mat(s.Y.conjugate())});
  s.hermiticity_residual = max_abs(s.DY - s.DY.adjoint());

  // Chirality: the first generation block of each sector is left-handed.
  Eigen::VectorXcd left = Eigen::VectorXcd::Zero(33);
  left.head(9).setOnes();
  left.segment(27, 3).setOnes();
  const Mat pl = left.asDiagonal();
  const Mat pr = Mat::Identity(33, 33) - pl;
  const Mat gy = pl - pr;
  FiniteTriple& t = s.triple;
  t.name = "standard-model";
  t.D = s.DY;
  t.grading = block_diag({gy, Mat(-gy)});
  t.K = swap_blocks(33);
  t.signs = {1, 1, -1};
  t.generators = {block_diag({pl, Mat::Identity(33, 33)}), block_diag({pr, Mat::Zero(33, 33)})};
  t.claims_order_zero = true;
  t.claims_first_order = true;
  return s;
}

}  // namespace geodyn
