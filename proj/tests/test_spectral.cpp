#include <cmath>
#include <random>

#include "doctest.h"
#include "geodyn/errors.hpp"
#include "geodyn/spectral_triple.hpp"

using namespace geodyn;

namespace {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;

Mat random_complex(int r, int c, std::mt19937& rng) {
  std::normal_distribution<double> nd;
  Mat m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = cd(nd(rng), nd(rng));
  return m;
}

Mat random_symmetric(int n, std::mt19937& rng) {
  const Mat m = random_complex(n, n, rng);
  return 0.5 * (m + m.transpose());
}

/// Random element sum_k c_k g_k of the represented algebra.
Mat random_element(const FiniteTriple& t, std::mt19937& rng) {
  std::normal_distribution<double> nd;
  Mat a = Mat::Zero(t.dim(), t.dim());
  for (const auto& g : t.generators) a += cd(nd(rng), nd(rng)) * g;
  return a;
}

Eigen::Matrix2cd random_quaternion(std::mt19937& rng) {
  std::normal_distribution<double> nd;
  const cd x(nd(rng), nd(rng)), y(nd(rng), nd(rng));
  Eigen::Matrix2cd q;
  q << x, y, -std::conj(y), std::conj(x);
  return q;
}

}  // namespace

TEST_CASE("two-point triple passes its claimed axioms") {
  for (double m : {1.0, 0.3, -2.5}) {
    const auto r = check_axioms(two_point_triple(m));
    CHECK(r.claimed_pass());
    CHECK(r.get("gamma anticommutes with D").residual == 0.0);
    CHECK(r.get("J commutes with gamma").passed);
    CHECK(r.commutator_bound == doctest::Approx(std::abs(m)));
    // The two-point space is not first order; it does not claim it.
    CHECK_FALSE(r.get("first order").claimed);
    CHECK_FALSE(r.get("first order").passed);
  }
}

TEST_CASE("broken grading fails with residual 2|m|") {
  for (double m : {1.0, 0.7, -3.0}) {
    const auto r = check_axioms(two_point_triple(m, true));
    const auto& a = r.get("gamma anticommutes with D");
    CHECK_FALSE(a.passed);
    CHECK(a.residual == doctest::Approx(2.0 * std::abs(m)).epsilon(1e-15));
    CHECK_FALSE(r.claimed_pass());
  }
}

TEST_CASE("check_axioms: dimension mismatch and unknown names") {
  FiniteTriple t = two_point_triple(1.0);
  t.grading = Mat::Identity(3, 3);
  CHECK_THROWS_AS(check_axioms(t), DimensionError);
  CHECK_THROWS_AS(check_axioms(two_point_triple(1.0)).get("no such axiom"), InvalidArgument);
}

TEST_CASE("lepton triple passes all axioms including first order") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    const Mat ke = trial == 0 ? Mat(Mat::Identity(3, 3)) : random_symmetric(3, rng);
    const auto r = check_axioms(lepton_triple(ke));
    CHECK(r.claimed_pass());
    for (const auto& a : r.results) CHECK_MESSAGE(a.residual < 1e-12, a.name);
  }
  // A non-symmetric Yukawa breaks Hermiticity of D.
  const auto r = check_axioms(lepton_triple(random_complex(3, 3, rng)));
  CHECK_FALSE(r.get("D hermitian").passed);
}

TEST_CASE("inner fluctuations on the two-point space") {
  const double m = 1.7;
  const auto t = two_point_triple(m);
  const Mat id = Mat::Identity(2, 2);
  CHECK(inner_fluctuations(t, {{t.generators[0], id}}).A.cwiseAbs().maxCoeff() == 0.0);

  const cd l1(0.3, 0.1), l2(-1.2, 0.4), m1(0.5, -0.2), m2(2.0, 0.7);
  Mat a = Mat::Zero(2, 2), b = Mat::Zero(2, 2);
  a(0, 0) = l1;
  a(1, 1) = l2;
  b(0, 0) = m1;
  b(1, 1) = m2;
  const Mat A = inner_fluctuations(t, {{a, b}}).A;
  CHECK(std::abs(A(0, 1) - l1 * m * (m2 - m1)) < 1e-15);
  CHECK(std::abs(A(1, 0) - l2 * m * (m1 - m2)) < 1e-15);
  CHECK(std::abs(A(0, 0)) == 0.0);

  // Linearity in the pair list.
  const Mat A2 = inner_fluctuations(t, {{a, b}, {b, a}}).A;
  const Mat Ab = inner_fluctuations(t, {{b, a}}).A;
  CHECK((A2 - A - Ab).cwiseAbs().maxCoeff() < 1e-15);
  CHECK_THROWS_AS(inner_fluctuations(t, {}), InvalidArgument);
}

TEST_CASE("one-form span: two-point rank and closure") {
  const auto t = two_point_triple(1.3);
  const auto s = one_form_span(t);
  CHECK(s.rank == 2);
  CHECK(s.closure_residual < 1e-12);
  Mat off = Mat::Zero(2, 2);
  off(0, 1) = cd(0.4, 1.0);
  off(1, 0) = -2.0;
  CHECK(span_distance(s, off) < 1e-12);
  CHECK(span_distance(s, Mat::Identity(2, 2)) == doctest::Approx(std::sqrt(2.0)));

  const auto l = one_form_span(lepton_triple(Mat::Identity(3, 3)));
  CHECK(l.rank == 2);
  CHECK(l.closure_residual < 1e-12);
  std::mt19937 rng(3);
  const auto lt = lepton_triple(Mat::Identity(3, 3));
  const Mat A = inner_fluctuations(lt, {{random_element(lt, rng), random_element(lt, rng)}}).A;
  CHECK(span_distance(l, A) < 1e-12);
}

TEST_CASE("fluctuate: Hermiticity, zero fluctuation and real spectrum") {
  const auto t = two_point_triple(0.8);
  const auto z = fluctuate(t, Mat::Zero(2, 2));
  CHECK((z.triple.D - t.D).cwiseAbs().maxCoeff() == 0.0);

  Mat h = Mat::Zero(2, 2);
  h(0, 1) = 0.25;
  h(1, 0) = 0.25;
  const auto f = fluctuate(t, h);
  CHECK(f.hermiticity_residual < 1e-14);
  // J A J^{-1} = sigma_1 conj(A) sigma_1 adds the same real off-diagonal entry.
  CHECK(f.triple.D(0, 1) == cd(0.8 + 0.5, 0.0));

  std::mt19937 rng(9);
  const auto lt = lepton_triple(random_symmetric(3, rng));
  for (int trial = 0; trial < 10; ++trial) {
    const Mat A = inner_fluctuations(lt, {{random_element(lt, rng), random_element(lt, rng)},
                                          {random_element(lt, rng), random_element(lt, rng)}})
                      .A;
    const auto fl = fluctuate(lt, A);
    CHECK(fl.hermiticity_residual < 1e-12);
    CHECK(fl.first_order_residual < 1e-12);
    const Eigen::ComplexEigenSolver<Mat> es(fl.triple.D);
    CHECK(es.eigenvalues().imag().cwiseAbs().maxCoeff() < 1e-12);
  }
  FiniteTriple nj = t;
  nj.K.reset();
  CHECK_THROWS_AS(fluctuate(nj, h), InvalidArgument);
}

TEST_CASE("fluctuate: gauge covariance D'(A^u) = U D'(A) U^dagger") {
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> ang(-3.0, 3.0);
  const auto lt = lepton_triple(random_symmetric(3, rng));
  for (int trial = 0; trial < 10; ++trial) {
    const Mat u = std::exp(cd(0.0, ang(rng))) * lt.generators[0] + std::exp(cd(0.0, ang(rng))) * lt.generators[1];
    CHECK((u * u.adjoint() - Mat::Identity(12, 12)).cwiseAbs().maxCoeff() < 1e-14);
    const Mat A = inner_fluctuations(lt, {{random_element(lt, rng), random_element(lt, rng)}}).A;
    const Mat Ah = hermitian_part(A);
    const Mat Au = u * Ah * u.adjoint() + u * (lt.D * u.adjoint() - u.adjoint() * lt.D);
    const Mat U = u * conjugate_by_j(*lt.K, u);
    const Mat lhs = fluctuate(lt, Au).triple.D;
    const Mat rhs = U * fluctuate(lt, Ah).triple.D * U.adjoint();
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("unimodular projections") {
  std::mt19937 rng(4);
  Mat traceless = random_complex(4, 4, rng);
  traceless -= (traceless.trace() / 4.0) * Mat::Identity(4, 4);
  CHECK((unimodular_projection(traceless) - traceless).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(unimodular_projection(Mat::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
  const Mat r = random_complex(5, 5, rng);
  const Mat p = unimodular_projection(r);
  CHECK(std::abs(p.trace()) < 1e-13);
  CHECK((unimodular_projection(p) - p).cwiseAbs().maxCoeff() < 1e-15);
  CHECK_THROWS_AS(unimodular_projection(random_complex(2, 3, rng)), DimensionError);

  for (int trial = 0; trial < 10; ++trial) {
    const Mat a = random_complex(6, 6, rng);
    const auto u = unimodular_projection_sm(a);
    CHECK(std::abs(u.V_prime.trace()) < 1e-13);
    CHECK(std::abs(u.Q.trace()) < 1e-13);
    CHECK(std::abs(u.lambda + u.V.trace()) < 1e-13);
    CHECK((u.V + u.V_prime + (u.lambda / 3.0) * Eigen::Matrix3cd::Identity()).cwiseAbs().maxCoeff() < 1e-13);
    CHECK(std::abs(u.A.trace()) < 1e-13);
    const auto again = unimodular_projection_sm(u.A);
    CHECK((again.A - u.A).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("algebra elements: quaternion form and homomorphism") {
  std::mt19937 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = AlgebraElement::make(cd(0.3, trial), random_quaternion(rng), random_complex(3, 3, rng));
    const auto b = AlgebraElement::make(cd(-1.0, 0.5), random_quaternion(rng), random_complex(3, 3, rng));
    CHECK(is_quaternion((a * b).q));
    CHECK(((a * b).rep() - a.rep() * b.rep()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(((a + b).rep() - a.rep() - b.rep()).cwiseAbs().maxCoeff() < 1e-15);
  }
  Eigen::Matrix2cd bad;
  bad << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS_AS(AlgebraElement::make(1.0, bad, Eigen::Matrix3cd::Identity()), InvalidArgument);
}

TEST_CASE("build_sm_finite: block pattern and bookkeeping") {
  YukawaData zero;
  const auto z = build_sm_finite(zero);
  CHECK(z.DY.rows() == 66);
  CHECK(z.DY.cwiseAbs().maxCoeff() == 0.0);
  CHECK(z.quark_dim + z.lepton_dim == 33);

  YukawaData e;
  e.ke = Mat::Identity(3, 3);
  const auto le = build_sm_finite(e);
  Mat expected = Mat::Zero(6, 6);
  expected.block(0, 3, 3, 3).setIdentity();
  expected.block(3, 0, 3, 3).setIdentity();
  CHECK((le.Yl - expected).cwiseAbs().maxCoeff() == 0.0);
  CHECK(le.Y.topLeftCorner(27, 27).cwiseAbs().maxCoeff() == 0.0);

  std::mt19937 rng(12);
  YukawaData sym{random_symmetric(3, rng), random_symmetric(3, rng), random_symmetric(3, rng)};
  const auto s = build_sm_finite(sym);
  CHECK(s.hermiticity_residual < 1e-15);
  // Displayed zeros of Y_q.
  CHECK(s.Yq.block(3, 3, 6, 6).cwiseAbs().maxCoeff() == 0.0);
  CHECK((s.Yq.block(0, 3, 3, 3) - sym.kd).cwiseAbs().maxCoeff() == 0.0);
  // Color: Y_q (x) I3.
  CHECK(s.Y(0, 9) == s.Yq(0, 3));
  CHECK(s.Y(1, 10) == s.Yq(0, 3));
  CHECK(s.Y(0, 10) == 0.0);
  // D_Y = diag(Y, conj Y).
  CHECK((s.DY.bottomRightCorner(33, 33) - s.Y.conjugate()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(s.DY.topRightCorner(33, 33).cwiseAbs().maxCoeff() == 0.0);
  const auto r = check_axioms(s.triple);
  CHECK(r.claimed_pass());

  YukawaData gen{random_complex(3, 3, rng), random_complex(3, 3, rng), random_complex(3, 3, rng)};
  CHECK(build_sm_finite(gen).hermiticity_residual > 1e-3);
  gen.ku = Mat::Zero(2, 2);
  CHECK_THROWS_AS(build_sm_finite(gen), DimensionError);
}
