#include "geodyn/gauge.hpp"

#include <cmath>

#include "geodyn/clifford.hpp"

namespace geodyn {

namespace {

using cd = std::complex<double>;
constexpr cd kI(0.0, 1.0);

Eigen::MatrixXcd read_matrix(const std::vector<double>& v, int mu, int size) {
  Eigen::MatrixXcd m(size, size);
  for (int i = 0; i < size; ++i)
    for (int j = 0; j < size; ++j)
      m(i, j) = cd(v[one_form_index(mu, i, j, 0, size)], v[one_form_index(mu, i, j, 1, size)]);
  return m;
}

Eigen::MatrixXcd read_jet_matrix(const FieldJet& jet, int mu, int size, int l, int m) {
  Eigen::MatrixXcd out(size, size);
  for (int i = 0; i < size; ++i) {
    for (int j = 0; j < size; ++j) {
      const int re = static_cast<int>(one_form_index(mu, i, j, 0, size));
      const int im = re + 1;
      if (m < 0) {
        out(i, j) = cd(jet.d(re, l), jet.d(im, l));
      } else {
        out(i, j) = cd(jet.dd(re, l, m), jet.dd(im, l, m));
      }
    }
  }
  return out;
}

Eigen::MatrixXcd commutator(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) { return a * b - b * a; }

void require_chart(const ChartField& f, int n, int components, const char* name) {
  if (f.dimension() != n) throw DimensionError(std::string(name) + " lives on a different chart");
  if (f.components() != components) {
    throw DimensionError(std::string(name) + " must have " + std::to_string(components) + " components");
  }
}

ChartField zero_field(int n, std::vector<IndexSlot> shape) {
  return ChartField::generic(n, std::move(shape), [](auto, auto out) {
    using S = std::remove_cvref_t<decltype(out[0])>;
    for (auto& v : out) v = S(0.0);
  });
}

/// Composite fields stay exact only if every part has a dual evaluator.
ChartField finish_composite(ChartField f, std::initializer_list<const ChartField*> parts) {
  for (const ChartField* p : parts) {
    if (!p->has_dual() || p->mode() == DerivativeMode::FiniteDifference) {
      return f.with_mode(DerivativeMode::FiniteDifference, p->fd_step());
    }
  }
  return f;
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace

std::vector<Eigen::MatrixXcd> MatrixOneForm::at(const Point& p) const {
  const auto v = field.evaluate(p);
  std::vector<Eigen::MatrixXcd> out;
  for (int mu = 0; mu < dimension(); ++mu) out.push_back(read_matrix(v, mu, size));
  return out;
}

FieldStrength field_strength(const MatrixOneForm& a, const Point& p, bool with_derivative) {
  const int n = a.dimension();
  const int s = a.size;
  const FieldJet jt = jet(a.field, p, with_derivative ? 2 : 1);
  FieldStrength fs;
  fs.n = n;
  for (int mu = 0; mu < n; ++mu) fs.a.push_back(read_matrix(jt.value, mu, s));
  for (int l = 0; l < n; ++l)
    for (int mu = 0; mu < n; ++mu) fs.da.push_back(read_jet_matrix(jt, mu, s, l, -1));
  auto da = [&](int l, int mu) -> const Eigen::MatrixXcd& { return fs.da[static_cast<std::size_t>(l * n + mu)]; };
  for (int mu = 0; mu < n; ++mu) {
    for (int nu = 0; nu < n; ++nu) {
      fs.f.push_back(da(mu, nu) - da(nu, mu) + commutator(fs.a[static_cast<std::size_t>(mu)], fs.a[static_cast<std::size_t>(nu)]));
    }
  }
  if (with_derivative) {
    for (int l = 0; l < n; ++l) {
      for (int mu = 0; mu < n; ++mu) {
        for (int nu = 0; nu < n; ++nu) {
          const Eigen::MatrixXcd ddn = read_jet_matrix(jt, nu, s, l, mu);
          const Eigen::MatrixXcd ddm = read_jet_matrix(jt, mu, s, l, nu);
          fs.df.push_back(ddn - ddm + commutator(da(l, mu), fs.a[static_cast<std::size_t>(nu)]) +
                          commutator(fs.a[static_cast<std::size_t>(mu)], da(l, nu)));
        }
      }
    }
  }
  return fs;
}

double bianchi_residual(const FieldStrength& fs) {
  const int n = fs.n;
  if (fs.df.empty()) throw InvalidArgument("Bianchi residual needs field-strength derivatives");
  auto cov = [&](int l, int mu, int nu) {
    return Eigen::MatrixXcd(fs.df[static_cast<std::size_t>((l * n + mu) * n + nu)] +
                            commutator(fs.a[static_cast<std::size_t>(l)], fs(mu, nu)));
  };
  double worst = 0.0;
  for (int l = 0; l < n; ++l)
    for (int mu = 0; mu < n; ++mu)
      for (int nu = 0; nu < n; ++nu) {
        const Eigen::MatrixXcd c = cov(l, mu, nu) + cov(mu, nu, l) + cov(nu, l, mu);
        worst = std::max(worst, c.cwiseAbs().maxCoeff());
      }
  return worst;
}

std::complex<double> trace_square(const std::vector<Eigen::MatrixXcd>& f, int n, const Eigen::MatrixXd& ginv) {
  cd sum = 0.0;
  for (int mu = 0; mu < n; ++mu)
    for (int nu = 0; nu < n; ++nu)
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          const double w = ginv(mu, a) * ginv(nu, b);
          if (w == 0.0) continue;
          sum += w * (f[static_cast<std::size_t>(mu * n + nu)] * f[static_cast<std::size_t>(a * n + b)]).trace();
        }
  return sum;
}

double antisymmetry_residual(const std::vector<Eigen::MatrixXcd>& f, int n) {
  double worst = 0.0;
  for (int mu = 0; mu < n; ++mu)
    for (int nu = 0; nu < n; ++nu)
      worst = std::max(worst, (f[static_cast<std::size_t>(mu * n + nu)] + f[static_cast<std::size_t>(nu * n + mu)])
                                  .cwiseAbs()
                                  .maxCoeff());
  return worst;
}

SMGaugeConfig SMGaugeConfig::zero(int n, Couplings g) {
  return {zero_field(n, {down(n)}), zero_field(n, {up(3, IndexKind::Frame), down(n)}),
          zero_field(n, {up(8, IndexKind::Frame), down(n)}), g};
}

HiggsField HiggsField::zero(int n, double c) { return {zero_field(n, {up(4, IndexKind::Frame)}), c}; }

Eigen::Matrix2cd quaternion(double xr, double xi, double yr, double yi) {
  const cd x(xr, xi), y(yr, yi);
  Eigen::Matrix2cd h;
  h << x, y, -std::conj(y), std::conj(x);
  return h;
}

double higgs_norm2(const Eigen::Matrix2cd& h) { return 0.5 * (h.adjoint() * h).trace().real(); }

MatrixOneForm sm_gauge_one_form(const SMGaugeConfig& sm) {
  const int n = sm.dimension();
  require_chart(sm.B, n, n, "B");
  require_chart(sm.W, n, 3 * n, "W");
  require_chart(sm.G, n, 8 * n, "G");
  const Couplings g = sm.couplings;
  if (!(g.g1 > 0.0 && g.g2 > 0.0 && g.g3 > 0.0)) throw InvalidArgument("couplings must be positive");

  std::array<Eigen::Matrix2cd, 3> sigma;
  for (int a = 0; a < 3; ++a) sigma[static_cast<std::size_t>(a)] = pauli(a + 1);
  std::array<Eigen::Matrix3cd, 8> lambda;
  for (int a = 0; a < 8; ++a) lambda[static_cast<std::size_t>(a)] = gell_mann(a + 1);

  const ChartField B = sm.B, W = sm.W, G = sm.G;
  constexpr int s = kGaugeBlockSize;
  auto f = [=](auto x, auto out) {
    using S = std::remove_cvref_t<decltype(out[0])>;
    std::vector<S> b(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(3 * n)), gl(static_cast<std::size_t>(8 * n));
    evaluate_as<S>(B, x, b);
    evaluate_as<S>(W, x, w);
    evaluate_as<S>(G, x, gl);
    for (auto& v : out) v = S(0.0);
    for (int mu = 0; mu < n; ++mu) {
      const S bm = b[static_cast<std::size_t>(mu)];
      out[one_form_index(mu, kLambdaBlock, kLambdaBlock, 1, s)] = 0.5 * g.g1 * bm;
      // Q = (g2/2)(-i W^a sigma_a): real part sum W Im(sigma), imaginary part -sum W Re(sigma).
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          S re(0.0), im(0.0);
          for (int a = 0; a < 3; ++a) {
            const cd e = sigma[static_cast<std::size_t>(a)](i, j);
            const S wa = w[static_cast<std::size_t>(a * n + mu)];
            re += e.imag() * wa;
            im -= e.real() * wa;
          }
          out[one_form_index(mu, kQBlock + i, kQBlock + j, 0, s)] = 0.5 * g.g2 * re;
          out[one_form_index(mu, kQBlock + i, kQBlock + j, 1, s)] = 0.5 * g.g2 * im;
        }
      }
      // V = -(g3/2)(-i G^a lambda_a) - Lambda/3.
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          S re(0.0), im(0.0);
          for (int a = 0; a < 8; ++a) {
            const cd e = lambda[static_cast<std::size_t>(a)](i, j);
            const S ga = gl[static_cast<std::size_t>(a * n + mu)];
            re += e.imag() * ga;
            im -= e.real() * ga;
          }
          S vim = -0.5 * g.g3 * im;
          if (i == j) vim -= (g.g1 / 6.0) * bm;
          out[one_form_index(mu, kVBlock + i, kVBlock + j, 0, s)] = -0.5 * g.g3 * re;
          out[one_form_index(mu, kVBlock + i, kVBlock + j, 1, s)] = vim;
        }
      }
    }
  };
  MatrixOneForm form = make_matrix_one_form(n, s, f);
  form.field = finish_composite(form.field, {&sm.B, &sm.W, &sm.G});
  return form;
}

SMFieldStrengths sm_field_strengths(const SMGaugeConfig& sm, const Point& p, bool with_derivative) {
  const int n = sm.dimension();
  const Couplings g = sm.couplings;
  SMFieldStrengths out;
  out.n = n;
  out.block = field_strength(sm_gauge_one_form(sm), p, with_derivative);
  out.B = Eigen::MatrixXd::Zero(n, n);
  for (auto& w : out.W) w = Eigen::MatrixXd::Zero(n, n);
  for (auto& a : out.G) a = Eigen::MatrixXd::Zero(n, n);
  for (int mu = 0; mu < n; ++mu) {
    for (int nu = 0; nu < n; ++nu) {
      const Eigen::MatrixXcd& f = out.block(mu, nu);
      const cd lam = f(kLambdaBlock, kLambdaBlock);
      out.B(mu, nu) = (-2.0 * kI * lam / g.g1).real();
      const Eigen::MatrixXcd q = f.block(kQBlock, kQBlock, 2, 2);
      for (int a = 0; a < 3; ++a) {
        out.W[static_cast<std::size_t>(a)](mu, nu) = (kI * (pauli(a + 1) * q).trace() / g.g2).real();
      }
      const Eigen::MatrixXcd v = f.block(kVBlock, kVBlock, 3, 3) + (lam / 3.0) * Eigen::MatrixXcd::Identity(3, 3);
      for (int a = 0; a < 8; ++a) {
        out.G[static_cast<std::size_t>(a)](mu, nu) = (-kI * (gell_mann(a + 1) * v).trace() / g.g3).real();
      }
    }
  }
  return out;
}

std::vector<Eigen::Matrix2cd> higgs_covariant_derivative(const SMGaugeConfig& sm, const HiggsField& higgs,
                                                         const Point& p) {
  const int n = sm.dimension();
  require_chart(higgs.H, n, 4, "H");
  require_chart(sm.B, n, n, "B");
  require_chart(sm.W, n, 3 * n, "W");
  const FieldJet hj = jet(higgs.H, p, 1);
  const auto b = sm.B.evaluate(p);
  const auto w = sm.W.evaluate(p);
  const Eigen::Matrix2cd h = quaternion(hj.value[0], hj.value[1], hj.value[2], hj.value[3]);
  std::vector<Eigen::Matrix2cd> out;
  for (int mu = 0; mu < n; ++mu) {
    const Eigen::Matrix2cd dh = quaternion(hj.d(0, mu), hj.d(1, mu), hj.d(2, mu), hj.d(3, mu));
    Eigen::Matrix2cd wm = Eigen::Matrix2cd::Zero();
    for (int a = 0; a < 3; ++a) wm += w[static_cast<std::size_t>(a * n + mu)] * pauli(a + 1);
    out.push_back(dh - (kI * 0.5 * sm.couplings.g1 * b[static_cast<std::size_t>(mu)]) * h -
                  (kI * 0.5 * sm.couplings.g2) * wm * h);
  }
  return out;
}

double ConnectionConstants::eta() const { return (chi.adjoint() * chi).trace().real(); }

ConnectionForm assemble_connection(const Vielbein& e, FrameConnection omega, SMGaugeConfig sm, HiggsField higgs,
                                   ConnectionConstants consts) {
  const int n = e.dimension();
  if (!(consts.alpha > 0.0)) throw InvalidArgument("alpha must be positive");
  if (consts.N < 1 || consts.D < 1) throw InvalidArgument("multiplicities N and D must be positive");
  if (consts.chi.rows() != consts.chi.cols() || consts.chi.rows() == 0) throw DimensionError("chi must be square");
  if (omega.dimension() == 0) omega = riemannian_frame_connection(e);
  require_chart(omega, n, n * n * n, "omega");
  if (sm.dimension() != n) throw DimensionError("gauge fields live on a different chart");
  if (higgs.dimension() != n) throw DimensionError("Higgs field lives on a different chart");
  consts.c = higgs.c;
  MatrixOneForm gauge = sm_gauge_one_form(sm);
  return {e, std::move(omega), std::move(sm), std::move(gauge), std::move(higgs), std::move(consts)};
}

ConnectionValue connection_value(const ConnectionForm& a, const Point& p) {
  const int n = a.dimension();
  ConnectionValue v;
  const auto om = a.omega.evaluate(p);
  for (int mu = 0; mu < n; ++mu) {
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = om[static_cast<std::size_t>((mu * n + i) * n + j)];
    v.omega.push_back(std::move(m));
  }
  v.gauge = a.gauge.at(p);
  for (const auto& g : v.gauge) {
    if ((g + g.adjoint()).cwiseAbs().maxCoeff() > 1e-12) throw InvalidArgument("gauge block is not anti-Hermitian");
  }
  const auto hv = a.higgs.H.evaluate(p);
  const Eigen::Matrix2cd h = quaternion(hv[0], hv[1], hv[2], hv[3]);
  v.higgs_block.setZero();
  v.higgs_block.topLeftCorner<2, 2>() = kI * a.consts.c * Eigen::Matrix2cd::Identity();
  v.higgs_block.bottomRightCorner<2, 2>() = kI * a.consts.c * Eigen::Matrix2cd::Identity();
  v.higgs_block.topRightCorner<2, 2>() = h;
  v.higgs_block.bottomLeftCorner<2, 2>() = h.adjoint();
  v.higgs_term = kron(Eigen::MatrixXcd(v.higgs_block), a.consts.chi) / a.consts.alpha;
  return v;
}

CurvatureForm curvature(const ConnectionForm& a, const Point& p) {
  const int n = a.dimension();
  CurvatureForm f;
  f.n = n;
  const MetricJet mj = metric_jet(metric_from_vielbein(a.vielbein), p, 0);
  f.metric = mj.g;
  f.inverse_metric = mj.ginv;

  const FieldJet oj = jet(a.omega, p, 1);
  auto om = [&](int mu) {
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = oj.value[static_cast<std::size_t>((mu * n + i) * n + j)];
    return m;
  };
  auto dom = [&](int l, int mu) {
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = oj.d((mu * n + i) * n + j, l);
    return m;
  };
  for (int mu = 0; mu < n; ++mu) {
    for (int nu = 0; nu < n; ++nu) {
      const Eigen::MatrixXd wm = om(mu), wn = om(nu);
      f.gravity.push_back(dom(mu, nu) - dom(nu, mu) + wm * wn - wn * wm);
    }
  }

  f.gauge = sm_field_strengths(a.sm, p);
  f.higgs_kinetic = higgs_covariant_derivative(a.sm, a.higgs, p);
  const auto hv = a.higgs.H.evaluate(p);
  f.higgs = quaternion(hv[0], hv[1], hv[2], hv[3]);
  f.higgs_norm2 = higgs_norm2(f.higgs);
  f.higgs_potential = f.higgs_norm2 - a.consts.c * a.consts.c;
  return f;
}

std::vector<Eigen::MatrixXd> riemann_two_form(const Vielbein& e, const Point& p) {
  const int n = e.dimension();
  const Eigen::MatrixXd em = e.at(p);
  require_nonsingular(em, "vielbein");
  const Eigen::MatrixXd einv = em.inverse();
  const auto c = riemann(metric_from_vielbein(e), p);
  std::vector<Eigen::MatrixXd> out;
  for (int mu = 0; mu < n; ++mu) {
    for (int nu = 0; nu < n; ++nu) {
      Eigen::MatrixXd r(n, n);
      for (int rho = 0; rho < n; ++rho)
        for (int s = 0; s < n; ++s) r(rho, s) = c.riemann(rho, s, mu, nu);
      out.push_back(em * r * einv);
    }
  }
  return out;
}

}  // namespace geodyn
