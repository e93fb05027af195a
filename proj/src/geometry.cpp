#include "geodyn/geometry.hpp"

#include <cmath>
#include <type_traits>

#include "geodyn/clifford.hpp"

namespace geodyn {

namespace {

struct VielbeinMetric {
  ChartField frame;
  std::vector<int> eta;

  template <typename S>
  void operator()(std::span<const S> x, std::span<S> out) const {
    const int n = frame.dimension();
    std::vector<S> e(static_cast<std::size_t>(n * n));
    if constexpr (std::is_same_v<S, double>) {
      frame.evaluate(x, e);
    } else {
      frame.evaluate_dual(x, e);
    }
    for (int mu = 0; mu < n; ++mu) {
      for (int nu = mu; nu < n; ++nu) {
        S sum(0.0);
        for (int a = 0; a < n; ++a) {
          sum += static_cast<double>(eta[static_cast<std::size_t>(a)]) *
                 e[static_cast<std::size_t>(a * n + mu)] * e[static_cast<std::size_t>(a * n + nu)];
        }
        out[static_cast<std::size_t>(mu * n + nu)] = sum;
        out[static_cast<std::size_t>(nu * n + mu)] = sum;
      }
    }
  }
};

Eigen::MatrixXd component_matrix(const std::vector<double>& v, int n, std::size_t offset = 0,
                                 std::size_t stride = 1) {
  Eigen::MatrixXd m(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      m(a, b) = v[offset + stride * static_cast<std::size_t>(a * n + b)];
  return m;
}

RealTensor gamma_tensor(int n) { return RealTensor({up(n), down(n), down(n)}); }

}  // namespace

Eigen::MatrixXd Vielbein::at(const Point& p) const {
  return component_matrix(frame.evaluate(p), dimension());
}

void require_nonsingular(const Eigen::MatrixXd& m, const char* what) {
  const auto n = static_cast<double>(m.rows());
  const double scale = m.rowwise().norm().maxCoeff();
  const double det = m.fullPivLu().determinant();
  if (!std::isfinite(det) || !(std::abs(det) >= 1e-13 * std::pow(scale, n)) || scale == 0.0) {
    throw SingularMetricError(std::string(what) + ": singular matrix");
  }
}

MetricJet metric_jet(const GeneralizedMetric& g, const Point& p, int order) {
  const int n = g.dimension();
  const FieldJet fj = jet(g.gamma, p, order);
  MetricJet j;
  j.n = n;
  j.g = component_matrix(fj.value, n);
  j.g = 0.5 * (j.g + j.g.transpose()).eval();
  require_nonsingular(j.g, "metric");
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(j.g);
  j.det = lu.determinant();
  j.ginv = lu.inverse();
  j.ginv = 0.5 * (j.ginv + j.ginv.transpose()).eval();
  const auto un = static_cast<std::size_t>(n);
  if (order >= 1) {
    j.dg.resize(un);
    for (int l = 0; l < n; ++l) {
      Eigen::MatrixXd m = component_matrix(fj.first, n, static_cast<std::size_t>(l), un);
      j.dg[static_cast<std::size_t>(l)] = 0.5 * (m + m.transpose());
    }
  }
  if (order >= 2) {
    j.ddg.resize(un * un);
    for (int l = 0; l < n; ++l) {
      for (int m = 0; m < n; ++m) {
        Eigen::MatrixXd h = component_matrix(fj.second, n, static_cast<std::size_t>(l * n + m), un * un);
        j.ddg[static_cast<std::size_t>(l * n + m)] = 0.5 * (h + h.transpose());
      }
    }
  }
  return j;
}

GeneralizedMetric metric_from_vielbein(const Vielbein& e) {
  const int n = e.dimension();
  if (e.eta.dimension() != n) throw DimensionError("vielbein and signature dimensions differ");
  const auto& slots = e.frame.shape();
  if (slots.size() != 2 || slots[0].extent != n || slots[1].extent != n) {
    throw DimensionError("vielbein must be an n x n field");
  }
  VielbeinMetric f{e.frame, e.eta.signs()};
  if (e.frame.has_dual()) {
    GeneralizedMetric g{ChartField::generic(n, {down(n), down(n)}, f), e.eta};
    return {g.gamma.with_mode(e.frame.mode(), e.frame.fd_step()), e.eta};
  }
  return {ChartField::real_only(n, {down(n), down(n)},
                                [f](std::span<const double> x, std::span<double> out) { f(x, out); })
              .with_mode(DerivativeMode::FiniteDifference, e.frame.fd_step()),
          e.eta};
}

RealTensor christoffel_from_jet(const MetricJet& j) {
  const int n = j.n;
  RealTensor gam = gamma_tensor(n);
  for (int r = 0; r < n; ++r) {
    for (int a = 0; a < n; ++a) {
      for (int b = a; b < n; ++b) {
        double sum = 0.0;
        for (int l = 0; l < n; ++l) {
          const auto ul = static_cast<std::size_t>(l);
          const double first_kind = j.dg[static_cast<std::size_t>(b)](l, a) +
                                    j.dg[static_cast<std::size_t>(a)](l, b) - j.dg[ul](a, b);
          sum += j.ginv(r, l) * first_kind;
        }
        gam(r, a, b) = 0.5 * sum;
        gam(r, b, a) = 0.5 * sum;
      }
    }
  }
  return gam;
}

RealTensor christoffel_derivative_from_jet(const MetricJet& j) {
  const int n = j.n;
  RealTensor d({down(n), up(n), down(n), down(n)});
  for (int nu = 0; nu < n; ++nu) {
    const Eigen::MatrixXd dginv = -j.ginv * j.dg[static_cast<std::size_t>(nu)] * j.ginv;
    for (int r = 0; r < n; ++r) {
      for (int a = 0; a < n; ++a) {
        for (int b = a; b < n; ++b) {
          double sum = 0.0;
          for (int l = 0; l < n; ++l) {
            const double first_kind = j.dg[static_cast<std::size_t>(b)](l, a) +
                                      j.dg[static_cast<std::size_t>(a)](l, b) -
                                      j.dg[static_cast<std::size_t>(l)](a, b);
            const double d_first_kind = j.ddg[static_cast<std::size_t>(nu * n + b)](l, a) +
                                        j.ddg[static_cast<std::size_t>(nu * n + a)](l, b) -
                                        j.ddg[static_cast<std::size_t>(nu * n + l)](a, b);
            sum += dginv(r, l) * first_kind + j.ginv(r, l) * d_first_kind;
          }
          d(nu, r, a, b) = 0.5 * sum;
          d(nu, r, b, a) = 0.5 * sum;
        }
      }
    }
  }
  return d;
}

RealTensor christoffel(const GeneralizedMetric& g, const Point& p) {
  return christoffel_from_jet(metric_jet(g, p, 1));
}

CurvatureTensors curvature_from_jet(const MetricJet& j) {
  const int n = j.n;
  const RealTensor gam = christoffel_from_jet(j);
  const RealTensor dgam = christoffel_derivative_from_jet(j);
  CurvatureTensors c;
  c.riemann = RealTensor({up(n), down(n), down(n), down(n)});
  for (int r = 0; r < n; ++r) {
    for (int m = 0; m < n; ++m) {
      for (int nu = 0; nu < n; ++nu) {
        for (int l = nu + 1; l < n; ++l) {
          double v = dgam(nu, r, l, m) - dgam(l, r, nu, m);
          for (int s = 0; s < n; ++s) v += gam(r, nu, s) * gam(s, l, m) - gam(r, l, s) * gam(s, nu, m);
          c.riemann(r, m, nu, l) = v;
          c.riemann(r, m, l, nu) = -v;
        }
      }
    }
  }
  c.ricci = RealTensor({down(n), down(n)});
  for (int m = 0; m < n; ++m) {
    for (int l = 0; l < n; ++l) {
      double v = 0.0;
      for (int r = 0; r < n; ++r) v += c.riemann(r, m, r, l);
      c.ricci(m, l) = v;
    }
  }
  c.scalar = 0.0;
  for (int m = 0; m < n; ++m)
    for (int l = 0; l < n; ++l) c.scalar += j.ginv(m, l) * c.ricci(m, l);
  return c;
}

CurvatureTensors riemann(const GeneralizedMetric& g, const Point& p) {
  return curvature_from_jet(metric_jet(g, p, 2));
}

RealTensor lower_riemann(const RealTensor& riemann, const Eigen::MatrixXd& g) {
  const int n = riemann.extent(0);
  RealTensor out({down(n), down(n), down(n), down(n)});
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          double v = 0.0;
          for (int r = 0; r < n; ++r) v += g(a, r) * riemann(r, b, c, d);
          out(a, b, c, d) = v;
        }
  return out;
}

double kretschmann(const RealTensor& rl, const Eigen::MatrixXd& ginv) {
  const int n = rl.extent(0);
  // Raise all four indices, then contract.
  RealTensor up4 = rl;
  for (int slot = 0; slot < 4; ++slot) {
    RealTensor next({down(n), down(n), down(n), down(n)});
    const std::size_t stride = up4.stride(slot);
    for (std::size_t flat = 0; flat < next.size(); ++flat) {
      const int a = static_cast<int>((flat / stride) % static_cast<std::size_t>(n));
      const std::size_t base = flat - static_cast<std::size_t>(a) * stride;
      double v = 0.0;
      for (int b = 0; b < n; ++b) v += ginv(a, b) * up4.data()[base + static_cast<std::size_t>(b) * stride];
      next.data()[flat] = v;
    }
    up4 = std::move(next);
  }
  double k = 0.0;
  for (std::size_t i = 0; i < rl.size(); ++i) k += rl.data()[i] * up4.data()[i];
  return k;
}

RealTensor ricci_simplified(const GeneralizedMetric& g, const Point& p, double tol) {
  const MetricJet j = metric_jet(g, p, 2);
  const int n = j.n;
  const double vol = std::sqrt(std::abs(j.det));
  if (std::abs(vol - 1.0) > tol) {
    throw CoordinateConditionError("coordinate condition violated: sqrt|gamma| = " +
                                   std::to_string(vol) + " != 1");
  }
  const RealTensor gam = christoffel_from_jet(j);
  const RealTensor dgam = christoffel_derivative_from_jet(j);
  for (int a = 0; a < n; ++a) {
    double trace = 0.0;
    for (int b = 0; b < n; ++b) trace += gam(b, b, a);
    if (std::abs(trace) > tol) {
      throw CoordinateConditionError("coordinate condition violated: {b over b a} != 0");
    }
    for (int l = 0; l < n; ++l) {
      double dtrace = 0.0;
      for (int b = 0; b < n; ++b) dtrace += dgam(l, b, b, a);
      if (std::abs(dtrace) > tol) {
        throw CoordinateConditionError("coordinate condition violated near point: d{b over b a} != 0");
      }
    }
  }
  RealTensor ric({down(n), down(n)});
  for (int m = 0; m < n; ++m) {
    for (int nu = 0; nu < n; ++nu) {
      double v = 0.0;
      for (int a = 0; a < n; ++a) {
        v += dgam(a, a, m, nu);
        for (int b = 0; b < n; ++b) v -= gam(b, m, a) * gam(a, nu, b);
      }
      ric(m, nu) = v;
    }
  }
  return ric;
}

VolumeElement volume_element(const Eigen::MatrixXd& g) {
  require_nonsingular(g, "volume element");
  const double det = g.partialPivLu().determinant();
  return {std::sqrt(std::abs(det)), det < 0.0};
}

VolumeElement volume_element(const GeneralizedMetric& g, const Point& p) {
  return volume_element(metric_jet(g, p, 0).g);
}

SpinConnection spin_connection(const Vielbein& e, const Point& p) {
  const int n = e.dimension();
  const FieldJet ej = jet(e.frame, p, 1);
  const Eigen::MatrixXd em = component_matrix(ej.value, n);
  require_nonsingular(em, "vielbein");
  const Eigen::MatrixXd einv = em.inverse();  // einv(mu, a) = E^mu_a
  const RealTensor gam = christoffel(metric_from_vielbein(e), p);

  SpinConnection s;
  s.mixed = RealTensor({down(n), up(n, IndexKind::Frame), down(n, IndexKind::Frame)});
  s.omega_up = RealTensor({up(n, IndexKind::Frame), up(n, IndexKind::Frame), down(n)});
  for (int mu = 0; mu < n; ++mu) {
    const Eigen::MatrixXd de = component_matrix(ej.first, n, static_cast<std::size_t>(mu),
                                                static_cast<std::size_t>(n));
    const Eigen::MatrixXd deinv = -einv * de * einv;
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        double v = 0.0;
        for (int nu = 0; nu < n; ++nu) {
          v += em(a, nu) * deinv(nu, b);
          for (int l = 0; l < n; ++l) v += em(a, nu) * einv(l, b) * gam(nu, l, mu);
        }
        s.mixed(mu, a, b) = v;
        s.omega_up(a, b, mu) = v * e.eta[b];
      }
    }
  }
  if (n % 2 == 0) {
    const auto sigma = sigma_matrices(e.eta);
    const auto dim = sigma[0].rows();
    for (int mu = 0; mu < n; ++mu) {
      Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(dim, dim);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) w += s.omega_up(a, b, mu) * sigma[static_cast<std::size_t>(a * n + b)];
      s.spinor.push_back(std::move(w));
    }
  }
  return s;
}

FrameConnection riemannian_frame_connection(const Vielbein& e) {
  const int n = e.dimension();
  return ChartField::real_only(
      n, {down(n), up(n, IndexKind::Frame), down(n, IndexKind::Frame)},
      [e, n](std::span<const double> x, std::span<double> out) {
        Point p(n);
        for (int k = 0; k < n; ++k) p[k] = x[static_cast<std::size_t>(k)];
        const SpinConnection s = spin_connection(e, p);
        std::copy(s.mixed.data().begin(), s.mixed.data().end(), out.begin());
      });
}

RealTensor compatibility_residual(const Vielbein& e, const FrameConnection& a, const Point& p) {
  const int n = e.dimension();
  const FieldJet ej = jet(e.frame, p, 1);
  const RealTensor gam = christoffel(metric_from_vielbein(e), p);
  const std::vector<double> av = a.evaluate(p);
  auto conn = [&](int nu, int i, int j) { return av[static_cast<std::size_t>((nu * n + i) * n + j)]; };
  auto frame = [&](int i, int mu) { return ej.value[static_cast<std::size_t>(i * n + mu)]; };

  RealTensor res({up(n, IndexKind::Frame), down(n), down(n)});
  for (int i = 0; i < n; ++i) {
    for (int mu = 0; mu < n; ++mu) {
      for (int nu = 0; nu < n; ++nu) {
        double v = ej.d(i * n + mu, nu);
        for (int l = 0; l < n; ++l) v -= gam(l, nu, mu) * frame(i, l);
        for (int b = 0; b < n; ++b) v += conn(nu, i, b) * frame(b, mu);
        res(i, mu, nu) = v;
      }
    }
  }
  return res;
}

std::vector<Eigen::MatrixXd> transport_frame_along_line(const FrameConnection& a,
                                                        const Eigen::MatrixXd& e0,
                                                        const Point& origin,
                                                        const Eigen::VectorXd& direction,
                                                        double length, int steps) {
  const int n = static_cast<int>(e0.rows());
  if (steps < 1) throw InvalidArgument("steps must be positive");
  auto generator = [&](double t) {
    const std::vector<double> av = a.evaluate(Point(origin + t * direction));
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int nu = 0; nu < n; ++nu)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) += direction[nu] * av[static_cast<std::size_t>((nu * n + i) * n + j)];
    return m;
  };
  const double h = length / steps;
  std::vector<Eigen::MatrixXd> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  Eigen::MatrixXd e = e0;
  out.push_back(e);
  for (int s = 0; s < steps; ++s) {
    const double t = s * h;
    const Eigen::MatrixXd g0 = generator(t);
    const Eigen::MatrixXd gh = generator(t + 0.5 * h);
    const Eigen::MatrixXd g1 = generator(t + h);
    const Eigen::MatrixXd k1 = -g0 * e;
    const Eigen::MatrixXd k2 = -gh * (e + 0.5 * h * k1);
    const Eigen::MatrixXd k3 = -gh * (e + 0.5 * h * k2);
    const Eigen::MatrixXd k4 = -g1 * (e + h * k3);
    e += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    out.push_back(e);
  }
  return out;
}

DiracMatrices dirac_matrices(const Vielbein& e, const Point& p) {
  const int n = e.dimension();
  if (n % 2 != 0) throw InvalidArgument("Dirac matrices need an even chart dimension");
  const Eigen::MatrixXd em = e.at(p);
  require_nonsingular(em, "vielbein");
  const Eigen::MatrixXd einv = em.inverse();
  const Eigen::MatrixXd eta = e.eta.matrix();
  const Eigen::MatrixXd g = em.transpose() * eta * em;
  const Eigen::MatrixXd ginv = einv * eta * einv.transpose();
  const auto flat = flat_gammas(e.eta);
  const auto dim = flat[0].rows();

  DiracMatrices out;
  for (int mu = 0; mu < n; ++mu) {
    Eigen::MatrixXcd gm = Eigen::MatrixXcd::Zero(dim, dim);
    for (int a = 0; a < n; ++a) gm += einv(mu, a) * flat[static_cast<std::size_t>(a)];
    out.gammas.push_back(std::move(gm));
  }
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(dim, dim);
  for (int mu = 0; mu < n; ++mu) {
    for (int nu = mu; nu < n; ++nu) {
      const auto& a = out.gammas[static_cast<std::size_t>(mu)];
      const auto& b = out.gammas[static_cast<std::size_t>(nu)];
      const Eigen::MatrixXcd anti = a * b + b * a;
      out.anticommutator_residual =
          std::max(out.anticommutator_residual, (anti - 2.0 * ginv(mu, nu) * id).cwiseAbs().maxCoeff());
      out.literal_residual = std::max(out.literal_residual, (anti - g(mu, nu) * id).cwiseAbs().maxCoeff());
    }
  }
  return out;
}

}  // namespace geodyn
