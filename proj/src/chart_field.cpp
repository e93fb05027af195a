#include "geodyn/chart_field.hpp"

#include <cmath>
#include <string>

namespace geodyn {

Signature::Signature(std::vector<int> signs) : signs_(std::move(signs)) {
  if (signs_.empty() || static_cast<int>(signs_.size()) > kMaxDimension) {
    throw DimensionError("signature dimension must be in 1.." + std::to_string(kMaxDimension));
  }
  for (int s : signs_) {
    if (s != 1 && s != -1) throw InvalidArgument("signature entries must be +1 or -1");
  }
}

Signature Signature::euclidean(int n) { return Signature(std::vector<int>(static_cast<std::size_t>(n), 1)); }

Signature Signature::lorentzian(int n) {
  std::vector<int> s(static_cast<std::size_t>(n), 1);
  s[0] = -1;
  return Signature(std::move(s));
}

bool Signature::is_euclidean() const {
  for (int s : signs_)
    if (s < 0) return false;
  return true;
}

Eigen::MatrixXd Signature::matrix() const {
  const int n = dimension();
  Eigen::MatrixXd eta = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < n; ++a) eta(a, a) = signs_[static_cast<std::size_t>(a)];
  return eta;
}

ChartField::ChartField(int dimension, std::vector<IndexSlot> shape)
    : dimension_(dimension), shape_(std::move(shape)) {
  if (dimension_ < 1 || dimension_ > kMaxDimension) {
    throw DimensionError("chart dimension must be in 1.." + std::to_string(kMaxDimension));
  }
  components_ = 1;
  for (const auto& s : shape_) components_ *= s.extent;
}

ChartField ChartField::real_only(int dimension, std::vector<IndexSlot> shape, RealEval f) {
  ChartField field(dimension, std::move(shape));
  field.real_ = std::move(f);
  field.mode_ = DerivativeMode::FiniteDifference;
  return field;
}

ChartField ChartField::with_mode(DerivativeMode mode, double fd_step) const {
  if (mode == DerivativeMode::Dual && !dual_) {
    throw InvalidArgument("field has no dual-number evaluator");
  }
  if (!(fd_step > 0.0)) throw InvalidArgument("finite-difference step must be positive");
  ChartField copy = *this;
  copy.mode_ = mode;
  copy.fd_step_ = fd_step;
  return copy;
}

void ChartField::evaluate(std::span<const double> x, std::span<double> out) const {
  real_(x, out);
}

std::vector<double> ChartField::evaluate(const Point& p) const {
  if (p.size() != dimension_) throw DimensionError("point dimension does not match chart");
  std::vector<double> out(static_cast<std::size_t>(components_));
  real_(std::span<const double>(p.data(), static_cast<std::size_t>(p.size())), out);
  for (double v : out) {
    if (!std::isfinite(v)) throw EvaluationError("non-finite field value");
  }
  return out;
}

RealTensor ChartField::value(const Point& p) const { return RealTensor(shape_, evaluate(p)); }

void ChartField::evaluate_dual(std::span<const Dual2> x, std::span<Dual2> out) const {
  if (!dual_) throw InvalidArgument("field has no dual-number evaluator");
  dual_(x, out);
}

double fd_step_for(double x, double rel_step) { return rel_step * std::max(1.0, std::abs(x)); }

namespace {

void check_finite(const std::vector<double>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) throw EvaluationError("non-finite evaluation near point");
  }
}

FieldJet empty_jet(const ChartField& f, int order) {
  FieldJet j;
  j.n = f.dimension();
  j.components = f.components();
  j.order = order;
  const auto c = static_cast<std::size_t>(j.components);
  const auto n = static_cast<std::size_t>(j.n);
  j.value.assign(c, 0.0);
  if (order >= 1) j.first.assign(c * n, 0.0);
  if (order >= 2) j.second.assign(c * n * n, 0.0);
  return j;
}

}  // namespace

FieldJet jet_dual(const ChartField& f, const Point& p, int order) {
  if (order < 0 || order > 2) throw InvalidArgument("derivative order must be 0, 1 or 2");
  if (p.size() != f.dimension()) throw DimensionError("point dimension does not match chart");
  FieldJet j = empty_jet(f, order);
  const int n = j.n;
  const int c = j.components;
  if (order == 0) {
    j.value = f.evaluate(p);
    return j;
  }
  std::vector<Dual2> x(static_cast<std::size_t>(n));
  std::vector<Dual2> out(static_cast<std::size_t>(c));
  auto seed = [&](int mu, int nu) {
    for (int k = 0; k < n; ++k) {
      x[static_cast<std::size_t>(k)] =
          Dual2(p[k], k == mu ? 1.0 : 0.0, k == nu ? 1.0 : 0.0, 0.0);
    }
    f.evaluate_dual(x, out);
  };
  if (order == 1) {
    for (int mu = 0; mu < n; ++mu) {
      seed(mu, -1);
      for (int k = 0; k < c; ++k) {
        if (mu == 0) j.value[static_cast<std::size_t>(k)] = out[static_cast<std::size_t>(k)].re;
        j.first[static_cast<std::size_t>(k * n + mu)] = out[static_cast<std::size_t>(k)].e1;
      }
    }
  } else {
    for (int mu = 0; mu < n; ++mu) {
      for (int nu = mu; nu < n; ++nu) {
        seed(mu, nu);
        for (int k = 0; k < c; ++k) {
          const Dual2& o = out[static_cast<std::size_t>(k)];
          if (mu == 0 && nu == 0) j.value[static_cast<std::size_t>(k)] = o.re;
          if (nu == mu) j.first[static_cast<std::size_t>(k * n + mu)] = o.e1;
          j.second[static_cast<std::size_t>((k * n + mu) * n + nu)] = o.e12;
          j.second[static_cast<std::size_t>((k * n + nu) * n + mu)] = o.e12;
        }
      }
    }
  }
  check_finite(j.value);
  check_finite(j.first);
  check_finite(j.second);
  return j;
}

FieldJet jet_finite_difference(const ChartField& f, const Point& p, int order, double rel_step) {
  if (order < 0 || order > 2) throw InvalidArgument("derivative order must be 0, 1 or 2");
  FieldJet j = empty_jet(f, order);
  const int n = j.n;
  const int c = j.components;
  j.value = f.evaluate(p);
  if (order == 0) return j;

  std::vector<double> h(static_cast<std::size_t>(n));
  for (int mu = 0; mu < n; ++mu) h[static_cast<std::size_t>(mu)] = fd_step_for(p[mu], rel_step);

  auto eval_shift = [&](int mu, double sm, int nu, double sn) {
    Point q = p;
    if (mu >= 0) q[mu] += sm * h[static_cast<std::size_t>(mu)];
    if (nu >= 0) q[nu] += sn * h[static_cast<std::size_t>(nu)];
    return f.evaluate(q);
  };

  for (int mu = 0; mu < n; ++mu) {
    const double hm = h[static_cast<std::size_t>(mu)];
    const auto plus = eval_shift(mu, 1.0, -1, 0.0);
    const auto minus = eval_shift(mu, -1.0, -1, 0.0);
    for (int k = 0; k < c; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      j.first[static_cast<std::size_t>(k * n + mu)] = (plus[kk] - minus[kk]) / (2.0 * hm);
      if (order == 2) {
        j.second[static_cast<std::size_t>((k * n + mu) * n + mu)] =
            (plus[kk] - 2.0 * j.value[kk] + minus[kk]) / (hm * hm);
      }
    }
  }
  if (order == 2) {
    for (int mu = 0; mu < n; ++mu) {
      for (int nu = mu + 1; nu < n; ++nu) {
        const auto pp = eval_shift(mu, 1.0, nu, 1.0);
        const auto pm = eval_shift(mu, 1.0, nu, -1.0);
        const auto mp = eval_shift(mu, -1.0, nu, 1.0);
        const auto mm = eval_shift(mu, -1.0, nu, -1.0);
        const double denom = 4.0 * h[static_cast<std::size_t>(mu)] * h[static_cast<std::size_t>(nu)];
        for (int k = 0; k < c; ++k) {
          const auto kk = static_cast<std::size_t>(k);
          const double v = (pp[kk] - pm[kk] - mp[kk] + mm[kk]) / denom;
          j.second[static_cast<std::size_t>((k * n + mu) * n + nu)] = v;
          j.second[static_cast<std::size_t>((k * n + nu) * n + mu)] = v;
        }
      }
    }
  }
  return j;
}

FieldJet jet(const ChartField& f, const Point& p, int order) {
  if (f.mode() == DerivativeMode::Dual) return jet_dual(f, p, order);
  return jet_finite_difference(f, p, order, f.fd_step());
}

RealTensor differentiate(const ChartField& f, const Point& p, int order) {
  if (order != 1 && order != 2) throw InvalidArgument("derivative order must be 1 or 2");
  const FieldJet j = jet(f, p, order);
  std::vector<IndexSlot> slots = f.shape();
  for (int k = 0; k < order; ++k) slots.push_back(down(f.dimension()));
  return RealTensor(std::move(slots), order == 1 ? j.first : j.second);
}

}  // namespace geodyn
