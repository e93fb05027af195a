#include "geodyn/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <queue>
#include <string>
#include <thread>

#include "geodyn/errors.hpp"

namespace geodyn {

namespace {

// Kronrod nodes on [0, 1] (odd index = Gauss node) and weights.
constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Interval {
  double a = 0.0, b = 0.0, value = 0.0, error = 0.0;
  bool operator<(const Interval& o) const { return error < o.error; }
};

Interval gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kron = kWgk[7] * fc;
  double gauss = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double s = f(c - dx) + f(c + dx);
    kron += kWgk[j] * s;
    if (j % 2 == 1) gauss += kWg[j / 2] * s;
  }
  Interval iv{a, b, kron * h, std::abs((kron - gauss) * h)};
  if (!std::isfinite(iv.value)) throw EvaluationError("integrand is not finite on the interval");
  return iv;
}

}  // namespace

QuadratureResult gauss_kronrod(const std::function<double(double)>& f, double a, double b, double rel_tol,
                               double abs_tol, int max_intervals) {
  if (!(b >= a)) throw InvalidArgument("gauss_kronrod: expected a <= b");
  QuadratureResult out;
  if (a == b) return out;
  std::priority_queue<Interval> heap;
  Interval first = gk15(f, a, b);
  heap.push(first);
  double value = first.value;
  double error = first.error;
  int intervals = 1;
  out.evaluations = 15;
  while (error > std::max(abs_tol, rel_tol * std::abs(value))) {
    if (intervals >= max_intervals) {
      throw EvaluationError("gauss_kronrod: tolerance not reached after " + std::to_string(max_intervals) +
                            " intervals (error estimate " + std::to_string(error) + ")");
    }
    const Interval worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const Interval l = gk15(f, worst.a, mid);
    const Interval r = gk15(f, mid, worst.b);
    heap.push(l);
    heap.push(r);
    out.evaluations += 30;
    ++intervals;
    value += l.value + r.value - worst.value;
    error += l.error + r.error - worst.error;
  }
  // Final sums in interval order so the result does not depend on heap layout.
  std::vector<Interval> all;
  all.reserve(heap.size());
  while (!heap.empty()) {
    all.push_back(heap.top());
    heap.pop();
  }
  std::sort(all.begin(), all.end(), [](const Interval& x, const Interval& y) { return x.a < y.a; });
  value = 0.0;
  error = 0.0;
  for (const auto& iv : all) {
    value += iv.value;
    error += iv.error;
  }
  out.value = value;
  out.error = error;
  return out;
}

QuadratureResult integrate_half_line(const std::function<double(double)>& f, double a, double rel_tol,
                                     double abs_tol) {
  auto g = [&](double t) {
    const double s = 1.0 - t;
    return f(a + t / s) / (s * s);
  };
  try {
    return gauss_kronrod(g, 0.0, 1.0, rel_tol, abs_tol, 2000);
  } catch (const EvaluationError& e) {
    throw EvaluationError(std::string("divergent or non-integrable tail: ") + e.what());
  }
}

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

int thread_count() {
  if (const char* env = std::getenv("GEODYN_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && n > 0) return static_cast<int>(std::min<long>(n, 256));
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(thread_count()), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::mutex mutex;
  std::size_t failed_index = std::numeric_limits<std::size_t>::max();
  std::exception_ptr failure;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mutex);
          if (i < failed_index) {
            failed_index = i;
            failure = std::current_exception();
          }
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

bool Box::is_periodic(int axis) const {
  return !periodic.empty() && periodic[static_cast<std::size_t>(axis)];
}

double Box::volume() const { return (hi - lo).prod(); }

Box Box::unit(int n) { return {Eigen::VectorXd::Zero(n), Eigen::VectorXd::Ones(n), {}}; }

GridIntegral integrate_box(const Box& box, int n, int components, const GridIntegrand& f) {
  const int d = box.dimension();
  if (d < 1 || box.hi.size() != d) throw InvalidArgument("integrate_box: box bounds have different sizes");
  if (!box.periodic.empty() && static_cast<int>(box.periodic.size()) != d) {
    throw InvalidArgument("integrate_box: periodic flags do not match the box dimension");
  }
  for (int k = 0; k < d; ++k) {
    if (!(box.hi(k) > box.lo(k))) throw InvalidArgument("integrate_box: box must have hi > lo on every axis");
  }
  if (n < 2) throw InvalidArgument("integrate_box: grid resolution must be at least 2");
  if (components < 1) throw InvalidArgument("integrate_box: need at least one component");

  // Fine-grid nodes and trapezoid weights per axis; coarse nodes are the even ones.
  std::vector<int> m(static_cast<std::size_t>(d));
  std::vector<std::vector<double>> node(static_cast<std::size_t>(d)), wf(static_cast<std::size_t>(d)),
      wc(static_cast<std::size_t>(d));
  std::size_t total = 1;
  for (int k = 0; k < d; ++k) {
    const auto ks = static_cast<std::size_t>(k);
    const bool per = box.is_periodic(k);
    const int mk = per ? 2 * n : 2 * n - 1;
    const double len = box.hi(k) - box.lo(k);
    const double h = per ? len / mk : len / (mk - 1);
    m[ks] = mk;
    for (int i = 0; i < mk; ++i) {
      node[ks].push_back(box.lo(k) + i * h);
      const bool end = !per && (i == 0 || i == mk - 1);
      wf[ks].push_back(end ? 0.5 * h : h);
      wc[ks].push_back(i % 2 == 1 ? 0.0 : (end ? h : 2.0 * h));
    }
    total *= static_cast<std::size_t>(mk);
  }

  const auto kc = static_cast<std::size_t>(components);
  std::vector<double> values(total * kc, 0.0);
  parallel_for(total, [&](std::size_t flat) {
    Eigen::VectorXd x(d);
    std::size_t r = flat;
    for (int k = d - 1; k >= 0; --k) {
      const auto ks = static_cast<std::size_t>(k);
      x(k) = node[ks][r % static_cast<std::size_t>(m[ks])];
      r /= static_cast<std::size_t>(m[ks]);
    }
    f(x, std::span<double>(values.data() + flat * kc, kc));
  });

  std::vector<double> weight_fine(total), weight_coarse(total);
  for (std::size_t flat = 0; flat < total; ++flat) {
    double a = 1.0, b = 1.0;
    std::size_t r = flat;
    for (int k = d - 1; k >= 0; --k) {
      const auto ks = static_cast<std::size_t>(k);
      const std::size_t i = r % static_cast<std::size_t>(m[ks]);
      r /= static_cast<std::size_t>(m[ks]);
      a *= wf[ks][i];
      b *= wc[ks][i];
    }
    weight_fine[flat] = a;
    weight_coarse[flat] = b;
  }

  GridIntegral out;
  out.n = n;
  out.points = total;
  std::vector<double> fine(total), coarse(total), magnitude(total);
  for (std::size_t c = 0; c < kc; ++c) {
    for (std::size_t flat = 0; flat < total; ++flat) {
      const double v = values[flat * kc + c];
      if (!std::isfinite(v)) throw EvaluationError("integrand is not finite at a grid point");
      fine[flat] = weight_fine[flat] * v;
      coarse[flat] = weight_coarse[flat] * v;
      magnitude[flat] = std::abs(fine[flat]);
    }
    const double vf = pairwise_sum(fine);
    const double vc = pairwise_sum(coarse);
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * pairwise_sum(magnitude);
    out.value.push_back(vf);
    out.coarse.push_back(vc);
    out.extrapolated.push_back(vf + (vf - vc) / 3.0);
    out.error.push_back(std::abs(vf - vc) / 3.0 + floor);
  }
  return out;
}

}  // namespace geodyn
