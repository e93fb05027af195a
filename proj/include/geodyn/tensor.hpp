#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "geodyn/errors.hpp"

namespace geodyn {

/// Largest supported chart dimension.
inline constexpr int kMaxDimension = 8;

enum class Variance { Contravariant, Covariant };

/// Coordinate (Greek) or frame/internal (Latin) index.
enum class IndexKind { Coordinate, Frame };

struct IndexSlot {
  int extent = 0;
  Variance variance = Variance::Covariant;
  IndexKind kind = IndexKind::Coordinate;

  friend bool operator==(const IndexSlot&, const IndexSlot&) = default;
};

inline IndexSlot up(int n, IndexKind kind = IndexKind::Coordinate) {
  return {n, Variance::Contravariant, kind};
}
inline IndexSlot down(int n, IndexKind kind = IndexKind::Coordinate) {
  return {n, Variance::Covariant, kind};
}

/// Dense multi-index value at a point, stored row-major.
template <typename Scalar>
class TensorValue {
 public:
  TensorValue() = default;

  explicit TensorValue(std::vector<IndexSlot> slots, Scalar fill = Scalar(0))
      : slots_(std::move(slots)) {
    for (const auto& s : slots_) {
      if (s.extent < 1) throw DimensionError("tensor extent must be positive");
    }
    data_.assign(size_from(slots_), fill);
    compute_strides();
  }

  TensorValue(std::vector<IndexSlot> slots, std::vector<Scalar> data)
      : slots_(std::move(slots)), data_(std::move(data)) {
    if (data_.size() != size_from(slots_)) {
      throw DimensionError("tensor data length does not match extents");
    }
    compute_strides();
  }

  static TensorValue scalar(Scalar v) { return TensorValue({}, std::vector<Scalar>{v}); }

  int rank() const { return static_cast<int>(slots_.size()); }
  const std::vector<IndexSlot>& slots() const { return slots_; }
  const IndexSlot& slot(int i) const { return slots_.at(static_cast<std::size_t>(i)); }
  int extent(int i) const { return slot(i).extent; }
  std::size_t size() const { return data_.size(); }

  std::vector<Scalar>& data() { return data_; }
  const std::vector<Scalar>& data() const { return data_; }

  template <typename... I>
  Scalar& operator()(I... idx) {
    return data_[offset({static_cast<int>(idx)...})];
  }
  template <typename... I>
  const Scalar& operator()(I... idx) const {
    return data_[offset({static_cast<int>(idx)...})];
  }

  Scalar& at(std::span<const int> idx) { return data_[offset(idx)]; }
  const Scalar& at(std::span<const int> idx) const { return data_[offset(idx)]; }

  std::size_t stride(int i) const { return strides_.at(static_cast<std::size_t>(i)); }

  /// Multi-index of a flat offset.
  std::vector<int> unravel(std::size_t flat) const {
    std::vector<int> idx(slots_.size());
    for (std::size_t k = 0; k < slots_.size(); ++k) {
      idx[k] = static_cast<int>(flat / strides_[k]);
      flat %= strides_[k];
    }
    return idx;
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& v : data_) m = std::max(m, static_cast<double>(std::abs(v)));
    return m;
  }

  TensorValue& operator+=(const TensorValue& o) {
    check_same_extents(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  TensorValue& operator-=(const TensorValue& o) {
    check_same_extents(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  TensorValue& operator*=(Scalar s) {
    for (auto& v : data_) v *= s;
    return *this;
  }
  friend TensorValue operator+(TensorValue a, const TensorValue& b) { return a += b; }
  friend TensorValue operator-(TensorValue a, const TensorValue& b) { return a -= b; }
  friend TensorValue operator*(TensorValue a, Scalar s) { return a *= s; }
  friend TensorValue operator*(Scalar s, TensorValue a) { return a *= s; }

 private:
  static std::size_t size_from(const std::vector<IndexSlot>& slots) {
    std::size_t n = 1;
    for (const auto& s : slots) n *= static_cast<std::size_t>(s.extent);
    return n;
  }

  void compute_strides() {
    strides_.assign(slots_.size(), 1);
    for (int k = static_cast<int>(slots_.size()) - 2; k >= 0; --k) {
      strides_[k] = strides_[k + 1] * static_cast<std::size_t>(slots_[k + 1].extent);
    }
  }

  std::size_t offset(std::span<const int> idx) const {
    if (idx.size() != slots_.size()) throw DimensionError("wrong number of indices");
    std::size_t off = 0;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (idx[k] < 0 || idx[k] >= slots_[k].extent) throw DimensionError("index out of range");
      off += strides_[k] * static_cast<std::size_t>(idx[k]);
    }
    return off;
  }
  std::size_t offset(std::initializer_list<int> idx) const {
    return offset(std::span<const int>(idx.begin(), idx.size()));
  }

  void check_same_extents(const TensorValue& o) const {
    if (o.slots_.size() != slots_.size()) throw DimensionError("rank mismatch");
    for (std::size_t k = 0; k < slots_.size(); ++k) {
      if (o.slots_[k].extent != slots_[k].extent) throw DimensionError("extent mismatch");
    }
  }

  std::vector<IndexSlot> slots_;
  std::vector<Scalar> data_;
  std::vector<std::size_t> strides_;
};

using RealTensor = TensorValue<double>;
using ComplexTensor = TensorValue<std::complex<double>>;

enum class TraceMode { VarianceChecked, MetricFree };

/// Sums over the paired indices i and j. The pair must be one up and one down
/// unless `mode` is MetricFree (frame traces against a Euclidean frame metric).
template <typename Scalar>
TensorValue<Scalar> contract(const TensorValue<Scalar>& t, int i, int j,
                             TraceMode mode = TraceMode::VarianceChecked) {
  if (i < 0 || j < 0 || i >= t.rank() || j >= t.rank() || i == j) {
    throw DimensionError("contract: index out of range");
  }
  if (t.extent(i) != t.extent(j)) throw DimensionError("contract: dimension mismatch");
  if (mode == TraceMode::VarianceChecked && t.slot(i).variance == t.slot(j).variance) {
    throw DimensionError("contract: indices have the same variance");
  }
  if (i > j) std::swap(i, j);

  std::vector<IndexSlot> out_slots;
  for (int k = 0; k < t.rank(); ++k) {
    if (k != i && k != j) out_slots.push_back(t.slot(k));
  }
  TensorValue<Scalar> out(out_slots);
  std::vector<int> full(static_cast<std::size_t>(t.rank()));
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    const std::vector<int> idx = out.unravel(flat);
    for (int k = 0, m = 0; k < t.rank(); ++k) {
      if (k != i && k != j) full[static_cast<std::size_t>(k)] = idx[static_cast<std::size_t>(m++)];
    }
    Scalar sum(0);
    for (int a = 0; a < t.extent(i); ++a) {
      full[static_cast<std::size_t>(i)] = a;
      full[static_cast<std::size_t>(j)] = a;
      sum += t.at(full);
    }
    out.data()[flat] = sum;
  }
  return out;
}

enum class Direction { Up, Down };

/// Moves index i with `metric` (the covariant metric g_{mu nu}). Raising uses
/// its inverse. The variance flag of slot i is flipped.
template <typename Scalar>
TensorValue<Scalar> raise_lower(const TensorValue<Scalar>& t, int i, const RealTensor& metric,
                                Direction direction) {
  if (i < 0 || i >= t.rank()) throw DimensionError("raise_lower: index out of range");
  if (metric.rank() != 2 || metric.extent(0) != metric.extent(1)) {
    throw DimensionError("raise_lower: metric must be square rank-2");
  }
  const int n = metric.extent(0);
  if (t.extent(i) != n) throw DimensionError("raise_lower: dimension mismatch");

  Eigen::MatrixXd g(n, n);
  double scale = 0.0;
  for (int a = 0; a < n; ++a) {
    double row = 0.0;
    for (int b = 0; b < n; ++b) {
      g(a, b) = metric(a, b);
      row += g(a, b) * g(a, b);
    }
    scale = std::max(scale, std::sqrt(row));
  }
  if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(scale, 1.0)) {
    throw DimensionError("raise_lower: metric is not symmetric");
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(g);
  const double det = lu.determinant();
  if (!(std::abs(det) >= 1e-13 * std::pow(scale, n))) {
    throw SingularMetricError("raise_lower: singular metric");
  }
  const Eigen::MatrixXd m = direction == Direction::Up ? Eigen::MatrixXd(lu.inverse()) : g;

  std::vector<IndexSlot> slots = t.slots();
  slots[static_cast<std::size_t>(i)].variance =
      direction == Direction::Up ? Variance::Contravariant : Variance::Covariant;
  TensorValue<Scalar> out(slots);
  const std::size_t stride = t.stride(i);
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    const int a = static_cast<int>((flat / stride) % static_cast<std::size_t>(n));
    const std::size_t base = flat - static_cast<std::size_t>(a) * stride;
    Scalar sum(0);
    for (int b = 0; b < n; ++b) sum += m(a, b) * t.data()[base + static_cast<std::size_t>(b) * stride];
    out.data()[flat] = sum;
  }
  return out;
}

/// Converts a rank-2 tensor to an Eigen matrix.
inline Eigen::MatrixXd to_matrix(const RealTensor& t) {
  if (t.rank() != 2) throw DimensionError("to_matrix: rank must be 2");
  Eigen::MatrixXd m(t.extent(0), t.extent(1));
  for (int a = 0; a < t.extent(0); ++a)
    for (int b = 0; b < t.extent(1); ++b) m(a, b) = t(a, b);
  return m;
}

inline RealTensor from_matrix(const Eigen::MatrixXd& m, IndexSlot row, IndexSlot col) {
  row.extent = static_cast<int>(m.rows());
  col.extent = static_cast<int>(m.cols());
  RealTensor t({row, col});
  for (int a = 0; a < m.rows(); ++a)
    for (int b = 0; b < m.cols(); ++b) t(a, b) = m(a, b);
  return t;
}

}  // namespace geodyn
