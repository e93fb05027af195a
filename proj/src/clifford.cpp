#include "geodyn/clifford.hpp"

#include <unsupported/Eigen/KroneckerProduct>

namespace geodyn {

using cd = std::complex<double>;

Eigen::Matrix2cd pauli(int a) {
  Eigen::Matrix2cd m;
  switch (a) {
    case 0: m << 1, 0, 0, 1; break;
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, cd(0, -1), cd(0, 1), 0; break;
    case 3: m << 1, 0, 0, -1; break;
    default: throw InvalidArgument("pauli index must be 0..3");
  }
  return m;
}

Eigen::Matrix3cd gell_mann(int a) {
  Eigen::Matrix3cd m = Eigen::Matrix3cd::Zero();
  const cd i(0, 1);
  switch (a) {
    case 1: m(0, 1) = 1; m(1, 0) = 1; break;
    case 2: m(0, 1) = -i; m(1, 0) = i; break;
    case 3: m(0, 0) = 1; m(1, 1) = -1; break;
    case 4: m(0, 2) = 1; m(2, 0) = 1; break;
    case 5: m(0, 2) = -i; m(2, 0) = i; break;
    case 6: m(1, 2) = 1; m(2, 1) = 1; break;
    case 7: m(1, 2) = -i; m(2, 1) = i; break;
    case 8:
      m(0, 0) = 1.0 / std::sqrt(3.0);
      m(1, 1) = 1.0 / std::sqrt(3.0);
      m(2, 2) = -2.0 / std::sqrt(3.0);
      break;
    default: throw InvalidArgument("Gell-Mann index must be 1..8");
  }
  return m;
}

std::vector<Eigen::MatrixXcd> flat_gammas(const Signature& eta) {
  const int n = eta.dimension();
  if (n % 2 != 0) throw InvalidArgument("gamma matrices require even dimension");
  const int k = n / 2;
  std::vector<Eigen::MatrixXcd> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) {
    const int site = a / 2;
    const Eigen::Matrix2cd local = pauli(a % 2 == 0 ? 1 : 2);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(1, 1);
    for (int s = 0; s < k; ++s) {
      const Eigen::Matrix2cd factor = s < site ? pauli(3) : (s == site ? local : pauli(0));
      m = Eigen::MatrixXcd(Eigen::kroneckerProduct(m, factor));
    }
    if (eta[a] < 0) m *= cd(0, 1);
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<Eigen::MatrixXcd> sigma_matrices(const Signature& eta) {
  const int n = eta.dimension();
  auto up = flat_gammas(eta);
  // gamma_a = eta_ab gamma^b
  for (int a = 0; a < n; ++a) up[static_cast<std::size_t>(a)] *= static_cast<double>(eta[a]);
  std::vector<Eigen::MatrixXcd> sigma(static_cast<std::size_t>(n * n));
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const auto& ga = up[static_cast<std::size_t>(a)];
      const auto& gb = up[static_cast<std::size_t>(b)];
      sigma[static_cast<std::size_t>(a * n + b)] = cd(0, 0.5) * (ga * gb - gb * ga);
    }
  }
  return sigma;
}

double sigma_squared(const Signature& eta) {
  const int n = eta.dimension();
  const auto sigma = sigma_matrices(eta);
  const auto dim = sigma[0].rows();
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(dim, dim);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const auto& s = sigma[static_cast<std::size_t>(a * n + b)];
      sum += static_cast<double>(eta[a] * eta[b]) * s * s;
    }
  }
  const cd scale = sum.trace() / static_cast<double>(dim);
  const double off = (sum - scale * Eigen::MatrixXcd::Identity(dim, dim)).cwiseAbs().maxCoeff();
  if (off > 1e-12 * std::max(1.0, std::abs(scale)) || std::abs(scale.imag()) > 1e-12) {
    throw EvaluationError("sigma^ab sigma_ab is not proportional to the identity");
  }
  return scale.real();
}

}  // namespace geodyn
