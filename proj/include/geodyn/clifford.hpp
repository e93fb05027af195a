#pragma once

#include <vector>

#include <Eigen/Dense>

#include "geodyn/chart_field.hpp"

namespace geodyn {

/// Flat gamma matrices with {gamma^a, gamma^b} = 2 eta^{ab} I, dimension
/// 2^(n/2), built as Jordan-Wigner products of Pauli matrices. n must be even.
std::vector<Eigen::MatrixXcd> flat_gammas(const Signature& eta);

/// sigma_ab = (i/2)[gamma_a, gamma_b] with lower frame indices.
std::vector<Eigen::MatrixXcd> sigma_matrices(const Signature& eta);

/// sigma^{ab} sigma_ab as a multiple of the identity. Throws if the sum is
/// not proportional to the identity.
double sigma_squared(const Signature& eta);

Eigen::Matrix2cd pauli(int a);  // a = 0 (identity), 1, 2, 3

/// Gell-Mann matrices lambda_1..lambda_8 (a = 1..8), Tr(l_a l_b) = 2 delta_ab.
Eigen::Matrix3cd gell_mann(int a);

}  // namespace geodyn
