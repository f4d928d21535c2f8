// Copyright 2026 The qsgen Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Shared helpers for the test suite: seeded random matrix factories and
// small independent oracles that the library code must agree with.

#ifndef QSGEN_TESTS_SUPPORT_HPP_
#define QSGEN_TESTS_SUPPORT_HPP_

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "qsgen/complex_matrix.hpp"
#include "qsgen/hermitian.hpp"
#include "qsgen/rng.hpp"

namespace qsgen_test {

// Gaussian-ensemble Hermitian matrix: N(0,1) diagonal, off-diagonal entries
// complex normal with total variance 1.
inline qsgen::HermitianMatrix random_hermitian(std::size_t n,
                                               qsgen::RandomStream& rs) {
  qsgen::ComplexMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = qsgen::Complex(rs.normal(), 0.0);
    for (std::size_t j = i + 1; j < n; ++j) m(i, j) = rs.normal_complex();
  }
  return qsgen::HermitianMatrix::from_upper(m);
}

// Random full-rank density matrix: exp of a scaled Gaussian Hermitian,
// normalized to unit trace.  Scaling keeps the condition number moderate.
inline qsgen::DensityMatrix random_density(std::size_t n,
                                           qsgen::RandomStream& rs,
                                           double spread = 1.0) {
  qsgen::HermitianMatrix h = random_hermitian(n, rs);
  h *= spread;
  return qsgen::normalize_trace(qsgen::mat_exp(h));
}

// Arbitrary (non-Hermitian) Ginibre matrix with iid standard complex normal
// entries.
inline qsgen::ComplexMatrix random_ginibre(std::size_t n,
                                           qsgen::RandomStream& rs) {
  qsgen::ComplexMatrix m(n);
  for (auto& z : m.data()) {
    const double re = rs.normal();
    const double im = rs.normal();
    z = qsgen::Complex(re, im);
  }
  return m;
}

// Frobenius distance between two matrices.
inline double frob_dist(const qsgen::ComplexMatrix& a,
                        const qsgen::ComplexMatrix& b) {
  return (a - b).frobenius_norm();
}

// Exact 1-D Wasserstein-1 between equal-size samples via sorted coupling;
// used as an independent oracle for the metrics module.
inline double w1_sorted_oracle(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

// Eigenvalue angles of a unitary, via a Hermitian proxy: a generic real
// combination of (U + U^H)/2 and (U - U^H)/(2i) shares U's eigenvectors and
// has a simple spectrum almost surely, so its eigenvectors diagonalize U;
// the angles are then Rayleigh-quotient phases.  Fixed incommensurate
// coefficients keep the proxy generic without randomness.
inline std::vector<double> unitary_eigen_angles(const qsgen::ComplexMatrix& u) {
  const std::size_t n = u.dim();
  const qsgen::ComplexMatrix uh = u.adjoint();
  qsgen::ComplexMatrix h(n);
  const double alpha = 1.0, beta = 0.6180339887498949;
  const qsgen::Complex half(0.5, 0.0);
  const qsgen::Complex mhalf_i(0.0, -0.5);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      h(i, j) = alpha * half * (u(i, j) + uh(i, j)) +
                beta * mhalf_i * (u(i, j) - uh(i, j));
  auto d = qsgen::eigh(qsgen::HermitianMatrix::from_upper(h));
  std::vector<double> angles(n);
  for (std::size_t k = 0; k < n; ++k) {
    qsgen::Complex q = 0.0;  // v_k^H U v_k
    for (std::size_t i = 0; i < n; ++i) {
      qsgen::Complex row = 0.0;
      for (std::size_t j = 0; j < n; ++j) row += u(i, j) * d.eigenvectors(j, k);
      q += std::conj(d.eigenvectors(i, k)) * row;
    }
    angles[k] = std::arg(q);
  }
  return angles;
}

// Pearson chi-square statistic of `values` binned uniformly over
// [-pi, pi); degrees of freedom = bins - 1.
inline double chi_square_angles(const std::vector<double>& values,
                                std::size_t bins) {
  std::vector<std::size_t> count(bins, 0);
  const double pi = 3.14159265358979323846;
  for (double v : values) {
    double u = (v + pi) / (2.0 * pi);
    auto b = static_cast<std::size_t>(u * static_cast<double>(bins));
    if (b >= bins) b = bins - 1;
    ++count[b];
  }
  const double expect =
      static_cast<double>(values.size()) / static_cast<double>(bins);
  double stat = 0.0;
  for (std::size_t c : count) {
    const double d = static_cast<double>(c) - expect;
    stat += d * d / expect;
  }
  return stat;
}

}  // namespace qsgen_test

#endif  // QSGEN_TESTS_SUPPORT_HPP_
