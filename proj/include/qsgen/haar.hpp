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

#ifndef QSGEN_HAAR_HPP_
#define QSGEN_HAAR_HPP_

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "qsgen/complex_matrix.hpp"
#include "qsgen/hermitian.hpp"
#include "qsgen/rng.hpp"

namespace qsgen {

// Haar-distributed unitaries by two unrelated routes:
//
//  * haar_unitary_qr: orthonormalize a Ginibre matrix.  Gram-Schmidt yields
//    the unique QR factor with positive-real R diagonal, which makes the
//    result exactly Haar.  Cheap, direct, and the reference the dynamical
//    sampler is validated against.
//
//  * LieHaarSampler: kinetic Langevin dynamics on the group manifold,
//    alternating an exact geodesic move g <- g exp(h xi) with an exact
//    Ornstein-Uhlenbeck refresh of the algebra-valued momentum xi.  Both
//    half-steps preserve Haar x Gaussian exactly, so the chain's stationary
//    law is Haar for any step size; discretization only affects mixing
//    speed, not the target.
//
// Having both lets every statistical test of one sampler use the other as
// an independent witness.

class UnitaryMatrix {
 public:
  UnitaryMatrix() = default;

  // Wraps a matrix after checking its Frobenius Gram defect ||U^H U - I||_F.
  static UnitaryMatrix from_matrix(const ComplexMatrix& m, double tol = 1e-10) {
    const double defect = m.unitarity_defect_frob();
    if (defect > tol)
      throw std::invalid_argument("UnitaryMatrix: unitarity defect " +
                                  std::to_string(defect) + " exceeds tolerance");
    UnitaryMatrix u;
    u.u_ = m;
    return u;
  }

  std::size_t dim() const { return u_.dim(); }
  const ComplexMatrix& mat() const { return u_; }

 private:
  ComplexMatrix u_;
};

// Modified Gram-Schmidt over columns, with a second orthogonalization pass
// to push the Gram defect down to rounding level.  Column norms are strictly
// positive with probability one for Ginibre input; a zero norm means the
// input was rank-deficient and is an error.
inline ComplexMatrix orthonormalize_columns(const ComplexMatrix& g) {
  const std::size_t n = g.dim();
  ComplexMatrix q = g;
  for (std::size_t k = 0; k < n; ++k) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t j = 0; j < k; ++j) {
        Complex proj = 0.0;
        for (std::size_t i = 0; i < n; ++i)
          proj += std::conj(q(i, j)) * q(i, k);
        for (std::size_t i = 0; i < n; ++i) q(i, k) -= proj * q(i, j);
      }
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) norm += std::norm(q(i, k));
    norm = std::sqrt(norm);
    if (norm == 0.0)
      throw std::domain_error("orthonormalize_columns: rank-deficient input");
    for (std::size_t i = 0; i < n; ++i) q(i, k) *= (1.0 / norm);
  }
  return q;
}

// Haar sample on U(n) from a Ginibre draw.
inline UnitaryMatrix haar_unitary_qr(std::size_t n, RandomStream& rs) {
  if (n == 0) throw std::invalid_argument("haar_unitary_qr: empty dimension");
  ComplexMatrix g(n);
  for (auto& z : g.data()) {
    const double re = rs.normal();
    const double im = rs.normal();
    z = Complex(re, im);
  }
  return UnitaryMatrix::from_matrix(orthonormalize_columns(g), 1e-12);
}

struct LieSamplerConfig {
  double friction = 1.0;          // OU relaxation rate of the momentum
  double step_size = 0.01;        // geodesic step h
  std::size_t burn_in_steps = 2000;
  std::size_t thinning = 50;      // steps between successive draws
  std::size_t reorth_interval = 2048;  // drift-defect cleanup period
};

// Kinetic Langevin chain on U(n).  The momentum lives in the Lie algebra
// u(n) and is stored by its real coefficients in the orthonormal basis
// { i E_kk } + { (E_kl - E_lk)/sqrt2, i(E_kl + E_lk)/sqrt2 : k < l } with
// respect to Re tr(A^H B); the stationary momentum law is iid N(0,1) in
// these coordinates.
class LieHaarSampler {
 public:
  LieHaarSampler(std::size_t n, const LieSamplerConfig& cfg)
      : n_(n), cfg_(cfg), g_(ComplexMatrix::identity(n)), coeff_(n * n, 0.0) {
    if (n == 0) throw std::invalid_argument("LieHaarSampler: empty dimension");
    if (!(cfg.step_size > 0.0) || !(cfg.friction > 0.0))
      throw std::invalid_argument("LieHaarSampler: nonpositive step or friction");
  }

  // One dynamics step: exact geodesic drift, then exact OU momentum refresh.
  void step(RandomStream& rs) {
    if (!momentum_ready_) {
      // Initial momentum from its stationary law.
      for (double& c : coeff_) c = rs.normal();
      momentum_ready_ = true;
    }
    g_ = g_ * mat_exp_skew(momentum_matrix(cfg_.step_size));
    const double decay = std::exp(-cfg_.friction * cfg_.step_size);
    const double kick = std::sqrt(1.0 - decay * decay);
    for (double& c : coeff_) c = decay * c + kick * rs.normal();
    ++steps_;
    if (cfg_.reorth_interval > 0 && steps_ % cfg_.reorth_interval == 0)
      g_ = orthonormalize_columns(g_);
  }

  // Next decorrelated sample: burn-in on first use, thinning afterwards.
  UnitaryMatrix draw(RandomStream& rs) {
    const std::size_t todo = burned_in_ ? cfg_.thinning : cfg_.burn_in_steps;
    for (std::size_t i = 0; i < todo; ++i) step(rs);
    burned_in_ = true;
    return UnitaryMatrix::from_matrix(g_);
  }

  // Frobenius Gram defect of the current group element.
  double unitarity_defect() const { return g_.unitarity_defect_frob(); }

  std::size_t steps_taken() const { return steps_; }
  const ComplexMatrix& current() const { return g_; }

 private:
  // Assembles scale * xi from the basis coefficients.
  ComplexMatrix momentum_matrix(double scale) const {
    ComplexMatrix xi(n_);
    const double inv_r2 = scale / std::numbers::sqrt2;
    for (std::size_t k = 0; k < n_; ++k)
      xi(k, k) = Complex(0.0, scale * coeff_[k]);
    std::size_t idx = n_;
    for (std::size_t k = 0; k < n_; ++k)
      for (std::size_t l = k + 1; l < n_; ++l) {
        const double a = coeff_[idx];      // antisymmetric real part
        const double b = coeff_[idx + 1];  // symmetric imaginary part
        idx += 2;
        xi(k, l) = Complex(a * inv_r2, b * inv_r2);
        xi(l, k) = Complex(-a * inv_r2, b * inv_r2);
      }
    return xi;
  }

  std::size_t n_;
  LieSamplerConfig cfg_;
  ComplexMatrix g_;
  std::vector<double> coeff_;
  bool momentum_ready_ = false;
  bool burned_in_ = false;
  std::size_t steps_ = 0;
};

// Single decorrelated Haar draw from a fresh chain (burn-in included); use
// one RandomStream per draw to get independent samples.
inline UnitaryMatrix haar_unitary_lie(std::size_t n, const LieSamplerConfig& cfg,
                                      RandomStream& rs) {
  LieHaarSampler sampler(n, cfg);
  return sampler.draw(rs);
}

}  // namespace qsgen

#endif  // QSGEN_HAAR_HPP_
