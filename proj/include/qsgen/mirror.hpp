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

#ifndef QSGEN_MIRROR_HPP_
#define QSGEN_MIRROR_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "qsgen/hermitian.hpp"

namespace qsgen {

// Bijection between density matrices and unconstrained real vectors.
//
// A positive definite state X maps to the Hermitian dual point
// Y = I + log X; the inverse is X = exp(Y - I) followed by trace
// normalization.  Because exp of any Hermitian matrix is positive definite
// with positive trace, every dual point decodes to a valid state -- the
// constraint set is handled by geometry instead of projections or clamps.
// Adding c*I to Y only rescales exp(Y - I) by e^c, so the normalization
// quotients out that gauge direction.
//
// Hermitian matrices are flattened to real coordinates as: the n diagonal
// entries first, then the strict upper triangle row by row as (re, im)
// pairs.  With `isometric_scaling` the off-diagonal coordinates carry a
// factor sqrt(2), which makes the flattening an isometry from the Frobenius
// inner product to the Euclidean one -- Gaussian noise in coordinates then
// matches unitarily invariant Gaussian noise on matrices.

struct MirrorConfig {
  bool isometric_scaling = true;
};

// Flattened Hermitian matrix; `matrix_dim` remembers n for round trips.
struct DualVector {
  std::vector<double> coords;
  std::size_t matrix_dim = 0;
};

inline std::size_t vec_length_for_dim(std::size_t n) { return n * n; }

// Matrix dimension encoded by a flattened length; rejects non-squares.
inline std::size_t dim_for_vec_length(std::size_t len) {
  std::size_t n = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(len))));
  if (n == 0 || n * n != len)
    throw std::invalid_argument("dual vector length " + std::to_string(len) +
                                " is not a perfect square");
  return n;
}

inline DualVector herm_to_vec(const HermitianMatrix& h,
                              const MirrorConfig& cfg = {}) {
  const std::size_t n = h.dim();
  const double w = cfg.isometric_scaling ? std::numbers::sqrt2 : 1.0;
  DualVector out;
  out.matrix_dim = n;
  out.coords.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) out.coords.push_back(h(i, i).real());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      out.coords.push_back(w * h(i, j).real());
      out.coords.push_back(w * h(i, j).imag());
    }
  return out;
}

inline HermitianMatrix vec_to_herm(std::span<const double> v,
                                   const MirrorConfig& cfg = {}) {
  const std::size_t n = dim_for_vec_length(v.size());
  const double w = cfg.isometric_scaling ? 1.0 / std::numbers::sqrt2 : 1.0;
  HermitianMatrix h(n);
  for (std::size_t i = 0; i < n; ++i) h.set(i, i, Complex(v[i], 0.0));
  std::size_t k = n;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      h.set(i, j, Complex(w * v[k], w * v[k + 1]));
      k += 2;
    }
  return h;
}

inline HermitianMatrix vec_to_herm(const DualVector& v,
                                   const MirrorConfig& cfg = {}) {
  return vec_to_herm(std::span<const double>(v.coords), cfg);
}

// Y = I + log X.  Requires X positive definite (mat_log enforces it).
inline HermitianMatrix to_dual(const DensityMatrix& x) {
  HermitianMatrix y = mat_log(x.hermitian());
  y.shift_diagonal(1.0);
  return y;
}

// A decoded state together with the spectrum it was assembled from.  The
// eigenvalues are the softmax weights actually placed on the diagonal
// during assembly -- strictly positive by construction, ascending -- so
// callers can certify positivity without re-running an eigensolver (whose
// ~1e-16 noise floor would bury eigenvalues this small).
struct SpectralState {
  DensityMatrix state;
  std::vector<double> eigenvalues;
};

// X = exp(Y - I) / tr exp(Y - I).  Computed spectrally with the largest
// eigenvalue subtracted before exponentiation, so arbitrarily large dual
// points decode without overflow; the -I and the shift cancel in the
// normalization, making this a softmax of the eigenvalues of Y.  Weights
// that underflow exp (spread beyond ~745) are floored at the smallest
// normal double: past that point the weight is saturated either way, but
// flooring keeps the constructed spectrum strictly positive, so the decode
// stays total over all finite duals.
inline SpectralState to_primal_spectral(const HermitianMatrix& y) {
  EigenDecomposition d = eigh(y);
  const std::size_t n = d.eigenvalues.size();
  const double top = d.eigenvalues.back();  // ascending order
  std::vector<double> w(n);
  double z = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    w[k] = std::max(std::exp(d.eigenvalues[k] - top),
                    std::numeric_limits<double>::min());
    z += w[k];
  }
  for (double& x : w) x /= z;
  HermitianMatrix h = assemble_spectral(d, w);
  const double tr = h.real_trace();
  SpectralState out;
  out.state = normalize_trace(h);
  out.eigenvalues = std::move(w);
  // fold the final trace normalization into the reported spectrum so it
  // matches the returned matrix exactly
  for (double& x : out.eigenvalues) x /= tr;
  return out;
}

inline DensityMatrix to_primal(const HermitianMatrix& y) {
  return to_primal_spectral(y).state;
}

// Density matrix -> unconstrained coordinates.
inline DualVector encode(const DensityMatrix& x, const MirrorConfig& cfg = {}) {
  return herm_to_vec(to_dual(x), cfg);
}

// Unconstrained coordinates -> density matrix.  Total: every real vector of
// perfect-square length decodes to a Hermitian, positive definite, unit-trace
// matrix.  Dual points whose eigenvalue spread exceeds the exp underflow
// budget of ~745 lose resolution (the smallest weights saturate at the
// underflow floor), but positivity and trace are preserved regardless.
inline DensityMatrix decode(std::span<const double> v,
                            const MirrorConfig& cfg = {}) {
  return to_primal(vec_to_herm(v, cfg));
}

inline DensityMatrix decode(const DualVector& v, const MirrorConfig& cfg = {}) {
  return decode(std::span<const double>(v.coords), cfg);
}

// Decode variant carrying the assembled spectrum; see SpectralState.
inline SpectralState decode_spectral(std::span<const double> v,
                                     const MirrorConfig& cfg = {}) {
  return to_primal_spectral(vec_to_herm(v, cfg));
}

}  // namespace qsgen

#endif  // QSGEN_MIRROR_HPP_
