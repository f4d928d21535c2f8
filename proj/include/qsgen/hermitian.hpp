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

#ifndef QSGEN_HERMITIAN_HPP_
#define QSGEN_HERMITIAN_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "qsgen/complex_matrix.hpp"

namespace qsgen {

// Hermitian matrix with the symmetry enforced structurally: diagonal entries
// carry a zero imaginary part and the lower triangle mirrors the conjugate of
// the upper one exactly (bit for bit), so downstream code never sees a
// matrix that is only Hermitian up to rounding.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(std::size_t dim) : m_(dim) {}

  // Builds from an arbitrary square matrix by trusting its diagonal real
  // parts and upper triangle; no averaging, so a matrix that already is
  // Hermitian round-trips unchanged.
  static HermitianMatrix from_upper(const ComplexMatrix& a) {
    HermitianMatrix h(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) {
      h.m_(i, i) = Complex(a(i, i).real(), 0.0);
      for (std::size_t j = i + 1; j < a.dim(); ++j) {
        h.m_(i, j) = a(i, j);
        h.m_(j, i) = std::conj(a(i, j));
      }
    }
    return h;
  }

  static HermitianMatrix identity(std::size_t dim) {
    return from_upper(ComplexMatrix::identity(dim));
  }

  std::size_t dim() const { return m_.dim(); }
  const ComplexMatrix& mat() const { return m_; }

  const Complex& operator()(std::size_t i, std::size_t j) const {
    return m_(i, j);
  }

  // Mutates entry (i, j) and its mirror image in one step.
  void set(std::size_t i, std::size_t j, Complex v) {
    if (i == j) {
      m_(i, i) = Complex(v.real(), 0.0);
    } else {
      m_(i, j) = v;
      m_(j, i) = std::conj(v);
    }
  }

  double real_trace() const { return m_.trace().real(); }

  HermitianMatrix& operator+=(const HermitianMatrix& o) {
    m_ += o.m_;
    return *this;
  }

  HermitianMatrix& operator-=(const HermitianMatrix& o) {
    m_ -= o.m_;
    return *this;
  }

  // Scaling by a real keeps hermiticity exactly.
  HermitianMatrix& operator*=(double s) {
    m_ *= Complex(s, 0.0);
    return *this;
  }

  friend HermitianMatrix operator+(HermitianMatrix a,
                                   const HermitianMatrix& b) {
    a += b;
    return a;
  }

  friend HermitianMatrix operator-(HermitianMatrix a,
                                   const HermitianMatrix& b) {
    a -= b;
    return a;
  }

  friend HermitianMatrix operator*(double s, HermitianMatrix a) {
    a *= s;
    return a;
  }

  // Adds s * I in place.
  void shift_diagonal(double s) {
    for (std::size_t i = 0; i < dim(); ++i)
      m_(i, i) = Complex(m_(i, i).real() + s, 0.0);
  }

 private:
  ComplexMatrix m_;
};

// Unit-trace Hermitian matrix (a quantum state, possibly without positivity
// -- positivity is checked where it matters, not baked into the type).
class DensityMatrix {
 public:
  DensityMatrix() = default;

  // Requires |tr - 1| <= 1e-12; use normalize_trace() to get there first.
  static DensityMatrix from_hermitian(const HermitianMatrix& h) {
    const double defect = std::abs(h.real_trace() - 1.0);
    if (defect > 1e-12)
      throw std::invalid_argument("DensityMatrix: trace defect " +
                                  std::to_string(defect) + " exceeds 1e-12");
    DensityMatrix d;
    d.h_ = h;
    return d;
  }

  std::size_t dim() const { return h_.dim(); }
  const HermitianMatrix& hermitian() const { return h_; }
  const ComplexMatrix& mat() const { return h_.mat(); }

  const Complex& operator()(std::size_t i, std::size_t j) const {
    return h_(i, j);
  }

 private:
  HermitianMatrix h_;
};

struct EigenDecomposition {
  std::vector<double> eigenvalues;  // ascending
  ComplexMatrix eigenvectors;       // column k pairs with eigenvalues[k]
};

// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
// rotations.  Each (p, q) sweep step first absorbs the phase of A(p, q) into
// a diagonal unitary, reducing the 2x2 pivot block to a real symmetric one,
// then applies the classical symmetric Schur rotation.  Quadratic
// convergence makes ~5-10 sweeps typical at these dimensions; the iteration
// stops when the off-diagonal Frobenius mass falls below 1e-13 of the input
// norm.  The procedure is fully sequential and branch-deterministic, so the
// same input always yields the same output bits.
inline EigenDecomposition eigh(const HermitianMatrix& h) {
  const std::size_t n = h.dim();
  if (n == 0) throw std::invalid_argument("eigh: empty matrix");
  ComplexMatrix a = h.mat();
  ComplexMatrix q = ComplexMatrix::identity(n);

  const double input_norm = a.frobenius_norm();
  const double stop = 1e-13 * input_norm;

  auto off_norm = [&a, n]() {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += std::norm(a(i, j));
    return std::sqrt(2.0 * s);
  };

  constexpr int kMaxSweeps = 100;
  int sweep = 0;
  for (; sweep < kMaxSweeps; ++sweep) {
    if (off_norm() <= stop) break;
    for (std::size_t p = 0; p < n - 1; ++p) {
      for (std::size_t r = p + 1; r < n; ++r) {
        const Complex beta = a(p, r);
        const double babs = std::abs(beta);
        if (babs == 0.0) continue;
        // Phase so that e^{-i phi} * beta is real positive.
        const Complex phase = beta / babs;  // e^{i phi}
        const double alpha = a(p, p).real();
        const double delta = a(r, r).real();
        // Real symmetric Schur rotation on [[alpha, |beta|], [|beta|, delta]].
        const double tau = (delta - alpha) / (2.0 * babs);
        const double t =
            (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // Full rotation J: J_pp = c, J_pr = s, J_rp = -s e^{-i phi},
        // J_rr = c e^{-i phi}; apply A <- J^H A J, Q <- Q J.
        const Complex emip = std::conj(phase);  // e^{-i phi}
        const Complex eip = phase;              // e^{+i phi}
        for (std::size_t k = 0; k < n; ++k) {   // column update A <- A J
          const Complex akp = a(k, p), akr = a(k, r);
          a(k, p) = c * akp - s * (emip * akr);
          a(k, r) = s * akp + c * (emip * akr);
        }
        for (std::size_t k = 0; k < n; ++k) {  // row update A <- J^H A
          const Complex apk = a(p, k), ark = a(r, k);
          a(p, k) = c * apk - s * (eip * ark);
          a(r, k) = s * apk + c * (eip * ark);
        }
        // The pivot block is diagonal by construction; write it exactly.
        a(p, p) = Complex(alpha - t * babs, 0.0);
        a(r, r) = Complex(delta + t * babs, 0.0);
        a(p, r) = Complex(0.0, 0.0);
        a(r, p) = Complex(0.0, 0.0);
        for (std::size_t k = 0; k < n; ++k) {  // accumulate Q <- Q J
          const Complex qkp = q(k, p), qkr = q(k, r);
          q(k, p) = c * qkp - s * (emip * qkr);
          q(k, r) = s * qkp + c * (emip * qkr);
        }
      }
    }
  }
  if (sweep == kMaxSweeps && off_norm() > stop)
    throw std::runtime_error("eigh: no convergence in 100 sweeps");

  // Ascending eigenvalues; stable order for ties so results are reproducible.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&a](std::size_t x, std::size_t y) {
    return a(x, x).real() < a(y, y).real();
  });

  EigenDecomposition d;
  d.eigenvalues.resize(n);
  d.eigenvectors = ComplexMatrix(n);
  for (std::size_t k = 0; k < n; ++k) {
    d.eigenvalues[k] = a(order[k], order[k]).real();
    for (std::size_t i = 0; i < n; ++i)
      d.eigenvectors(i, k) = q(i, order[k]);
  }
  return d;
}

// Reassembles Q f(D) Q^H as an exactly Hermitian matrix.
inline HermitianMatrix assemble_spectral(const EigenDecomposition& d,
                                         const std::vector<double>& fvals) {
  const std::size_t n = d.eigenvalues.size();
  ComplexMatrix m(n);
  const ComplexMatrix& v = d.eigenvectors;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      Complex s = 0.0;
      for (std::size_t k = 0; k < n; ++k)
        s += fvals[k] * v(i, k) * std::conj(v(j, k));
      m(i, j) = s;
    }
  return HermitianMatrix::from_upper(m);
}

// Principal logarithm of a positive definite Hermitian matrix.  Eigenvalues
// at or below 1e-300 are rejected outright -- silently clamping would turn a
// rank-deficient input into a fabricated answer.
inline HermitianMatrix mat_log(const HermitianMatrix& h) {
  EigenDecomposition d = eigh(h);
  std::vector<double> f(d.eigenvalues.size());
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (d.eigenvalues[k] <= 1e-300)
      throw std::domain_error(
          "mat_log: eigenvalue " + std::to_string(d.eigenvalues[k]) +
          " is not positive definite (threshold 1e-300)");
    f[k] = std::log(d.eigenvalues[k]);
  }
  return assemble_spectral(d, f);
}

// Exponential of a Hermitian matrix (result is Hermitian positive definite
// whenever the exponentials stay finite).
inline HermitianMatrix mat_exp(const HermitianMatrix& h) {
  EigenDecomposition d = eigh(h);
  std::vector<double> f(d.eigenvalues.size());
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = std::exp(d.eigenvalues[k]);
  return assemble_spectral(d, f);
}

// Exponential of a skew-Hermitian matrix S (S^H = -S); the result is
// unitary.  Internally S = iK with K Hermitian, so exp(S) = Q e^{i k} Q^H.
inline ComplexMatrix mat_exp_skew(const ComplexMatrix& s) {
  const std::size_t n = s.dim();
  // K = -i S is Hermitian when S is skew-Hermitian.
  ComplexMatrix k(n);
  const Complex minus_i(0.0, -1.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) k(i, j) = minus_i * s(i, j);
  if (k.hermiticity_defect() > 1e-10 * std::max(1.0, s.frobenius_norm()))
    throw std::invalid_argument("mat_exp_skew: input is not skew-Hermitian");
  EigenDecomposition d = eigh(HermitianMatrix::from_upper(k));
  const ComplexMatrix& v = d.eigenvectors;
  ComplexMatrix r(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Complex acc = 0.0;
      for (std::size_t m = 0; m < n; ++m) {
        const Complex phase(std::cos(d.eigenvalues[m]),
                            std::sin(d.eigenvalues[m]));
        acc += v(i, m) * phase * std::conj(v(j, m));
      }
      r(i, j) = acc;
    }
  return r;
}

// Transposes the tensor factors named in `subsystem` (1-based qubit labels,
// qubit 1 being the most significant index bit).  The result of partially
// transposing a Hermitian matrix is Hermitian again; negative eigenvalues of
// it witness entanglement across the cut.  Accepts plain Hermitian input so
// evaluation can run on artifacts that are not valid states.
inline HermitianMatrix partial_transpose(const HermitianMatrix& rho,
                                         const std::set<std::size_t>& subsystem) {
  const std::size_t q = num_qubits(rho.mat());
  std::size_t mask = 0;
  for (std::size_t k : subsystem) {
    if (k < 1 || k > q)
      throw std::invalid_argument("partial_transpose: qubit index out of range");
    mask |= std::size_t{1} << qubit_bit(q, k);
  }
  const std::size_t n = rho.dim();
  ComplexMatrix out(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t ii = (i & ~mask) | (j & mask);
      const std::size_t jj = (j & ~mask) | (i & mask);
      out(i, j) = rho(ii, jj);
    }
  return HermitianMatrix::from_upper(out);
}

inline HermitianMatrix partial_transpose(const DensityMatrix& rho,
                                         const std::set<std::size_t>& subsystem) {
  return partial_transpose(rho.hermitian(), subsystem);
}

// Divides by the trace to reach trace one; rejects non-positive traces
// rather than flipping signs behind the caller's back.
inline DensityMatrix normalize_trace(const HermitianMatrix& h) {
  const double tr = h.real_trace();
  if (!(tr > 0.0))
    throw std::domain_error("normalize_trace: trace " + std::to_string(tr) +
                            " is not positive");
  HermitianMatrix scaled = (1.0 / tr) * h;
  return DensityMatrix::from_hermitian(scaled);
}

struct ValidityReport {
  double hermiticity_defect = 0.0;  // max |m_ij - conj(m_ji)|
  double min_eigenvalue = 0.0;      // of the hermitized matrix
  double trace_defect = 0.0;        // |tr - 1|
  bool hermitian_ok = false;
  bool positive = false;
  bool trace_ok = false;

  bool all_ok() const { return hermitian_ok && positive && trace_ok; }
};

// Checks the three density-matrix properties of an arbitrary complex matrix:
// hermiticity defect against `hermit_tol`, trace defect against `trace_tol`,
// and strict positivity of the smallest eigenvalue of the hermitized matrix.
inline ValidityReport validate_density(const ComplexMatrix& m,
                                       double hermit_tol = 1e-10,
                                       double trace_tol = 1e-12) {
  ValidityReport r;
  r.hermiticity_defect = m.hermiticity_defect();
  r.hermitian_ok = r.hermiticity_defect <= hermit_tol;
  r.trace_defect = std::abs(m.trace() - Complex(1.0));
  r.trace_ok = r.trace_defect <= trace_tol;
  EigenDecomposition d = eigh(HermitianMatrix::from_upper(m));
  r.min_eigenvalue = d.eigenvalues.front();
  r.positive = r.min_eigenvalue > 0.0;
  return r;
}

}  // namespace qsgen

#endif  // QSGEN_HERMITIAN_HPP_
