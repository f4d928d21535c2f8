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

#ifndef QSGEN_COMPLEX_MATRIX_HPP_
#define QSGEN_COMPLEX_MATRIX_HPP_

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace qsgen {

using Complex = std::complex<double>;

// Dense square complex matrix, row-major.  Dimensions in this library are
// small (2^q for a handful of qubits), so everything is plain O(n^3) dense
// arithmetic with no cleverness; determinism and clarity win over speed here.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  explicit ComplexMatrix(std::size_t dim) : dim_(dim), a_(dim * dim) {}

  static ComplexMatrix identity(std::size_t dim) {
    ComplexMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }

  static ComplexMatrix zero(std::size_t dim) { return ComplexMatrix(dim); }

  std::size_t dim() const { return dim_; }

  Complex& operator()(std::size_t i, std::size_t j) { return a_[i * dim_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const {
    return a_[i * dim_ + j];
  }

  std::vector<Complex>& data() { return a_; }
  const std::vector<Complex>& data() const { return a_; }

  ComplexMatrix adjoint() const {
    ComplexMatrix r(dim_);
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j)
        r(j, i) = std::conj((*this)(i, j));
    return r;
  }

  ComplexMatrix transpose() const {
    ComplexMatrix r(dim_);
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j) r(j, i) = (*this)(i, j);
    return r;
  }

  Complex trace() const {
    Complex t = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (const Complex& z : a_) s += std::norm(z);
    return std::sqrt(s);
  }

  // Largest entrywise modulus; convenient as an infinity-like defect measure.
  double max_abs() const {
    double m = 0.0;
    for (const Complex& z : a_) m = std::max(m, std::abs(z));
    return m;
  }

  ComplexMatrix& operator+=(const ComplexMatrix& o) {
    check_same_dim(o);
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
    return *this;
  }

  ComplexMatrix& operator-=(const ComplexMatrix& o) {
    check_same_dim(o);
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
    return *this;
  }

  ComplexMatrix& operator*=(Complex s) {
    for (Complex& z : a_) z *= s;
    return *this;
  }

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) {
    a += b;
    return a;
  }

  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) {
    a -= b;
    return a;
  }

  friend ComplexMatrix operator*(Complex s, ComplexMatrix a) {
    a *= s;
    return a;
  }

  friend ComplexMatrix operator*(const ComplexMatrix& a,
                                 const ComplexMatrix& b) {
    a.check_same_dim(b);
    const std::size_t n = a.dim_;
    ComplexMatrix c(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < n; ++k) {
        const Complex aik = a(i, k);
        if (aik == Complex(0.0)) continue;
        for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
      }
    }
    return c;
  }

  // max_ij |a_ij - b_ij|
  double max_abs_diff(const ComplexMatrix& o) const {
    check_same_dim(o);
    double m = 0.0;
    for (std::size_t k = 0; k < a_.size(); ++k)
      m = std::max(m, std::abs(a_[k] - o.a_[k]));
    return m;
  }

  // max_ij |a_ij - conj(a_ji)|
  double hermiticity_defect() const {
    double m = 0.0;
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j <= i; ++j)
        m = std::max(m, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
    return m;
  }

  // max_k || (U^H U - I) e_k ||_inf, i.e. the worst entry of the Gram defect.
  double unitarity_defect() const {
    const ComplexMatrix g = adjoint() * (*this);
    double m = 0.0;
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j) {
        const Complex want = (i == j) ? Complex(1.0) : Complex(0.0);
        m = std::max(m, std::abs(g(i, j) - want));
      }
    return m;
  }

  // || U^H U - I ||_F, the whole-matrix Gram defect.
  double unitarity_defect_frob() const {
    const ComplexMatrix g = adjoint() * (*this);
    double s = 0.0;
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j) {
        const Complex want = (i == j) ? Complex(1.0) : Complex(0.0);
        s += std::norm(g(i, j) - want);
      }
    return std::sqrt(s);
  }

 private:
  void check_same_dim(const ComplexMatrix& o) const {
    if (dim_ != o.dim_)
      throw std::invalid_argument("ComplexMatrix: dimension mismatch");
  }

  std::size_t dim_ = 0;
  std::vector<Complex> a_;
};

// Kronecker product; result dimension is dim(a) * dim(b).
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::size_t na = a.dim(), nb = b.dim();
  ComplexMatrix c(na * nb);
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < na; ++j) {
      const Complex aij = a(i, j);
      if (aij == Complex(0.0)) continue;
      for (std::size_t k = 0; k < nb; ++k)
        for (std::size_t l = 0; l < nb; ++l)
          c(i * nb + k, j * nb + l) = aij * b(k, l);
    }
  return c;
}

// Number of qubits for a 2^q-dimensional matrix; throws if dim is not a
// power of two (qubit-indexed operations are undefined there).
inline std::size_t num_qubits(const ComplexMatrix& m) {
  const std::size_t n = m.dim();
  if (n == 0 || (n & (n - 1)) != 0)
    throw std::invalid_argument("num_qubits: dimension " + std::to_string(n) +
                                " is not a power of two");
  std::size_t q = 0;
  for (std::size_t v = n; v > 1; v >>= 1) ++q;
  return q;
}

// Qubit indices throughout the library are 1-based, and qubit 1 is the most
// significant bit of a basis-state index: basis state |b_1 b_2 ... b_q> has
// index b_1*2^{q-1} + ... + b_q.  This matches the tensor-factor order of
// kron(), where the first factor acts on qubit 1.

// Bit position (from the least significant end) of 1-based qubit `k` in a
// q-qubit index.
inline std::size_t qubit_bit(std::size_t q, std::size_t k) {
  if (k < 1 || k > q) throw std::invalid_argument("qubit index out of range");
  return q - k;
}

// Conjugates `m` by the basis permutation that relabels qubits so that output
// qubit j carries what input qubit perm[j-1] carried.  `perm` must be a
// permutation of {1, ..., q}.
inline ComplexMatrix permute_qubits(const ComplexMatrix& m,
                                    const std::vector<std::size_t>& perm) {
  const std::size_t q = num_qubits(m);
  if (perm.size() != q)
    throw std::invalid_argument("permute_qubits: permutation size mismatch");
  std::vector<bool> seen(q + 1, false);
  for (std::size_t p : perm) {
    if (p < 1 || p > q || seen[p])
      throw std::invalid_argument("permute_qubits: not a permutation");
    seen[p] = true;
  }
  const std::size_t n = m.dim();
  // source_index[i] = basis index whose amplitude moves to index i.
  std::vector<std::size_t> src(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t s = 0;
    for (std::size_t j = 1; j <= q; ++j) {
      const std::size_t bit = (i >> qubit_bit(q, j)) & 1u;
      s |= bit << qubit_bit(q, perm[j - 1]);
    }
    src[i] = s;
  }
  ComplexMatrix r(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) r(i, j) = m(src[i], src[j]);
  return r;
}

}  // namespace qsgen

#endif  // QSGEN_COMPLEX_MATRIX_HPP_
