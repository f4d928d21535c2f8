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

#ifndef QSGEN_QUANTUM_DATA_HPP_
#define QSGEN_QUANTUM_DATA_HPP_

#include <array>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "qsgen/haar.hpp"
#include "qsgen/hermitian.hpp"
#include "qsgen/io_util.hpp"
#include "qsgen/rng.hpp"

namespace qsgen {

// Synthetic multi-qubit mixed states in three entanglement classes:
//
//   product   tensor products of independent single-qubit mixed states;
//   pairwise  a product state conjugated by independent Haar entanglers on
//             the disjoint qubit pairs (1,2), (3,4), ...;
//   full      a product state conjugated by Haar entanglers on every qubit
//             pair, applied in lexicographic pair order.
//
// Conjugation never changes the spectrum, so the three classes share their
// eigenvalue law and differ only in how entanglement is wired -- exactly the
// structure a generative model is later asked to reproduce.  Matched seeds
// give all three classes literally the same underlying product draw.

// Single-qubit spectrum: eigenvalue weights drawn uniformly from
// [lambda_min, lambda_max] before trace normalization.
struct QubitDistConfig {
  double lambda_min = 1.0;
  double lambda_max = 3.0;

  void validate() const {
    if (!(lambda_min > 0.0) || !(lambda_max >= lambda_min))
      throw std::invalid_argument(
          "QubitDistConfig: need 0 < lambda_min <= lambda_max");
  }
};

// Which mechanism supplies Haar unitaries to the generators.  The Langevin
// chain is the default; the QR route is the independent cross-check and a
// faster stand-in where statistical fidelity of the chain is not under test.
struct HaarSource {
  enum class Kind { lie, qr };
  Kind kind = Kind::lie;
  LieSamplerConfig lie;

  UnitaryMatrix draw(std::size_t n, RandomStream& rs) const {
    if (kind == Kind::qr) return haar_unitary_qr(n, rs);
    return haar_unitary_lie(n, lie, rs);
  }
};

// Convex class-membership weights (product, pairwise, full).  Training data
// uses the one-hot corners; generation may ask for any point of the simplex.
struct ClassLabel {
  std::array<double, 3> w{0.0, 0.0, 0.0};

  static ClassLabel one_hot(std::size_t cls) {
    if (cls >= 3) throw std::invalid_argument("ClassLabel: class out of range");
    ClassLabel l;
    l.w[cls] = 1.0;
    return l;
  }

  void validate() const {
    double sum = 0.0;
    for (double x : w) {
      if (!(x >= 0.0) || !(x <= 1.0))
        throw std::invalid_argument("ClassLabel: weights must lie in [0, 1]");
      sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw std::invalid_argument("ClassLabel: weights must sum to one");
  }
};

// One random mixed qubit: rho = Q diag(l1, l2) Q^H / (l1 + l2) with
// l_i ~ U[lambda_min, lambda_max] and Q Haar on U(2).
inline DensityMatrix sample_qubit(const QubitDistConfig& cfg,
                                  const HaarSource& haar, RandomStream& rs) {
  cfg.validate();
  const double l1 = rs.uniform(cfg.lambda_min, cfg.lambda_max);
  const double l2 = rs.uniform(cfg.lambda_min, cfg.lambda_max);
  const UnitaryMatrix q = haar.draw(2, rs);
  const ComplexMatrix& u = q.mat();
  ComplexMatrix m(2);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      m(i, j) = l1 * u(i, 0) * std::conj(u(j, 0)) +
                l2 * u(i, 1) * std::conj(u(j, 1));
  return normalize_trace(HermitianMatrix::from_upper(m));
}

// Tensor product of q independent single-qubit draws; qubit 1 is drawn
// first and becomes the most significant tensor factor.
inline DensityMatrix product_state(std::size_t qubits,
                                   const QubitDistConfig& cfg,
                                   const HaarSource& haar, RandomStream& rs) {
  if (qubits == 0) throw std::invalid_argument("product_state: zero qubits");
  ComplexMatrix acc = sample_qubit(cfg, haar, rs).mat();
  for (std::size_t k = 1; k < qubits; ++k)
    acc = kron(acc, sample_qubit(cfg, haar, rs).mat());
  return normalize_trace(HermitianMatrix::from_upper(acc));
}

// Embeds a two-qubit unitary M so that it acts on qubits (i, j) of a
// q-qubit register: conjugate M (x) I by the relabeling that sends M's two
// legs to positions i and j and keeps the remaining qubits in ascending
// order.
inline ComplexMatrix build_entangler(std::size_t i, std::size_t j,
                                     std::size_t qubits,
                                     const UnitaryMatrix& m) {
  if (m.dim() != 4)
    throw std::invalid_argument("build_entangler: entangler must act on 2 qubits");
  if (i < 1 || j < 1 || i > qubits || j > qubits || i == j)
    throw std::invalid_argument("build_entangler: invalid qubit pair");
  if (qubits < 2)
    throw std::invalid_argument("build_entangler: need at least 2 qubits");
  ComplexMatrix big = m.mat();
  if (qubits > 2) {
    const std::size_t rest = std::size_t{1} << (qubits - 2);
    ComplexMatrix eye(rest);
    for (std::size_t k = 0; k < rest; ++k) eye(k, k) = 1.0;
    big = kron(big, eye);
  }
  // Output qubit i carries input qubit 1 (M's first leg), output qubit j
  // carries input qubit 2; everything else keeps ascending order.
  std::vector<std::size_t> perm(qubits);
  std::size_t next = 3;
  for (std::size_t k = 1; k <= qubits; ++k) {
    if (k == i)
      perm[k - 1] = 1;
    else if (k == j)
      perm[k - 1] = 2;
    else
      perm[k - 1] = next++;
  }
  return permute_qubits(big, perm);
}

namespace detail {

// rho -> U rho U^H, re-established as an exactly Hermitian unit-trace state.
inline DensityMatrix conjugate_state(const DensityMatrix& rho,
                                     const ComplexMatrix& u) {
  ComplexMatrix m = u * rho.mat() * u.adjoint();
  return normalize_trace(HermitianMatrix::from_upper(m));
}

}  // namespace detail

// Product state entangled on disjoint neighbor pairs (1,2), (3,4), ...;
// needs an even qubit count.  The stream is consumed in the same order as
// product_state, so a matched seed yields a state with the identical
// spectrum.
inline DensityMatrix pairwise_state(std::size_t qubits,
                                    const QubitDistConfig& cfg,
                                    const HaarSource& haar, RandomStream& rs) {
  if (qubits < 2 || qubits % 2 != 0)
    throw std::invalid_argument("pairwise_state: qubit count must be even");
  DensityMatrix rho = product_state(qubits, cfg, haar, rs);
  for (std::size_t p = 1; p < qubits; p += 2) {
    const UnitaryMatrix m = haar.draw(4, rs);
    rho = detail::conjugate_state(rho, build_entangler(p, p + 1, qubits, m));
  }
  return rho;
}

// Product state entangled across every pair (i, j), i < j, applied in
// lexicographic order.  Same stream prefix as product_state.
inline DensityMatrix fully_state(std::size_t qubits, const QubitDistConfig& cfg,
                                 const HaarSource& haar, RandomStream& rs) {
  if (qubits < 2)
    throw std::invalid_argument("fully_state: need at least 2 qubits");
  DensityMatrix rho = product_state(qubits, cfg, haar, rs);
  for (std::size_t i = 1; i <= qubits; ++i)
    for (std::size_t j = i + 1; j <= qubits; ++j) {
      const UnitaryMatrix m = haar.draw(4, rs);
      rho = detail::conjugate_state(rho, build_entangler(i, j, qubits, m));
    }
  return rho;
}

// Labeled collection of states.  Records are Hermitian rather than density
// matrices because generated artifacts may deliberately leave the state set
// (a raw-coordinate decoder has no positivity guarantee); the generator
// below always produces valid states, and readers can revalidate on demand.
struct StateDataset {
  std::size_t qubits = 0;
  std::uint64_t seed = 0;
  bool isometric_scaling = true;  // flattening convention bound to this data
  std::vector<ClassLabel> labels;
  std::vector<HermitianMatrix> states;
  std::string config_text;  // canonical echo of how the data was produced

  std::size_t size() const { return states.size(); }
  std::size_t dim() const { return std::size_t{1} << qubits; }
};

// Per-class record counts in class order (product, pairwise, full).
using ClassCounts = std::array<std::size_t, 3>;

// Deterministic dataset build: record r draws everything it needs from its
// own derived stream, records are laid out class-major and then shuffled by
// a dedicated stream, and every state is validated before it is accepted.
inline StateDataset generate_dataset(std::size_t qubits, const ClassCounts& counts,
                                     const QubitDistConfig& cfg,
                                     const HaarSource& haar, std::uint64_t seed) {
  cfg.validate();
  if (qubits == 0) throw std::invalid_argument("generate_dataset: zero qubits");
  if (counts[1] > 0 && (qubits < 2 || qubits % 2 != 0))
    throw std::invalid_argument(
        "generate_dataset: pairwise class needs an even qubit count");
  if (counts[2] > 0 && qubits < 2)
    throw std::invalid_argument(
        "generate_dataset: full class needs at least 2 qubits");

  StateDataset ds;
  ds.qubits = qubits;
  ds.seed = seed;
  const std::size_t total = counts[0] + counts[1] + counts[2];
  ds.labels.reserve(total);
  ds.states.reserve(total);

  std::size_t record = 0;
  for (std::size_t cls = 0; cls < 3; ++cls) {
    for (std::size_t k = 0; k < counts[cls]; ++k, ++record) {
      RandomStream rs =
          RandomStream::derived(seed, stream_salt::kDatasetRecord, record);
      DensityMatrix rho;
      switch (cls) {
        case 0:
          rho = product_state(qubits, cfg, haar, rs);
          break;
        case 1:
          rho = pairwise_state(qubits, cfg, haar, rs);
          break;
        default:
          rho = fully_state(qubits, cfg, haar, rs);
          break;
      }
      const ValidityReport v = validate_density(rho.mat());
      if (!v.all_ok())
        throw std::runtime_error(
            "generate_dataset: produced an invalid state (defects: hermiticity " +
            std::to_string(v.hermiticity_defect) + ", min eigenvalue " +
            std::to_string(v.min_eigenvalue) + ", trace " +
            std::to_string(v.trace_defect) + ")");
      ds.labels.push_back(ClassLabel::one_hot(cls));
      ds.states.push_back(rho.hermitian());
    }
  }

  // Fisher-Yates with its own stream, so class order carries no signal.
  RandomStream shuffle =
      RandomStream::derived(seed, stream_salt::kDatasetShuffle, 0);
  for (std::size_t i = total; i > 1; --i) {
    const std::size_t j = shuffle.uniform_index(i);
    std::swap(ds.labels[i - 1], ds.labels[j]);
    std::swap(ds.states[i - 1], ds.states[j]);
  }
  return ds;
}

// ---------------------------------------------------------------------------
// On-disk dataset format ("QSD1").
//
//   magic   'Q' 'S' 'D' '1'
//   u32     format version (1)
//   u32     matrix dimension n
//   u32     label length L
//   u64     record count
//   u64     generation seed
//   u8      isometric-scaling flag
//   records: L f64 label weights, then n*n complex entries (re, im f64
//            pairs) in row-major order
//   u32     byte length of the trailing config echo (0 if absent)
//   bytes   canonical config text
//
// All integers and doubles are little-endian.  The config echo sits at the
// tail so record offsets stay computable from the header alone.
// ---------------------------------------------------------------------------

inline void write_dataset(const StateDataset& ds, const std::string& path) {
  BinaryWriter w(path);
  w.magic("QSD1");
  w.u32(1);
  w.u32(static_cast<std::uint32_t>(ds.dim()));
  w.u32(3);
  w.u64(ds.size());
  w.u64(ds.seed);
  w.u8(ds.isometric_scaling ? 1 : 0);
  for (std::size_t r = 0; r < ds.size(); ++r) {
    for (double x : ds.labels[r].w) w.f64(x);
    const ComplexMatrix& m = ds.states[r].mat();
    for (std::size_t i = 0; i < m.dim(); ++i)
      for (std::size_t j = 0; j < m.dim(); ++j) {
        w.f64(m(i, j).real());
        w.f64(m(i, j).imag());
      }
  }
  w.u32(static_cast<std::uint32_t>(ds.config_text.size()));
  w.bytes(ds.config_text);
  w.close();
}

inline StateDataset read_dataset(const std::string& path) {
  BinaryReader r(path);
  r.expect_magic("QSD1");
  const std::uint32_t version = r.u32();
  if (version != 1)
    throw std::runtime_error("unsupported dataset version " +
                             std::to_string(version) + " in " + path);
  const std::uint32_t n = r.u32();
  if (n == 0 || n > 1024)
    throw std::runtime_error("implausible matrix dimension in " + path);
  if ((n & (n - 1)) != 0)
    throw std::runtime_error("dataset dimension is not a power of two in " + path);
  const std::uint32_t label_len = r.u32();
  if (label_len != 3)
    throw std::runtime_error("unsupported label length " +
                             std::to_string(label_len) + " in " + path);
  const std::uint64_t count = r.u64();
  if (count > (std::uint64_t{1} << 32))
    throw std::runtime_error("implausible record count in " + path);

  StateDataset ds;
  ds.qubits = num_qubits(ComplexMatrix(n));
  ds.seed = r.u64();
  ds.isometric_scaling = r.u8() != 0;
  ds.labels.reserve(count);
  ds.states.reserve(count);
  for (std::uint64_t rec = 0; rec < count; ++rec) {
    ClassLabel l;
    for (double& x : l.w) x = r.f64();
    ComplexMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double re = r.f64();
        const double im = r.f64();
        m(i, j) = Complex(re, im);
      }
    const double defect = m.hermiticity_defect();
    if (defect > 1e-10)
      throw std::runtime_error("record " + std::to_string(rec) + " in " + path +
                               " is not Hermitian (defect " +
                               std::to_string(defect) + ")");
    ds.labels.push_back(l);
    ds.states.push_back(HermitianMatrix::from_upper(m));
  }
  if (!r.at_end()) {
    const std::uint32_t text_len = r.u32();
    ds.config_text = r.bytes(text_len);
  }
  return ds;
}

}  // namespace qsgen

#endif  // QSGEN_QUANTUM_DATA_HPP_
