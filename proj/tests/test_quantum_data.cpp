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

#include <catch_amalgamated.hpp>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <vector>

#include "qsgen/quantum_data.hpp"
#include "support.hpp"

using qsgen::ClassCounts;
using qsgen::ClassLabel;
using qsgen::Complex;
using qsgen::ComplexMatrix;
using qsgen::DensityMatrix;
using qsgen::HaarSource;
using qsgen::HermitianMatrix;
using qsgen::QubitDistConfig;
using qsgen::RandomStream;
using qsgen::StateDataset;
using qsgen::UnitaryMatrix;

namespace {

HaarSource qr_source() {
  HaarSource h;
  h.kind = HaarSource::Kind::qr;
  return h;
}

std::vector<double> sorted_spectrum(const HermitianMatrix& h) {
  auto d = qsgen::eigh(h);
  return d.eigenvalues;  // already ascending
}

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("class labels validate the simplex") {
  ClassLabel l = ClassLabel::one_hot(1);
  REQUIRE(l.w == std::array<double, 3>{0.0, 1.0, 0.0});
  REQUIRE_NOTHROW(l.validate());
  l.w = {0.25, 0.5, 0.25};
  REQUIRE_NOTHROW(l.validate());
  l.w = {0.5, 0.6, 0.0};
  REQUIRE_THROWS_AS(l.validate(), std::invalid_argument);
  l.w = {-0.1, 1.1, 0.0};
  REQUIRE_THROWS_AS(l.validate(), std::invalid_argument);
  REQUIRE_THROWS_AS(ClassLabel::one_hot(3), std::invalid_argument);
}

TEST_CASE("sample_qubit spectra stay inside the normalized band") {
  QubitDistConfig cfg;  // [1, 3]
  HaarSource haar = qr_source();
  for (int i = 0; i < 200; ++i) {
    RandomStream rs = RandomStream::derived(301, 1, i);
    DensityMatrix rho = qsgen::sample_qubit(cfg, haar, rs);
    auto ev = sorted_spectrum(rho.hermitian());
    // Normalized eigenvalues of diag(l1, l2)/(l1+l2) with l in [1, 3] lie in
    // [1/4, 3/4].
    REQUIRE(ev.front() >= 0.25 - 1e-12);
    REQUIRE(ev.back() <= 0.75 + 1e-12);
    REQUIRE(rho.hermitian().real_trace() == Catch::Approx(1.0).margin(1e-13));
  }
}

TEST_CASE("degenerate spectrum band collapses to the maximally mixed qubit") {
  QubitDistConfig cfg;
  cfg.lambda_min = cfg.lambda_max = 1.0;
  HaarSource haar = qr_source();
  RandomStream rs(302);
  DensityMatrix rho = qsgen::sample_qubit(cfg, haar, rs);
  ComplexMatrix half = ComplexMatrix::identity(2);
  half *= Complex(0.5, 0.0);
  REQUIRE(rho.mat().max_abs_diff(half) < 1e-14);
}

TEST_CASE("qubit distribution config rejects bad bands") {
  QubitDistConfig cfg;
  cfg.lambda_min = 0.0;
  REQUIRE_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.lambda_min = 2.0;
  cfg.lambda_max = 1.0;
  REQUIRE_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("product state spectrum is the product of qubit spectra") {
  QubitDistConfig cfg;
  HaarSource haar = qr_source();
  RandomStream rs(303);
  DensityMatrix rho = qsgen::product_state(2, cfg, haar, rs);
  auto ev = sorted_spectrum(rho.hermitian());

  // Re-generate the two qubit draws with the same stream to get the factors.
  RandomStream rs2(303);
  DensityMatrix a = qsgen::sample_qubit(cfg, haar, rs2);
  DensityMatrix b = qsgen::sample_qubit(cfg, haar, rs2);
  std::vector<double> expect;
  for (double x : sorted_spectrum(a.hermitian()))
    for (double y : sorted_spectrum(b.hermitian())) expect.push_back(x * y);
  std::sort(expect.begin(), expect.end());
  for (std::size_t k = 0; k < 4; ++k)
    REQUIRE(ev[k] == Catch::Approx(expect[k]).margin(1e-12));
}

TEST_CASE("build_entangler matches an explicit tensor-leg oracle") {
  RandomStream rs(304);
  UnitaryMatrix m = qsgen::haar_unitary_qr(4, rs);

  SECTION("two qubits: the entangler is the matrix itself") {
    ComplexMatrix u = qsgen::build_entangler(1, 2, 2, m);
    REQUIRE(u.max_abs_diff(m.mat()) == 0.0);
  }

  SECTION("three qubits, pair (1,3): act on basis product vectors") {
    ComplexMatrix u = qsgen::build_entangler(1, 3, 3, m);
    // Column for basis state |j1 j2 j3>: amplitude at |i1 i2 i3> must be
    // M[(i1 i3), (j1 j3)] * delta_{i2 j2}.
    for (std::size_t col = 0; col < 8; ++col) {
      const std::size_t j1 = (col >> 2) & 1, j2 = (col >> 1) & 1, j3 = col & 1;
      for (std::size_t row = 0; row < 8; ++row) {
        const std::size_t i1 = (row >> 2) & 1, i2 = (row >> 1) & 1, i3 = row & 1;
        const Complex want =
            (i2 == j2) ? m.mat()(2 * i1 + i3, 2 * j1 + j3) : Complex(0.0);
        REQUIRE(std::abs(u(row, col) - want) < 1e-15);
      }
    }
  }

  SECTION("entanglers are unitary at any position") {
    for (std::size_t i = 1; i <= 3; ++i)
      for (std::size_t j = i + 1; j <= 4; ++j)
        REQUIRE(qsgen::build_entangler(i, j, 4, m).unitarity_defect() < 1e-13);
  }

  SECTION("invalid pairs are rejected") {
    REQUIRE_THROWS_AS(qsgen::build_entangler(1, 1, 2, m), std::invalid_argument);
    REQUIRE_THROWS_AS(qsgen::build_entangler(0, 2, 2, m), std::invalid_argument);
    REQUIRE_THROWS_AS(qsgen::build_entangler(1, 3, 2, m), std::invalid_argument);
  }
}

TEST_CASE("entangled classes keep the product spectrum at matched seeds") {
  QubitDistConfig cfg;
  HaarSource haar = qr_source();
  for (int rec = 0; rec < 10; ++rec) {
    RandomStream r1 = RandomStream::derived(305, 9, rec);
    RandomStream r2 = RandomStream::derived(305, 9, rec);
    RandomStream r3 = RandomStream::derived(305, 9, rec);
    auto sp = sorted_spectrum(qsgen::product_state(2, cfg, haar, r1).hermitian());
    auto sw = sorted_spectrum(qsgen::pairwise_state(2, cfg, haar, r2).hermitian());
    auto sf = sorted_spectrum(qsgen::fully_state(2, cfg, haar, r3).hermitian());
    for (std::size_t k = 0; k < 4; ++k) {
      REQUIRE(sw[k] == Catch::Approx(sp[k]).margin(1e-10));
      REQUIRE(sf[k] == Catch::Approx(sp[k]).margin(1e-10));
    }
  }
}

TEST_CASE("on two qubits the pairwise and full classes coincide") {
  // Both apply exactly one entangler to the pair (1,2) with the same stream.
  QubitDistConfig cfg;
  HaarSource haar = qr_source();
  RandomStream r1(306), r2(306);
  DensityMatrix a = qsgen::pairwise_state(2, cfg, haar, r1);
  DensityMatrix b = qsgen::fully_state(2, cfg, haar, r2);
  REQUIRE(a.mat().max_abs_diff(b.mat()) == 0.0);
}

TEST_CASE("entangled states carry negativity, product states none") {
  // The default [1, 3] band keeps every qubit so mixed that even entangled
  // states stay inside the positive-partial-transpose ball; a wider spectrum
  // band is needed for negativity to show up at all.
  QubitDistConfig cfg;
  cfg.lambda_min = 0.05;
  HaarSource haar = qr_source();
  double mean_pw = 0.0;
  int entangled = 0;
  const int kDraws = 1000;
  for (int rec = 0; rec < kDraws; ++rec) {
    RandomStream rp = RandomStream::derived(307, 11, rec);
    DensityMatrix prod = qsgen::product_state(2, cfg, haar, rp);
    auto dp = qsgen::eigh(qsgen::partial_transpose(prod, {1}));
    REQUIRE(dp.eigenvalues.front() > -1e-10);  // separable: no negative mass

    RandomStream rw = RandomStream::derived(308, 11, rec);
    DensityMatrix pw = qsgen::pairwise_state(2, cfg, haar, rw);
    auto dw = qsgen::eigh(qsgen::partial_transpose(pw, {1}));
    double neg = 0.0;
    for (double v : dw.eigenvalues)
      if (v < 0.0) neg -= v;
    mean_pw += neg;
    if (neg > 1e-9) ++entangled;
  }
  mean_pw /= kDraws;
  // Seeded ensemble: roughly 30% of draws are entangled with mean
  // negativity around 0.02 -- far above any numerical floor.
  REQUIRE(mean_pw > 0.005);
  REQUIRE(entangled > 200);
}

TEST_CASE("default band states are too mixed to entangle") {
  // Frozen observation about the default config: entanglers never produce
  // negativity at [1, 3].  Documented behavior, relied on by nothing.
  QubitDistConfig cfg;
  HaarSource haar = qr_source();
  for (int rec = 0; rec < 50; ++rec) {
    RandomStream rw = RandomStream::derived(309, 12, rec);
    DensityMatrix pw = qsgen::pairwise_state(2, cfg, haar, rw);
    auto dw = qsgen::eigh(qsgen::partial_transpose(pw, {1}));
    REQUIRE(dw.eigenvalues.front() > -1e-9);
  }
}

TEST_CASE("pairwise_state rejects odd registers, fully_state single qubits") {
  QubitDistConfig cfg;
  HaarSource haar = qr_source();
  RandomStream rs(309);
  REQUIRE_THROWS_AS(qsgen::pairwise_state(3, cfg, haar, rs),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(qsgen::fully_state(1, cfg, haar, rs), std::invalid_argument);
}

TEST_CASE("generate_dataset: counts, labels, validity, determinism") {
  QubitDistConfig cfg;
  HaarSource haar = qr_source();
  const ClassCounts counts{12, 8, 5};
  StateDataset ds = qsgen::generate_dataset(2, counts, cfg, haar, 310);
  REQUIRE(ds.size() == 25);
  REQUIRE(ds.qubits == 2);
  REQUIRE(ds.dim() == 4);

  SECTION("per-class record counts survive the shuffle") {
    std::array<int, 3> seen{0, 0, 0};
    for (const ClassLabel& l : ds.labels)
      for (std::size_t c = 0; c < 3; ++c)
        if (l.w[c] == 1.0) ++seen[c];
    REQUIRE(seen == std::array<int, 3>{12, 8, 5});
  }
  SECTION("every record is a valid density matrix") {
    for (const HermitianMatrix& h : ds.states) {
      auto v = qsgen::validate_density(h.mat());
      REQUIRE(v.all_ok());
    }
  }
  SECTION("same seed reproduces bits, another seed does not") {
    StateDataset again = qsgen::generate_dataset(2, counts, cfg, haar, 310);
    REQUIRE(again.size() == ds.size());
    for (std::size_t r = 0; r < ds.size(); ++r) {
      REQUIRE(again.labels[r].w == ds.labels[r].w);
      REQUIRE(again.states[r].mat().max_abs_diff(ds.states[r].mat()) == 0.0);
    }
    StateDataset other = qsgen::generate_dataset(2, counts, cfg, haar, 311);
    double diff = 0.0;
    for (std::size_t r = 0; r < ds.size(); ++r)
      diff = std::max(diff, other.states[r].mat().max_abs_diff(ds.states[r].mat()));
    REQUIRE(diff > 1e-3);
  }
  SECTION("the shuffle is shared across matched single-class builds") {
    // Same seed and total count: record k of a product-only build must have
    // the same spectrum as record k of a pairwise-only build.
    StateDataset prod = qsgen::generate_dataset(2, {25, 0, 0}, cfg, haar, 310);
    StateDataset pair = qsgen::generate_dataset(2, {0, 25, 0}, cfg, haar, 310);
    for (std::size_t r = 0; r < 25; ++r) {
      auto sp = sorted_spectrum(prod.states[r]);
      auto sw = sorted_spectrum(pair.states[r]);
      for (std::size_t k = 0; k < 4; ++k)
        REQUIRE(sw[k] == Catch::Approx(sp[k]).margin(1e-10));
    }
  }
}

TEST_CASE("generate_dataset honors class/register compatibility") {
  QubitDistConfig cfg;
  HaarSource haar = qr_source();
  REQUIRE_THROWS_AS(qsgen::generate_dataset(1, {0, 5, 0}, cfg, haar, 1),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(qsgen::generate_dataset(1, {0, 0, 5}, cfg, haar, 1),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(qsgen::generate_dataset(3, {0, 5, 0}, cfg, haar, 1),
                    std::invalid_argument);
  // Single-qubit product data is the supported degenerate case.
  StateDataset ds = qsgen::generate_dataset(1, {6, 0, 0}, cfg, haar, 1);
  REQUIRE(ds.size() == 6);
  REQUIRE(ds.dim() == 2);
}

TEST_CASE("generate_dataset works with the Langevin Haar source") {
  QubitDistConfig cfg;
  HaarSource haar;  // lie kind
  haar.lie.burn_in_steps = 200;  // short chain: this test is about plumbing
  StateDataset ds = qsgen::generate_dataset(2, {3, 3, 0}, cfg, haar, 312);
  for (const HermitianMatrix& h : ds.states)
    REQUIRE(qsgen::validate_density(h.mat()).all_ok());
}

TEST_CASE("dataset file round trip is bit-exact") {
  QubitDistConfig cfg;
  HaarSource haar = qr_source();
  StateDataset ds = qsgen::generate_dataset(2, {4, 3, 2}, cfg, haar, 313);
  ds.config_text = "data.qubits = 2\ndata.seed = 313\n";
  const std::string path = temp_path("qsgen_roundtrip.qsd");
  qsgen::write_dataset(ds, path);
  StateDataset back = qsgen::read_dataset(path);
  REQUIRE(back.size() == ds.size());
  REQUIRE(back.qubits == ds.qubits);
  REQUIRE(back.seed == ds.seed);
  REQUIRE(back.isometric_scaling == ds.isometric_scaling);
  REQUIRE(back.config_text == ds.config_text);
  for (std::size_t r = 0; r < ds.size(); ++r) {
    REQUIRE(back.labels[r].w == ds.labels[r].w);
    REQUIRE(back.states[r].mat().max_abs_diff(ds.states[r].mat()) == 0.0);
  }
  std::filesystem::remove(path);
}

TEST_CASE("dataset reader rejects corrupt files") {
  const std::string path = temp_path("qsgen_corrupt.qsd");

  SECTION("wrong magic") {
    qsgen::BinaryWriter w(path);
    w.magic("XXX1");
    w.u32(1);
    w.close();
    REQUIRE_THROWS_WITH(qsgen::read_dataset(path),
                        Catch::Matchers::ContainsSubstring("bad magic"));
  }
  SECTION("truncated records") {
    qsgen::BinaryWriter w(path);
    w.magic("QSD1");
    w.u32(1);
    w.u32(2);
    w.u32(3);
    w.u64(5);  // promises 5 records
    w.u64(0);
    w.u8(1);
    w.f64(1.0);  // but provides a fraction of one
    w.close();
    REQUIRE_THROWS_WITH(qsgen::read_dataset(path),
                        Catch::Matchers::ContainsSubstring("truncated"));
  }
  SECTION("non-hermitian record") {
    qsgen::BinaryWriter w(path);
    w.magic("QSD1");
    w.u32(1);
    w.u32(2);
    w.u32(3);
    w.u64(1);
    w.u64(0);
    w.u8(1);
    w.f64(1.0);
    w.f64(0.0);
    w.f64(0.0);  // label
    // Matrix [[0.5, 1], [0, 0.5]]: upper and lower disagree far beyond 1e-10.
    const double entries[8] = {0.5, 0.0, 1.0, 0.0, 0.0, 0.0, 0.5, 0.0};
    for (double x : entries) w.f64(x);
    w.u32(0);
    w.close();
    REQUIRE_THROWS_WITH(qsgen::read_dataset(path),
                        Catch::Matchers::ContainsSubstring("not Hermitian"));
  }
  SECTION("unsupported version") {
    qsgen::BinaryWriter w(path);
    w.magic("QSD1");
    w.u32(7);
    w.close();
    REQUIRE_THROWS_WITH(qsgen::read_dataset(path),
                        Catch::Matchers::ContainsSubstring("version"));
  }
  std::filesystem::remove(path);
}

TEST_CASE("dataset files without a config echo still load") {
  // A file that ends right after its records (old-style tail) is valid.
  qsgen::BinaryWriter w(temp_path("qsgen_notail.qsd"));
  w.magic("QSD1");
  w.u32(1);
  w.u32(2);
  w.u32(3);
  w.u64(1);
  w.u64(42);
  w.u8(0);
  w.f64(1.0);
  w.f64(0.0);
  w.f64(0.0);
  const double entries[8] = {0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5, 0.0};
  for (double x : entries) w.f64(x);
  w.close();
  StateDataset ds = qsgen::read_dataset(temp_path("qsgen_notail.qsd"));
  REQUIRE(ds.size() == 1);
  REQUIRE(ds.config_text.empty());
  REQUIRE_FALSE(ds.isometric_scaling);
  std::filesystem::remove(temp_path("qsgen_notail.qsd"));
}
