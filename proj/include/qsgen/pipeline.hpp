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

#ifndef QSGEN_PIPELINE_HPP_
#define QSGEN_PIPELINE_HPP_

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "qsgen/checkpoint.hpp"
#include "qsgen/diffusion.hpp"
#include "qsgen/hermitian.hpp"
#include "qsgen/mirror.hpp"
#include "qsgen/score_network.hpp"

namespace qsgen {

enum class SamplerKind { sde, ode };

struct SampleOptions {
  SamplerKind sampler = SamplerKind::sde;
  std::size_t steps = 500;
  OdeIntegrator integrator = OdeIntegrator::heun;
  // When false, sampled vectors are read back directly as matrix entries
  // (hermitized only) instead of going through the structure-preserving
  // decoder -- the baseline mode that can and does emit invalid states.
  bool use_mirror = true;
};

struct GenerationReport {
  std::size_t count = 0;
  std::size_t psd_failures = 0;
  std::size_t trace_failures = 0;
  std::size_t invalid = 0;  // failed any density-matrix property

  double violation_rate() const {
    return count == 0 ? 0.0
                      : static_cast<double>(invalid) /
                            static_cast<double>(count);
  }
  double psd_violation_rate() const {
    return count == 0 ? 0.0
                      : static_cast<double>(psd_failures) /
                            static_cast<double>(count);
  }
};

struct GenerationResult {
  std::vector<HermitianMatrix> states;     // decoded (or hermitized) outputs
  std::vector<std::vector<double>> duals;  // raw sampler output rows
  GenerationReport report;
};

// Draws `count` vectors with the reverse-time sampler configured by `opts`
// and maps them to matrices.  The report records a validity scan with
// tolerances 1e-10 hermiticity, 1e-12 trace, and strict positivity.  On the
// mirror path positivity is certified from the decoder's own assembled
// spectrum -- the eigenvalues actually placed during construction -- because
// re-diagonalizing the dense matrix cannot resolve eigenvalues below its
// ~1e-16 noise floor.  The raw path has no such construction, so it is
// scanned with the general eigensolver-based check.
inline GenerationResult generate_states(const Checkpoint& ck,
                                        const GuidanceSpec& spec,
                                        const SampleOptions& opts,
                                        std::size_t count, std::uint64_t seed) {
  ScoreNetwork net(ck.arch);
  if (ck.params.size() != net.param_count())
    throw std::invalid_argument("generate_states: checkpoint parameter count "
                                "does not match its architecture");
  net.params() = ck.params;

  GenerationResult out;
  if (opts.sampler == SamplerKind::sde) {
    out.duals = sample_reverse_sde(net, spec, ck.schedule, opts.steps, count,
                                   seed);
  } else {
    out.duals = sample_pf_ode(net, spec, ck.schedule, opts.steps, count, seed,
                              opts.integrator);
  }

  out.states.reserve(count);
  out.report.count = count;
  for (const std::vector<double>& row : out.duals) {
    bool positive, trace_ok, hermitian_ok;
    HermitianMatrix h;
    if (opts.use_mirror) {
      SpectralState s = decode_spectral(std::span<const double>(row), ck.mirror);
      h = s.state.hermitian();
      positive = true;
      for (double ev : s.eigenvalues) positive = positive && ev > 0.0;
      trace_ok = std::abs(h.real_trace() - 1.0) <= 1e-12;
      hermitian_ok = h.mat().hermiticity_defect() <= 1e-10;
    } else {
      h = vec_to_herm(std::span<const double>(row), ck.mirror);
      const ValidityReport v = validate_density(h.mat());
      positive = v.positive;
      trace_ok = v.trace_ok;
      hermitian_ok = v.hermitian_ok;
    }
    if (!positive) out.report.psd_failures += 1;
    if (!trace_ok) out.report.trace_failures += 1;
    if (!(positive && trace_ok && hermitian_ok)) out.report.invalid += 1;
    out.states.push_back(std::move(h));
  }
  return out;
}

}  // namespace qsgen

#endif  // QSGEN_PIPELINE_HPP_
