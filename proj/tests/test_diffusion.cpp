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

#include <cmath>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "qsgen/diffusion.hpp"
#include "qsgen/rng.hpp"
#include "qsgen/score_network.hpp"
#include "support.hpp"

using namespace qsgen;
using namespace qsgen_test;

namespace {

ScoreArch small_arch(std::size_t input_dim) {
  ScoreArch a;
  a.input_dim = input_dim;
  a.hidden_dim = 32;
  a.residual_blocks = 2;
  a.time_embed_dim = 16;
  a.label_dim = 3;
  a.norm_groups = 4;
  return a;
}

void randomize(ScoreNetwork& net, std::uint64_t seed) {
  RandomStream rs(seed);
  for (double& p : net.params()) p = 0.1 * rs.normal();
}

// Marginal score of OU-diffused N(0, sigma^2 I) data: the time-t marginal
// is Gaussian with variance sigma^2 e^{-2t} + 1 - e^{-2t}, so the score is
// exactly -x / v(t).  Substituting this for the network turns the samplers
// into closed-form testbeds.
struct GaussianScore {
  double sigma2;
  std::size_t dim;
  void operator()(const double* x, double t, std::size_t batch,
                  double* out) const {
    const double e = std::exp(-2.0 * t);
    const double v = sigma2 * e + 1.0 - e;
    for (std::size_t k = 0; k < batch * dim; ++k) out[k] = -x[k] / v;
  }
};

}  // namespace

TEST_CASE("schedule validation and marginal moments") {
  DiffusionSchedule s;
  s.validate();
  REQUIRE(s.t_min == 1e-3);
  REQUIRE(s.t_max == 5.0);
  REQUIRE(s.mean_factor(0.0) == 1.0);
  REQUIRE(s.variance(5.0) == Catch::Approx(1.0 - std::exp(-10.0)).epsilon(1e-15));
  REQUIRE(s.terminal_variance() == s.variance(s.t_max));
  DiffusionSchedule bad;
  bad.t_min = 2.0;
  bad.t_max = 1.0;
  REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.t_min = 0.0;
  bad.t_max = 1.0;
  REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("forward perturbation satisfies the target identity") {
  DiffusionSchedule s;
  RandomStream rs(5);
  std::vector<double> x0{0.4, -1.2, 2.0, 0.0};
  for (double t : {1e-3, 0.05, 0.8, 2.5, 5.0}) {
    PerturbResult p = forward_perturb(x0, t, s, rs);
    const double mean = std::exp(-t);
    const double var = 1.0 - std::exp(-2.0 * t);
    for (std::size_t i = 0; i < x0.size(); ++i) {
      // xt + var * target recovers the noiseless mean path
      const double recovered = p.xt[i] + var * p.score_target[i];
      REQUIRE(recovered == Catch::Approx(mean * x0[i]).margin(1e-13));
    }
  }
  REQUIRE_THROWS_AS(forward_perturb(x0, 1e-5, s, rs), std::invalid_argument);
  REQUIRE_THROWS_AS(forward_perturb(x0, 5.5, s, rs), std::invalid_argument);
}

TEST_CASE("forward perturbation at tiny time stays near the input") {
  DiffusionSchedule s;
  RandomStream rs(6);
  std::vector<double> x0{1.0, -0.5};
  for (int rep = 0; rep < 50; ++rep) {
    PerturbResult p = forward_perturb(x0, s.t_min, s, rs);
    for (std::size_t i = 0; i < x0.size(); ++i)
      REQUIRE(std::abs(p.xt[i] - x0[i]) < 6.0 * std::sqrt(2.0 * s.t_min));
  }
}

TEST_CASE("forward marginal matches its law at the horizon") {
  DiffusionSchedule s;
  RandomStream rs(7);
  std::vector<double> x0{0.7};
  const std::size_t n = 10000;
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    PerturbResult p = forward_perturb(x0, s.t_max, s, rs);
    sum += p.xt[0];
    sum2 += p.xt[0] * p.xt[0];
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  REQUIRE(std::abs(mean) < 0.03);       // e^{-5} * 0.7 is invisible
  REQUIRE(std::abs(var - 1.0) < 0.03);  // three sigma at n = 10000
}

TEST_CASE("forward marginal matches its law at intermediate time") {
  DiffusionSchedule s;
  RandomStream rs(8);
  const double t = 0.7;
  std::vector<double> x0{-1.3};
  const std::size_t n = 100000;
  const double m_expect = std::exp(-t) * x0[0];
  const double v_expect = 1.0 - std::exp(-2.0 * t);
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    PerturbResult p = forward_perturb(x0, t, s, rs);
    sum += p.xt[0];
    sum2 += p.xt[0] * p.xt[0];
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  const double se_mean = std::sqrt(v_expect / n);
  const double se_var = v_expect * std::sqrt(2.0 / n);
  REQUIRE(std::abs(mean - m_expect) < 3.0 * se_mean);
  REQUIRE(std::abs(var - v_expect) < 3.0 * se_var);
}

TEST_CASE("guidance endpoints are bit-exact and the blend is affine") {
  ScoreNetwork net(small_arch(6));
  randomize(net, 12);
  RandomStream rs(13);
  std::vector<double> x(6);
  for (double& v : x) v = rs.normal();
  const double t = 0.9;
  ClassLabel lab = ClassLabel::one_hot(1);

  std::vector<double> cond = net.forward_one(x, t, lab.w.data());
  std::vector<double> uncond = net.forward_one(x, t, nullptr);

  GuidanceSpec g1{1.0, lab};
  REQUIRE(guided_score(net, x, t, g1) == cond);
  GuidanceSpec g0{0.0, lab};
  REQUIRE(guided_score(net, x, t, g0) == uncond);
  GuidanceSpec gnone{3.0, std::nullopt};
  REQUIRE(guided_score(net, x, t, gnone) == uncond);

  GuidanceSpec g2{2.0, lab};
  std::vector<double> s2 = guided_score(net, x, t, g2);
  for (std::size_t i = 0; i < x.size(); ++i)
    REQUIRE(s2[i] ==
            Catch::Approx(2.0 * cond[i] - uncond[i]).margin(1e-12));

  // affine in gamma: s(a) + s(b) = 2 s((a+b)/2)
  GuidanceSpec ga{0.3, lab}, gb{1.7, lab}, gm{1.0, lab};
  std::vector<double> sa = guided_score(net, x, t, ga);
  std::vector<double> sb = guided_score(net, x, t, gb);
  std::vector<double> sm = guided_score(net, x, t, gm);
  for (std::size_t i = 0; i < x.size(); ++i)
    REQUIRE(sa[i] + sb[i] == Catch::Approx(2.0 * sm[i]).margin(1e-12));

  GuidanceSpec bad{-0.5, lab};
  REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("reverse SDE sampler honors count, seed, and per-sample streams") {
  ScoreNetwork net(small_arch(4));
  net.init_params(3);
  DiffusionSchedule sched;
  GuidanceSpec spec{1.0, std::nullopt};
  auto a = sample_reverse_sde(net, spec, sched, 25, 5, 99);
  auto b = sample_reverse_sde(net, spec, sched, 25, 5, 99);
  auto c = sample_reverse_sde(net, spec, sched, 25, 5, 100);
  REQUIRE(a.size() == 5);
  REQUIRE(a == b);
  REQUIRE(a != c);
  // sample i depends only on (seed, i), not on how many neighbors it had
  auto first3 = sample_reverse_sde(net, spec, sched, 25, 3, 99);
  for (std::size_t i = 0; i < 3; ++i) REQUIRE(first3[i] == a[i]);
  REQUIRE(sample_reverse_sde(net, spec, sched, 25, 0, 1).empty());
  REQUIRE_THROWS_AS(sample_reverse_sde(net, spec, sched, 0, 1, 1),
                    std::invalid_argument);
}

TEST_CASE("one SDE step from a zero-score model matches the hand formula") {
  const std::size_t d = 4;
  ScoreNetwork net(small_arch(d));
  net.init_params(11);  // zero final layer -> score identically zero
  DiffusionSchedule sched;
  const std::uint64_t seed = 31;
  auto out = sample_reverse_sde(net, GuidanceSpec{1.0, std::nullopt}, sched, 1,
                                1, seed);

  // replay the sampler's stream: first d normals seed the state, the next
  // d are the single step's noise
  RandomStream rs = RandomStream::derived(seed, stream_salt::kSamplePath, 0);
  const double sigma_T = std::sqrt(sched.terminal_variance());
  const double dtau = sched.t_max - sched.t_min;
  const double noise_scale = std::sqrt(2.0 * dtau);
  std::vector<double> y0(d), xi(d);
  for (double& v : y0) v = sigma_T * rs.normal();
  for (double& v : xi) v = rs.normal();
  for (std::size_t k = 0; k < d; ++k) {
    // grouping matches the sampler's compound assignment: the drift and
    // noise terms are summed first, then added onto the state
    const double expect =
        y0[k] + (dtau * (y0[k] + 2.0 * 0.0) + noise_scale * xi[k]);
    REQUIRE(out[0][k] == expect);
  }
}

TEST_CASE("reverse SDE with the analytic Gaussian score recovers the data law") {
  DiffusionSchedule sched;
  const double sigma2 = 0.25;
  GaussianScore score{sigma2, 2};
  const std::size_t count = 1500;
  auto samples =
      sample_reverse_sde_with(score, 2, sched, 200, count, 2026);

  std::vector<double> coords;
  for (const auto& row : samples) coords.insert(coords.end(), row.begin(), row.end());
  // reference draw from the exact terminal marginal N(0, v(t_min))
  const double e = std::exp(-2.0 * sched.t_min);
  const double sd_ref = std::sqrt(sigma2 * e + 1.0 - e);
  RandomStream rs(777);
  std::vector<double> ref(coords.size());
  for (double& v : ref) v = sd_ref * rs.normal();
  REQUIRE(w1_sorted_oracle(coords, ref) < 0.05);
}

TEST_CASE("probability flow is deterministic and grows without score") {
  const std::size_t d = 3;
  ScoreNetwork net(small_arch(d));
  net.init_params(17);  // zero score
  DiffusionSchedule sched;
  GuidanceSpec spec{1.0, std::nullopt};
  const std::size_t steps = 400;
  auto a = sample_pf_ode(net, spec, sched, steps, 4, 5);
  auto b = sample_pf_ode(net, spec, sched, steps, 4, 5);
  REQUIRE(a == b);

  // zero score reduces the flow to dy/dtau = y: each coordinate is scaled
  // by the integrator's growth factor, near e^{t_max - t_min}
  const double span = sched.t_max - sched.t_min;
  const double h = span / steps;
  const double heun_growth = std::pow(1.0 + h + 0.5 * h * h, double(steps));
  const double exact_growth = std::exp(span);
  RandomStream rs0 = RandomStream::derived(5, stream_salt::kSamplePath, 0);
  const double sigma_T = std::sqrt(sched.terminal_variance());
  for (std::size_t k = 0; k < d; ++k) {
    const double init = sigma_T * rs0.normal();
    REQUIRE(a[0][k] == Catch::Approx(init * heun_growth).epsilon(1e-9));
    REQUIRE(a[0][k] == Catch::Approx(init * exact_growth).epsilon(1e-3));
  }
  REQUIRE(heun_growth / exact_growth > 0.99);
  REQUIRE(heun_growth > 100.0);  // growth, not decay

  // RK4 reproduces the same linear flow with a smaller integration error
  auto r = sample_pf_ode(net, spec, sched, steps, 1, 5, OdeIntegrator::rk4);
  const double rk4_growth =
      std::pow(1.0 + h + h * h / 2.0 + h * h * h / 6.0 + h * h * h * h / 24.0,
               double(steps));
  RandomStream rs1 = RandomStream::derived(5, stream_salt::kSamplePath, 0);
  for (std::size_t k = 0; k < d; ++k) {
    const double init = sigma_T * rs1.normal();
    REQUIRE(r[0][k] == Catch::Approx(init * rk4_growth).epsilon(1e-9));
  }
  REQUIRE(std::abs(rk4_growth - exact_growth) <
          std::abs(heun_growth - exact_growth));
}

TEST_CASE("probability flow with the analytic Gaussian score recovers the data law") {
  DiffusionSchedule sched;
  const double sigma2 = 0.25;
  GaussianScore score{sigma2, 2};
  const std::size_t count = 1500;
  auto samples = sample_pf_ode_with(score, 2, sched, 200, count, 909);
  std::vector<double> coords;
  for (const auto& row : samples)
    coords.insert(coords.end(), row.begin(), row.end());
  const double e = std::exp(-2.0 * sched.t_min);
  const double sd_ref = std::sqrt(sigma2 * e + 1.0 - e);
  RandomStream rs(778);
  std::vector<double> ref(coords.size());
  for (double& v : ref) v = sd_ref * rs.normal();
  REQUIRE(w1_sorted_oracle(coords, ref) < 0.05);
}
