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

#ifndef QSGEN_TRAIN_HPP_
#define QSGEN_TRAIN_HPP_

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qsgen/checkpoint.hpp"
#include "qsgen/diffusion.hpp"
#include "qsgen/mirror.hpp"
#include "qsgen/quantum_data.hpp"
#include "qsgen/score_network.hpp"

namespace qsgen {

struct TrainConfig {
  std::size_t batch_size = 128;
  std::size_t iterations = 10000;
  double learning_rate = 1e-3;
  double lr_decay = 0.995;  // multiplicative, applied every 1000 steps
  double weight_decay = 1e-4;
  double cond_dropout_prob = 0.1;
  std::uint64_t seed = 0;

  void validate() const {
    if (batch_size == 0)
      throw std::invalid_argument("TrainConfig: batch_size must be positive");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
      throw std::invalid_argument("TrainConfig: learning_rate must be positive");
    if (!(lr_decay > 0.0) || lr_decay > 1.0)
      throw std::invalid_argument("TrainConfig: lr_decay must be in (0, 1]");
    if (!(weight_decay >= 0.0) || !std::isfinite(weight_decay))
      throw std::invalid_argument("TrainConfig: weight_decay must be >= 0");
    if (!(cond_dropout_prob >= 0.0) || cond_dropout_prob > 1.0)
      throw std::invalid_argument(
          "TrainConfig: cond_dropout_prob must be in [0, 1]");
  }
};

// Training view of a dataset: one flat real row per state (either mirror
// coordinates or the raw flattened matrix), plus the class labels.
struct DualDataset {
  std::size_t dim = 0;
  std::vector<double> rows;  // count x dim, row-major
  std::vector<ClassLabel> labels;
  bool labeled = true;

  std::size_t count() const { return dim == 0 ? 0 : rows.size() / dim; }

  void validate() const {
    if (dim == 0 || rows.empty() || rows.size() % dim != 0)
      throw std::invalid_argument("DualDataset: malformed row storage");
    if (labeled && labels.size() != count())
      throw std::invalid_argument("DualDataset: label count mismatch");
  }
};

// Mirror-encodes every record: the model then lives in the unconstrained
// dual space and decoded samples are valid by construction.
inline DualDataset encode_dataset(const StateDataset& ds,
                                  const MirrorConfig& cfg) {
  DualDataset out;
  out.dim = vec_length_for_dim(ds.dim());
  out.rows.reserve(ds.size() * out.dim);
  out.labels = ds.labels;
  for (const HermitianMatrix& h : ds.states) {
    const DualVector v = encode(DensityMatrix::from_hermitian(h), cfg);
    out.rows.insert(out.rows.end(), v.coords.begin(), v.coords.end());
  }
  return out;
}

// Flattens records directly with no mirror map: the baseline mode whose
// samples carry no structural guarantee.
inline DualDataset vectorize_dataset(const StateDataset& ds,
                                     const MirrorConfig& cfg) {
  DualDataset out;
  out.dim = vec_length_for_dim(ds.dim());
  out.rows.reserve(ds.size() * out.dim);
  out.labels = ds.labels;
  for (const HermitianMatrix& h : ds.states) {
    const DualVector v = herm_to_vec(h, cfg);
    out.rows.insert(out.rows.end(), v.coords.begin(), v.coords.end());
  }
  return out;
}

// One fully materialized training step: perturbed inputs, per-row times,
// conditioning (after dropout), regression targets and loss weights.
// Freezing the randomness here keeps the loss a pure deterministic function
// of the parameters, which is what the finite-difference check needs.
struct TrainBatch {
  std::size_t batch = 0;
  std::size_t dim = 0;
  std::vector<double> xt, t, labels, targets, weights;
  std::vector<std::uint8_t> has_label;
};

// Batch for optimizer iteration `iter`, drawn from that iteration's derived
// stream: rows are sampled with replacement, each row gets a uniform time,
// Gaussian perturbation, and an independent condition-dropout coin.
inline TrainBatch draw_train_batch(const DualDataset& data,
                                   const DiffusionSchedule& sched,
                                   double cond_dropout_prob,
                                   std::size_t batch_size, std::uint64_t seed,
                                   std::uint64_t iter) {
  data.validate();
  sched.validate();
  const std::size_t d = data.dim;
  const std::size_t n = data.count();
  RandomStream rs =
      RandomStream::derived(seed, stream_salt::kTrainIteration, iter);
  TrainBatch b;
  b.batch = batch_size;
  b.dim = d;
  b.xt.resize(batch_size * d);
  b.t.resize(batch_size);
  b.labels.assign(batch_size * 3, 0.0);
  b.targets.resize(batch_size * d);
  b.weights.resize(batch_size);
  b.has_label.assign(batch_size, 0);
  for (std::size_t i = 0; i < batch_size; ++i) {
    const std::size_t idx = rs.uniform_index(n);
    const double t = rs.uniform(sched.t_min, sched.t_max);
    const double mean = sched.mean_factor(t);
    const double var = sched.variance(t);
    const double sd = std::sqrt(var);
    const double* x0 = data.rows.data() + idx * d;
    for (std::size_t k = 0; k < d; ++k) {
      const double noise = sd * rs.normal();
      b.xt[i * d + k] = mean * x0[k] + noise;
      b.targets[i * d + k] = -noise / var;
    }
    b.t[i] = t;
    b.weights[i] = var;
    const bool keep_label = data.labeled && rs.uniform() >= cond_dropout_prob;
    if (keep_label) {
      b.has_label[i] = 1;
      for (std::size_t k = 0; k < 3; ++k)
        b.labels[i * 3 + k] = data.labels[idx].w[k];
    }
  }
  return b;
}

// Weighted denoising score-matching loss
//   L = (1 / (B*D)) * sum_i w_i * || s(x_i, t_i, c_i) - target_i ||^2,
// w_i = 1 - e^{-2 t_i}, averaged over batch rows and coordinates.  Adds the
// parameter gradient into `grad` (caller zeroes) and returns the loss.
inline double loss_and_grad(const ScoreNetwork& net, const TrainBatch& b,
                            ScoreWorkspace& ws, std::vector<double>& y_scratch,
                            std::vector<double>& dy_scratch, double* grad) {
  const std::size_t n = b.batch * b.dim;
  y_scratch.resize(n);
  dy_scratch.resize(n);
  net.forward_batch(b.xt.data(), b.t.data(), b.labels.data(),
                    b.has_label.data(), b.batch, ws, y_scratch.data());
  const double inv = 1.0 / static_cast<double>(n);
  double loss = 0.0;
  for (std::size_t i = 0; i < b.batch; ++i) {
    const double w = b.weights[i];
    for (std::size_t k = 0; k < b.dim; ++k) {
      const std::size_t idx = i * b.dim + k;
      const double r = y_scratch[idx] - b.targets[idx];
      loss += w * r * r * inv;
      dy_scratch[idx] = 2.0 * w * r * inv;
    }
  }
  net.backward_batch(dy_scratch.data(), ws, grad);
  return loss;
}

// Decoupled-weight-decay adaptive-moment optimizer.
inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEps = 1e-8;

struct AdamWState {
  std::vector<double> m, v;
  std::uint64_t step_count = 0;

  explicit AdamWState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

inline void adamw_step(std::vector<double>& params, const double* grad,
                       AdamWState& st, double lr, double weight_decay) {
  st.step_count += 1;
  const double bc1 =
      1.0 - std::pow(kAdamBeta1, static_cast<double>(st.step_count));
  const double bc2 =
      1.0 - std::pow(kAdamBeta2, static_cast<double>(st.step_count));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grad[i];
    st.m[i] = kAdamBeta1 * st.m[i] + (1.0 - kAdamBeta1) * g;
    st.v[i] = kAdamBeta2 * st.v[i] + (1.0 - kAdamBeta2) * g * g;
    const double mhat = st.m[i] / bc1;
    const double vhat = st.v[i] / bc2;
    params[i] -=
        lr * (mhat / (std::sqrt(vhat) + kAdamEps) + weight_decay * params[i]);
  }
}

// Step-decayed learning rate for a given optimizer step index (0-based).
inline double lr_at(const TrainConfig& cfg, std::uint64_t step) {
  return cfg.learning_rate *
         std::pow(cfg.lr_decay, static_cast<double>(step / 1000));
}

using TrainLogFn =
    std::function<void(std::uint64_t iter, double loss, double lr)>;

// Runs (or resumes) score-matching training and returns a self-describing
// checkpoint.  `resume_from` must agree with the requested configuration;
// iteration numbering is global, so a run interrupted at any point and
// resumed to the same total is bit-identical to an uninterrupted one: batch
// randomness derives from the absolute iteration index, the optimizer state
// rides in the checkpoint, and the loss moving average carries over.
inline Checkpoint train(const DualDataset& data, const TrainConfig& cfg,
                        const DiffusionSchedule& sched, const ScoreArch& arch,
                        const MirrorConfig& mirror, bool mirror_pipeline,
                        const Checkpoint* resume_from = nullptr,
                        const TrainLogFn& log = nullptr) {
  cfg.validate();
  sched.validate();
  data.validate();
  ScoreArch a = arch;
  if (a.input_dim == 0) a.input_dim = data.dim;
  if (a.input_dim != data.dim)
    throw std::invalid_argument("train: architecture input_dim " +
                                std::to_string(a.input_dim) +
                                " does not match dataset row length " +
                                std::to_string(data.dim));
  a.validate();

  ScoreNetwork net(a);
  AdamWState opt(net.param_count());
  std::uint64_t start_iter = 0;
  double ema = 0.0;
  if (resume_from != nullptr) {
    const Checkpoint& rc = *resume_from;
    if (!(rc.arch == a) || !(rc.schedule == sched) ||
        rc.mirror.isometric_scaling != mirror.isometric_scaling ||
        rc.mirror_pipeline != mirror_pipeline || rc.seed != cfg.seed)
      throw std::invalid_argument(
          "train: resume checkpoint disagrees with the requested run");
    if (!rc.has_optimizer_state)
      throw std::invalid_argument(
          "train: resume checkpoint lacks optimizer state");
    if (rc.iterations > cfg.iterations)
      throw std::invalid_argument(
          "train: checkpoint already past the requested iteration count");
    net.params() = rc.params;
    opt.m = rc.adam_m;
    opt.v = rc.adam_v;
    opt.step_count = rc.iterations;
    start_iter = rc.iterations;
    ema = rc.final_loss;
  } else {
    net.init_params(cfg.seed);
  }

  ScoreWorkspace ws;
  std::vector<double> y_scratch, dy_scratch;
  std::vector<double> grad(net.param_count(), 0.0);
  for (std::uint64_t iter = start_iter; iter < cfg.iterations; ++iter) {
    TrainBatch batch = draw_train_batch(data, sched, cfg.cond_dropout_prob,
                                        cfg.batch_size, cfg.seed, iter);
    std::fill(grad.begin(), grad.end(), 0.0);
    const double loss =
        loss_and_grad(net, batch, ws, y_scratch, dy_scratch, grad.data());
    if (!std::isfinite(loss))
      throw std::runtime_error("train: non-finite loss at iteration " +
                               std::to_string(iter));
    ema = (iter == 0) ? loss : 0.99 * ema + 0.01 * loss;
    const double lr = lr_at(cfg, iter);
    adamw_step(net.params(), grad.data(), opt, lr, cfg.weight_decay);
    if (log && iter % 100 == 0) log(iter, loss, lr);
  }

  Checkpoint ck;
  ck.arch = a;
  ck.schedule = sched;
  ck.mirror = mirror;
  ck.mirror_pipeline = mirror_pipeline;
  ck.seed = cfg.seed;
  KeyValueText extra;
  extra.set("train.batch_size", format_u64(cfg.batch_size));
  extra.set("train.iterations", format_u64(cfg.iterations));
  extra.set("train.learning_rate", format_double(cfg.learning_rate));
  extra.set("train.lr_decay", format_double(cfg.lr_decay));
  extra.set("train.weight_decay", format_double(cfg.weight_decay));
  extra.set("train.cond_dropout_prob", format_double(cfg.cond_dropout_prob));
  extra.set("train.loss_weighting", "variance");
  ck.config_text = make_checkpoint_text(a, sched, mirror, mirror_pipeline,
                                        cfg.seed, extra);
  ck.params = net.params();
  ck.iterations = cfg.iterations;
  ck.final_loss = ema;  // 0.0 when no iteration ever ran
  ck.has_optimizer_state = true;
  ck.adam_m = opt.m;
  ck.adam_v = opt.v;
  return ck;
}

}  // namespace qsgen

#endif  // QSGEN_TRAIN_HPP_
