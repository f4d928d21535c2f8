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

#ifndef QSGEN_SCORE_NETWORK_HPP_
#define QSGEN_SCORE_NETWORK_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qsgen/rng.hpp"

namespace qsgen {

// Residual MLP score model s(x, t, c) with three input paths:
//
//   spatial    x -> input projection -> residual blocks (4 linear layers +
//              SiLU each, additive skip) -> y_out
//   time       t -> sinusoidal embedding -> linear, SiLU, linear -> t_out
//   condition  c -> three linear layers (SiLU after the first two) -> c_out;
//              a missing condition is replaced by a learned null vector
//
//   out = Outmod(GroupNorm(y_out + t_out + c_out))
//
// where Outmod is four linear layers with SiLU between them and a
// zero-initialized final projection, so a fresh network scores everything
// as zero and the reverse process starts as a plain relaxation.
//
// The implementation is deliberately framework-free: parameters live in one
// flat array cut into named segments, forward/backward are hand-written
// batched loops with fixed summation order, and the gradient is checked
// against central finite differences in the test suite.  Batch processing
// exists purely for speed (weights stream once per batch, not per sample);
// results are identical to the one-sample path.

struct ScoreArch {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 256;
  std::size_t residual_blocks = 4;
  std::size_t time_embed_dim = 64;
  std::size_t label_dim = 3;
  std::size_t norm_groups = 8;

  void validate() const {
    if (input_dim == 0 || hidden_dim == 0 || residual_blocks == 0 ||
        time_embed_dim == 0 || label_dim == 0 || norm_groups == 0)
      throw std::invalid_argument("ScoreArch: all dimensions must be positive");
    if (time_embed_dim % 2 != 0)
      throw std::invalid_argument("ScoreArch: time_embed_dim must be even");
    if (hidden_dim % norm_groups != 0)
      throw std::invalid_argument(
          "ScoreArch: hidden_dim must be divisible by norm_groups");
  }

  bool operator==(const ScoreArch&) const = default;
};

// Sinusoidal time features: sin(t * w_k) for k = 0..dim/2-1, then the
// matching cosines, with w_k = 10000^{-2k/dim}.
inline std::vector<double> embed_time(double t, std::size_t dim) {
  if (dim == 0 || dim % 2 != 0)
    throw std::invalid_argument("embed_time: dimension must be positive even");
  std::vector<double> e(dim);
  const std::size_t half = dim / 2;
  for (std::size_t k = 0; k < half; ++k) {
    const double w = std::pow(
        10000.0, -2.0 * static_cast<double>(k) / static_cast<double>(dim));
    e[k] = std::sin(t * w);
    e[half + k] = std::cos(t * w);
  }
  return e;
}

// One named slice of the flat parameter array.  Matrices are row-major
// (rows x cols); vectors have cols == 1.
struct ParamSegment {
  std::string name;
  std::size_t offset = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::size_t count() const { return rows * cols; }
};

namespace detail {

// Deterministic dot product: four independent accumulators combined in a
// fixed order.  Breaking the single dependency chain roughly quadruples
// throughput without giving up bit-reproducibility.
inline double dot(const double* a, const double* b, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return ((s0 + s1) + (s2 + s3));
}

inline void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

inline double silu(double z) { return z * sigmoid(z); }

inline double silu_grad(double z) {
  const double s = sigmoid(z);
  return s * (1.0 + z * (1.0 - s));
}

}  // namespace detail

// Per-evaluation activation cache; reused across calls to avoid churn.
// Layout: all row-major, batch x features.
struct ScoreWorkspace {
  std::size_t batch = 0;
  // time path
  std::vector<double> emb, t1_pre, t1_act, t_out;
  // condition path
  std::vector<double> c1_pre, c1_act, c2_pre, c2_act, c_out;
  std::vector<std::uint8_t> has_label;
  // spatial path: h[k] is the block-k input, h[blocks] the final y_out
  std::vector<std::vector<double>> h;
  std::vector<std::vector<double>> u_pre;  // blocks x (4 layers concatenated)
  std::vector<std::vector<double>> u_act;
  // merge + norm
  std::vector<double> z, gn_mean, gn_var, gn_xhat, gn_out;
  // out module
  std::vector<double> o1_pre, o1_act, o2_pre, o2_act, o3_pre, o3_act;
  // scratch rows for backward
  std::vector<double> db_row, db_row2, db_row3;
  // raw forward inputs; backward reads them, so they must outlive the pair
  // of calls (training holds the batch buffers across both anyway)
  const double* x_in = nullptr;
  const double* labels_in = nullptr;
};

class ScoreNetwork {
 public:
  explicit ScoreNetwork(const ScoreArch& arch) : arch_(arch) {
    arch_.validate();
    build_layout();
    params_.assign(total_params_, 0.0);
  }

  const ScoreArch& arch() const { return arch_; }
  std::size_t param_count() const { return total_params_; }
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }
  const std::vector<ParamSegment>& segments() const { return segments_; }

  const ParamSegment& segment(const std::string& name) const {
    for (const ParamSegment& s : segments_)
      if (s.name == name) return s;
    throw std::invalid_argument("ScoreNetwork: no segment named " + name);
  }

  // Fan-in-scaled uniform weights, zero biases, unit norm scales, zeroed
  // final projection and null embedding.  Deterministic in `seed`.
  void init_params(std::uint64_t seed) {
    RandomStream rs = RandomStream::derived(seed, stream_salt::kNetworkInit, 0);
    for (const ParamSegment& s : segments_) {
      double* p = params_.data() + s.offset;
      const bool is_matrix = s.cols > 1;
      const bool zero_out = s.name == "out.l4.w";
      if (s.name == "gn.scale") {
        for (std::size_t i = 0; i < s.count(); ++i) p[i] = 1.0;
      } else if (is_matrix && !zero_out) {
        const double bound =
            1.0 / std::sqrt(static_cast<double>(s.cols));
        for (std::size_t i = 0; i < s.count(); ++i)
          p[i] = rs.uniform(-bound, bound);
      } else {
        for (std::size_t i = 0; i < s.count(); ++i) p[i] = 0.0;
      }
    }
  }

  // Batched evaluation.  x: batch x input_dim; t: batch; labels: batch x
  // label_dim (ignored where has_label is 0, entirely optional when null);
  // y: batch x input_dim output.  The workspace keeps everything backward
  // needs.
  void forward_batch(const double* x, const double* t, const double* labels,
                     const std::uint8_t* has_label, std::size_t batch,
                     ScoreWorkspace& ws, double* y) const {
    const std::size_t d = arch_.input_dim, hd = arch_.hidden_dim;
    const std::size_t te = arch_.time_embed_dim, ld = arch_.label_dim;
    const std::size_t blocks = arch_.residual_blocks;
    resize_workspace(ws, batch);
    ws.x_in = x;
    ws.labels_in = labels;

    // Time path.
    for (std::size_t i = 0; i < batch; ++i) {
      const std::vector<double> e = embed_time(t[i], te);
      std::copy(e.begin(), e.end(), ws.emb.data() + i * te);
    }
    linear_fwd(ws.emb.data(), te, "time.l1", batch, ws.t1_pre.data());
    silu_fwd(ws.t1_pre, ws.t1_act, batch * hd);
    linear_fwd(ws.t1_act.data(), hd, "time.l2", batch, ws.t_out.data());

    // Condition path (null rows get the learned embedding directly).
    for (std::size_t i = 0; i < batch; ++i)
      ws.has_label[i] = (labels != nullptr && (has_label == nullptr || has_label[i])) ? 1 : 0;
    std::fill(ws.c1_pre.begin(), ws.c1_pre.end(), 0.0);
    std::fill(ws.c1_act.begin(), ws.c1_act.end(), 0.0);
    std::fill(ws.c2_pre.begin(), ws.c2_pre.end(), 0.0);
    std::fill(ws.c2_act.begin(), ws.c2_act.end(), 0.0);
    {
      const double* w1 = seg_ptr("cond.l1.w");
      const double* b1 = seg_ptr("cond.l1.b");
      const double* w2 = seg_ptr("cond.l2.w");
      const double* b2 = seg_ptr("cond.l2.b");
      const double* w3 = seg_ptr("cond.l3.w");
      const double* b3 = seg_ptr("cond.l3.b");
      const double* null_e = seg_ptr("cond.null");
      for (std::size_t i = 0; i < batch; ++i) {
        double* cout_row = ws.c_out.data() + i * hd;
        if (!ws.has_label[i]) {
          std::copy(null_e, null_e + hd, cout_row);
          continue;
        }
        const double* lab = labels + i * ld;
        double* p1 = ws.c1_pre.data() + i * hd;
        double* a1 = ws.c1_act.data() + i * hd;
        for (std::size_t o = 0; o < hd; ++o)
          p1[o] = detail::dot(w1 + o * ld, lab, ld) + b1[o];
        for (std::size_t o = 0; o < hd; ++o) a1[o] = detail::silu(p1[o]);
        double* p2 = ws.c2_pre.data() + i * hd;
        double* a2 = ws.c2_act.data() + i * hd;
        for (std::size_t o = 0; o < hd; ++o)
          p2[o] = detail::dot(w2 + o * hd, a1, hd) + b2[o];
        for (std::size_t o = 0; o < hd; ++o) a2[o] = detail::silu(p2[o]);
        for (std::size_t o = 0; o < hd; ++o)
          cout_row[o] = detail::dot(w3 + o * hd, a2, hd) + b3[o];
      }
    }

    // Spatial path.
    linear_fwd(x, d, "in", batch, ws.h[0].data());
    for (std::size_t blk = 0; blk < blocks; ++blk) {
      const std::string base = "block" + std::to_string(blk);
      double* upre = ws.u_pre[blk].data();
      double* uact = ws.u_act[blk].data();
      const double* hin = ws.h[blk].data();
      double* hout = ws.h[blk + 1].data();
      // layer 1..3 with SiLU, layer 4 linear, then the residual add
      linear_fwd(hin, hd, base + ".l1", batch, upre);
      silu_fwd_ptr(upre, uact, batch * hd);
      linear_fwd(uact, hd, base + ".l2", batch, upre + batch * hd);
      silu_fwd_ptr(upre + batch * hd, uact + batch * hd, batch * hd);
      linear_fwd(uact + batch * hd, hd, base + ".l3", batch, upre + 2 * batch * hd);
      silu_fwd_ptr(upre + 2 * batch * hd, uact + 2 * batch * hd, batch * hd);
      linear_fwd(uact + 2 * batch * hd, hd, base + ".l4", batch, upre + 3 * batch * hd);
      for (std::size_t k = 0; k < batch * hd; ++k)
        hout[k] = hin[k] + upre[3 * batch * hd + k];
    }

    // Merge, group norm, out module.
    const double* yout = ws.h[blocks].data();
    for (std::size_t k = 0; k < batch * hd; ++k)
      ws.z[k] = yout[k] + ws.t_out[k] + ws.c_out[k];
    groupnorm_fwd(ws, batch);
    linear_fwd(ws.gn_out.data(), hd, "out.l1", batch, ws.o1_pre.data());
    silu_fwd(ws.o1_pre, ws.o1_act, batch * hd);
    linear_fwd(ws.o1_act.data(), hd, "out.l2", batch, ws.o2_pre.data());
    silu_fwd(ws.o2_pre, ws.o2_act, batch * hd);
    linear_fwd(ws.o2_act.data(), hd, "out.l3", batch, ws.o3_pre.data());
    silu_fwd(ws.o3_pre, ws.o3_act, batch * hd);
    linear_fwd(ws.o3_act.data(), hd, "out.l4", batch, y);
    ws.batch = batch;
  }

  // One-sample convenience; label may be null for the unconditional path.
  std::vector<double> forward_one(const std::vector<double>& x, double t,
                                  const double* label) const {
    if (x.size() != arch_.input_dim)
      throw std::invalid_argument("ScoreNetwork: input size mismatch");
    ScoreWorkspace ws;
    std::vector<double> y(arch_.input_dim);
    forward_batch(x.data(), &t, label, nullptr, 1, ws, y.data());
    return y;
  }

  // Reverse-mode pass.  dy: batch x input_dim upstream gradient; `grad`
  // must be a zeroed-or-accumulating array of param_count() entries.  Input
  // gradients are not produced (training never needs them).  The workspace
  // must come from the immediately preceding forward_batch call.
  void backward_batch(const double* dy, ScoreWorkspace& ws, double* grad) const {
    const std::size_t hd = arch_.hidden_dim;
    const std::size_t blocks = arch_.residual_blocks;
    const std::size_t batch = ws.batch;
    std::vector<double>& da = ws.db_row;   // gradient flowing backwards (batch x hd)
    std::vector<double>& db = ws.db_row2;  // scratch (batch x hd)
    da.assign(batch * hd, 0.0);
    db.assign(batch * hd, 0.0);

    // Out module, last layer first.
    linear_bwd(dy, arch_.input_dim, ws.o3_act.data(), hd, "out.l4", batch,
               grad, da.data());
    silu_bwd(da, ws.o3_pre, batch * hd);
    linear_bwd(da.data(), hd, ws.o2_act.data(), hd, "out.l3", batch, grad,
               db.data());
    silu_bwd(db, ws.o2_pre, batch * hd);
    linear_bwd(db.data(), hd, ws.o1_act.data(), hd, "out.l2", batch, grad,
               da.data());
    silu_bwd(da, ws.o1_pre, batch * hd);
    linear_bwd(da.data(), hd, ws.gn_out.data(), hd, "out.l1", batch, grad,
               db.data());

    // Group norm.
    groupnorm_bwd(ws, batch, db.data(), da.data(), grad);
    // da now holds dz = d(y_out + t_out + c_out).

    // Condition path.
    {
      double* dnull = grad + segment("cond.null").offset;
      double* dw3 = grad + segment("cond.l3.w").offset;
      double* db3 = grad + segment("cond.l3.b").offset;
      double* dw2 = grad + segment("cond.l2.w").offset;
      double* db2 = grad + segment("cond.l2.b").offset;
      double* dw1 = grad + segment("cond.l1.w").offset;
      double* db1 = grad + segment("cond.l1.b").offset;
      const double* w3 = seg_ptr("cond.l3.w");
      const double* w2 = seg_ptr("cond.l2.w");
      const std::size_t ld = arch_.label_dim;
      std::vector<double>& row = ws.db_row3;
      row.assign(2 * hd, 0.0);
      for (std::size_t i = 0; i < batch; ++i) {
        const double* dcout = da.data() + i * hd;
        if (!ws.has_label[i]) {
          detail::axpy(1.0, dcout, dnull, hd);
          continue;
        }
        double* d2 = row.data();       // d(c2_act), then d(c2_pre)
        double* d1 = row.data() + hd;  // d(c1_act), then d(c1_pre)
        const double* a2 = ws.c2_act.data() + i * hd;
        const double* p2 = ws.c2_pre.data() + i * hd;
        const double* a1 = ws.c1_act.data() + i * hd;
        const double* p1 = ws.c1_pre.data() + i * hd;
        std::fill(d2, d2 + hd, 0.0);
        for (std::size_t o = 0; o < hd; ++o) {
          detail::axpy(dcout[o], w3 + o * hd, d2, hd);
          detail::axpy(dcout[o], a2, dw3 + o * hd, hd);
          db3[o] += dcout[o];
        }
        for (std::size_t o = 0; o < hd; ++o) d2[o] *= detail::silu_grad(p2[o]);
        std::fill(d1, d1 + hd, 0.0);
        for (std::size_t o = 0; o < hd; ++o) {
          detail::axpy(d2[o], w2 + o * hd, d1, hd);
          detail::axpy(d2[o], a1, dw2 + o * hd, hd);
          db2[o] += d2[o];
        }
        for (std::size_t o = 0; o < hd; ++o) d1[o] *= detail::silu_grad(p1[o]);
        const double* lab_row = ws.labels_in + i * ld;
        for (std::size_t o = 0; o < hd; ++o) {
          detail::axpy(d1[o], lab_row, dw1 + o * ld, ld);
          db1[o] += d1[o];
        }
      }
    }

    // Time path (same upstream da).
    linear_bwd(da.data(), hd, ws.t1_act.data(), hd, "time.l2", batch, grad,
               db.data());
    silu_bwd(db, ws.t1_pre, batch * hd);
    linear_bwd_no_dx(db.data(), hd, ws.emb.data(), arch_.time_embed_dim,
                     "time.l1", batch, grad);

    // Spatial path: walk the residual blocks backwards; da carries dh.
    for (std::size_t blk = blocks; blk-- > 0;) {
      const std::string base = "block" + std::to_string(blk);
      const double* upre = ws.u_pre[blk].data();
      const double* uact = ws.u_act[blk].data();
      const double* hin = ws.h[blk].data();
      // d(u4) = dh_out; residual identity keeps da as-is for dh_in part.
      linear_bwd(da.data(), hd, uact + 2 * batch * hd, hd, base + ".l4", batch,
                 grad, db.data());
      silu_bwd_from(db, upre + 2 * batch * hd, batch * hd);
      std::vector<double>& dc = ws.db_row3;
      dc.assign(batch * hd, 0.0);
      linear_bwd(db.data(), hd, uact + batch * hd, hd, base + ".l3", batch,
                 grad, dc.data());
      silu_bwd_from(dc, upre + batch * hd, batch * hd);
      linear_bwd(dc.data(), hd, uact, hd, base + ".l2", batch, grad, db.data());
      silu_bwd_from(db, upre, batch * hd);
      // l1 consumes h_in; its input gradient adds onto the skip path in da.
      linear_bwd_accum(db.data(), hd, hin, hd, base + ".l1", batch, grad,
                       da.data());
    }
    linear_bwd_no_dx(da.data(), hd, ws.x_in, arch_.input_dim, "in", batch,
                     grad);
  }

 private:
  void build_layout() {
    segments_.clear();
    std::size_t off = 0;
    auto add = [&](const std::string& name, std::size_t rows, std::size_t cols) {
      segments_.push_back({name, off, rows, cols});
      off += rows * cols;
    };
    const std::size_t d = arch_.input_dim, hd = arch_.hidden_dim;
    add("in.w", hd, d);
    add("in.b", hd, 1);
    for (std::size_t b = 0; b < arch_.residual_blocks; ++b) {
      const std::string base = "block" + std::to_string(b);
      for (int l = 1; l <= 4; ++l) {
        add(base + ".l" + std::to_string(l) + ".w", hd, hd);
        add(base + ".l" + std::to_string(l) + ".b", hd, 1);
      }
    }
    add("time.l1.w", hd, arch_.time_embed_dim);
    add("time.l1.b", hd, 1);
    add("time.l2.w", hd, hd);
    add("time.l2.b", hd, 1);
    add("cond.l1.w", hd, arch_.label_dim);
    add("cond.l1.b", hd, 1);
    add("cond.l2.w", hd, hd);
    add("cond.l2.b", hd, 1);
    add("cond.l3.w", hd, hd);
    add("cond.l3.b", hd, 1);
    add("cond.null", hd, 1);
    add("gn.scale", hd, 1);
    add("gn.shift", hd, 1);
    add("out.l1.w", hd, hd);
    add("out.l1.b", hd, 1);
    add("out.l2.w", hd, hd);
    add("out.l2.b", hd, 1);
    add("out.l3.w", hd, hd);
    add("out.l3.b", hd, 1);
    add("out.l4.w", d, hd);
    add("out.l4.b", d, 1);
    total_params_ = off;
  }

  const double* seg_ptr(const std::string& name) const {
    return params_.data() + segment(name).offset;
  }

  void resize_workspace(ScoreWorkspace& ws, std::size_t batch) const {
    const std::size_t hd = arch_.hidden_dim;
    const std::size_t blocks = arch_.residual_blocks;
    ws.emb.resize(batch * arch_.time_embed_dim);
    for (auto* v : {&ws.t1_pre, &ws.t1_act, &ws.t_out, &ws.c1_pre, &ws.c1_act,
                    &ws.c2_pre, &ws.c2_act, &ws.c_out, &ws.z, &ws.gn_xhat,
                    &ws.gn_out, &ws.o1_pre, &ws.o1_act, &ws.o2_pre, &ws.o2_act,
                    &ws.o3_pre, &ws.o3_act})
      v->resize(batch * hd);
    ws.has_label.resize(batch);
    ws.gn_mean.resize(batch * arch_.norm_groups);
    ws.gn_var.resize(batch * arch_.norm_groups);
    ws.h.resize(blocks + 1);
    for (auto& v : ws.h) v.resize(batch * hd);
    ws.u_pre.resize(blocks);
    ws.u_act.resize(blocks);
    for (auto& v : ws.u_pre) v.resize(4 * batch * hd);
    for (auto& v : ws.u_act) v.resize(3 * batch * hd);
  }

  // y[i] = W x[i] + b for every row of the batch.
  void linear_fwd(const double* x, std::size_t in_dim, const std::string& base,
                  std::size_t batch, double* y) const {
    const ParamSegment& sw = segment(base + ".w");
    const double* w = params_.data() + sw.offset;
    const double* b = seg_ptr(base + ".b");
    const std::size_t out_dim = sw.rows;
    for (std::size_t i = 0; i < batch; ++i) {
      const double* xi = x + i * in_dim;
      double* yi = y + i * out_dim;
      for (std::size_t o = 0; o < out_dim; ++o)
        yi[o] = detail::dot(w + o * in_dim, xi, in_dim) + b[o];
    }
  }

  // Accumulates dW, db and writes dX (overwriting it).
  void linear_bwd(const double* dy, std::size_t out_dim, const double* x,
                  std::size_t in_dim, const std::string& base,
                  std::size_t batch, double* grad, double* dx) const {
    std::fill(dx, dx + batch * in_dim, 0.0);
    linear_bwd_accum(dy, out_dim, x, in_dim, base, batch, grad, dx);
  }

  // Accumulates dW, db and adds the input gradient onto dx.
  void linear_bwd_accum(const double* dy, std::size_t out_dim, const double* x,
                        std::size_t in_dim, const std::string& base,
                        std::size_t batch, double* grad, double* dx) const {
    const ParamSegment& sw = segment(base + ".w");
    const double* w = params_.data() + sw.offset;
    double* dw = grad + sw.offset;
    double* db = grad + segment(base + ".b").offset;
    for (std::size_t i = 0; i < batch; ++i) {
      const double* dyi = dy + i * out_dim;
      const double* xi = x + i * in_dim;
      double* dxi = dx + i * in_dim;
      for (std::size_t o = 0; o < out_dim; ++o) {
        const double g = dyi[o];
        if (g == 0.0) continue;
        detail::axpy(g, w + o * in_dim, dxi, in_dim);
        detail::axpy(g, xi, dw + o * in_dim, in_dim);
        db[o] += g;
      }
    }
  }

  // dW/db only; for layers whose inputs are data, not activations.
  void linear_bwd_no_dx(const double* dy, std::size_t out_dim, const double* x,
                        std::size_t in_dim, const std::string& base,
                        std::size_t batch, double* grad) const {
    const ParamSegment& sw = segment(base + ".w");
    double* dw = grad + sw.offset;
    double* db = grad + segment(base + ".b").offset;
    for (std::size_t i = 0; i < batch; ++i) {
      const double* dyi = dy + i * out_dim;
      const double* xi = x + i * in_dim;
      for (std::size_t o = 0; o < out_dim; ++o) {
        const double g = dyi[o];
        if (g == 0.0) continue;
        detail::axpy(g, xi, dw + o * in_dim, in_dim);
        db[o] += g;
      }
    }
  }

  static void silu_fwd(const std::vector<double>& pre, std::vector<double>& act,
                       std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) act[i] = detail::silu(pre[i]);
  }

  static void silu_fwd_ptr(const double* pre, double* act, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) act[i] = detail::silu(pre[i]);
  }

  // d(pre) = d(act) * silu'(pre), in place on the gradient buffer.
  static void silu_bwd(std::vector<double>& d, const std::vector<double>& pre,
                       std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) d[i] *= detail::silu_grad(pre[i]);
  }

  static void silu_bwd_from(std::vector<double>& d, const double* pre,
                            std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) d[i] *= detail::silu_grad(pre[i]);
  }

  void groupnorm_fwd(ScoreWorkspace& ws, std::size_t batch) const {
    const std::size_t hd = arch_.hidden_dim, groups = arch_.norm_groups;
    const std::size_t gs = hd / groups;
    const double* scale = seg_ptr("gn.scale");
    const double* shift = seg_ptr("gn.shift");
    constexpr double kEps = 1e-5;
    for (std::size_t i = 0; i < batch; ++i) {
      const double* zi = ws.z.data() + i * hd;
      double* xh = ws.gn_xhat.data() + i * hd;
      double* out = ws.gn_out.data() + i * hd;
      for (std::size_t g = 0; g < groups; ++g) {
        const double* zg = zi + g * gs;
        double mean = 0.0;
        for (std::size_t k = 0; k < gs; ++k) mean += zg[k];
        mean /= static_cast<double>(gs);
        double var = 0.0;
        for (std::size_t k = 0; k < gs; ++k) {
          const double dvi = zg[k] - mean;
          var += dvi * dvi;
        }
        var /= static_cast<double>(gs);
        ws.gn_mean[i * groups + g] = mean;
        ws.gn_var[i * groups + g] = var;
        const double inv = 1.0 / std::sqrt(var + kEps);
        for (std::size_t k = 0; k < gs; ++k) {
          const std::size_t idx = g * gs + k;
          xh[idx] = (zi[idx] - mean) * inv;
          out[idx] = scale[idx] * xh[idx] + shift[idx];
        }
      }
    }
  }

  // dz from d(gn_out); also accumulates scale/shift gradients.
  void groupnorm_bwd(ScoreWorkspace& ws, std::size_t batch, const double* dout,
                     double* dz, double* grad) const {
    const std::size_t hd = arch_.hidden_dim, groups = arch_.norm_groups;
    const std::size_t gs = hd / groups;
    const double* scale = seg_ptr("gn.scale");
    double* dscale = grad + segment("gn.scale").offset;
    double* dshift = grad + segment("gn.shift").offset;
    constexpr double kEps = 1e-5;
    for (std::size_t i = 0; i < batch; ++i) {
      const double* douti = dout + i * hd;
      const double* xh = ws.gn_xhat.data() + i * hd;
      double* dzi = dz + i * hd;
      for (std::size_t g = 0; g < groups; ++g) {
        const double inv =
            1.0 / std::sqrt(ws.gn_var[i * groups + g] + kEps);
        double sum_dxh = 0.0, sum_dxh_xh = 0.0;
        for (std::size_t k = 0; k < gs; ++k) {
          const std::size_t idx = g * gs + k;
          const double dxh = douti[idx] * scale[idx];
          sum_dxh += dxh;
          sum_dxh_xh += dxh * xh[idx];
          dscale[idx] += douti[idx] * xh[idx];
          dshift[idx] += douti[idx];
        }
        const double m1 = sum_dxh / static_cast<double>(gs);
        const double m2 = sum_dxh_xh / static_cast<double>(gs);
        for (std::size_t k = 0; k < gs; ++k) {
          const std::size_t idx = g * gs + k;
          const double dxh = douti[idx] * scale[idx];
          dzi[idx] = inv * (dxh - m1 - xh[idx] * m2);
        }
      }
    }
  }

  ScoreArch arch_;
  std::vector<double> params_;
  std::vector<ParamSegment> segments_;
  std::size_t total_params_ = 0;
};

}  // namespace qsgen

#endif  // QSGEN_SCORE_NETWORK_HPP_
