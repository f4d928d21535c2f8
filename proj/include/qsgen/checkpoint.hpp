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

#ifndef QSGEN_CHECKPOINT_HPP_
#define QSGEN_CHECKPOINT_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qsgen/config_text.hpp"
#include "qsgen/diffusion.hpp"
#include "qsgen/io_util.hpp"
#include "qsgen/mirror.hpp"
#include "qsgen/score_network.hpp"

namespace qsgen {

// Self-describing trained-model snapshot.  The text block is the authority
// for everything structural (architecture, schedule, encoding choices,
// training hyperparameters): typed fields below are parsed from it on load,
// and it is written back verbatim on save so a load/save cycle is
// byte-identical.  The trailing optimizer block makes interrupted training
// resumable with bit-exact equivalence to an uninterrupted run.
struct Checkpoint {
  ScoreArch arch;
  DiffusionSchedule schedule;
  MirrorConfig mirror;
  bool mirror_pipeline = true;  // false = raw-vector (no-mirror) model
  std::uint64_t seed = 0;
  std::string config_text;

  std::vector<double> params;
  std::uint64_t iterations = 0;
  double final_loss = 0.0;  // exponential moving average at save time

  bool has_optimizer_state = false;
  std::vector<double> adam_m, adam_v;
};

// Builds the canonical text block.  `extra` carries module settings the
// checkpoint itself does not interpret (training hyperparameters, notes);
// they round-trip untouched.
inline std::string make_checkpoint_text(const ScoreArch& arch,
                                        const DiffusionSchedule& schedule,
                                        const MirrorConfig& mirror,
                                        bool mirror_pipeline,
                                        std::uint64_t seed,
                                        const KeyValueText& extra = {}) {
  KeyValueText kv;
  kv.set("arch.input_dim", format_u64(arch.input_dim));
  kv.set("arch.hidden_dim", format_u64(arch.hidden_dim));
  kv.set("arch.residual_blocks", format_u64(arch.residual_blocks));
  kv.set("arch.time_embed_dim", format_u64(arch.time_embed_dim));
  kv.set("arch.label_dim", format_u64(arch.label_dim));
  kv.set("arch.norm_groups", format_u64(arch.norm_groups));
  kv.set("schedule.t_min", format_double(schedule.t_min));
  kv.set("schedule.t_max", format_double(schedule.t_max));
  kv.set("mirror.isometric_scaling", format_bool(mirror.isometric_scaling));
  kv.set("pipeline.mirror", format_bool(mirror_pipeline));
  kv.set("train.seed", format_u64(seed));
  for (const auto& item : extra.items()) kv.set(item.first, item.second);
  return kv.serialize();
}

// Re-derives the typed fields from a checkpoint's text block.
inline void parse_checkpoint_text(Checkpoint& ck) {
  const KeyValueText kv = KeyValueText::parse(ck.config_text);
  ck.arch.input_dim = parse_u64(kv.get("arch.input_dim"));
  ck.arch.hidden_dim = parse_u64(kv.get("arch.hidden_dim"));
  ck.arch.residual_blocks = parse_u64(kv.get("arch.residual_blocks"));
  ck.arch.time_embed_dim = parse_u64(kv.get("arch.time_embed_dim"));
  ck.arch.label_dim = parse_u64(kv.get("arch.label_dim"));
  ck.arch.norm_groups = parse_u64(kv.get("arch.norm_groups"));
  ck.arch.validate();
  ck.schedule.t_min = parse_double(kv.get("schedule.t_min"));
  ck.schedule.t_max = parse_double(kv.get("schedule.t_max"));
  ck.schedule.validate();
  ck.mirror.isometric_scaling = parse_bool(kv.get("mirror.isometric_scaling"));
  ck.mirror_pipeline = parse_bool(kv.get_or("pipeline.mirror", "true"));
  ck.seed = parse_u64(kv.get_or("train.seed", "0"));
}

namespace detail {
inline constexpr char kCheckpointMagic[5] = "QCK1";
inline constexpr char kOptimizerMagic[5] = "QOPT";
inline constexpr std::uint32_t kCheckpointVersion = 1;
}  // namespace detail

inline void save_checkpoint(const Checkpoint& ck, const std::string& path) {
  ScoreNetwork probe(ck.arch);
  if (ck.params.size() != probe.param_count())
    throw std::invalid_argument(
        "save_checkpoint: parameter array does not match architecture");
  if (ck.has_optimizer_state && (ck.adam_m.size() != ck.params.size() ||
                                 ck.adam_v.size() != ck.params.size()))
    throw std::invalid_argument(
        "save_checkpoint: optimizer state does not match parameters");
  BinaryWriter w(path);
  w.magic(detail::kCheckpointMagic);
  w.u32(detail::kCheckpointVersion);
  w.u32(static_cast<std::uint32_t>(ck.config_text.size()));
  w.bytes(ck.config_text);
  for (double p : ck.params) w.f64(p);
  w.u64(ck.iterations);
  w.f64(ck.final_loss);
  if (ck.has_optimizer_state) {
    w.magic(detail::kOptimizerMagic);
    for (double m : ck.adam_m) w.f64(m);
    for (double v : ck.adam_v) w.f64(v);
  }
  w.close();
}

inline Checkpoint load_checkpoint(const std::string& path) {
  BinaryReader r(path);
  r.expect_magic(detail::kCheckpointMagic);
  const std::uint32_t version = r.u32();
  if (version != detail::kCheckpointVersion)
    throw std::runtime_error(path + ": unsupported checkpoint version " +
                             std::to_string(version));
  Checkpoint ck;
  const std::uint32_t text_len = r.u32();
  ck.config_text = r.bytes(text_len);
  parse_checkpoint_text(ck);
  ScoreNetwork probe(ck.arch);
  ck.params.resize(probe.param_count());
  for (double& p : ck.params) p = r.f64();
  ck.iterations = r.u64();
  ck.final_loss = r.f64();
  if (!r.at_end()) {
    r.expect_magic(detail::kOptimizerMagic);
    ck.has_optimizer_state = true;
    ck.adam_m.resize(ck.params.size());
    ck.adam_v.resize(ck.params.size());
    for (double& m : ck.adam_m) m = r.f64();
    for (double& v : ck.adam_v) v = r.f64();
    if (!r.at_end())
      throw std::runtime_error(path + ": trailing bytes after optimizer state");
  }
  return ck;
}

}  // namespace qsgen

#endif  // QSGEN_CHECKPOINT_HPP_
