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

#ifndef QSGEN_METRICS_HPP_
#define QSGEN_METRICS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numeric>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "qsgen/hermitian.hpp"
#include "qsgen/mirror.hpp"
#include "qsgen/quantum_data.hpp"
#include "qsgen/rng.hpp"

namespace qsgen {

// Evaluation toolkit: an entanglement witness (negativity) plus a family of
// sample-based distribution distances (1-D Wasserstein, sliced and
// max-sliced Wasserstein, energy-kernel MMD, and an exact assignment-based
// Wasserstein in the full coordinate space).

// ---------------------------------------------------------------------------
// Negativity

// Sum of the absolute values of the negative eigenvalues of the partial
// transpose over `subsystem` (1-based qubit labels).  Zero for separable
// states; positive values witness entanglement across the cut.  Accepts raw
// Hermitian input so constraint-violating artifacts can still be scored.
inline double negativity(const HermitianMatrix& rho,
                         const std::set<std::size_t>& subsystem) {
  EigenDecomposition d = eigh(partial_transpose(rho, subsystem));
  double s = 0.0;
  for (double ev : d.eigenvalues)
    if (ev < 0.0) s -= ev;
  return s;
}

inline double negativity(const DensityMatrix& rho,
                         const std::set<std::size_t>& subsystem) {
  return negativity(rho.hermitian(), subsystem);
}

// ---------------------------------------------------------------------------
// 1-D Wasserstein

// Exact empirical 1-Wasserstein distance between two real sample sets.
// Equal sizes use the sorted (quantile) coupling; unequal sizes integrate
// the absolute difference of the two empirical CDFs over the merged
// support, which is the same distance evaluated without resampling.
inline double w1_1d(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("w1_1d: empty sample set");
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  if (sa.size() == sb.size()) {
    double s = 0.0;
    for (std::size_t i = 0; i < sa.size(); ++i) s += std::abs(sa[i] - sb[i]);
    return s / static_cast<double>(sa.size());
  }
  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());
  double total = 0.0, fa = 0.0, fb = 0.0;
  std::size_t i = 0, j = 0;
  double prev = std::min(sa.front(), sb.front());
  while (i < sa.size() || j < sb.size()) {
    double x;
    if (i < sa.size() && (j == sb.size() || sa[i] <= sb[j]))
      x = sa[i];
    else
      x = sb[j];
    total += std::abs(fa - fb) * (x - prev);
    while (i < sa.size() && sa[i] == x) ++i;
    while (j < sb.size() && sb[j] == x) ++j;
    fa = static_cast<double>(i) / na;
    fb = static_cast<double>(j) / nb;
    prev = x;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Sliced Wasserstein

namespace detail {

inline void check_paired_sets(const std::vector<std::vector<double>>& a,
                              const std::vector<std::vector<double>>& b,
                              const char* where) {
  if (a.empty() || b.empty())
    throw std::invalid_argument(std::string(where) + ": empty sample set");
  const std::size_t d = a.front().size();
  if (d == 0) throw std::invalid_argument(std::string(where) + ": zero dimension");
  for (const auto& r : a)
    if (r.size() != d)
      throw std::invalid_argument(std::string(where) + ": ragged sample rows");
  for (const auto& r : b)
    if (r.size() != d)
      throw std::invalid_argument(std::string(where) + ": dimension mismatch");
}

// Uniform direction on the unit sphere: normalized standard normals.
inline std::vector<double> random_unit_direction(std::size_t dim,
                                                 RandomStream& rs) {
  std::vector<double> v(dim);
  double norm = 0.0;
  do {
    norm = 0.0;
    for (double& x : v) {
      x = rs.normal();
      norm += x * x;
    }
    norm = std::sqrt(norm);
  } while (!(norm > 1e-12));  // astronomically rare, but division-safe
  for (double& x : v) x /= norm;
  return v;
}

inline void project_rows(const std::vector<std::vector<double>>& rows,
                         const std::vector<double>& dir,
                         std::vector<double>& out) {
  out.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < dir.size(); ++k) s += rows[i][k] * dir[k];
    out[i] = s;
  }
}

// Index permutation sorting `v` ascending.
inline std::vector<std::size_t> sort_order(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t x, std::size_t y) { return v[x] < v[y]; });
  return idx;
}

// Walks the optimal 1-D transport plan between two uniform empirical
// measures in quantile order, invoking fn(rank_a, rank_b, mass) for each
// coupled pair.  Ranks index the sorted order.
template <typename Fn>
void quantile_coupling(std::size_t na, std::size_t nb, Fn&& fn) {
  const double wa = 1.0 / static_cast<double>(na);
  const double wb = 1.0 / static_cast<double>(nb);
  std::size_t i = 0, j = 0;
  double ra = wa, rb = wb;
  while (i < na && j < nb) {
    const double m = std::min(ra, rb);
    fn(i, j, m);
    ra -= m;
    rb -= m;
    if (ra <= 0.0) {
      ++i;
      ra = wa;
    }
    if (rb <= 0.0) {
      ++j;
      rb = wb;
    }
  }
}

}  // namespace detail

// Mean over random unit directions of the 1-D Wasserstein distance between
// the projected samples.  Direction p is drawn from its own derived stream,
// so the estimate is independent of how the projection loop is chunked.
inline double sliced_wasserstein(const std::vector<std::vector<double>>& a,
                                 const std::vector<std::vector<double>>& b,
                                 std::size_t projections, std::uint64_t seed) {
  detail::check_paired_sets(a, b, "sliced_wasserstein");
  if (projections == 0)
    throw std::invalid_argument("sliced_wasserstein: zero projections");
  const std::size_t dim = a.front().size();
  std::vector<double> pa, pb;
  double sum = 0.0;
  for (std::size_t p = 0; p < projections; ++p) {
    RandomStream rs =
        RandomStream::derived(seed, stream_salt::kEvalProjection, p);
    const std::vector<double> dir = detail::random_unit_direction(dim, rs);
    detail::project_rows(a, dir, pa);
    detail::project_rows(b, dir, pb);
    sum += w1_1d(pa, pb);
  }
  return sum / static_cast<double>(projections);
}

// Largest projected 1-D Wasserstein distance found by projected subgradient
// ascent over unit directions.  Each restart draws a fresh direction from
// its own derived stream and climbs for `iterations` steps of size `step`
// followed by renormalization; the best value seen at any iterate of any
// restart is returned.  The ascent direction at a fixed optimal coupling is
// sum of mass * sign(projected gap) * (a_i - b_j).
inline double max_sliced_wasserstein(const std::vector<std::vector<double>>& a,
                                     const std::vector<std::vector<double>>& b,
                                     std::size_t iterations,
                                     std::size_t restarts, std::uint64_t seed,
                                     double step = 0.1) {
  detail::check_paired_sets(a, b, "max_sliced_wasserstein");
  if (iterations == 0 || restarts == 0)
    throw std::invalid_argument(
        "max_sliced_wasserstein: iterations and restarts must be positive");
  const std::size_t dim = a.front().size();
  std::vector<double> pa, pb, grad(dim);

  // value of the projected distance along dir, plus its ascent subgradient
  const auto eval_and_grad = [&](const std::vector<double>& dir,
                                 std::vector<double>* g) {
    detail::project_rows(a, dir, pa);
    detail::project_rows(b, dir, pb);
    const std::vector<std::size_t> ia = detail::sort_order(pa);
    const std::vector<std::size_t> ib = detail::sort_order(pb);
    if (g != nullptr) std::fill(g->begin(), g->end(), 0.0);
    double value = 0.0;
    detail::quantile_coupling(pa.size(), pb.size(), [&](std::size_t ra,
                                                        std::size_t rb,
                                                        double mass) {
      const std::size_t i = ia[ra];
      const std::size_t j = ib[rb];
      const double gap = pa[i] - pb[j];
      value += mass * std::abs(gap);
      if (g != nullptr) {
        const double s = gap >= 0.0 ? mass : -mass;
        for (std::size_t k = 0; k < dim; ++k)
          (*g)[k] += s * (a[i][k] - b[j][k]);
      }
    });
    return value;
  };

  double best = 0.0;
  for (std::size_t r = 0; r < restarts; ++r) {
    RandomStream rs = RandomStream::derived(seed, stream_salt::kEvalRestart, r);
    std::vector<double> dir = detail::random_unit_direction(dim, rs);
    for (std::size_t it = 0; it <= iterations; ++it) {
      const bool last = it == iterations;
      best = std::max(best, eval_and_grad(dir, last ? nullptr : &grad));
      if (last) break;
      double norm = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        dir[k] += step * grad[k];
        norm += dir[k] * dir[k];
      }
      norm = std::sqrt(norm);
      if (!(norm > 1e-12)) break;  // degenerate update; keep current best
      for (double& x : dir) x /= norm;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Energy-kernel MMD

// Squared maximum mean discrepancy with the kernel k(x, y) = -|x - y|:
//   2 E|a - b| - E|a - a'| - E|b - b'|.
// The default is the biased V-statistic (all pairs, diagonals included);
// `unbiased` switches the within-set means to the U-statistic, which needs
// at least two samples per set and may go slightly negative on close sets.
inline double energy_mmd(const std::vector<std::vector<double>>& a,
                         const std::vector<std::vector<double>>& b,
                         bool unbiased = false) {
  detail::check_paired_sets(a, b, "energy_mmd");
  const std::size_t na = a.size(), nb = b.size(), dim = a.front().size();
  if (unbiased && (na < 2 || nb < 2))
    throw std::invalid_argument(
        "energy_mmd: the unbiased estimator needs two samples per set");

  const auto dist = [dim](const std::vector<double>& x,
                          const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      const double d = x[k] - y[k];
      s += d * d;
    }
    return std::sqrt(s);
  };

  double cross = 0.0;
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < nb; ++j) cross += dist(a[i], b[j]);
  cross /= static_cast<double>(na) * static_cast<double>(nb);

  const auto within = [&](const std::vector<std::vector<double>>& s) {
    const std::size_t n = s.size();
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) sum += dist(s[i], s[j]);
    const double pairs =
        unbiased ? static_cast<double>(n) * static_cast<double>(n - 1)
                 : static_cast<double>(n) * static_cast<double>(n);
    return 2.0 * sum / pairs;  // both (i,j) orders; diagonal terms are zero
  };

  return 2.0 * cross - within(a) - within(b);
}

// ---------------------------------------------------------------------------
// Exact assignment Wasserstein

inline constexpr std::size_t kAssignmentCap = 3000;

// Exact empirical 1-Wasserstein distance between equal-size batches under
// the Euclidean ground metric: the minimum over perfect matchings of the
// mean pairwise distance, found by the shortest-augmenting-path assignment
// algorithm with dual potentials (O(n^3)).  Capped at kAssignmentCap rows;
// subsample larger batches first.
inline double w1_assignment(const std::vector<std::vector<double>>& a,
                            const std::vector<std::vector<double>>& b) {
  detail::check_paired_sets(a, b, "w1_assignment");
  if (a.size() != b.size())
    throw std::invalid_argument("w1_assignment: batch sizes must match");
  if (a.size() > kAssignmentCap)
    throw std::invalid_argument("w1_assignment: batch exceeds the " +
                                std::to_string(kAssignmentCap) + "-row cap");
  const std::size_t n = a.size(), dim = a.front().size();
  std::vector<double> cost(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        const double d = a[i][k] - b[j][k];
        s += d * d;
      }
      cost[i * n + j] = std::sqrt(s);
    }

  constexpr double kInf = std::numeric_limits<double>::infinity();
  // one-based arrays; index 0 is the virtual unmatched slot
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = match[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  double total = 0.0;
  for (std::size_t j = 1; j <= n; ++j)
    total += cost[(match[j] - 1) * n + (j - 1)];
  return total / static_cast<double>(n);
}

// ---------------------------------------------------------------------------
// Aggregate evaluation

struct EvalConfig {
  std::size_t swd_projections = 512;
  std::size_t mswd_iterations = 200;
  std::size_t mswd_restarts = 8;
  double mswd_step = 0.1;
  bool mmd_unbiased = false;
  MirrorConfig mirror;

  void validate() const {
    if (swd_projections == 0 || mswd_iterations == 0 || mswd_restarts == 0)
      throw std::invalid_argument(
          "EvalConfig: projection, iteration, and restart counts must be "
          "positive");
    if (!(mswd_step > 0.0))
      throw std::invalid_argument("EvalConfig: ascent step must be positive");
  }
};

struct EvalReport {
  double swd = 0.0;
  double mswd = 0.0;
  double w1 = 0.0;
  double energy_mmd = 0.0;          // raw estimate (may dip below zero)
  double energy_mmd_nonneg = 0.0;   // max(energy_mmd, 0)
  double negativity_w1 = 0.0;
  std::size_t generated_count = 0;
  std::size_t reference_count = 0;
  std::size_t w1_matched_count = 0;  // batch size fed to the assignment
  std::size_t projection_count = 0;
  std::uint64_t seed = 0;
  bool isometric_scaling = true;
  std::string mmd_estimator;  // "biased-v" or "unbiased-u"
  std::string w1_note;        // caveat on full-dimension W1 estimation
};

namespace detail {

// Flattens every state with the shared coordinate layout.
inline std::vector<std::vector<double>> vectorize_states(
    const StateDataset& ds, const MirrorConfig& mirror) {
  std::vector<std::vector<double>> rows;
  rows.reserve(ds.size());
  for (const HermitianMatrix& h : ds.states)
    rows.push_back(herm_to_vec(h, mirror).coords);
  return rows;
}

// Chooses `k` distinct indices out of `n` with a partial shuffle; returned
// sorted so downstream iteration order is stable.
inline std::vector<std::size_t> subsample_indices(std::size_t n, std::size_t k,
                                                  RandomStream& rs) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rs.uniform_index(n - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

inline std::vector<std::vector<double>> take_rows(
    const std::vector<std::vector<double>>& rows,
    const std::vector<std::size_t>& idx) {
  std::vector<std::vector<double>> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(rows[i]);
  return out;
}

}  // namespace detail

// Runs the full metric battery between a generated and a reference set.
// Vector-space metrics act on the flattened primal matrices; negativity is
// compared as a 1-D distribution over `subsystem`.  The assignment-based W1
// needs equal batch sizes, so the larger set (or both, past the cap) is
// subsampled with a dedicated derived stream; every other metric uses the
// full sets.
inline EvalReport full_report(const StateDataset& generated,
                              const StateDataset& reference,
                              const std::set<std::size_t>& subsystem,
                              const EvalConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  if (generated.size() == 0 || reference.size() == 0)
    throw std::invalid_argument("full_report: empty dataset");
  if (generated.dim() != reference.dim())
    throw std::invalid_argument("full_report: dimension mismatch");

  const auto ga = detail::vectorize_states(generated, cfg.mirror);
  const auto rb = detail::vectorize_states(reference, cfg.mirror);

  EvalReport rep;
  rep.generated_count = generated.size();
  rep.reference_count = reference.size();
  rep.projection_count = cfg.swd_projections;
  rep.seed = seed;
  rep.isometric_scaling = cfg.mirror.isometric_scaling;
  rep.mmd_estimator = cfg.mmd_unbiased ? "unbiased-u" : "biased-v";
  rep.w1_note =
      "exact assignment coupling on matched batches; empirical Wasserstein "
      "distances in high-dimensional spaces converge slowly with sample "
      "count, so compare like-sized batches only";

  rep.swd = sliced_wasserstein(ga, rb, cfg.swd_projections, seed);
  rep.mswd = max_sliced_wasserstein(ga, rb, cfg.mswd_iterations,
                                    cfg.mswd_restarts, seed, cfg.mswd_step);
  rep.energy_mmd = energy_mmd(ga, rb, cfg.mmd_unbiased);
  rep.energy_mmd_nonneg = std::max(rep.energy_mmd, 0.0);

  std::vector<double> ng(generated.size()), nr(reference.size());
  for (std::size_t i = 0; i < generated.size(); ++i)
    ng[i] = negativity(generated.states[i], subsystem);
  for (std::size_t i = 0; i < reference.size(); ++i)
    nr[i] = negativity(reference.states[i], subsystem);
  rep.negativity_w1 = w1_1d(ng, nr);

  const std::size_t matched =
      std::min({ga.size(), rb.size(), kAssignmentCap});
  rep.w1_matched_count = matched;
  RandomStream sub =
      RandomStream::derived(seed, stream_salt::kEvalSubsample, 0);
  const auto pick = [&](const std::vector<std::vector<double>>& rows) {
    if (rows.size() == matched) return rows;
    return detail::take_rows(rows,
                             detail::subsample_indices(rows.size(), matched, sub));
  };
  rep.w1 = w1_assignment(pick(ga), pick(rb));
  return rep;
}

// Serializes every report field; the output parses back bit-identically
// through report_from_json.
inline std::string report_to_json(const EvalReport& r) {
  nlohmann::json j;
  j["swd"] = r.swd;
  j["mswd"] = r.mswd;
  j["w1"] = r.w1;
  j["energy_mmd"] = r.energy_mmd;
  j["energy_mmd_nonneg"] = r.energy_mmd_nonneg;
  j["negativity_w1"] = r.negativity_w1;
  j["generated_count"] = r.generated_count;
  j["reference_count"] = r.reference_count;
  j["w1_matched_count"] = r.w1_matched_count;
  j["projection_count"] = r.projection_count;
  j["seed"] = r.seed;
  j["isometric_scaling"] = r.isometric_scaling;
  j["mmd_estimator"] = r.mmd_estimator;
  j["w1_note"] = r.w1_note;
  return j.dump(2) + "\n";
}

inline EvalReport report_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  EvalReport r;
  r.swd = j.at("swd").get<double>();
  r.mswd = j.at("mswd").get<double>();
  r.w1 = j.at("w1").get<double>();
  r.energy_mmd = j.at("energy_mmd").get<double>();
  r.energy_mmd_nonneg = j.at("energy_mmd_nonneg").get<double>();
  r.negativity_w1 = j.at("negativity_w1").get<double>();
  r.generated_count = j.at("generated_count").get<std::size_t>();
  r.reference_count = j.at("reference_count").get<std::size_t>();
  r.w1_matched_count = j.at("w1_matched_count").get<std::size_t>();
  r.projection_count = j.at("projection_count").get<std::size_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.isometric_scaling = j.at("isometric_scaling").get<bool>();
  r.mmd_estimator = j.at("mmd_estimator").get<std::string>();
  r.w1_note = j.at("w1_note").get<std::string>();
  return r;
}

// ---------------------------------------------------------------------------
// Per-sample observables table

namespace detail {

inline std::string format_metric(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

inline std::string label_text(const ClassLabel& l) {
  for (std::size_t c = 0; c < 3; ++c)
    if (l.w[c] == 1.0 && l.w[(c + 1) % 3] == 0.0 && l.w[(c + 2) % 3] == 0.0)
      return c == 0 ? "product" : (c == 1 ? "pairwise" : "full");
  char buf[64];
  std::snprintf(buf, sizeof buf, "mix:%.3g:%.3g:%.3g", l.w[0], l.w[1], l.w[2]);
  return buf;
}

}  // namespace detail

// CSV of per-sample observables for scatter-style plots: the two leading
// eigenvalues, the first two diagonal entries in the state and in its dual
// coordinates, and the negativity over `subsystem`.  States that are not
// positive definite have no dual point; those columns are emitted as nan.
inline std::string observables_csv(const StateDataset& ds,
                                   const std::set<std::size_t>& subsystem,
                                   const MirrorConfig& mirror) {
  std::string out =
      "sample_id,class_label,eig1,eig2,primal_re_11,primal_re_22,dual_re_11,"
      "dual_re_22,negativity\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const HermitianMatrix& h = ds.states[i];
    if (h.dim() < 2)
      throw std::invalid_argument("observables_csv: states need dim >= 2");
    EigenDecomposition d = eigh(h);
    const std::size_t n = d.eigenvalues.size();
    double dual11 = nan, dual22 = nan;
    if (d.eigenvalues.front() > 1e-300) {
      // dual point I + log(state), assembled from the spectrum in hand
      std::vector<double> logs(n);
      for (std::size_t k = 0; k < n; ++k) logs[k] = std::log(d.eigenvalues[k]);
      HermitianMatrix y = assemble_spectral(d, logs);
      y.shift_diagonal(1.0);
      dual11 = y(0, 0).real();
      dual22 = y(1, 1).real();
    }
    out += detail::format_metric(static_cast<double>(i));
    out += ',';
    out += detail::label_text(i < ds.labels.size() ? ds.labels[i] : ClassLabel{});
    out += ',';
    out += detail::format_metric(d.eigenvalues[n - 1]);
    out += ',';
    out += detail::format_metric(d.eigenvalues[n - 2]);
    out += ',';
    out += detail::format_metric(h(0, 0).real());
    out += ',';
    out += detail::format_metric(h(1, 1).real());
    out += ',';
    out += detail::format_metric(dual11);
    out += ',';
    out += detail::format_metric(dual22);
    out += ',';
    out += detail::format_metric(negativity(h, subsystem));
    out += '\n';
  }
  return out;
}

}  // namespace qsgen

#endif  // QSGEN_METRICS_HPP_
