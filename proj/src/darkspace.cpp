// Copyright 2026 The darktraj authors
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

#include "darktraj/darkspace.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

namespace darktraj {

namespace {

Complex frobenius_inner(const CMatrix& a, const CMatrix& b) {
  return (a.adjoint() * b).trace();
}

// Projects `m` off the span and appends the normalized remainder when it is
// numerically independent. Returns true when the span grew.
bool maybe_extend(std::vector<CMatrix>& basis, CMatrix m) {
  const double scale = std::max(1.0, m.norm());
  for (const auto& b : basis) m -= frobenius_inner(b, m) * b;
  // Second Gram-Schmidt pass for numerical orthogonality.
  for (const auto& b : basis) m -= frobenius_inner(b, m) * b;
  const double rem = m.norm();
  if (rem <= 1e-9 * scale) return false;
  basis.push_back(m / rem);
  return true;
}

}  // namespace

StabilizedSpan stabilized_span(const KrausEnsemble& e) {
  require_valid(e);
  StabilizedSpan span;
  for (const auto& it : e.items) {
    CMatrix a = it.matrix.adjoint() * it.matrix;
    a = 0.5 * (a + a.adjoint().eval());
    maybe_extend(span.basis, a);
  }
  span.dimension_history.push_back(static_cast<int>(span.basis.size()));
  const int max_dim = e.dim * e.dim;
  for (int sweep = 0; sweep < max_dim + 1; ++sweep) {
    bool grew = false;
    const std::size_t current = span.basis.size();
    for (std::size_t k = 0; k < current; ++k) {
      for (const auto& it : e.items) {
        CMatrix a = it.matrix.adjoint() * span.basis[k] * it.matrix;
        a = 0.5 * (a + a.adjoint().eval());
        grew |= maybe_extend(span.basis, a);
      }
    }
    span.dimension_history.push_back(static_cast<int>(span.basis.size()));
    if (!grew) break;
  }
  return span;
}

DarkCertificate is_dark(const Subspace& d_sub, const KrausEnsemble& e) {
  return is_dark(d_sub, e, stabilized_span(e));
}

DarkCertificate is_dark(const Subspace& d_sub, const KrausEnsemble& e,
                        const StabilizedSpan& span) {
  if (d_sub.ambient_dim() != e.dim)
    throw DimensionError("is_dark: ambient dim mismatch");
  const double r = static_cast<double>(d_sub.dim());
  const CMatrix& b = d_sub.basis();
  double residual = 0.0;
  for (const auto& a : span.basis) {
    // Compression to the subspace in its own basis: B^* A B must be a
    // multiple of Id_r.
    const CMatrix comp = b.adjoint() * a * b;
    const Complex mean = comp.trace() / r;
    residual = std::max(
        residual, operator_norm(comp - mean * CMatrix::Identity(
                                           d_sub.dim(), d_sub.dim())));
  }
  DarkCertificate cert{d_sub, residual, residual <= tol::dark_certify,
                       static_cast<int>(span.basis.size()),
                       span.dimension_history};
  return cert;
}

DarkAtlas discover_maximal_dark(const KrausEnsemble& e, int n_probes,
                                int chain_len, std::uint64_t seed,
                                double rank_tol) {
  require_valid(e);
  const StabilizedSpan span = stabilized_span(e);
  struct Candidate {
    Subspace subspace;
    std::uint64_t seed;
    double residual;
  };
  std::vector<Candidate> certified;
  int r_m = 0;
  SplitMix64 root(seed);
  for (int probe = 0; probe < n_probes; ++probe) {
    const std::uint64_t probe_seed = root.fork(probe).next_u64();
    // Chaotic start: words are drawn with probability tr(w^* w)/d.
    const Trajectory traj = run_trajectory(
        e, DensityMatrix::maximally_mixed(e.dim), chain_len, probe_seed);
    const TrajectoryStep& last = traj.steps.back();
    const MProcessSample m = m_sample(last, rank_tol);
    DarkEstimate est = [&] {
      try {
        return estimate_dark(last.W, m.numerical_rank, rank_tol);
      } catch (const RankError&) {
        // Rank estimate raced a closing singular gap; retry one step back.
        return estimate_dark(traj.steps[traj.steps.size() - 2].W,
                             m.numerical_rank, rank_tol);
      }
    }();
    const DarkCertificate cert = is_dark(est.D_hat, e, span);
    if (!cert.certified) continue;
    certified.push_back(Candidate{est.D_hat, probe_seed, cert.residual});
    r_m = std::max(r_m, est.D_hat.dim());
  }
  if (certified.empty())
    throw DiscoveryError(
        "discover_maximal_dark: no certified candidate; increase chain_len");
  DarkAtlas atlas;
  atlas.r_m = r_m;
  for (const auto& c : certified) {
    if (c.subspace.dim() != r_m) continue;
    bool dup = false;
    for (const auto& rep : atlas.representatives)
      if (gap_distance(rep, c.subspace) <= tol::atlas_dedup) {
        dup = true;
        break;
      }
    if (dup) continue;
    atlas.representatives.push_back(c.subspace);
    atlas.discovery_seeds.push_back(c.seed);
    atlas.residuals.push_back(c.residual);
  }
  return atlas;
}

std::vector<double> dark_chain_weights(const KrausEnsemble& e,
                                       const Subspace& d) {
  if (d.ambient_dim() != e.dim)
    throw DimensionError("dark_chain_weights: ambient dim mismatch");
  const double r = static_cast<double>(d.dim());
  std::vector<double> w(e.items.size());
  for (std::size_t i = 0; i < e.items.size(); ++i) {
    const CMatrix vb = e.items[i].matrix * d.basis();
    w[i] = e.items[i].weight * vb.squaredNorm() / r;
  }
  return w;
}

std::pair<int, Subspace> step_dark_chain(const KrausEnsemble& e,
                                         const Subspace& d, SplitMix64& rng) {
  const std::vector<double> w = dark_chain_weights(e, d);
  const std::size_t i = rng.pick_index(w);
  const CMatrix image = e.items[i].matrix * d.basis();
  Subspace next = Subspace::from_span(image, 1e-9);
  if (next.dim() != d.dim())
    throw NumericError("step_dark_chain: image lost rank (input not dark?)");
  return {static_cast<int>(i), next};
}

DarkTransitionMatrix dark_transition_matrix(const KrausEnsemble& e,
                                            const DarkAtlas& atlas) {
  const int k = static_cast<int>(atlas.representatives.size());
  DarkTransitionMatrix t{RMatrix::Zero(k, k), RVector::Zero(k)};
  for (int a = 0; a < k; ++a) {
    const std::vector<double> w =
        dark_chain_weights(e, atlas.representatives[a]);
    for (std::size_t i = 0; i < e.items.size(); ++i) {
      if (w[i] <= tol::zero_weight) continue;
      const Subspace image = Subspace::from_span(
          e.items[i].matrix * atlas.representatives[a].basis(), 1e-9);
      int target = -1;
      if (image.dim() == atlas.r_m) {
        for (int b = 0; b < k; ++b)
          if (gap_distance(image, atlas.representatives[b]) <=
              tol::atlas_dedup) {
            target = b;
            break;
          }
      }
      if (target >= 0)
        t.matrix(a, target) += w[i];
      else
        t.unassigned(a) += w[i];
    }
  }
  return t;
}

EmpiricalDarkMeasure estimate_chi_inv(const KrausEnsemble& e,
                                      const DarkAtlas& atlas, int n_burn,
                                      int n_keep, std::uint64_t seed) {
  if (atlas.representatives.empty())
    throw PreconditionError("estimate_chi_inv: empty atlas");
  // Cesaro averaging needs the channel period; for reducible input the
  // period is undefined and plain averaging (m = 1) is used instead.
  const ChannelReport rep = channel_report(e);
  const int m = rep.is_irreducible ? rep.period : 1;
  if (n_keep % m != 0) n_keep += m - (n_keep % m);

  EmpiricalDarkMeasure chi;
  chi.atoms = atlas.representatives;
  chi.weights.assign(chi.atoms.size(), 0.0);

  SplitMix64 rng(seed);
  Subspace d = atlas.representatives.front();
  for (int n = 0; n < n_burn; ++n) d = step_dark_chain(e, d, rng).second;
  for (int n = 0; n < n_keep; ++n) {
    d = step_dark_chain(e, d, rng).second;
    int slot = -1;
    for (std::size_t a = 0; a < chi.atoms.size(); ++a)
      if (gap_distance(chi.atoms[a], d) <= tol::atlas_dedup) {
        slot = static_cast<int>(a);
        break;
      }
    if (slot < 0) {
      chi.atoms.push_back(d);
      chi.weights.push_back(0.0);
      slot = static_cast<int>(chi.atoms.size()) - 1;
    }
    chi.weights[slot] += 1.0 / static_cast<double>(n_keep);
  }
  // Drop atlas representatives the chain never visited.
  EmpiricalDarkMeasure out;
  for (std::size_t a = 0; a < chi.atoms.size(); ++a) {
    if (chi.weights[a] > 0.0) {
      out.atoms.push_back(chi.atoms[a]);
      out.weights.push_back(chi.weights[a]);
    }
  }
  return out;
}

double s_of_n(const KrausEnsemble& e, int n, SnMode mode, int r_m, int samples,
              std::uint64_t seed) {
  require_valid(e);
  if (r_m + 1 > e.dim)
    throw DomainError("s_of_n: r_m + 1 exceeds the ambient dimension");
  const int p = r_m + 1;
  const double expo = 2.0 / static_cast<double>(p);
  constexpr double kRankFloor = 1e-13;

  if (n == 0) return 1.0;

  if (mode == SnMode::kExhaustive) {
    const double word_count =
        std::pow(static_cast<double>(e.items.size()), n);
    if (word_count > 1e6)
      throw SizeError("s_of_n: exhaustive word count exceeds 1e6");
    const std::size_t total = static_cast<std::size_t>(word_count);
    double acc = 0.0;
    for (std::size_t code = 0; code < total; ++code) {
      std::size_t c = code;
      CMatrix w = CMatrix::Identity(e.dim, e.dim);
      double weight = 1.0;
      for (int k = 0; k < n; ++k) {
        const std::size_t i = c % e.items.size();
        c /= e.items.size();
        w = e.items[i].matrix * w;
        weight *= e.items[i].weight;
      }
      const double wn = wedge_norm(w, p, kRankFloor);
      if (wn > 0.0) acc += weight * std::pow(wn, expo);
    }
    return acc;
  }

  if (samples < 1) throw DomainError("s_of_n: Monte Carlo needs samples >= 1");
  SplitMix64 root(seed);
  double acc = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Trajectory traj =
        run_trajectory(e, DensityMatrix::maximally_mixed(e.dim), n,
                       root.fork(s).next_u64());
    const CMatrix& w = traj.steps.back().W;
    const double tr = (w.adjoint() * w).trace().real();
    const double wn = wedge_norm(w / std::sqrt(tr), p, kRankFloor);
    if (wn > 0.0) acc += std::pow(wn, expo);
  }
  return static_cast<double>(e.dim) * acc / static_cast<double>(samples);
}

}  // namespace darktraj
