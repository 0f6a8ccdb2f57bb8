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

#ifndef DARKTRAJ_DARKSPACE_HPP
#define DARKTRAJ_DARKSPACE_HPP

#include <vector>

#include "darktraj/trajectory.hpp"

namespace darktraj {

/// Orthonormal (Frobenius) Hermitian basis of span{w^*w : w any finite word},
/// obtained by closing span{v_i^* v_i} under X -> v^* X v. The history lists
/// the span dimension after each closure sweep.
struct StabilizedSpan {
  std::vector<CMatrix> basis;
  std::vector<int> dimension_history;
};

StabilizedSpan stabilized_span(const KrausEnsemble& e);

/// Darkness certificate: residual is the max over span basis elements A of
/// ||pi_D A pi_D - (tr(pi_D A)/r) pi_D||. Certified iff residual is at most
/// tol::dark_certify. The span test is equivalent to the all-finite-words
/// definition because the span contains every w^*w.
struct DarkCertificate {
  Subspace subspace;
  double residual = 0.0;
  bool certified = false;
  int words_tested = 0;  // span basis elements checked
  std::vector<int> span_dimension_history;
};

DarkCertificate is_dark(const Subspace& d_sub, const KrausEnsemble& e);
DarkCertificate is_dark(const Subspace& d_sub, const KrausEnsemble& e,
                        const StabilizedSpan& span);

/// Certified maximal dark representatives found by trajectory probes,
/// deduplicated at gap tol::atlas_dedup. Completeness is not claimed.
struct DarkAtlas {
  int r_m = 0;
  std::vector<Subspace> representatives;
  std::vector<std::uint64_t> discovery_seeds;
  std::vector<double> residuals;
};

DarkAtlas discover_maximal_dark(const KrausEnsemble& e, int n_probes,
                                int chain_len, std::uint64_t seed,
                                double rank_tol = tol::rank_rel);

/// One step of the Markov chain on maximal dark subspaces: index i picked
/// with probability p_i tr(v_i pi_D v_i^*)/r_m, then D' = v_i D.
std::pair<int, Subspace> step_dark_chain(const KrausEnsemble& e,
                                         const Subspace& d, SplitMix64& rng);

std::vector<double> dark_chain_weights(const KrausEnsemble& e,
                                       const Subspace& d);

/// Exact one-step transition matrix between atlas representatives:
/// T(a,b) = sum of p_i tr(v_i pi_a v_i^*)/r_m over i with v_i D_a matching
/// D_b at gap tol::atlas_dedup. Mass landing outside the atlas goes to
/// `unassigned`.
struct DarkTransitionMatrix {
  RMatrix matrix;
  RVector unassigned;
};

DarkTransitionMatrix dark_transition_matrix(const KrausEnsemble& e,
                                            const DarkAtlas& atlas);

/// Empirical occupation measure of the dark chain.
struct EmpiricalDarkMeasure {
  std::vector<Subspace> atoms;
  std::vector<double> weights;
};

/// Runs the dark chain from the first atlas representative, discards n_burn
/// steps and averages the occupation over n_keep further steps. n_keep is
/// rounded up to a multiple of the channel period so the estimate is the
/// phase-averaged (Cesaro) measure. Visited subspaces are matched against
/// existing atoms at gap tol::atlas_dedup, atlas representatives first.
EmpiricalDarkMeasure estimate_chi_inv(const KrausEnsemble& e,
                                      const DarkAtlas& atlas, int n_burn,
                                      int n_keep, std::uint64_t seed);

enum class SnMode { kExhaustive, kMonteCarlo };

/// Decay sequence s(n): exhaustive mode sums
/// weight(w) * ||wedge^{r_m+1} w||^{2/(r_m+1)} over all words w of length n;
/// Monte Carlo mode evaluates the equivalent chaotic-state form, d times the
/// mean of the same statistic for trace-normalized products sampled from the
/// maximally mixed start. Singular values below 1e-13 relative are clamped
/// to zero so exactly rank-deficient words contribute exactly zero.
double s_of_n(const KrausEnsemble& e, int n, SnMode mode, int r_m,
              int samples = 0, std::uint64_t seed = 0);

}  // namespace darktraj

#endif  // DARKTRAJ_DARKSPACE_HPP
