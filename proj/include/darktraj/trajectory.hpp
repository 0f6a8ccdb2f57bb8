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

#ifndef DARKTRAJ_TRAJECTORY_HPP
#define DARKTRAJ_TRAJECTORY_HPP

#include <variant>
#include <vector>

#include "darktraj/channel.hpp"
#include "darktraj/linalg.hpp"
#include "darktraj/rng.hpp"

namespace darktraj {

/// One step of a realized trajectory. W is the running product V_n...V_1,
/// rescaled to stay inside double range; the dropped magnitude accumulates
/// in log_scale (so the true product is exp(log_scale) * W).
struct TrajectoryStep {
  int n = 0;
  std::variant<Ray, DensityMatrix> state;
  CMatrix W;
  double log_scale = 0.0;
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;  // steps[k] has n == k
  std::vector<int> word;              // word[k] = Kraus index chosen at step k+1
};

/// Sample one ray step: index i with probability p_i ||v_i x||^2, then
/// x' = normalized v_i x.
std::pair<int, Ray> step_ray(const KrausEnsemble& e, const Ray& x,
                             SplitMix64& rng);

/// Sample one density step: index i with probability p_i tr(v_i rho v_i^*),
/// then rho' = v_i rho v_i^* normalized.
std::pair<int, DensityMatrix> step_density(const KrausEnsemble& e,
                                           const DensityMatrix& rho,
                                           SplitMix64& rng);

/// Per-index step probabilities for a ray / density state (sum to 1 for a
/// validated ensemble).
std::vector<double> step_weights(const KrausEnsemble& e, const Ray& x);
std::vector<double> step_weights(const KrausEnsemble& e,
                                 const DensityMatrix& rho);

Trajectory run_trajectory(const KrausEnsemble& e, const Ray& initial,
                          int n_steps, std::uint64_t seed);
Trajectory run_trajectory(const KrausEnsemble& e, const DensityMatrix& initial,
                          int n_steps, std::uint64_t seed);

/// M_n = W_n^* W_n / tr(W_n^* W_n) with its polar unitary and numerical rank.
struct MProcessSample {
  int n = 0;
  DensityMatrix M;
  CMatrix U;
  int numerical_rank = 0;
};

std::vector<MProcessSample> m_process(const Trajectory& traj,
                                      double rank_tol = tol::rank_rel);
MProcessSample m_sample(const TrajectoryStep& step,
                        double rank_tol = tol::rank_rel);

/// Max-likelihood estimator pair: E_hat spanned by the top-r_m right singular
/// vectors of W, D_hat the (orthonormalized) image W E_hat. Throws RankError
/// when the r_m-th singular value is below rank_tol times the largest.
struct DarkEstimate {
  Subspace E_hat;
  Subspace D_hat;
};

DarkEstimate estimate_dark(const CMatrix& W, int r_m,
                           double rank_tol = tol::rank_rel);

/// min over the listed subspaces of 1 - tr(pi_D rho), clamped to [0,1].
double darkness_gap(const DensityMatrix& rho,
                    const std::vector<Subspace>& dark_list);
double darkness_gap(const Ray& x, const std::vector<Subspace>& dark_list);

}  // namespace darktraj

#endif  // DARKTRAJ_TRAJECTORY_HPP
