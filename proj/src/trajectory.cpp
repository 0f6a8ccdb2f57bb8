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

#include "darktraj/trajectory.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace darktraj {

namespace {

constexpr double kRescaleHi = 1e150;
constexpr double kRescaleLo = 1e-150;

void rescale(CMatrix& W, double& log_scale) {
  const double n = W.norm();
  if (n > kRescaleHi || n < kRescaleLo) {
    if (!(n > 0)) throw NumericError("run_trajectory: product underflowed to 0");
    W /= n;
    log_scale += std::log(n);
  }
}

DensityMatrix normalized_conjugation(const CMatrix& v, const CMatrix& rho) {
  CMatrix out = v * rho * v.adjoint();
  out = 0.5 * (out + out.adjoint().eval());
  const double tr = out.trace().real();
  if (!(tr > 0)) throw NumericError("step_density: zero-trace update");
  out /= tr;
  // Clip roundoff so the DensityMatrix invariants hold after long words.
  Eigen::SelfAdjointEigenSolver<CMatrix> es(out);
  RVector ev = es.eigenvalues().cwiseMax(0.0);
  ev /= ev.sum();
  CMatrix clean =
      es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
  clean = 0.5 * (clean + clean.adjoint().eval());
  return DensityMatrix(clean);
}

}  // namespace

std::vector<double> step_weights(const KrausEnsemble& e, const Ray& x) {
  if (x.dim() != e.dim) throw DimensionError("step_weights: ray dim mismatch");
  std::vector<double> w(e.items.size());
  for (std::size_t i = 0; i < e.items.size(); ++i)
    w[i] = e.items[i].weight *
           (e.items[i].matrix * x.representative()).squaredNorm();
  return w;
}

std::vector<double> step_weights(const KrausEnsemble& e,
                                 const DensityMatrix& rho) {
  if (rho.dim() != e.dim)
    throw DimensionError("step_weights: density dim mismatch");
  std::vector<double> w(e.items.size());
  for (std::size_t i = 0; i < e.items.size(); ++i) {
    const CMatrix& v = e.items[i].matrix;
    w[i] = e.items[i].weight * (v * rho.matrix() * v.adjoint()).trace().real();
  }
  return w;
}

std::pair<int, Ray> step_ray(const KrausEnsemble& e, const Ray& x,
                             SplitMix64& rng) {
  const std::vector<double> w = step_weights(e, x);
  const std::size_t i = rng.pick_index(w);
  return {static_cast<int>(i), Ray(e.items[i].matrix * x.representative())};
}

std::pair<int, DensityMatrix> step_density(const KrausEnsemble& e,
                                           const DensityMatrix& rho,
                                           SplitMix64& rng) {
  const std::vector<double> w = step_weights(e, rho);
  const std::size_t i = rng.pick_index(w);
  return {static_cast<int>(i),
          normalized_conjugation(e.items[i].matrix, rho.matrix())};
}

namespace {

template <typename State>
Trajectory run_impl(const KrausEnsemble& e, const State& initial, int n_steps,
                    std::uint64_t seed) {
  require_valid(e);
  if (n_steps < 0) throw DomainError("run_trajectory: negative step count");
  SplitMix64 rng(seed);
  Trajectory traj;
  traj.steps.reserve(n_steps + 1);
  CMatrix W = CMatrix::Identity(e.dim, e.dim);
  double log_scale = 0.0;
  State state = initial;
  traj.steps.push_back(TrajectoryStep{0, state, W, log_scale});
  for (int n = 1; n <= n_steps; ++n) {
    int idx;
    if constexpr (std::is_same_v<State, Ray>) {
      auto [i, next] = step_ray(e, state, rng);
      idx = i;
      state = next;
    } else {
      auto [i, next] = step_density(e, state, rng);
      idx = i;
      state = next;
    }
    W = e.items[idx].matrix * W;
    rescale(W, log_scale);
    traj.word.push_back(idx);
    traj.steps.push_back(TrajectoryStep{n, state, W, log_scale});
  }
  return traj;
}

}  // namespace

Trajectory run_trajectory(const KrausEnsemble& e, const Ray& initial,
                          int n_steps, std::uint64_t seed) {
  return run_impl(e, initial, n_steps, seed);
}

Trajectory run_trajectory(const KrausEnsemble& e, const DensityMatrix& initial,
                          int n_steps, std::uint64_t seed) {
  return run_impl(e, initial, n_steps, seed);
}

MProcessSample m_sample(const TrajectoryStep& step, double rank_tol) {
  const CMatrix gram = step.W.adjoint() * step.W;
  const double tr = gram.trace().real();
  if (!(tr > 1e-280))
    throw NumericError("m_process: tr(W^*W) underflow after rescaling");
  DensityMatrix M(((gram / tr) + (gram / tr).adjoint().eval()) * 0.5);
  auto [u, p] = polar_decompose(step.W);
  return MProcessSample{step.n, M, u, M.numerical_rank(rank_tol)};
}

std::vector<MProcessSample> m_process(const Trajectory& traj, double rank_tol) {
  std::vector<MProcessSample> out;
  out.reserve(traj.steps.size());
  for (const auto& s : traj.steps) out.push_back(m_sample(s, rank_tol));
  return out;
}

DarkEstimate estimate_dark(const CMatrix& W, int r_m, double rank_tol) {
  if (W.rows() != W.cols()) throw DimensionError("estimate_dark: non-square W");
  const int d = static_cast<int>(W.rows());
  if (r_m < 1 || r_m > d) throw DomainError("estimate_dark: r_m out of range");
  Eigen::JacobiSVD<CMatrix> svd(W, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (!(sv(r_m - 1) >= rank_tol * sv(0)))
    throw RankError("estimate_dark: rank of W below r_m at tolerance");
  // W maps the top right-singular space exactly onto the top left-singular
  // space, so no re-orthonormalization is needed for D_hat.
  return DarkEstimate{Subspace(svd.matrixV().leftCols(r_m)),
                      Subspace(svd.matrixU().leftCols(r_m))};
}

double darkness_gap(const DensityMatrix& rho,
                    const std::vector<Subspace>& dark_list) {
  if (dark_list.empty())
    throw PreconditionError("darkness_gap: empty subspace list");
  double best = 1.0;
  for (const auto& d : dark_list) {
    if (d.ambient_dim() != rho.dim())
      throw DimensionError("darkness_gap: ambient dim mismatch");
    const double overlap =
        (d.basis().adjoint() * rho.matrix() * d.basis()).trace().real();
    best = std::min(best, 1.0 - overlap);
  }
  return std::min(1.0, std::max(0.0, best));
}

double darkness_gap(const Ray& x, const std::vector<Subspace>& dark_list) {
  if (dark_list.empty())
    throw PreconditionError("darkness_gap: empty subspace list");
  double best = 1.0;
  for (const auto& d : dark_list) {
    if (d.ambient_dim() != x.dim())
      throw DimensionError("darkness_gap: ambient dim mismatch");
    const double overlap =
        (d.basis().adjoint() * x.representative()).squaredNorm();
    best = std::min(best, 1.0 - overlap);
  }
  return std::min(1.0, std::max(0.0, best));
}

}  // namespace darktraj
