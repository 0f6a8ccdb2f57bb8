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

#ifndef DARKTRAJ_MEASURES_HPP
#define DARKTRAJ_MEASURES_HPP

#include <array>
#include <utility>
#include <vector>

#include "darktraj/darkspace.hpp"

namespace darktraj {

inline constexpr int kMaxTransportSupport = 512;

/// Exact 1-Wasserstein distance between two weighted atomic measures with
/// the supplied pairwise ground costs (cost(i, j) between atom i of the
/// first measure and atom j of the second). Equal-size uniform supports are
/// solved as an assignment problem, general weights as a transportation
/// problem (successive shortest paths). Supports above kMaxTransportSupport
/// atoms are a size error; subsample first.
double wasserstein1(const std::vector<double>& weights_a,
                    const std::vector<double>& weights_b, const RMatrix& cost);

/// Convenience overload building the cost matrix from points and a metric.
template <typename Point, typename Metric>
double wasserstein1(const std::vector<Point>& pa,
                    const std::vector<double>& wa,
                    const std::vector<Point>& pb,
                    const std::vector<double>& wb, Metric metric) {
  RMatrix cost(pa.size(), pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i)
    for (std::size_t j = 0; j < pb.size(); ++j)
      cost(static_cast<int>(i), static_cast<int>(j)) = metric(pa[i], pb[j]);
  return wasserstein1(wa, wb, cost);
}

/// Exact minimum-cost assignment value of a square cost matrix (sum over the
/// optimal permutation).
double assignment_cost(const RMatrix& cost);

/// W1 between two empirical dark measures under the gap metric.
double wasserstein1_dark(const EmpiricalDarkMeasure& a,
                         const EmpiricalDarkMeasure& b);

/// Period-averaged empirical iterates of the dark chain started from chi0,
/// measured against a long-run occupation estimate (computed internally with
/// a seed derived from `seed`). Returns (n, W1) for n = 0..n_max.
std::vector<std::pair<int, double>> cesaro_convergence_curve(
    const KrausEnsemble& e, const DarkAtlas& atlas,
    const EmpiricalDarkMeasure& chi0, int n_max, int samples,
    std::uint64_t seed);

/// Pauli expectation coordinates of a ray in P(C^2); unit norm, phase
/// invariant.
std::array<double, 3> bloch_coords(const Ray& x);

/// Least-squares line fit of y against x. Returns {slope, intercept, r2}.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace darktraj

#endif  // DARKTRAJ_MEASURES_HPP
