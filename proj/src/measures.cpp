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

#include "darktraj/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace darktraj {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_weights(const std::vector<double>& w, const char* who) {
  if (w.empty()) throw DomainError(std::string(who) + ": empty support");
  if (w.size() > kMaxTransportSupport)
    throw SizeError(std::string(who) +
                    ": support exceeds 512 atoms; subsample first");
  double total = 0.0;
  for (double x : w) {
    if (!(x >= 0)) throw DomainError(std::string(who) + ": negative weight");
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw DomainError(std::string(who) + ": weights must sum to 1");
}

bool uniform_equal_sizes(const std::vector<double>& a,
                         const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  const double u = 1.0 / static_cast<double>(a.size());
  for (double x : a)
    if (std::abs(x - u) > 1e-12) return false;
  for (double x : b)
    if (std::abs(x - u) > 1e-12) return false;
  return true;
}

// Transportation problem solved with successive shortest augmenting paths
// (dense Dijkstra with Johnson potentials). Exact for real-valued supplies;
// each augmentation exhausts a source, a sink, or a residual arc.
double transport_cost(std::vector<double> supply, std::vector<double> demand,
                      const RMatrix& cost) {
  const int m = static_cast<int>(supply.size());
  const int n = static_cast<int>(demand.size());
  RMatrix flow = RMatrix::Zero(m, n);
  std::vector<double> pot_s(m, 0.0), pot_t(n, 0.0);

  auto remaining = [&](const std::vector<double>& v) {
    double r = 0.0;
    for (double x : v) r += std::max(0.0, x);
    return r;
  };

  const long max_iter = 65536;
  long iter = 0;
  while (remaining(supply) > 1e-12) {
    if (++iter > max_iter)
      throw NumericError("wasserstein1: augmentation limit exceeded");
    // Multi-source Dijkstra over the residual graph. Node ids: sources
    // 0..m-1, sinks m..m+n-1.
    std::vector<double> dist(m + n, kInf);
    std::vector<int> parent(m + n, -1);
    std::vector<char> done(m + n, 0);
    for (int i = 0; i < m; ++i)
      if (supply[i] > 1e-12) dist[i] = 0.0;
    for (;;) {
      int u = -1;
      double best = kInf;
      for (int k = 0; k < m + n; ++k)
        if (!done[k] && dist[k] < best) {
          best = dist[k];
          u = k;
        }
      if (u < 0) break;
      done[u] = 1;
      if (u < m) {
        for (int j = 0; j < n; ++j) {
          const double rc =
              std::max(0.0, cost(u, j) + pot_s[u] - pot_t[j]);
          if (dist[u] + rc < dist[m + j]) {
            dist[m + j] = dist[u] + rc;
            parent[m + j] = u;
          }
        }
      } else {
        const int j = u - m;
        for (int i = 0; i < m; ++i) {
          if (flow(i, j) <= 0.0) continue;
          const double rc =
              std::max(0.0, -cost(i, j) - pot_s[i] + pot_t[j]);
          if (dist[u] + rc < dist[i]) {
            dist[i] = dist[u] + rc;
            parent[i] = u;
          }
        }
      }
    }
    int target = -1;
    double best = kInf;
    for (int j = 0; j < n; ++j)
      if (demand[j] > 1e-12 && dist[m + j] < best) {
        best = dist[m + j];
        target = j;
      }
    if (target < 0)
      throw NumericError("wasserstein1: no augmenting path (unbalanced?)");
    // Johnson potential update keeps all residual reduced costs nonnegative.
    for (int i = 0; i < m; ++i)
      if (dist[i] < kInf) pot_s[i] += dist[i];
    for (int j = 0; j < n; ++j)
      if (dist[m + j] < kInf) pot_t[j] += dist[m + j];
    // Trace the path back and find the bottleneck.
    double delta = demand[target];
    int node = m + target;
    while (true) {
      const int p = parent[node];
      if (p < 0) {
        delta = std::min(delta, supply[node]);
        break;
      }
      if (node >= m)
        ;  // forward arc p -> node, unlimited capacity
      else
        delta = std::min(delta, flow(node, p - m));
      node = p;
    }
    // Apply the augmentation.
    node = m + target;
    while (true) {
      const int p = parent[node];
      if (p < 0) {
        supply[node] -= delta;
        break;
      }
      if (node >= m)
        flow(p, node - m) += delta;
      else
        flow(node, p - m) -= delta;
      node = p;
    }
    demand[target] -= delta;
  }

  double total = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) total += flow(i, j) * cost(i, j);
  return total;
}

}  // namespace

double assignment_cost(const RMatrix& cost) {
  if (cost.rows() != cost.cols())
    throw DimensionError("assignment_cost: square matrix required");
  const int n = static_cast<int>(cost.rows());
  // Jonker-Volgenant style shortest augmenting path with potentials, 1-based.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = -1;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  double total = 0.0;
  for (int j = 1; j <= n; ++j) total += cost(p[j] - 1, j - 1);
  return total;
}

double wasserstein1(const std::vector<double>& weights_a,
                    const std::vector<double>& weights_b, const RMatrix& cost) {
  check_weights(weights_a, "wasserstein1");
  check_weights(weights_b, "wasserstein1");
  if (cost.rows() != static_cast<int>(weights_a.size()) ||
      cost.cols() != static_cast<int>(weights_b.size()))
    throw DimensionError("wasserstein1: cost matrix shape mismatch");
  if (uniform_equal_sizes(weights_a, weights_b))
    return assignment_cost(cost) / static_cast<double>(weights_a.size());
  return transport_cost(weights_a, weights_b, cost);
}

double wasserstein1_dark(const EmpiricalDarkMeasure& a,
                         const EmpiricalDarkMeasure& b) {
  return wasserstein1(a.atoms, a.weights, b.atoms, b.weights,
                      [](const Subspace& x, const Subspace& y) {
                        return gap_distance(x, y);
                      });
}

std::vector<std::pair<int, double>> cesaro_convergence_curve(
    const KrausEnsemble& e, const DarkAtlas& atlas,
    const EmpiricalDarkMeasure& chi0, int n_max, int samples,
    std::uint64_t seed) {
  if (chi0.atoms.empty())
    throw PreconditionError("cesaro_convergence_curve: empty chi0");
  const ChannelReport rep = channel_report(e);
  const int m = rep.is_irreducible ? rep.period : 1;
  SplitMix64 root(seed);
  const EmpiricalDarkMeasure chi_ref = estimate_chi_inv(
      e, atlas, 256, 20000, root.fork(0xCE5A).next_u64());

  // Occupation snapshots: positions[s][t] for t = 0..m*n_max + m - 1.
  const int horizon = m * n_max + m;
  std::vector<std::vector<Subspace>> positions;
  positions.reserve(samples);
  for (int s = 0; s < samples; ++s) {
    SplitMix64 rng = root.fork(s + 1);
    Subspace d = chi0.atoms[rng.pick_index(chi0.weights)];
    std::vector<Subspace> path;
    path.reserve(horizon);
    path.push_back(d);
    for (int t = 1; t < horizon; ++t) {
      d = step_dark_chain(e, d, rng).second;
      path.push_back(d);
    }
    positions.push_back(std::move(path));
  }

  std::vector<std::pair<int, double>> curve;
  for (int n = 0; n <= n_max; ++n) {
    EmpiricalDarkMeasure emp;
    const double w = 1.0 / static_cast<double>(samples * m);
    for (int s = 0; s < samples; ++s) {
      for (int r = 0; r < m; ++r) {
        const Subspace& d = positions[s][m * n + r];
        int slot = -1;
        for (std::size_t a = 0; a < emp.atoms.size(); ++a)
          if (gap_distance(emp.atoms[a], d) <= tol::atlas_dedup) {
            slot = static_cast<int>(a);
            break;
          }
        if (slot < 0) {
          emp.atoms.push_back(d);
          emp.weights.push_back(0.0);
          slot = static_cast<int>(emp.atoms.size()) - 1;
        }
        emp.weights[slot] += w;
      }
    }
    curve.emplace_back(n, wasserstein1_dark(emp, chi_ref));
  }
  return curve;
}

std::array<double, 3> bloch_coords(const Ray& x) {
  if (x.dim() != 2) throw DimensionError("bloch_coords: dim 2 required");
  const Complex a = x.representative()(0);
  const Complex b = x.representative()(1);
  const Complex ab = std::conj(a) * b;
  return {2.0 * ab.real(), 2.0 * ab.imag(), std::norm(a) - std::norm(b)};
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw DomainError("fit_line: need at least two matched points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  const double vxx = sxx - sx * sx / n;
  const double vxy = sxy - sx * sy / n;
  const double vyy = syy - sy * sy / n;
  LineFit fit;
  if (vxx <= 0) throw DomainError("fit_line: degenerate abscissae");
  fit.slope = vxy / vxx;
  fit.intercept = (sy - fit.slope * sx) / n;
  fit.r2 = (vyy > 0) ? (vxy * vxy) / (vxx * vyy) : 1.0;
  return fit;
}

}  // namespace darktraj
