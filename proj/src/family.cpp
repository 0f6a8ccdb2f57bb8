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

#include "darktraj/family.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

namespace darktraj {

namespace {

constexpr double kPi = 3.14159265358979323846;

void validate_isometry(const Subspace& d, const CMatrix& j, int r_m) {
  if (j.rows() != d.ambient_dim() || j.cols() != r_m)
    throw DimensionError("IsometryFamily: J must be d x r_m");
  const double iso_err =
      (j.adjoint() * j - CMatrix::Identity(r_m, r_m)).cwiseAbs().maxCoeff();
  if (iso_err > 1e-10)
    throw DomainError("IsometryFamily: J^*J differs from Id by " +
                      std::to_string(iso_err));
  if (gap_distance(Subspace(j), d) > 1e-9)
    throw DomainError("IsometryFamily: image of J is not D");
}

}  // namespace

IsometryFamily::IsometryFamily(int r_m, std::vector<IsometryEntry> entries,
                               int center_index)
    : r_m_(r_m), entries_(std::move(entries)), center_index_(center_index) {
  if (r_m_ < 1) throw DomainError("IsometryFamily: r_m must be positive");
  if (entries_.empty()) throw DomainError("IsometryFamily: no entries");
  for (const auto& en : entries_) {
    if (en.D.dim() != r_m_)
      throw DimensionError("IsometryFamily: subspace dim differs from r_m");
    validate_isometry(en.D, en.J, r_m_);
  }
  if (center_index_ >= static_cast<int>(entries_.size()))
    throw DomainError("IsometryFamily: center index out of range");
}

int IsometryFamily::find(const Subspace& d, double gap_tol) const {
  for (std::size_t i = 0; i < entries_.size(); ++i)
    if (gap_distance(entries_[i].D, d) <= gap_tol) return static_cast<int>(i);
  return -1;
}

CMatrix canonical_su_phase(CMatrix u) {
  const int r = static_cast<int>(u.rows());
  const Complex det = u.determinant();
  const double ad = std::abs(det);
  if (std::abs(ad - 1.0) > 1e-6)
    throw DomainError("canonical_su_phase: |det| differs from 1");
  u *= std::exp(Complex(0, -std::arg(det) / r));
  // Fix the residual r-th root of unity by the first-entry sector rule.
  const double sector = 2.0 * kPi / r;
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) {
      if (std::abs(u(i, j)) <= 1e-9) continue;
      double theta = std::arg(u(i, j));
      if (theta < 0) theta += 2.0 * kPi;
      const int k = static_cast<int>(std::floor(theta / sector)) % r;
      if (k != 0) u *= std::exp(Complex(0, -sector * k));
      return u;
    }
  }
  throw NumericError("canonical_su_phase: matrix is numerically zero");
}

CMatrix induced_unitary(const IsometryFamily& fam, const CMatrix& v,
                        const Subspace& d) {
  const int idx = fam.find(d);
  if (idx < 0) throw MissingEntryError("induced_unitary: D not in the family");
  const IsometryEntry& from = fam.entry(idx);
  const double weight = (v * d.basis()).squaredNorm();
  if (weight <= 1e-12)
    throw PreconditionError("induced_unitary: tr(v pi_D v^*) <= 1e-12");
  const Subspace image = Subspace::from_span(v * d.basis(), 1e-9);
  if (image.dim() != fam.r_m())
    throw DarknessViolationError("induced_unitary: vD lost rank");
  const int idx_to = fam.find(image);
  if (idx_to < 0)
    throw MissingEntryError("induced_unitary: vD not in the family");
  CMatrix raw = fam.entry(idx_to).J.adjoint() * v * from.J;
  const double scale = operator_norm(raw);
  if (!(scale > 0)) throw NumericError("induced_unitary: zero compression");
  raw /= scale;
  const double unit_err =
      (raw.adjoint() * raw - CMatrix::Identity(fam.r_m(), fam.r_m()))
          .cwiseAbs()
          .maxCoeff();
  if (unit_err > 1e-6)
    throw DarknessViolationError(
        "induced_unitary: compression is not proportional to a unitary "
        "(residual " +
        std::to_string(unit_err) + ")");
  // Snap to the exact unitary factor before fixing the phase.
  return canonical_su_phase(polar_decompose(raw).first);
}

namespace {

struct WordNode {
  CMatrix w;        // normalized product
  Subspace image;   // w applied to the start subspace
  int length;
};

// Breadth-first enumeration of word images w D0; `visit` returns false to
// stop. Words are normalized in operator norm at every step.
template <typename Visit>
void bfs_words(const KrausEnsemble& e, const Subspace& d0,
               WordSearchLimits limits, bool dedup_images, Visit visit) {
  std::deque<WordNode> queue;
  std::vector<Subspace> seen;
  queue.push_back(WordNode{CMatrix::Identity(e.dim, e.dim), d0, 0});
  seen.push_back(d0);
  int expanded = 0;
  while (!queue.empty() && expanded < limits.max_words) {
    const WordNode node = queue.front();
    queue.pop_front();
    if (node.length >= limits.max_length) continue;
    for (const auto& item : e.items) {
      CMatrix w = item.matrix * node.w;
      const double nrm = operator_norm(w);
      if (nrm <= 1e-300) continue;
      w /= nrm;
      const CMatrix image_span = w * d0.basis();
      if (image_span.norm() <= 1e-12) continue;
      Subspace image = Subspace::from_span(image_span, 1e-9);
      if (image.dim() != d0.dim()) continue;
      ++expanded;
      if (!visit(w, image, node.length + 1)) return;
      bool enqueue = true;
      if (dedup_images) {
        for (const auto& s : seen)
          if (gap_distance(s, image) <= tol::atlas_dedup) {
            enqueue = false;
            break;
          }
        if (enqueue) seen.push_back(image);
      }
      if (enqueue)
        queue.push_back(WordNode{std::move(w), std::move(image),
                                 node.length + 1});
      if (expanded >= limits.max_words) return;
    }
  }
}

CMatrix smart_isometry(const CMatrix& w, const Subspace& center,
                       const CMatrix& j_center, int r_m) {
  const double scale =
      std::sqrt((w * center.basis()).squaredNorm() / static_cast<double>(r_m));
  CMatrix j = (w * j_center) / scale;
  // Re-orthonormalize the numerically near-isometric columns.
  Eigen::JacobiSVD<CMatrix> svd(j, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

}  // namespace

IsometryFamily build_smart_family(const KrausEnsemble& e,
                                  const DarkAtlas& atlas,
                                  const EmpiricalDarkMeasure& chi_hat,
                                  const Subspace& center,
                                  const CMatrix& j_center,
                                  WordSearchLimits limits) {
  require_valid(e);
  if (atlas.representatives.empty())
    throw PreconditionError("build_smart_family: empty atlas");
  bool center_in_atlas = false;
  for (const auto& rep : atlas.representatives)
    if (gap_distance(rep, center) <= tol::atlas_dedup) center_in_atlas = true;
  if (!center_in_atlas)
    throw PreconditionError("build_smart_family: center not in the atlas");
  const int r_m = center.dim();
  validate_isometry(center, j_center, r_m);

  std::vector<IsometryEntry> entries;
  entries.push_back(IsometryEntry{center, j_center});
  std::vector<int> pending;  // chi atom indices still without an entry
  for (std::size_t a = 0; a < chi_hat.atoms.size(); ++a)
    if (gap_distance(chi_hat.atoms[a], center) > tol::atlas_dedup)
      pending.push_back(static_cast<int>(a));

  bfs_words(e, center, limits, /*dedup_images=*/true,
            [&](const CMatrix& w, const Subspace& image, int) {
              for (auto it = pending.begin(); it != pending.end(); ++it) {
                if (gap_distance(chi_hat.atoms[*it], image) <=
                    tol::atlas_dedup) {
                  entries.push_back(IsometryEntry{
                      image, smart_isometry(w, center, j_center, r_m)});
                  pending.erase(it);
                  break;
                }
              }
              return !pending.empty();
            });
  if (!pending.empty())
    throw ReachabilityError(
        "build_smart_family: " + std::to_string(pending.size()) +
        " chi atom(s) unreachable within the word budget");
  return IsometryFamily(r_m, std::move(entries), /*center_index=*/0);
}

std::vector<CMatrix> family_generators(const KrausEnsemble& e,
                                       const IsometryFamily& fam,
                                       const EmpiricalDarkMeasure& chi_hat) {
  std::vector<CMatrix> gens;
  for (std::size_t a = 0; a < chi_hat.atoms.size(); ++a) {
    if (chi_hat.weights[a] <= 0) continue;
    const Subspace& d = chi_hat.atoms[a];
    for (const auto& item : e.items) {
      if ((item.matrix * d.basis()).squaredNorm() <= 1e-12) continue;
      const CMatrix u = induced_unitary(fam, item.matrix, d);
      bool dup = false;
      for (const auto& g : gens)
        if ((g - u).cwiseAbs().maxCoeff() <= 1e-9) {
          dup = true;
          break;
        }
      if (!dup) gens.push_back(u);
    }
  }
  return gens;
}

namespace {

bool in_list(const std::vector<CMatrix>& list, const CMatrix& u, double eps) {
  for (const auto& g : list)
    if (operator_norm(g - u) <= eps) return true;
  return false;
}

// Real dimension of the span of skew-Hermitian matrices, via the singular
// values of their real vectorizations.
int real_span_dim(const std::vector<CMatrix>& logs, int r) {
  if (logs.empty()) return 0;
  RMatrix stack(static_cast<int>(logs.size()), 2 * r * r);
  for (std::size_t k = 0; k < logs.size(); ++k) {
    int col = 0;
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) {
        stack(static_cast<int>(k), col++) = logs[k](i, j).real();
        stack(static_cast<int>(k), col++) = logs[k](i, j).imag();
      }
  }
  Eigen::JacobiSVD<RMatrix> svd(stack);
  const auto& sv = svd.singularValues();
  if (!(sv(0) > 0)) return 0;
  int rank = 0;
  while (rank < sv.size() && sv(rank) > 1e-6 * sv(0)) ++rank;
  return rank;
}

// Keep only matrices that grow the real span; bounds the commutator work.
std::vector<CMatrix> reduce_to_spanning(const std::vector<CMatrix>& logs,
                                        int r) {
  std::vector<CMatrix> kept;
  for (const auto& l : logs) {
    kept.push_back(l);
    if (real_span_dim(kept, r) < static_cast<int>(kept.size()))
      kept.pop_back();
    if (static_cast<int>(kept.size()) >= r * r) break;
  }
  return kept;
}

int lie_dimension(const std::vector<CMatrix>& elements, int r) {
  std::vector<CMatrix> logs;
  for (const auto& g : elements) {
    if (operator_norm(g - CMatrix::Identity(r, r)) > 0.8) continue;
    CMatrix l = g.log();
    l = 0.5 * (l - l.adjoint().eval());  // skew-Hermitian part
    const double n = l.norm();
    if (n > 1e-9) logs.push_back(l / n);
    if (logs.size() >= 256) break;
  }
  std::vector<CMatrix> span = reduce_to_spanning(logs, r);
  // Close under commutators (two rounds reach the derived brackets needed
  // for the dimensions r^2 - 1 and r(r+1)/2 we classify against).
  for (int round = 0; round < 2; ++round) {
    std::vector<CMatrix> brackets;
    for (std::size_t a = 0; a < span.size(); ++a)
      for (std::size_t b = a + 1; b < span.size(); ++b) {
        CMatrix c = span[a] * span[b] - span[b] * span[a];
        const double n = c.norm();
        if (n > 1e-9) brackets.push_back(c / n);
      }
    const std::size_t before = span.size();
    std::vector<CMatrix> merged = span;
    merged.insert(merged.end(), brackets.begin(), brackets.end());
    span = reduce_to_spanning(merged, r);
    if (span.size() == before) break;
  }
  return real_span_dim(span, r);
}

}  // namespace

UnitaryGroupClosure group_closure(const std::vector<CMatrix>& generators,
                                  int cap) {
  if (generators.empty())
    throw DomainError("group_closure: at least one generator required");
  const int r = static_cast<int>(generators.front().rows());
  std::vector<CMatrix> gens;
  for (const auto& g : generators) {
    if (g.rows() != r || g.cols() != r)
      throw DimensionError("group_closure: generator shape mismatch");
    const double unit_err =
        (g.adjoint() * g - CMatrix::Identity(r, r)).cwiseAbs().maxCoeff();
    if (unit_err > 1e-9)
      throw DomainError("group_closure: generator not unitary");
    if (std::abs(g.determinant() - Complex(1, 0)) > tol::su_det)
      throw DomainError("group_closure: generator determinant differs from 1");
    if (!in_list(gens, g, tol::group_dedup)) gens.push_back(g);
  }

  UnitaryGroupClosure out;
  out.r_m = r;
  out.generators = gens;

  std::vector<CMatrix> elements;
  elements.push_back(CMatrix::Identity(r, r));
  std::deque<std::size_t> queue;
  queue.push_back(0);
  bool capped = false;
  while (!queue.empty()) {
    const CMatrix g = elements[queue.front()];
    queue.pop_front();
    for (const auto& h : gens) {
      CMatrix prod = g * h;
      if (in_list(elements, prod, tol::group_dedup)) continue;
      elements.push_back(std::move(prod));
      queue.push_back(elements.size() - 1);
      if (static_cast<int>(elements.size()) > cap) {
        capped = true;
        break;
      }
    }
    if (capped) break;
  }

  if (!capped) {
    out.kind = UnitaryGroupClosure::Kind::kFinite;
    out.elements = std::move(elements);
    return out;
  }
  out.kind = UnitaryGroupClosure::Kind::kContinuous;
  out.lie_dim = lie_dimension(elements, r);
  return out;
}

const char* to_string(Transitivity t) {
  switch (t) {
    case Transitivity::kFullSU:
      return "full_su";
    case Transitivity::kSymplecticConjugate:
      return "symplectic_conjugate";
    case Transitivity::kNotTransitive:
      return "not_transitive";
    case Transitivity::kUndecided:
      return "undecided";
  }
  return "undecided";
}

namespace {

// Least-squares antisymmetric J with g^T J g = J for all generators; returns
// J normalized to unit operator norm when the fit residual is small enough,
// and J is unitary.
std::optional<CMatrix> invariant_symplectic_form(
    const std::vector<CMatrix>& gens, int r) {
  // Basis of antisymmetric r x r: E_{ij} = e_i e_j^T - e_j e_i^T, i < j.
  std::vector<std::pair<int, int>> basis;
  for (int i = 0; i < r; ++i)
    for (int j = i + 1; j < r; ++j) basis.emplace_back(i, j);
  const int nb = static_cast<int>(basis.size());
  CMatrix system(static_cast<int>(gens.size()) * r * r, nb);
  for (std::size_t g = 0; g < gens.size(); ++g) {
    const CMatrix gt = gens[g].transpose();
    for (int k = 0; k < nb; ++k) {
      CMatrix ek = CMatrix::Zero(r, r);
      ek(basis[k].first, basis[k].second) = 1.0;
      ek(basis[k].second, basis[k].first) = -1.0;
      const CMatrix res = gt * ek * gens[g] - ek;
      for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j)
          system(static_cast<int>(g) * r * r + i * r + j, k) = res(i, j);
    }
  }
  Eigen::JacobiSVD<CMatrix> svd(system, Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double fit = sv(sv.size() - 1);
  if (fit > 1e-8) return std::nullopt;
  const CVector x = svd.matrixV().col(sv.size() - 1);
  CMatrix jform = CMatrix::Zero(r, r);
  for (int k = 0; k < nb; ++k) {
    jform(basis[k].first, basis[k].second) += x(k);
    jform(basis[k].second, basis[k].first) -= x(k);
  }
  const double nrm = operator_norm(jform);
  if (!(nrm > 1e-8)) return std::nullopt;
  jform /= nrm;
  if ((jform * jform.adjoint() - CMatrix::Identity(r, r)).cwiseAbs().maxCoeff() >
      1e-6)
    return std::nullopt;
  for (const auto& g : gens)
    if (operator_norm(g.transpose() * jform * g - jform) > 1e-8)
      return std::nullopt;
  return jform;
}

}  // namespace

Transitivity classify_transitivity(const UnitaryGroupClosure& g) {
  const int r = g.r_m;
  if (r == 1) return Transitivity::kFullSU;  // P(C^1) is a single point
  if (g.kind == UnitaryGroupClosure::Kind::kFinite)
    return Transitivity::kNotTransitive;
  if (g.lie_dim == r * r - 1) return Transitivity::kFullSU;
  if (r % 2 == 0 && g.lie_dim == r * (r + 1) / 2) {
    if (invariant_symplectic_form(g.generators, r).has_value())
      return Transitivity::kSymplecticConjugate;
  }
  return Transitivity::kUndecided;
}

CMatrix haar_sample(const UnitaryGroupClosure& g, SplitMix64& rng,
                    int word_len) {
  if (g.kind == UnitaryGroupClosure::Kind::kFinite)
    return g.elements[rng.below(g.elements.size())];
  const int r = g.r_m;
  CMatrix w = CMatrix::Identity(r, r);
  const std::size_t moves = 2 * g.generators.size();
  for (int k = 0; k < word_len; ++k) {
    const std::size_t pick = rng.below(moves);
    const CMatrix& gen = g.generators[pick / 2];
    if (pick % 2 == 0)
      w *= gen;
    else
      w *= gen.adjoint();
  }
  return w;
}

std::vector<Ray> orbit(const Ray& x, const UnitaryGroupClosure& g) {
  if (g.kind != UnitaryGroupClosure::Kind::kFinite)
    throw PreconditionError("orbit: finite closure required");
  if (x.dim() != g.r_m) throw DimensionError("orbit: ray dim mismatch");
  std::vector<Ray> points;
  for (const auto& u : g.elements) {
    const Ray y(u * x.representative());
    bool dup = false;
    for (const auto& p : points)
      if (fubini_distance(p, y) <= tol::ray_equal) {
        dup = true;
        break;
      }
    if (!dup) points.push_back(y);
  }
  return points;
}

namespace {

void cluster_rays(ErgodicSampleSet& set) {
  const double w = 1.0 / static_cast<double>(set.rays.size());
  for (std::size_t i = 0; i < set.rays.size(); ++i) {
    bool placed = false;
    for (auto& c : set.clusters) {
      if (fubini_distance(c.center, set.rays[i]) <= tol::atlas_dedup) {
        c.weight += w;
        placed = true;
        break;
      }
    }
    if (!placed)
      set.clusters.push_back(
          ErgodicCluster{set.rays[i], w, set.dark_indices[i]});
  }
}

}  // namespace

ErgodicSampleSet sample_ergodic_measure(const IsometryFamily& fam,
                                        const EmpiricalDarkMeasure& chi_hat,
                                        const Ray& x,
                                        const UnitaryGroupClosure& g,
                                        int n_samples, std::uint64_t seed) {
  if (x.dim() != fam.r_m())
    throw DimensionError("sample_ergodic_measure: base ray lives in C^{r_m}");
  std::vector<int> entry_of_atom(chi_hat.atoms.size());
  for (std::size_t a = 0; a < chi_hat.atoms.size(); ++a) {
    entry_of_atom[a] = fam.find(chi_hat.atoms[a]);
    if (entry_of_atom[a] < 0)
      throw MissingEntryError(
          "sample_ergodic_measure: chi atom missing from the family");
  }
  SplitMix64 rng(seed);
  ErgodicSampleSet out;
  out.rays.reserve(n_samples);
  out.dark_indices.reserve(n_samples);
  for (int s = 0; s < n_samples; ++s) {
    const std::size_t a = rng.pick_index(chi_hat.weights);
    const CMatrix u = haar_sample(g, rng);
    out.rays.emplace_back(fam.entry(entry_of_atom[a]).J *
                          (u * x.representative()));
    out.dark_indices.push_back(static_cast<int>(a));
  }
  if (g.kind == UnitaryGroupClosure::Kind::kFinite) cluster_rays(out);
  return out;
}

ErgodicSampleSet sample_ergodic_measure(const IsometryFamily& fam,
                                        const EmpiricalDarkMeasure& chi_hat,
                                        const DensityMatrix& rho,
                                        const UnitaryGroupClosure& g,
                                        int n_samples, std::uint64_t seed) {
  if (rho.dim() != fam.r_m())
    throw DimensionError("sample_ergodic_measure: base state lives in C^{r_m}");
  std::vector<int> entry_of_atom(chi_hat.atoms.size());
  for (std::size_t a = 0; a < chi_hat.atoms.size(); ++a) {
    entry_of_atom[a] = fam.find(chi_hat.atoms[a]);
    if (entry_of_atom[a] < 0)
      throw MissingEntryError(
          "sample_ergodic_measure: chi atom missing from the family");
  }
  SplitMix64 rng(seed);
  ErgodicSampleSet out;
  out.densities.reserve(n_samples);
  out.dark_indices.reserve(n_samples);
  for (int s = 0; s < n_samples; ++s) {
    const std::size_t a = rng.pick_index(chi_hat.weights);
    const CMatrix u = haar_sample(g, rng);
    const CMatrix& j = fam.entry(entry_of_atom[a]).J;
    CMatrix sample = j * u * rho.matrix() * u.adjoint() * j.adjoint();
    sample = 0.5 * (sample + sample.adjoint().eval());
    sample /= sample.trace().real();
    out.densities.emplace_back(sample);
    out.dark_indices.push_back(static_cast<int>(a));
  }
  return out;
}

ErgodicSampleSet sample_nu_unif(const IsometryFamily& fam,
                                const EmpiricalDarkMeasure& chi_hat,
                                int n_samples, std::uint64_t seed) {
  std::vector<int> entry_of_atom(chi_hat.atoms.size());
  for (std::size_t a = 0; a < chi_hat.atoms.size(); ++a) {
    entry_of_atom[a] = fam.find(chi_hat.atoms[a]);
    if (entry_of_atom[a] < 0)
      throw MissingEntryError("sample_nu_unif: chi atom missing from family");
  }
  SplitMix64 rng(seed);
  ErgodicSampleSet out;
  out.rays.reserve(n_samples);
  out.dark_indices.reserve(n_samples);
  for (int s = 0; s < n_samples; ++s) {
    const std::size_t a = rng.pick_index(chi_hat.weights);
    const Ray z = random_ray(fam.r_m(), rng);
    out.rays.emplace_back(fam.entry(entry_of_atom[a]).J * z.representative());
    out.dark_indices.push_back(static_cast<int>(a));
  }
  return out;
}

InvarianceResidual invariance_residual(const std::vector<Ray>& samples,
                                       const KrausEnsemble& e,
                                       std::uint64_t seed, int max_support,
                                       int n_boot) {
  if (samples.empty())
    throw PreconditionError("invariance_residual: empty sample set");
  require_valid(e);
  SplitMix64 rng(seed);
  std::vector<Ray> pushed;
  pushed.reserve(samples.size());
  for (const auto& s : samples) pushed.push_back(step_ray(e, s, rng).second);

  const int n = static_cast<int>(samples.size());
  const int support = std::min(n, max_support);
  auto subsample = [&](const std::vector<Ray>& from) {
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    for (int i = n - 1; i > 0; --i)
      std::swap(idx[i], idx[rng.below(static_cast<std::uint64_t>(i) + 1)]);
    std::vector<Ray> out;
    out.reserve(support);
    for (int i = 0; i < support; ++i) out.push_back(from[idx[i]]);
    return out;
  };
  const std::vector<Ray> a = subsample(samples);
  const std::vector<Ray> b = subsample(pushed);

  const std::vector<double> unif(support, 1.0 / support);
  auto metric = [](const Ray& x, const Ray& y) {
    return fubini_distance(x, y);
  };
  InvarianceResidual out;
  out.support = support;
  out.w1 = wasserstein1(a, unif, b, unif, metric);

  // Null calibration: W1 between random halves of the pooled set. Under
  // invariance the two sets are exchangeable and the observed value is a
  // draw from this null; a non-invariant pushforward exceeds it by a large
  // factor.
  std::vector<Ray> pool = a;
  pool.insert(pool.end(), b.begin(), b.end());
  std::vector<double> null_vals;
  null_vals.reserve(n_boot);
  for (int rep = 0; rep < n_boot; ++rep) {
    std::vector<int> idx(2 * support);
    for (int i = 0; i < 2 * support; ++i) idx[i] = i;
    for (int i = 2 * support - 1; i > 0; --i)
      std::swap(idx[i], idx[rng.below(static_cast<std::uint64_t>(i) + 1)]);
    std::vector<Ray> half_a, half_b;
    half_a.reserve(support);
    half_b.reserve(support);
    for (int i = 0; i < support; ++i) half_a.push_back(pool[idx[i]]);
    for (int i = support; i < 2 * support; ++i) half_b.push_back(pool[idx[i]]);
    null_vals.push_back(wasserstein1(half_a, unif, half_b, unif, metric));
  }
  double mean = 0.0;
  for (double v : null_vals) mean += v;
  mean /= null_vals.size();
  double var = 0.0;
  for (double v : null_vals) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / std::max<std::size_t>(1, null_vals.size() - 1));
  out.null_mean = mean;
  out.residual = std::max(0.0, out.w1 - mean);
  out.bootstrap_se = std::max({sd, 0.05 * mean, 1e-12});
  return out;
}

SmartnessReport check_smart(const KrausEnsemble& e, const IsometryFamily& fam,
                            const EmpiricalDarkMeasure& chi_hat,
                            WordSearchLimits limits) {
  if (fam.center_index() < 0)
    throw PreconditionError("check_smart: family has no center");
  const IsometryEntry& center = fam.entry(fam.center_index());
  const int r_m = fam.r_m();

  std::vector<double> residuals(chi_hat.atoms.size(),
                                std::numeric_limits<double>::infinity());
  std::vector<int> entry_of_atom(chi_hat.atoms.size(), -1);
  for (std::size_t a = 0; a < chi_hat.atoms.size(); ++a) {
    entry_of_atom[a] = fam.find(chi_hat.atoms[a]);
    if (entry_of_atom[a] < 0)
      throw MissingEntryError("check_smart: chi atom missing from the family");
  }

  auto score = [&](std::size_t atom, const CMatrix& w) {
    const CMatrix& j_d = fam.entry(entry_of_atom[atom]).J;
    const double scale = std::sqrt((w * center.D.basis()).squaredNorm() /
                                   static_cast<double>(r_m));
    const CMatrix cand = (w * center.J) / scale;
    const Complex align = (cand.adjoint() * j_d).trace();
    const double aa = std::abs(align);
    const Complex phase = (aa > 1e-15) ? align / aa : Complex(1, 0);
    const double res = operator_norm(j_d - phase * cand);
    residuals[atom] = std::min(residuals[atom], res);
  };

  // The empty word covers the center atom when it carries chi mass.
  for (std::size_t a = 0; a < chi_hat.atoms.size(); ++a)
    if (gap_distance(chi_hat.atoms[a], center.D) <= tol::atlas_dedup)
      score(a, CMatrix::Identity(e.dim, e.dim));

  bfs_words(e, center.D, limits, /*dedup_images=*/false,
            [&](const CMatrix& w, const Subspace& image, int) {
              for (std::size_t a = 0; a < chi_hat.atoms.size(); ++a)
                if (gap_distance(chi_hat.atoms[a], image) <= tol::atlas_dedup)
                  score(a, w);
              return true;
            });

  SmartnessReport report;
  report.residuals = residuals;
  report.certified = true;
  for (double r : residuals) {
    if (!std::isfinite(r))
      throw ReachabilityError("check_smart: atom unreachable within budget");
    if (r > tol::smart_certify) report.certified = false;
  }
  return report;
}

}  // namespace darktraj
