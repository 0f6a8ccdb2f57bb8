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

#ifndef DARKTRAJ_FAMILY_HPP
#define DARKTRAJ_FAMILY_HPP

#include <optional>
#include <vector>

#include "darktraj/darkspace.hpp"
#include "darktraj/measures.hpp"

namespace darktraj {

struct IsometryEntry {
  Subspace D;
  CMatrix J;  // d x r_m column isometry with image D
};

/// Family of isometries C^{r_m} -> D over tracked dark subspaces. When built
/// smart, entry 0 is the center D_c and every other entry is proportional to
/// a word applied to J_{D_c}.
class IsometryFamily {
 public:
  IsometryFamily(int r_m, std::vector<IsometryEntry> entries,
                 int center_index = -1);

  int r_m() const { return r_m_; }
  std::size_t size() const { return entries_.size(); }
  const IsometryEntry& entry(std::size_t i) const { return entries_.at(i); }
  int center_index() const { return center_index_; }

  /// Index of the entry whose subspace matches d at the given gap, or -1.
  int find(const Subspace& d, double gap_tol = tol::atlas_dedup) const;

 private:
  int r_m_;
  std::vector<IsometryEntry> entries_;
  int center_index_;
};

struct WordSearchLimits {
  int max_length = 20;
  int max_words = 10000;
};

/// Constructs a D_c-smart family over the atoms of chi_hat: for each atom D
/// a word w with w D_c = D (gap tol::atlas_dedup) is found breadth first and
/// J_D = w J_center / sqrt(tr(w pi_c w^*)/r_m). Atoms that no word inside the
/// budget reaches raise ReachabilityError.
IsometryFamily build_smart_family(const KrausEnsemble& e,
                                  const DarkAtlas& atlas,
                                  const EmpiricalDarkMeasure& chi_hat,
                                  const Subspace& center,
                                  const CMatrix& j_center,
                                  WordSearchLimits limits = {});

/// Canonical SU representative: divides by det^{1/r} and fixes the residual
/// r-th root of unity so the first nonzero entry (row-major) has argument in
/// [0, 2*pi/r).
CMatrix canonical_su_phase(CMatrix u);

/// The special unitary induced on the reference space when v maps D to vD:
/// J_{vD}^* v J_D normalized to unit top singular value, phase fixed by
/// canonical_su_phase. Both D and vD must be present in the family.
CMatrix induced_unitary(const IsometryFamily& fam, const CMatrix& v,
                        const Subspace& d);

/// The generator set S_J: induced unitaries of every ensemble item at every
/// chi atom with positive weight, deduplicated exactly.
std::vector<CMatrix> family_generators(const KrausEnsemble& e,
                                       const IsometryFamily& fam,
                                       const EmpiricalDarkMeasure& chi_hat);

/// Smallest closed subgroup of SU(r_m) containing the generators: either an
/// explicit finite element list (breadth-first product closure, dedup at
/// tol::group_dedup in operator norm) or a continuous verdict with the
/// estimated real Lie-algebra dimension of the identity component.
struct UnitaryGroupClosure {
  enum class Kind { kFinite, kContinuous };
  int r_m = 0;
  Kind kind = Kind::kFinite;
  std::vector<CMatrix> generators;
  std::vector<CMatrix> elements;  // populated when finite
  int lie_dim = 0;                // populated when continuous
};

UnitaryGroupClosure group_closure(const std::vector<CMatrix>& generators,
                                  int cap = 4096);

enum class Transitivity {
  kFullSU,
  kSymplecticConjugate,
  kNotTransitive,
  kUndecided
};

const char* to_string(Transitivity t);

/// Transitivity of the closure action on P(C^{r_m}): full SU(r_m) detected by
/// Lie dimension r_m^2-1; the symplectic case (r_m even) by an invariant
/// antisymmetric unitary bilinear form plus Lie dimension r_m(r_m+1)/2.
Transitivity classify_transitivity(const UnitaryGroupClosure& g);

/// Haar sample: uniform over the element list when finite; a random word of
/// length `word_len` in generators and inverses when continuous.
CMatrix haar_sample(const UnitaryGroupClosure& g, SplitMix64& rng,
                    int word_len = 64);

/// Orbit of a ray under a finite closure, deduplicated at tol::ray_equal.
std::vector<Ray> orbit(const Ray& x, const UnitaryGroupClosure& g);

struct ErgodicCluster {
  Ray center;
  double weight;
  int dark_index;  // chi atom the cluster lives in
};

struct ErgodicSampleSet {
  std::vector<Ray> rays;
  std::vector<DensityMatrix> densities;
  std::vector<int> dark_indices;
  std::vector<ErgodicCluster> clusters;  // filled when the group is finite
};

/// Samples of nu_{x,J}: D ~ chi_hat, u ~ Haar(G), sample = J_D (u x).
ErgodicSampleSet sample_ergodic_measure(const IsometryFamily& fam,
                                        const EmpiricalDarkMeasure& chi_hat,
                                        const Ray& x,
                                        const UnitaryGroupClosure& g,
                                        int n_samples, std::uint64_t seed);

/// Density variant: sample = T_D(u rho u^*) = J_D u rho u^* J_D^*.
ErgodicSampleSet sample_ergodic_measure(const IsometryFamily& fam,
                                        const EmpiricalDarkMeasure& chi_hat,
                                        const DensityMatrix& rho,
                                        const UnitaryGroupClosure& g,
                                        int n_samples, std::uint64_t seed);

/// Samples of nu_unif: D ~ chi_hat, sample uniform on P(D).
ErgodicSampleSet sample_nu_unif(const IsometryFamily& fam,
                                const EmpiricalDarkMeasure& chi_hat,
                                int n_samples, std::uint64_t seed);

struct InvarianceResidual {
  double w1 = 0.0;         // raw W1 between the sample set and its pushforward
  double null_mean = 0.0;  // mean W1 of pooled-resplit null replicates
  double residual = 0.0;   // max(0, w1 - null_mean): excess over sampling noise
  double bootstrap_se = 0.0;  // spread of the null replicates (floored)
  int support = 0;            // matched sample size used per side
};

/// Statistical Pi-invariance test: W1 (Fubini ground metric) between the
/// empirical measure and its one-step pushforward on matched sample sizes.
/// Two independent finite samples of the same measure sit at a positive W1,
/// so the raw distance is calibrated against `n_boot` null replicates
/// (re-splits of the pooled samples, which are exchangeable exactly when the
/// measure is invariant): `residual` is the excess of the observed distance
/// over the null mean and `bootstrap_se` the null spread. An invariant
/// measure keeps residual within a few se; a non-invariant one exceeds it by
/// a large factor.
InvarianceResidual invariance_residual(const std::vector<Ray>& samples,
                                       const KrausEnsemble& e,
                                       std::uint64_t seed,
                                       int max_support = kMaxTransportSupport,
                                       int n_boot = 16);

struct SmartnessReport {
  bool certified = false;
  std::vector<double> residuals;  // per chi atom, best over found words
};

/// Searches words w with w D_c = D for every chi atom and reports the best
/// proportionality residual min_phase ||J_D - e^{i phi} w J_c / scale||.
/// Certified iff every residual is <= tol::smart_certify.
SmartnessReport check_smart(const KrausEnsemble& e, const IsometryFamily& fam,
                            const EmpiricalDarkMeasure& chi_hat,
                            WordSearchLimits limits = {});

}  // namespace darktraj

#endif  // DARKTRAJ_FAMILY_HPP
