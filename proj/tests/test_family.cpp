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

#include <catch2/catch_amalgamated.hpp>

#include "darktraj/family.hpp"
#include "darktraj/presets.hpp"

using namespace darktraj;

namespace {

const Complex kI(0.0, 1.0);
const double kPi = 3.14159265358979323846;

DarkAtlas canonical_atlas(const Preset& p) {
  DarkAtlas atlas;
  atlas.r_m = 2;
  atlas.representatives = p.canonical_dark;
  atlas.discovery_seeds.assign(p.canonical_dark.size(), 0);
  atlas.residuals.assign(p.canonical_dark.size(), 0.0);
  return atlas;
}

EmpiricalDarkMeasure half_half(const Preset& p) {
  EmpiricalDarkMeasure chi;
  chi.atoms = p.canonical_dark;
  chi.weights = {0.5, 0.5};
  return chi;
}

IsometryFamily smart_family_of(const Preset& p) {
  return build_smart_family(p.ensemble, canonical_atlas(p), half_half(p),
                            p.canonical_dark[0], p.canonical_embeddings[0]);
}

bool same_su_set(const std::vector<CMatrix>& got,
                 const std::vector<CMatrix>& expect, double eps) {
  if (got.size() != expect.size()) return false;
  for (const auto& e : expect) {
    bool found = false;
    for (const auto& g : got)
      if (operator_norm(g - e) <= eps) {
        found = true;
        break;
      }
    if (!found) return false;
  }
  return true;
}

std::vector<CMatrix> quaternion_group() {
  const CMatrix id = CMatrix::Identity(2, 2);
  return {id,           -id,          kI * pauli_x(), -kI * pauli_x(),
          kI * pauli_y(), -kI * pauli_y(), kI * pauli_z(), -kI * pauli_z()};
}

Ray basis_ray(int dim, int k) {
  CVector v = CVector::Zero(dim);
  v(k) = 1.0;
  return Ray(v);
}

}  // namespace

TEST_CASE("canonical SU phase convention") {
  const CMatrix ix = kI * pauli_x();
  REQUIRE(operator_norm(canonical_su_phase(ix) - ix) <= 1e-12);
  REQUIRE(operator_norm(canonical_su_phase(-ix) - ix) <= 1e-12);
  const CMatrix u = rot_z(0.7) * rot_x(0.3);
  const CMatrix c = canonical_su_phase(u);
  REQUIRE(std::abs(c.determinant() - Complex(1, 0)) <= 1e-12);
  REQUIRE(operator_norm(canonical_su_phase(c) - c) <= 1e-12);
  // Phase multiples of an SU matrix canonicalize identically.
  REQUIRE(operator_norm(canonical_su_phase(-c) - c) <= 1e-12);
}

TEST_CASE("smart family of the block two-cycle matches the explicit one") {
  const Preset p = example_one(kPi, kPi);  // u2 = i sx, u3 = i sz
  const IsometryFamily fam = smart_family_of(p);
  REQUIRE(fam.size() == 2);
  REQUIRE(fam.center_index() == 0);
  // J_b = v_1 J_a, normalized; explicitly (0, u2 z): J_b = J_b_emb * u2.
  const int idx_b = fam.find(p.canonical_dark[1]);
  REQUIRE(idx_b >= 0);
  const CMatrix expect = p.canonical_embeddings[1] * (kI * pauli_x());
  REQUIRE((fam.entry(idx_b).J - expect).norm() <= 1e-12);
}

TEST_CASE("smart family of the tangent-sphere model") {
  const Preset p = example_two(0.62, 0.41);
  const IsometryFamily fam = smart_family_of(p);
  const int idx_b = fam.find(p.canonical_dark[1]);
  REQUIRE(idx_b >= 0);
  // J_b = v_2 J_a / sqrt(tr(v_2 pi_a v_2^*)/2) = sqrt(2) v_2 J_a.
  const CMatrix expect =
      std::sqrt(2.0) * p.ensemble.items[1].matrix * p.canonical_embeddings[0];
  REQUIRE((fam.entry(idx_b).J - expect).norm() <= 1e-10);
}

TEST_CASE("smart family of the product system") {
  const Preset p = example_three(0.3, false);
  const IsometryFamily fam = smart_family_of(p);
  const int idx1 = fam.find(p.canonical_dark[1]);
  REQUIRE(idx1 >= 0);
  // J_{e1} z = e1 (x) (i sz z).
  CMatrix expect = CMatrix::Zero(4, 2);
  expect.block(2, 0, 2, 2) = kI * pauli_z();
  REQUIRE((fam.entry(idx1).J - expect).norm() <= 1e-12);
}

TEST_CASE("induced unitaries of the block two-cycle at theta = pi") {
  const Preset p = example_one(kPi, kPi);
  const IsometryFamily fam = smart_family_of(p);
  // v_1 on D_a induces the identity (the defining property of smartness).
  const CMatrix u1a =
      induced_unitary(fam, p.ensemble.items[0].matrix, p.canonical_dark[0]);
  REQUIRE(operator_norm(u1a - CMatrix::Identity(2, 2)) <= 1e-10);
  // The remaining generators are (up to canonical phase) i sx and i sy.
  const CMatrix u2a =
      induced_unitary(fam, p.ensemble.items[1].matrix, p.canonical_dark[0]);
  const CMatrix u1b =
      induced_unitary(fam, p.ensemble.items[0].matrix, p.canonical_dark[1]);
  const CMatrix u2b =
      induced_unitary(fam, p.ensemble.items[1].matrix, p.canonical_dark[1]);
  REQUIRE(operator_norm(u2a - kI * pauli_x()) <= 1e-10);
  REQUIRE(operator_norm(u1b - kI * pauli_x()) <= 1e-10);
  REQUIRE(operator_norm(u2b - kI * pauli_y()) <= 1e-10);
}

TEST_CASE("induced unitary of the product system flips sign across planes") {
  const Preset p = example_three(0.3, false);
  const IsometryFamily fam = smart_family_of(p);
  const CMatrix u =
      induced_unitary(fam, p.ensemble.items[0].matrix, p.canonical_dark[1]);
  // Proportional to -i sx; canonical phase turns it into +i sx.
  REQUIRE(operator_norm(u - kI * pauli_x()) <= 1e-10);
}

TEST_CASE("induced unitary is the identity when J_vD absorbs the word") {
  // Single unitary, whole space dark: J = Id, u_{v, C^2} = canonical(v).
  KrausEnsemble e;
  e.dim = 2;
  const CMatrix u = rot_x(0.9);
  e.items = {KrausItem{1.0, u}};
  std::vector<IsometryEntry> entries;
  entries.push_back(
      IsometryEntry{Subspace(CMatrix::Identity(2, 2)), CMatrix::Identity(2, 2)});
  const IsometryFamily fam(2, std::move(entries), 0);
  const CMatrix got =
      induced_unitary(fam, u, Subspace(CMatrix::Identity(2, 2)));
  REQUIRE(operator_norm(got - canonical_su_phase(u)) <= 1e-10);
}

TEST_CASE("induced unitary error paths") {
  const Preset p = example_one(kPi, kPi);
  const IsometryFamily fam = smart_family_of(p);
  SplitMix64 rng(3);
  const Subspace stranger = random_subspace(4, 2, rng);
  REQUIRE_THROWS_AS(
      induced_unitary(fam, p.ensemble.items[0].matrix, stranger),
      MissingEntryError);
}

TEST_CASE("cocycle consistency up to a root of unity") {
  const Preset p = example_one(kPi, kPi);
  const IsometryFamily fam = smart_family_of(p);
  const CMatrix& v1 = p.ensemble.items[0].matrix;
  const CMatrix& v2 = p.ensemble.items[1].matrix;
  for (int a = 0; a < 2; ++a) {
    const Subspace& d = p.canonical_dark[a];
    const Subspace image =
        Subspace::from_span(v1 * d.basis(), 1e-9);
    const CMatrix lhs = induced_unitary(fam, v2, image) *
                        induced_unitary(fam, v1, d);
    const CMatrix rhs = induced_unitary(fam, v2 * v1, d);
    double best = 1e300;
    for (int k = 0; k < 2; ++k) {
      const Complex omega = std::exp(Complex(0, kPi * k));
      best = std::min(best, operator_norm(lhs - omega * rhs));
    }
    REQUIRE(best <= 1e-8);
  }
}

TEST_CASE("group closure of the quaternion generators") {
  const UnitaryGroupClosure g =
      group_closure({kI * pauli_x(), kI * pauli_z()});
  REQUIRE(g.kind == UnitaryGroupClosure::Kind::kFinite);
  REQUIRE(g.elements.size() == 8);
  REQUIRE(same_su_set(g.elements, quaternion_group(), 1e-9));
}

TEST_CASE("group closure of the identity") {
  const UnitaryGroupClosure g = group_closure({CMatrix::Identity(2, 2)});
  REQUIRE(g.kind == UnitaryGroupClosure::Kind::kFinite);
  REQUIRE(g.elements.size() == 1);
}

TEST_CASE("group closure detects the circle-with-flip group") {
  const UnitaryGroupClosure g =
      group_closure({kI * pauli_x(), rot_z(std::sqrt(2.0))});
  REQUIRE(g.kind == UnitaryGroupClosure::Kind::kContinuous);
  REQUIRE(g.lie_dim == 1);
  REQUIRE(classify_transitivity(g) == Transitivity::kUndecided);
}

TEST_CASE("group closure detects full SU(2)") {
  const UnitaryGroupClosure g =
      group_closure({rot_x(std::sqrt(2.0)), rot_z(std::sqrt(3.0))});
  REQUIRE(g.kind == UnitaryGroupClosure::Kind::kContinuous);
  REQUIRE(g.lie_dim == 3);
  REQUIRE(classify_transitivity(g) == Transitivity::kFullSU);
}

TEST_CASE("finite closures are closed under products") {
  const UnitaryGroupClosure g =
      group_closure({kI * pauli_x(), kI * pauli_z()});
  SplitMix64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const CMatrix& a = g.elements[rng.below(g.elements.size())];
    const CMatrix& b = g.elements[rng.below(g.elements.size())];
    const CMatrix ab = a * b;
    bool found = false;
    for (const auto& e : g.elements)
      if (operator_norm(e - ab) <= tol::group_dedup) {
        found = true;
        break;
      }
    REQUIRE(found);
  }
}

TEST_CASE("transitivity classification verdicts") {
  // Finite groups never act transitively on a positive-dimensional P(C^r).
  const UnitaryGroupClosure q8 =
      group_closure({kI * pauli_x(), kI * pauli_z()});
  REQUIRE(classify_transitivity(q8) == Transitivity::kNotTransitive);

  // The 2x2 identity u^T (i sy) u = det(u) (i sy) makes every SU(2) matrix
  // symplectic, so full SU must win the precedence fight for r_m = 2.
  SplitMix64 rng(7);
  const CMatrix jform = kI * pauli_y();
  for (int trial = 0; trial < 100; ++trial) {
    const CMatrix u = canonical_su_phase(random_unitary(2, rng));
    REQUIRE(operator_norm(u.transpose() * jform * u - jform) <= 1e-10);
  }
  const UnitaryGroupClosure su2 =
      group_closure({rot_x(std::sqrt(2.0)), rot_z(std::sqrt(3.0))});
  REQUIRE(classify_transitivity(su2) == Transitivity::kFullSU);
}

TEST_CASE("haar sampling from a finite closure is uniform") {
  const UnitaryGroupClosure g =
      group_closure({kI * pauli_x(), kI * pauli_z()});
  SplitMix64 rng(9);
  std::vector<int> counts(g.elements.size(), 0);
  const int n = 100000;
  for (int k = 0; k < n; ++k) {
    const CMatrix u = haar_sample(g, rng);
    for (std::size_t i = 0; i < g.elements.size(); ++i)
      if (operator_norm(u - g.elements[i]) <= 1e-9) {
        ++counts[i];
        break;
      }
  }
  for (int c : counts)
    REQUIRE(std::abs(c / double(n) - 0.125) <= 0.005);
}

TEST_CASE("haar sampling from {Id} is the identity") {
  const UnitaryGroupClosure g = group_closure({CMatrix::Identity(2, 2)});
  SplitMix64 rng(11);
  REQUIRE(operator_norm(haar_sample(g, rng) - CMatrix::Identity(2, 2)) <=
          1e-12);
}

TEST_CASE("random words approximate the Haar second moment on SU(2)") {
  const UnitaryGroupClosure g =
      group_closure({rot_x(std::sqrt(2.0)), rot_z(std::sqrt(3.0))});
  SplitMix64 rng(13);
  // Oracle: E[u_{ij} conj(u_{kl})] = delta_{ik} delta_{jl} / r.
  Eigen::Matrix<Complex, 4, 4> acc;
  acc.setZero();
  const int n = 10000;
  for (int s = 0; s < n; ++s) {
    const CMatrix u = haar_sample(g, rng);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
          for (int l = 0; l < 2; ++l)
            acc(i * 2 + j, k * 2 + l) += u(i, j) * std::conj(u(k, l));
  }
  acc /= double(n);
  double err = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
          const double expect = (i == k && j == l) ? 0.5 : 0.0;
          err = std::max(err,
                         std::abs(acc(i * 2 + j, k * 2 + l) - expect));
        }
  REQUIRE(err <= 0.05);
}

TEST_CASE("orbits under the quaternion group") {
  const UnitaryGroupClosure g =
      group_closure({kI * pauli_x(), kI * pauli_z()});
  // e0 is an eigenvector of sigma_z: the orbit degenerates to two rays.
  REQUIRE(orbit(basis_ray(2, 0), g).size() == 2);
  // A generic ray has four.
  CVector v(2);
  v << 0.8, Complex(0.3, 0.5);
  REQUIRE(orbit(Ray(v), g).size() == 4);
  const UnitaryGroupClosure trivial = group_closure({CMatrix::Identity(2, 2)});
  REQUIRE(orbit(Ray(v), trivial).size() == 1);

  // Orbit sets are invariant under the group action.
  const std::vector<Ray> base = orbit(Ray(v), g);
  for (const auto& u : g.elements) {
    const std::vector<Ray> moved = orbit(Ray(u * v), g);
    REQUIRE(moved.size() == base.size());
    for (const auto& m : moved) {
      double best = 1.0;
      for (const auto& b : base) best = std::min(best, fubini_distance(m, b));
      REQUIRE(best <= 1e-9);
    }
  }
}

TEST_CASE("ergodic sampling clusters on the eight-atom measure") {
  const Preset p = example_one(kPi, kPi);
  const IsometryFamily fam = smart_family_of(p);
  const EmpiricalDarkMeasure chi = half_half(p);
  const UnitaryGroupClosure g =
      group_closure(family_generators(p.ensemble, fam, chi));
  REQUIRE(g.kind == UnitaryGroupClosure::Kind::kFinite);
  REQUIRE(g.elements.size() == 8);

  CVector generic(2);
  generic << 0.8, Complex(0.35, 0.45);
  const ErgodicSampleSet set =
      sample_ergodic_measure(fam, chi, Ray(generic), g, 10000, 17);
  REQUIRE(set.clusters.size() == 8);
  int per_sphere[2] = {0, 0};
  for (const auto& c : set.clusters) {
    ++per_sphere[c.dark_index];
    REQUIRE(std::abs(c.weight - 0.125) <= 0.01);
  }
  REQUIRE(per_sphere[0] == 4);
  REQUIRE(per_sphere[1] == 4);

  // Samples live inside the atlas dark subspaces.
  for (const auto& r : set.rays)
    REQUIRE(darkness_gap(r, p.canonical_dark) <= 1e-8);

  // The degenerate base point halves the orbit.
  const ErgodicSampleSet degen =
      sample_ergodic_measure(fam, chi, basis_ray(2, 0), g, 10000, 19);
  REQUIRE(degen.clusters.size() == 4);
}

TEST_CASE("trivial group ergodic sampling is a point mass") {
  const Preset p = example_one(kPi, kPi);
  const IsometryFamily fam = smart_family_of(p);
  EmpiricalDarkMeasure delta;
  delta.atoms = {p.canonical_dark[0]};
  delta.weights = {1.0};
  const UnitaryGroupClosure g = group_closure({CMatrix::Identity(2, 2)});
  CVector v(2);
  v << 0.6, 0.8;
  const ErgodicSampleSet set =
      sample_ergodic_measure(fam, delta, Ray(v), g, 200, 23);
  const Ray expect(fam.entry(0).J * Ray(v).representative());
  for (const auto& r : set.rays) REQUIRE(fubini_distance(r, expect) <= 1e-12);
}

TEST_CASE("density-variant samples preserve the base spectrum") {
  const Preset p = example_one(kPi, kPi);
  const IsometryFamily fam = smart_family_of(p);
  const EmpiricalDarkMeasure chi = half_half(p);
  const UnitaryGroupClosure g =
      group_closure(family_generators(p.ensemble, fam, chi));
  CMatrix rho0 = CMatrix::Zero(2, 2);
  rho0(0, 0) = 0.7;
  rho0(1, 1) = 0.3;
  const ErgodicSampleSet set =
      sample_ergodic_measure(fam, chi, DensityMatrix(rho0), g, 500, 29);
  for (const auto& rho : set.densities) {
    const RVector spec = rho.spectrum();
    REQUIRE(spec(0) == Catch::Approx(0.7).margin(1e-10));
    REQUIRE(spec(1) == Catch::Approx(0.3).margin(1e-10));
    REQUIRE(std::abs(spec(2)) <= 1e-10);
    REQUIRE(std::abs(spec(3)) <= 1e-10);
  }
}

TEST_CASE("invariance residual near zero for a fixed ray") {
  // diag(1, e^{i}) fixes e0; the delta measure there is Pi-invariant.
  KrausEnsemble e;
  e.dim = 2;
  CMatrix u = CMatrix::Zero(2, 2);
  u(0, 0) = 1.0;
  u(1, 1) = std::exp(kI * 1.0);
  e.items = {KrausItem{1.0, u}};
  std::vector<Ray> samples(256, basis_ray(2, 0));
  const InvarianceResidual r = invariance_residual(samples, e, 31);
  REQUIRE(r.w1 <= 1e-9);
  REQUIRE(r.residual <= 3.0 * r.bootstrap_se);
}

TEST_CASE("invariance residual accepts nu_unif and rejects a lopsided one") {
  const Preset p = example_one(kPi, kPi);
  const IsometryFamily fam = smart_family_of(p);
  const EmpiricalDarkMeasure chi = half_half(p);

  const ErgodicSampleSet unif = sample_nu_unif(fam, chi, 4000, 37);
  const InvarianceResidual ok =
      invariance_residual(unif.rays, p.ensemble, 41, 256, 12);
  REQUIRE(ok.residual <= 3.0 * ok.bootstrap_se);

  // Uniform over the first sphere only: one step moves all mass across.
  EmpiricalDarkMeasure lopsided;
  lopsided.atoms = {p.canonical_dark[0]};
  lopsided.weights = {1.0};
  const ErgodicSampleSet bad = sample_nu_unif(fam, lopsided, 4000, 43);
  const InvarianceResidual rej =
      invariance_residual(bad.rays, p.ensemble, 47, 256, 12);
  REQUIRE(rej.residual > 10.0 * rej.bootstrap_se);
}

TEST_CASE("families built smart certify as smart") {
  for (const Preset& p :
       {example_one(kPi, kPi), example_two(0.62, 0.41),
        example_three(0.3, false)}) {
    const IsometryFamily fam = smart_family_of(p);
    const SmartnessReport rep =
        check_smart(p.ensemble, fam, half_half(p));
    REQUIRE(rep.certified);
  }
}

TEST_CASE("a twisted family fails smartness certification") {
  // Block two-cycle with theta_x = pi, theta_z irrational; the family
  // {J_a_emb, J_b_emb R_x(psi)} with psi irrational is not smart.
  const Preset p = example_one(kPi, std::sqrt(2.0));
  std::vector<IsometryEntry> entries;
  entries.push_back(
      IsometryEntry{p.canonical_dark[0], p.canonical_embeddings[0]});
  entries.push_back(IsometryEntry{
      p.canonical_dark[1],
      p.canonical_embeddings[1] * rot_x(std::sqrt(3.0))});
  const IsometryFamily twisted(2, std::move(entries), 0);
  const SmartnessReport rep =
      check_smart(p.ensemble, twisted, half_half(p), {12, 3000});
  REQUIRE_FALSE(rep.certified);
}

TEST_CASE("product-system smart family induces a strictly smaller group") {
  const Preset p = example_three(0.3, false);
  const EmpiricalDarkMeasure chi = half_half(p);
  const IsometryFamily smart = smart_family_of(p);
  const UnitaryGroupClosure g_smart =
      group_closure(family_generators(p.ensemble, smart, chi));
  REQUIRE(g_smart.kind == UnitaryGroupClosure::Kind::kFinite);
  REQUIRE(g_smart.elements.size() == 4);

  std::vector<IsometryEntry> entries;
  entries.push_back(
      IsometryEntry{p.canonical_dark[0], p.canonical_embeddings[0]});
  entries.push_back(
      IsometryEntry{p.canonical_dark[1], p.canonical_embeddings[1]});
  const IsometryFamily embedding(2, std::move(entries), 0);
  const UnitaryGroupClosure g_emb =
      group_closure(family_generators(p.ensemble, embedding, chi));
  REQUIRE(g_emb.kind == UnitaryGroupClosure::Kind::kFinite);
  REQUIRE(g_emb.elements.size() == 8);
  const SmartnessReport rep = check_smart(p.ensemble, smart, chi);
  REQUIRE(rep.certified);
}

TEST_CASE("two smart families from different centers give the same measures") {
  const Preset p = example_one(kPi, kPi);
  const EmpiricalDarkMeasure chi = half_half(p);
  const DarkAtlas atlas = canonical_atlas(p);
  const IsometryFamily fam_a = build_smart_family(
      p.ensemble, atlas, chi, p.canonical_dark[0], p.canonical_embeddings[0]);
  const IsometryFamily fam_b = build_smart_family(
      p.ensemble, atlas, chi, p.canonical_dark[1], p.canonical_embeddings[1]);
  const UnitaryGroupClosure g_a =
      group_closure(family_generators(p.ensemble, fam_a, chi));
  const UnitaryGroupClosure g_b =
      group_closure(family_generators(p.ensemble, fam_b, chi));

  // Conjugate the base point with Q_{D'} = J'^{-1}_{D'} Jtilde_{D'}.
  const int ref = fam_a.find(p.canonical_dark[0]);
  const int ref_b = fam_b.find(p.canonical_dark[0]);
  const CMatrix q =
      fam_a.entry(ref).J.adjoint() * fam_b.entry(ref_b).J;

  CVector x(2);
  x << 0.8, Complex(0.3, 0.5);
  const ErgodicSampleSet set_b =
      sample_ergodic_measure(fam_b, chi, Ray(x), g_b, 8000, 53);
  const ErgodicSampleSet set_a =
      sample_ergodic_measure(fam_a, chi, Ray(q * x), g_a, 8000, 59);

  // Both describe the same eight-atom measure; compare the clustered atoms
  // so only multinomial weight noise separates them.
  std::vector<Ray> atoms_a, atoms_b;
  std::vector<double> w_a, w_b;
  for (const auto& c : set_a.clusters) {
    atoms_a.push_back(c.center);
    w_a.push_back(c.weight);
  }
  for (const auto& c : set_b.clusters) {
    atoms_b.push_back(c.center);
    w_b.push_back(c.weight);
  }
  REQUIRE(atoms_a.size() == 8);
  REQUIRE(atoms_b.size() == 8);
  const double w1 = wasserstein1(
      atoms_a, w_a, atoms_b, w_b,
      [](const Ray& a, const Ray& b) { return fubini_distance(a, b); });
  // Multinomial weight noise at 8000 samples is ~0.004 per atom.
  REQUIRE(w1 <= 0.03);
}
