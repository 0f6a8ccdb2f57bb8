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

#ifndef DARKTRAJ_LINALG_HPP
#define DARKTRAJ_LINALG_HPP

#include <utility>
#include <vector>

#include "darktraj/rng.hpp"
#include "darktraj/types.hpp"

namespace darktraj {

/// A point of the projective space P(C^d), stored as a unit representative.
/// Phase is quotiented: two rays are equal iff their Fubini-Study distance
/// is below tol::ray_equal.
class Ray {
 public:
  explicit Ray(CVector representative);

  int dim() const { return static_cast<int>(v_.size()); }
  const CVector& representative() const { return v_; }

 private:
  CVector v_;
};

/// Element of the Grassmannian G_{k,d}(C), stored as a column-orthonormal
/// basis (d x k).
class Subspace {
 public:
  // Requires `basis` column-orthonormal within 1e-10.
  explicit Subspace(CMatrix basis);

  // Orthonormalizes the columns of `span` (rank decided at rank_tol relative
  // to the top singular value) and returns the resulting subspace.
  static Subspace from_span(const CMatrix& span, double rank_tol = 1e-12);

  int ambient_dim() const { return static_cast<int>(basis_.rows()); }
  int dim() const { return static_cast<int>(basis_.cols()); }
  const CMatrix& basis() const { return basis_; }
  CMatrix projector() const { return basis_ * basis_.adjoint(); }

 private:
  CMatrix basis_;
};

/// Density matrix: Hermitian, PSD, unit trace (within fixed tolerances).
class DensityMatrix {
 public:
  explicit DensityMatrix(CMatrix matrix);

  int dim() const { return static_cast<int>(m_.rows()); }
  const CMatrix& matrix() const { return m_; }

  // Eigenvalues sorted decreasing.
  RVector spectrum() const;
  // Count of eigenvalues >= rel_tol * largest.
  int numerical_rank(double rel_tol = tol::rank_rel) const;
  Subspace support(double rel_tol = tol::rank_rel) const;

  static DensityMatrix maximally_mixed(int dim);
  static DensityMatrix pure(const Ray& x);

 private:
  CMatrix m_;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Polar decomposition a = u * p with p = sqrt(a^* a) PSD and u unitary.
/// For singular a the unitary factor is completed from the SVD (u = X Y^*
/// where a = X S Y^*), which keeps the factor well defined and deterministic.
std::pair<CMatrix, CMatrix> polar_decompose(const CMatrix& a);

/// Gap metric ||pi_{q1} - pi_{q2}|| (operator norm). Requires equal ambient
/// and equal subspace dimensions.
double gap_distance(const Subspace& q1, const Subspace& q2);

/// ||x - pi_q x|| for a unit vector x (normalized internally; zero input is
/// a domain error).
double dist_to_subspace(const CVector& x, const Subspace& q);

/// Wedge-quotient evaluation ||x ^ y_1 ^ ... ^ y_p|| / ||y_1 ^ ... ^ y_p||
/// via Gram determinants; the y_i need only be linearly independent.
double dist_to_subspace_wedge(const CVector& x, const std::vector<CVector>& ys);

/// Fubini-Study distance sqrt(1 - |<x,y>|^2); equals the gap distance of the
/// two lines and is phase invariant.
double fubini_distance(const Ray& x, const Ray& y);

/// Product of the p largest singular values of a, i.e. the operator norm of
/// the p-th exterior power of a. Singular values below `floor_rel` times the
/// largest are treated as exact zeros (floor_rel = 0 disables the clamp).
double wedge_norm(const CMatrix& a, int p, double floor_rel = 0.0);

/// Operator norm (largest singular value).
double operator_norm(const CMatrix& a);

// Random sampling helpers (unitary-invariant constructions).
Ray random_ray(int dim, SplitMix64& rng);
CMatrix random_unitary(int dim, SplitMix64& rng);
Subspace random_subspace(int ambient_dim, int dim, SplitMix64& rng);
CMatrix random_complex_matrix(int rows, int cols, SplitMix64& rng);

}  // namespace darktraj

#endif  // DARKTRAJ_LINALG_HPP
