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

#ifndef DARKTRAJ_PRESETS_HPP
#define DARKTRAJ_PRESETS_HPP

#include "darktraj/family.hpp"

namespace darktraj {

// SU(2) helpers shared by presets and tests.
CMatrix pauli_x();
CMatrix pauli_y();
CMatrix pauli_z();
CMatrix rot_x(double theta);  // exp(i theta/2 sigma_x)
CMatrix rot_z(double theta);  // exp(i theta/2 sigma_z)

/// Built-in ensemble with its a-priori known dark planes and canonical block
/// embeddings (used to pin the reference-space basis of smart families so
/// preset runs produce literal Pauli generators).
struct Preset {
  KrausEnsemble ensemble;
  std::vector<Subspace> canonical_dark;
  std::vector<CMatrix> canonical_embeddings;
  int suggested_chain_len = 1000;
};

/// d = 4, two block-antidiagonal operators driving a deterministic two-cycle
/// between two orthogonal planes. u1 = Id, u2 = rot_x(theta_x),
/// u3 = rot_z(theta_z), u4 = Id.
Preset example_one(double theta_x, double theta_z);
Preset example_one_unitaries(const CMatrix& u1, const CMatrix& u2,
                             const CMatrix& u3, const CMatrix& u4);

/// d = 3, two rank-two operators whose planes share a line (tangent spheres).
Preset example_two(double theta, double phi);

/// d = 4 product system b_i (x) u_i with b's purifying on C^2 and
/// u1 = i sigma_x, u2 = i sigma_z; optionally adds v3 = (Id (x) i sigma_y)
/// with all operators rescaled by 1/sqrt(2). Requires 0 < q < 1/2.
Preset example_three(double q, bool with_v3);

}  // namespace darktraj

#endif  // DARKTRAJ_PRESETS_HPP
