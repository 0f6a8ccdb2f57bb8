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

#include "darktraj/presets.hpp"

#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>

namespace darktraj {

namespace {

const Complex kI(0.0, 1.0);

CMatrix block_embedding(int ambient, int row0) {
  CMatrix j = CMatrix::Zero(ambient, 2);
  j(row0, 0) = 1.0;
  j(row0 + 1, 1) = 1.0;
  return j;
}

}  // namespace

CMatrix pauli_x() {
  CMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

CMatrix pauli_y() {
  CMatrix m(2, 2);
  m << 0, -kI, kI, 0;
  return m;
}

CMatrix pauli_z() {
  CMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

CMatrix rot_x(double theta) {
  return std::cos(theta / 2) * CMatrix::Identity(2, 2) +
         kI * std::sin(theta / 2) * pauli_x();
}

CMatrix rot_z(double theta) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = std::exp(kI * (theta / 2));
  m(1, 1) = std::exp(-kI * (theta / 2));
  return m;
}

Preset example_one_unitaries(const CMatrix& u1, const CMatrix& u2,
                             const CMatrix& u3, const CMatrix& u4) {
  CMatrix v1 = CMatrix::Zero(4, 4);
  v1.block(0, 2, 2, 2) = std::sqrt(1.0 / 3.0) * u1;
  v1.block(2, 0, 2, 2) = std::sqrt(1.0 / 4.0) * u2;
  CMatrix v2 = CMatrix::Zero(4, 4);
  v2.block(0, 2, 2, 2) = std::sqrt(2.0 / 3.0) * u3;
  v2.block(2, 0, 2, 2) = std::sqrt(3.0 / 4.0) * u4;

  Preset p;
  p.ensemble.dim = 4;
  p.ensemble.items = {KrausItem{1.0, v1}, KrausItem{1.0, v2}};
  p.canonical_dark = {Subspace(block_embedding(4, 0)),
                      Subspace(block_embedding(4, 2))};
  p.canonical_embeddings = {block_embedding(4, 0), block_embedding(4, 2)};
  // The two block scales are nearly balanced, so the singular gap the rank
  // estimator waits for opens slowly; probes need long words here.
  p.suggested_chain_len = 3000;
  return p;
}

Preset example_one(double theta_x, double theta_z) {
  return example_one_unitaries(CMatrix::Identity(2, 2), rot_x(theta_x),
                               rot_z(theta_z), CMatrix::Identity(2, 2));
}

Preset example_two(double theta, double phi) {
  const double c = 1.0 / std::sqrt(2.0);
  CMatrix v1 = CMatrix::Zero(3, 3);
  v1 << std::cos(theta), std::sin(theta), std::cos(theta),
      std::sin(theta), -std::cos(theta), std::sin(theta),
      0, 0, 0;
  v1 *= c;
  CMatrix v2 = CMatrix::Zero(3, 3);
  v2 << 0, 0, 0,
      std::cos(phi), -std::sin(phi), -std::cos(phi),
      std::sin(phi), std::cos(phi), -std::sin(phi);
  v2 *= c;

  Preset p;
  p.ensemble.dim = 3;
  p.ensemble.items = {KrausItem{1.0, v1}, KrausItem{1.0, v2}};
  p.canonical_dark = {Subspace(block_embedding(3, 0)),
                      Subspace(block_embedding(3, 1))};
  p.canonical_embeddings = {block_embedding(3, 0), block_embedding(3, 1)};
  p.suggested_chain_len = 64;
  return p;
}

Preset example_three(double q, bool with_v3) {
  if (!(q > 0.0 && q < 0.5))
    throw DomainError("example_three: q must lie in (0, 1/2)");
  CMatrix b1 = CMatrix::Zero(2, 2);
  b1(0, 0) = std::sqrt(q);
  b1(1, 1) = std::sqrt(1.0 - q);
  CMatrix b2 = CMatrix::Zero(2, 2);
  b2(0, 1) = std::sqrt(q);
  b2(1, 0) = std::sqrt(1.0 - q);
  const CMatrix u1 = kI * pauli_x();
  const CMatrix u2 = kI * pauli_z();

  CMatrix v1 = Eigen::kroneckerProduct(b1, u1);
  CMatrix v2 = Eigen::kroneckerProduct(b2, u2);

  Preset p;
  p.ensemble.dim = 4;
  if (with_v3) {
    const double s = 1.0 / std::sqrt(2.0);
    const CMatrix v3 =
        Eigen::kroneckerProduct(CMatrix::Identity(2, 2), kI * pauli_y());
    p.ensemble.items = {KrausItem{1.0, s * v1}, KrausItem{1.0, s * v2},
                        KrausItem{1.0, s * v3}};
  } else {
    p.ensemble.items = {KrausItem{1.0, v1}, KrausItem{1.0, v2}};
  }
  p.canonical_dark = {Subspace(block_embedding(4, 0)),
                      Subspace(block_embedding(4, 2))};
  p.canonical_embeddings = {block_embedding(4, 0), block_embedding(4, 2)};
  p.suggested_chain_len = 400;
  return p;
}

}  // namespace darktraj
