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

#ifndef DARKTRAJ_CHANNEL_HPP
#define DARKTRAJ_CHANNEL_HPP

#include <optional>
#include <vector>

#include "darktraj/linalg.hpp"
#include "darktraj/types.hpp"

namespace darktraj {

struct KrausItem {
  double weight;   // mass p_i carried by this operator, > 0
  CMatrix matrix;  // d x d
};

/// Finite weighted Kraus family {(p_i, v_i)} with sum p_i v_i^* v_i = Id.
/// The weights are the masses of the defining measure; they need not sum
/// to one.
struct KrausEnsemble {
  int dim = 0;
  std::vector<KrausItem> items;
};

struct ValidationReport {
  bool passed = false;
  double residual = 0.0;  // ||sum p_i v_i^* v_i - Id|| (Frobenius norm)
};

/// Stochasticity check. Passes iff the residual is <= tol::stochasticity.
ValidationReport validate_ensemble(const KrausEnsemble& e);

/// Like validate_ensemble but throws StochasticityError on failure.
void require_valid(const KrausEnsemble& e);

/// phi(x) = sum_i p_i v_i x v_i^*.
CMatrix apply_channel(const KrausEnsemble& e, const CMatrix& x);

/// Matrix of phi in the canonical (column-stacking) basis, d^2 x d^2:
/// vec(v X v^*) = (conj(v) (x) v) vec(X).
CMatrix superoperator(const KrausEnsemble& e);

struct ChannelReport {
  DensityMatrix fixed_point;
  int fixed_point_multiplicity = 0;
  bool is_irreducible = false;
  // Set when multiplicity is 1 but the smallest eigenvalue of the fixed
  // point sits in the numerically ambiguous band [1e-10, 1e-8]; the verdict
  // is then not decided by this report.
  bool ambiguous = false;
  int period = 0;        // peripheral eigenvalue count; valid when irreducible
  double spectral_gap = 0.0;  // 1 - largest subperipheral |lambda|
};

/// Fixed point, multiplicity, irreducibility, period and spectral gap from
/// one eigendecomposition of the superoperator.
ChannelReport channel_report(const KrausEnsemble& e);

/// Peripheral-spectrum count; throws PreconditionError on reducible input.
int period(const KrausEnsemble& e);

}  // namespace darktraj

#endif  // DARKTRAJ_CHANNEL_HPP
