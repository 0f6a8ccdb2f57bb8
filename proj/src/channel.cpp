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

#include "darktraj/channel.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

namespace darktraj {

namespace {

void check_shape(const KrausEnsemble& e) {
  if (e.dim < 1) throw DimensionError("KrausEnsemble: dim must be positive");
  if (e.items.empty())
    throw DomainError("KrausEnsemble: at least one item required");
  for (const auto& it : e.items) {
    if (it.matrix.rows() != e.dim || it.matrix.cols() != e.dim)
      throw DimensionError("KrausEnsemble: matrix is not dim x dim");
    if (!(it.weight > 0)) throw DomainError("KrausEnsemble: weight must be > 0");
  }
}

}  // namespace

ValidationReport validate_ensemble(const KrausEnsemble& e) {
  check_shape(e);
  CMatrix acc = CMatrix::Zero(e.dim, e.dim);
  for (const auto& it : e.items)
    acc += it.weight * (it.matrix.adjoint() * it.matrix);
  const double residual = (acc - CMatrix::Identity(e.dim, e.dim)).norm();
  return ValidationReport{residual <= tol::stochasticity, residual};
}

void require_valid(const KrausEnsemble& e) {
  const ValidationReport r = validate_ensemble(e);
  if (!r.passed)
    throw StochasticityError("stochasticity violated, residual " +
                                 std::to_string(r.residual),
                             r.residual);
}

CMatrix apply_channel(const KrausEnsemble& e, const CMatrix& x) {
  check_shape(e);
  if (x.rows() != e.dim || x.cols() != e.dim)
    throw DimensionError("apply_channel: input is not dim x dim");
  CMatrix out = CMatrix::Zero(e.dim, e.dim);
  for (const auto& it : e.items)
    out += it.weight * (it.matrix * x * it.matrix.adjoint());
  return out;
}

CMatrix superoperator(const KrausEnsemble& e) {
  check_shape(e);
  const int d2 = e.dim * e.dim;
  CMatrix s = CMatrix::Zero(d2, d2);
  for (const auto& it : e.items)
    s += it.weight *
         Eigen::kroneckerProduct(it.matrix.conjugate(), it.matrix).eval();
  return s;
}

ChannelReport channel_report(const KrausEnsemble& e) {
  require_valid(e);
  const int d = e.dim;
  const int d2 = d * d;
  const CMatrix s = superoperator(e);

  // Peripheral spectrum from the eigenvalues.
  Eigen::ComplexEigenSolver<CMatrix> es(s, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw NumericError("channel_report: eigensolver failed");
  int peripheral = 0;
  double sub_peripheral = 0.0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    const double mod = std::abs(es.eigenvalues()(i));
    if (mod >= 1.0 - tol::peripheral)
      ++peripheral;
    else
      sub_peripheral = std::max(sub_peripheral, mod);
  }

  // Fixed space of the channel as the null space of S - I; its dimension is
  // the fixed-point multiplicity (the peripheral spectrum of a CPTP map is
  // semisimple). The reported fixed point is the orthogonal projection of
  // the chaotic state onto the fixed space, which is fixed exactly and PSD
  // for every case the library meets (clipping guards roundoff).
  Eigen::JacobiSVD<CMatrix> svd(s - CMatrix::Identity(d2, d2),
                                Eigen::ComputeFullV);
  int multiplicity = 0;
  for (int i = 0; i < d2; ++i)
    if (svd.singularValues()(i) <= tol::peripheral) ++multiplicity;
  if (multiplicity < 1)
    throw NumericError("channel_report: no fixed point found");
  const CMatrix null_basis = svd.matrixV().rightCols(multiplicity);
  CVector chaotic = CVector::Zero(d2);
  for (int i = 0; i < d; ++i) chaotic(i * d + i) = 1.0 / d;
  const CVector proj = null_basis * (null_basis.adjoint() * chaotic);
  CMatrix rho = Eigen::Map<const CMatrix>(proj.data(), d, d);
  rho = 0.5 * (rho + rho.adjoint().eval());
  const double tr = rho.trace().real();
  if (std::abs(tr) < 1e-12)
    throw NumericError("channel_report: traceless fixed-point candidate");
  rho /= tr;

  Eigen::SelfAdjointEigenSolver<CMatrix> rho_es(rho);
  const double min_ev = rho_es.eigenvalues().minCoeff();
  RVector ev = rho_es.eigenvalues().cwiseMax(0.0);
  ev /= ev.sum();
  CMatrix rho_clean = rho_es.eigenvectors() * ev.asDiagonal() *
                      rho_es.eigenvectors().adjoint();
  rho_clean = 0.5 * (rho_clean + rho_clean.adjoint().eval());
  if ((apply_channel(e, rho_clean) - rho_clean).norm() > 1e-8)
    throw NumericError("channel_report: candidate is not fixed by phi");

  ChannelReport report{DensityMatrix(rho_clean)};
  report.fixed_point_multiplicity = multiplicity;
  report.is_irreducible = (multiplicity == 1) && (min_ev > 1e-8);
  report.ambiguous =
      (multiplicity == 1) && (min_ev >= 1e-10) && (min_ev <= 1e-8);
  report.period = peripheral;
  report.spectral_gap = 1.0 - sub_peripheral;
  return report;
}

int period(const KrausEnsemble& e) {
  const ChannelReport r = channel_report(e);
  if (!r.is_irreducible)
    throw PreconditionError("period: ensemble is not irreducible");
  return r.period;
}

}  // namespace darktraj
