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

#include "darktraj/linalg.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace darktraj {

namespace {

void check_finite(const CMatrix& a, const char* who) {
  if (!a.allFinite()) throw NumericError(std::string(who) + ": non-finite entries");
}

}  // namespace

Ray::Ray(CVector representative) : v_(std::move(representative)) {
  if (v_.size() == 0) throw DimensionError("Ray: empty vector");
  const double n = v_.norm();
  if (!(n > 1e-300)) throw DomainError("Ray: zero vector has no direction");
  v_ /= n;
}

Subspace::Subspace(CMatrix basis) : basis_(std::move(basis)) {
  if (basis_.cols() < 1 || basis_.rows() < basis_.cols())
    throw DimensionError("Subspace: basis must be d x k with 1 <= k <= d");
  check_finite(basis_, "Subspace");
  const CMatrix gram = basis_.adjoint() * basis_;
  const double err = (gram - CMatrix::Identity(basis_.cols(), basis_.cols()))
                         .cwiseAbs()
                         .maxCoeff();
  if (err > 1e-10)
    throw DomainError("Subspace: basis not column-orthonormal (residual " +
                      std::to_string(err) + ")");
}

Subspace Subspace::from_span(const CMatrix& span, double rank_tol) {
  check_finite(span, "Subspace::from_span");
  Eigen::JacobiSVD<CMatrix> svd(span, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || !(sv(0) > 0))
    throw DomainError("Subspace::from_span: zero span");
  int k = 0;
  while (k < sv.size() && sv(k) > rank_tol * sv(0)) ++k;
  return Subspace(svd.matrixU().leftCols(k));
}

DensityMatrix::DensityMatrix(CMatrix matrix) : m_(std::move(matrix)) {
  if (m_.rows() != m_.cols() || m_.rows() < 1)
    throw DimensionError("DensityMatrix: matrix must be square");
  check_finite(m_, "DensityMatrix");
  const double herm = (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
  if (herm > 1e-12)
    throw DomainError("DensityMatrix: not Hermitian (residual " +
                      std::to_string(herm) + ")");
  m_ = 0.5 * (m_ + m_.adjoint().eval());
  const double tr_err = std::abs(m_.trace().real() - 1.0) +
                        std::abs(m_.trace().imag());
  if (tr_err > 1e-12)
    throw DomainError("DensityMatrix: trace differs from 1 by " +
                      std::to_string(tr_err));
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-12)
    throw DomainError("DensityMatrix: negative eigenvalue " +
                      std::to_string(es.eigenvalues().minCoeff()));
}

RVector DensityMatrix::spectrum() const {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m_, Eigen::EigenvaluesOnly);
  RVector ev = es.eigenvalues();
  std::sort(ev.data(), ev.data() + ev.size(), std::greater<double>());
  return ev;
}

int DensityMatrix::numerical_rank(double rel_tol) const {
  const RVector ev = spectrum();
  if (!(ev(0) > 0)) return 0;
  int r = 0;
  while (r < ev.size() && ev(r) >= rel_tol * ev(0)) ++r;
  return r;
}

Subspace DensityMatrix::support(double rel_tol) const {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m_);
  const RVector& ev = es.eigenvalues();  // ascending
  const double top = ev(ev.size() - 1);
  int k = 0;
  for (int i = 0; i < ev.size(); ++i)
    if (ev(i) >= rel_tol * top) ++k;
  return Subspace(es.eigenvectors().rightCols(k));
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
  return DensityMatrix(CMatrix::Identity(dim, dim) / static_cast<double>(dim));
}

DensityMatrix DensityMatrix::pure(const Ray& x) {
  return DensityMatrix(x.representative() * x.representative().adjoint());
}

std::pair<CMatrix, CMatrix> polar_decompose(const CMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("polar_decompose: non-square");
  check_finite(a, "polar_decompose");
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const CMatrix u = svd.matrixU() * svd.matrixV().adjoint();
  const CMatrix p = svd.matrixV() * svd.singularValues().asDiagonal() *
                    svd.matrixV().adjoint();
  return {u, p};
}

double gap_distance(const Subspace& q1, const Subspace& q2) {
  if (q1.ambient_dim() != q2.ambient_dim())
    throw DimensionError("gap_distance: ambient dimensions differ");
  if (q1.dim() != q2.dim())
    throw DimensionError("gap_distance: subspace dimensions differ");
  const CMatrix diff = q1.projector() - q2.projector();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(diff, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double dist_to_subspace(const CVector& x, const Subspace& q) {
  if (x.size() != q.ambient_dim())
    throw DimensionError("dist_to_subspace: dimension mismatch");
  const double n = x.norm();
  if (!(n > 1e-300)) throw DomainError("dist_to_subspace: zero vector");
  const CVector xn = x / n;
  return (xn - q.basis() * (q.basis().adjoint() * xn)).norm();
}

double dist_to_subspace_wedge(const CVector& x,
                              const std::vector<CVector>& ys) {
  if (ys.empty()) throw DomainError("dist_to_subspace_wedge: empty family");
  const double n = x.norm();
  if (!(n > 1e-300)) throw DomainError("dist_to_subspace_wedge: zero vector");
  const int p = static_cast<int>(ys.size());
  CMatrix y(x.size(), p);
  for (int j = 0; j < p; ++j) {
    if (ys[j].size() != x.size())
      throw DimensionError("dist_to_subspace_wedge: dimension mismatch");
    y.col(j) = ys[j];
  }
  // ||y_1 ^ ... ^ y_p||^2 = det Gram(y); same with x prepended.
  CMatrix yx(x.size(), p + 1);
  yx.col(0) = x / n;
  yx.rightCols(p) = y;
  const double gy = (y.adjoint() * y).determinant().real();
  const double gyx = (yx.adjoint() * yx).determinant().real();
  if (!(gy > 0))
    throw DomainError("dist_to_subspace_wedge: family is linearly dependent");
  return std::sqrt(std::max(0.0, gyx / gy));
}

double fubini_distance(const Ray& x, const Ray& y) {
  if (x.dim() != y.dim()) throw DimensionError("fubini_distance: dim mismatch");
  // ||y - pi_x y|| evaluates sqrt(1 - |<x,y>|^2) without the cancellation
  // that floors the direct formula at ~1e-8 for nearly equal rays.
  const Complex ip = x.representative().dot(y.representative());
  const double dist =
      (y.representative() - x.representative() * ip).norm();
  return std::min(1.0, dist);
}

double wedge_norm(const CMatrix& a, int p, double floor_rel) {
  const int kmax = static_cast<int>(std::min(a.rows(), a.cols()));
  if (p < 1 || p > kmax)
    throw DomainError("wedge_norm: p out of range [1, min(rows, cols)]");
  check_finite(a, "wedge_norm");
  Eigen::JacobiSVD<CMatrix> svd(a);
  const auto& sv = svd.singularValues();
  double prod = 1.0;
  for (int i = 0; i < p; ++i) {
    double s = sv(i);
    if (floor_rel > 0.0 && s < floor_rel * sv(0)) s = 0.0;
    prod *= s;
  }
  return prod;
}

double operator_norm(const CMatrix& a) {
  Eigen::JacobiSVD<CMatrix> svd(a);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

Ray random_ray(int dim, SplitMix64& rng) {
  CVector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = rng.complex_normal();
  return Ray(v);
}

CMatrix random_complex_matrix(int rows, int cols, SplitMix64& rng) {
  CMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.complex_normal();
  return m;
}

CMatrix random_unitary(int dim, SplitMix64& rng) {
  // QR of a Ginibre matrix with the phase convention that makes the
  // distribution Haar (diagonal of R rotated to positive reals).
  const CMatrix g = random_complex_matrix(dim, dim, rng);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    const Complex d = r(j, j);
    const double ad = std::abs(d);
    q.col(j) *= (ad > 0) ? d / ad : Complex(1, 0);
  }
  return q;
}

Subspace random_subspace(int ambient_dim, int dim, SplitMix64& rng) {
  if (dim < 1 || dim > ambient_dim)
    throw DimensionError("random_subspace: bad dimensions");
  return Subspace(random_unitary(ambient_dim, rng).leftCols(dim));
}

}  // namespace darktraj
