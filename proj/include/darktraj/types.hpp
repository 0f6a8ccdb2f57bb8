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

#ifndef DARKTRAJ_TYPES_HPP
#define DARKTRAJ_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace darktraj {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

// Numerical tolerances used across the library. Values are part of the
// documented contracts, do not tune per call site.
namespace tol {
inline constexpr double stochasticity = 1e-10;    // ensemble validation
inline constexpr double dark_certify = 1e-9;      // darkness certification
inline constexpr double atlas_dedup = 1e-6;       // gap dedup of subspaces
inline constexpr double ray_equal = 1e-9;         // Fubini-Study ray identity
inline constexpr double rank_rel = 1e-7;          // numerical rank (relative)
inline constexpr double peripheral = 1e-8;        // |lambda| >= 1 - peripheral
inline constexpr double group_dedup = 1e-6;       // closure element identity
inline constexpr double su_det = 1e-9;            // det-1 check for SU inputs
inline constexpr double smart_certify = 1e-8;     // smart family residual
inline constexpr double zero_weight = 1e-14;      // degenerate sampling guard
}  // namespace tol

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class RankError : public Error {
 public:
  using Error::Error;
};

class SizeError : public Error {
 public:
  using Error::Error;
};

// Stochasticity violation; carries the residual norm of sum p_i v_i^* v_i - Id.
class StochasticityError : public Error {
 public:
  StochasticityError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class DiscoveryError : public Error {
 public:
  using Error::Error;
};

class ReachabilityError : public Error {
 public:
  using Error::Error;
};

class MissingEntryError : public Error {
 public:
  using Error::Error;
};

class DarknessViolationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace darktraj

#endif  // DARKTRAJ_TYPES_HPP
