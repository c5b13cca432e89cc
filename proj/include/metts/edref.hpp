// Copyright 2026 The metts-trotter Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef METTS_EDREF_HPP
#define METTS_EDREF_HPP

#include <Eigen/Dense>
#include <map>
#include <ostream>
#include <vector>

#include "metts/errors.hpp"
#include "metts/model.hpp"

namespace metts {

/// Fixed-N occupation basis in lexicographic order.
struct FockBasis {
  int L = 0;
  int N = 0;
  int n_max = 0;
  std::vector<std::vector<int>> configs;
  std::map<std::vector<int>, int> index;

  int size() const { return static_cast<int>(configs.size()); }
  /// Position of `config`, or -1.
  int find(const std::vector<int>& config) const;
};

FockBasis enumerate_basis(int L, int N, int n_max);

/// H of the model in `basis`, including -mu N.
Eigen::MatrixXd dense_hamiltonian(const ModelSpec& spec, const FockBasis& basis);

/// Sum of bond terms embedded in `basis`. Terms must conserve particle number.
Eigen::MatrixXcd dense_from_bonds(const std::vector<BondTerm>& terms, const FockBasis& basis);

/// Tr(e^{-beta H} O) / Tr(e^{-beta H}).
double thermal_expectation(const Eigen::MatrixXd& H, const Eigen::MatrixXd& O, double beta);

/// exp(-s H) for Hermitian H and complex s.
Eigen::MatrixXcd hermitian_exp(const Eigen::MatrixXcd& H, std::complex<double> s);

struct TransitionMatrix {
  Eigen::MatrixXd p;
  double beta = 0.0;
  double tau = 0.0;
  int n = 1;
  double u_prime = 0.0;
};

/// METTS transition matrix over `basis`. For tau > 0 it is the two-step
/// matrix of a collapse in the rotated basis [U_T(tau/n)]^n |k> followed by
/// one in the occupation basis; u_prime is the on-site coupling of U_T.
TransitionMatrix transition_matrix(const ModelSpec& spec, const FockBasis& basis, double beta, double tau,
                                   int n, double u_prime);

struct SlmeResult {
  double lambda2_mag = 0.0;
  /// -1/log|lambda2|; +inf when |lambda2| is one.
  double bound = 0.0;
};

class SlmeConvergenceError : public NumericalError {
 public:
  SlmeConvergenceError(double previous, double last);
  double previous() const { return previous_; }
  double last() const { return last_; }

 private:
  double previous_, last_;
};

/// Second-largest eigenvalue magnitude of a row-stochastic matrix.
SlmeResult slme(const Eigen::MatrixXd& p);
inline SlmeResult slme(const TransitionMatrix& t) { return slme(t.p); }

/// max_j |sum_i Pi_i p_ij - Pi_j| with Pi_i = <i|e^{-beta H}|i> / Z.
double stationarity_check(const TransitionMatrix& t, const Eigen::MatrixXd& H, double beta);

struct SweepPoint {
  double tau = 0.0;
  int n = 1;
  double u_prime = 0.0;
  SlmeResult slme;
};

void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& points);

}  // namespace metts

#endif  // METTS_EDREF_HPP
