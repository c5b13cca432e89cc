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

#ifndef METTS_MODEL_HPP
#define METTS_MODEL_HPP

#include <Eigen/Dense>
#include <vector>

#include "metts/mps.hpp"

namespace metts {

/// Open Bose-Hubbard chain. Energies in units of J, which is 1 by default.
struct ModelSpec {
  int L = 2;
  double J = 1.0;
  double U = 0.0;
  double mu = 0.0;
  int n_max = 1;
  bool hardcore = false;
  /// On-site coupling used in the Trotter rotation Hamiltonians.
  double u_prime = 0.0;

  int local_dim() const { return hardcore ? 2 : n_max + 1; }
  void validate() const;
};

/// Hermitian operator on sites (site, site+1); index s1*d + s2.
struct BondTerm {
  int site = 0;
  Eigen::MatrixXcd matrix;
};

Eigen::MatrixXd annihilation_operator(int d);
Eigen::MatrixXd number_operator(int d);

/// Bond decomposition of H = -J sum (b+_m b_m+1 + h.c.) + U/2 sum n(n-1)
/// [- mu sum n]. Interior on-site terms are split evenly between the two
/// adjacent bonds; the edge sites put their full share on their only bond.
std::vector<BondTerm> hamiltonian_bonds(const ModelSpec& spec, bool include_mu = true);

/// Rotation Hamiltonians for U_T(s) = exp(-is H_even) exp(-is H_odd).
/// `even` holds the bonds whose left site has even 1-based label
/// (0-based bonds 1, 3, ...), `odd` the bonds 0, 2, .... The on-site
/// coupling is u_prime; with u_prime == U the two sum to H at mu = 0.
struct TrotterHamiltonians {
  std::vector<BondTerm> even;
  std::vector<BondTerm> odd;
};
TrotterHamiltonians trotter_hamiltonians(const ModelSpec& spec);

struct NumberMoments {
  double mean = 0.0;     // <N>
  double sq_mean = 0.0;  // <N^2>
};

/// Moments of the particle number summed over sites first..first+count-1.
NumberMoments number_total(const MatrixProductState& psi, int first = 0, int count = -1);

/// <H> of a state whose physical chain starts at MPS site `offset`.
/// The chemical-potential term is excluded unless requested.
double energy(const MatrixProductState& psi, const ModelSpec& spec, int offset = 0,
              bool include_mu = false);

}  // namespace metts

#endif  // METTS_MODEL_HPP
