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

#ifndef METTS_ORACLE_HPP
#define METTS_ORACLE_HPP

#include <ostream>
#include <vector>

namespace metts {

/// Hardcore bosons on an open chain, mapped on free fermions.
struct FreeFermionSpec {
  int L = 1;
  double J = 1.0;
  double beta = 1.0;
  double mu = 0.0;

  void validate() const;
};

/// Open-chain single-particle energies -2J cos(k pi / (L+1)), k = 1..L.
std::vector<double> spectrum(int L, double J);

struct GrandCanonicalValues {
  double n_mean = 0.0;
  double energy = 0.0;  // <H>, without the -mu N term
  double kappa = 0.0;   // d<N>/dmu
};

GrandCanonicalValues grand_canonical(const FreeFermionSpec& spec);

/// Default chemical-potential grid -2.6, -2.4, ..., -1.0.
std::vector<double> default_mu_grid();

/// One CSV row per mu: mu, nu, energy_per_site, kappa.
void write_mu_sweep_csv(std::ostream& out, FreeFermionSpec spec, const std::vector<double>& mus);

}  // namespace metts

#endif  // METTS_ORACLE_HPP
