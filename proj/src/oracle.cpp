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

#include "metts/oracle.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>

#include "metts/errors.hpp"

namespace metts {

void FreeFermionSpec::validate() const {
  if (L < 1) throw DomainError("FreeFermionSpec: L must be positive");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("FreeFermionSpec: beta must be positive");
  if (!std::isfinite(J) || !std::isfinite(mu)) throw DomainError("FreeFermionSpec: couplings must be finite");
}

std::vector<double> spectrum(int L, double J) {
  if (L < 1) throw DomainError("spectrum: L must be positive");
  std::vector<double> e(L);
  for (int k = 1; k <= L; ++k) e[k - 1] = -2.0 * J * std::cos(k * std::numbers::pi / (L + 1));
  return e;
}

GrandCanonicalValues grand_canonical(const FreeFermionSpec& spec) {
  spec.validate();
  GrandCanonicalValues v;
  for (double eps : spectrum(spec.L, spec.J)) {
    const double x = spec.beta * (eps - spec.mu);
    // Written to avoid overflow for large |x|.
    const double f = x > 0 ? std::exp(-x) / (1.0 + std::exp(-x)) : 1.0 / (1.0 + std::exp(x));
    v.n_mean += f;
    v.energy += eps * f;
    v.kappa += f * (1.0 - f);
  }
  v.kappa *= spec.beta;
  return v;
}

std::vector<double> default_mu_grid() {
  std::vector<double> mus;
  for (int k = 0; k <= 8; ++k) mus.push_back(-2.6 + 0.2 * k);
  return mus;
}

void write_mu_sweep_csv(std::ostream& out, FreeFermionSpec spec, const std::vector<double>& mus) {
  out << "mu,nu,energy_per_site,kappa\n" << std::setprecision(17);
  for (double mu : mus) {
    spec.mu = mu;
    const GrandCanonicalValues v = grand_canonical(spec);
    out << mu << ',' << v.n_mean / spec.L << ',' << v.energy / spec.L << ',' << v.kappa << '\n';
  }
}

}  // namespace metts
