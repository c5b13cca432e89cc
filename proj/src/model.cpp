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

#include "metts/model.hpp"

#include <cmath>
#include <optional>
#include <unsupported/Eigen/KroneckerProduct>

#include "metts/errors.hpp"

namespace metts {

void ModelSpec::validate() const {
  if (L < 2 || L % 2 != 0) throw DomainError("ModelSpec: L must be a positive even number");
  if (n_max < 1) throw DomainError("ModelSpec: n_max must be at least 1");
  if (hardcore && n_max != 1) throw DomainError("ModelSpec: hardcore bosons require n_max = 1");
  if (!std::isfinite(J) || !std::isfinite(U) || !std::isfinite(mu) || !std::isfinite(u_prime))
    throw DomainError("ModelSpec: couplings must be finite");
}

Eigen::MatrixXd annihilation_operator(int d) {
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(d, d);
  for (int n = 1; n < d; ++n) b(n - 1, n) = std::sqrt(static_cast<double>(n));
  return b;
}

Eigen::MatrixXd number_operator(int d) {
  Eigen::MatrixXd n = Eigen::MatrixXd::Zero(d, d);
  for (int k = 0; k < d; ++k) n(k, k) = k;
  return n;
}

namespace {

Eigen::MatrixXd pair_interaction(int d) {
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(d, d);
  for (int k = 0; k < d; ++k) v(k, k) = k * (k - 1.0);
  return v;
}

Eigen::MatrixXd hopping(int d, double J) {
  const Eigen::MatrixXd b = annihilation_operator(d);
  const Eigen::MatrixXd bd = b.transpose();
  return -J * (Eigen::MatrixXd(Eigen::kroneckerProduct(bd, b)) + Eigen::MatrixXd(Eigen::kroneckerProduct(b, bd)));
}

Eigen::MatrixXcd with_onsite(const Eigen::MatrixXd& hop, const Eigen::MatrixXd& left,
                             const Eigen::MatrixXd& right) {
  const int d = static_cast<int>(left.rows());
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);
  Eigen::MatrixXd m = hop + Eigen::MatrixXd(Eigen::kroneckerProduct(left, id)) +
                      Eigen::MatrixXd(Eigen::kroneckerProduct(id, right));
  return m.cast<cplx>();
}

}  // namespace

std::vector<BondTerm> hamiltonian_bonds(const ModelSpec& spec, bool include_mu) {
  spec.validate();
  const int d = spec.local_dim();
  Eigen::MatrixXd onsite = Eigen::MatrixXd::Zero(d, d);
  if (!spec.hardcore) onsite += 0.5 * spec.U * pair_interaction(d);
  if (include_mu) onsite -= spec.mu * number_operator(d);
  const Eigen::MatrixXd hop = hopping(d, spec.J);

  std::vector<BondTerm> terms;
  for (int m = 0; m + 1 < spec.L; ++m) {
    const double wl = m == 0 ? 1.0 : 0.5;
    const double wr = m + 1 == spec.L - 1 ? 1.0 : 0.5;
    terms.push_back({m, with_onsite(hop, wl * onsite, wr * onsite)});
  }
  return terms;
}

TrotterHamiltonians trotter_hamiltonians(const ModelSpec& spec) {
  spec.validate();
  const int d = spec.local_dim();
  const Eigen::MatrixXd quarter = spec.hardcore ? Eigen::MatrixXd::Zero(d, d).eval()
                                                : (0.25 * spec.u_prime * pair_interaction(d)).eval();
  const Eigen::MatrixXd hop = hopping(d, spec.J);
  TrotterHamiltonians h;
  for (int m = 0; m + 1 < spec.L; ++m) {
    if (m % 2 == 1) {
      h.even.push_back({m, with_onsite(hop, quarter, quarter)});
    } else {
      const double wl = m == 0 ? 2.0 : 1.0;
      const double wr = m + 1 == spec.L - 1 ? 2.0 : 1.0;
      h.odd.push_back({m, with_onsite(hop, wl * quarter, wr * quarter)});
    }
  }
  return h;
}

NumberMoments number_total(const MatrixProductState& psi, int first, int count) {
  const int n = psi.length();
  if (count < 0) count = n - first;
  if (first < 0 || first + count > n) throw StructuralError("number_total: site range out of bounds");

  SymTensor e0 = left_boundary(psi, psi);
  std::optional<SymTensor> e1, e2;
  for (int m = 0; m < n; ++m) {
    const SymTensor& a = psi.site(m);
    if (m < first || m >= first + count) {
      e0 = transfer_right(e0, a, a);
      if (e1) e1 = transfer_right(*e1, a, a);
      if (e2) e2 = transfer_right(*e2, a, a);
      continue;
    }
    std::vector<double> occ(psi.space(m).charges.begin(), psi.space(m).charges.end());
    std::vector<double> occ2(occ.size());
    for (std::size_t s = 0; s < occ.size(); ++s) occ2[s] = occ[s] * occ[s];
    const SymTensor na = apply_diagonal(a, occ);

    SymTensor n2 = transfer_right(e0, a, apply_diagonal(a, occ2));
    if (e1) n2 = add(n2, transfer_right(*e1, a, na), 2.0);
    if (e2) n2 = add(n2, transfer_right(*e2, a, a));
    SymTensor n1 = transfer_right(e0, a, na);
    if (e1) n1 = add(n1, transfer_right(*e1, a, a));
    e0 = transfer_right(e0, a, a);
    e1 = std::move(n1);
    e2 = std::move(n2);
  }
  const SymTensor r = right_boundary(psi, psi);
  const double nrm = close_environments(e0, r).real();
  if (!(nrm > 0.0)) throw NumericalError("number_total: state has zero norm");
  NumberMoments out;
  if (e1) out.mean = close_environments(*e1, r).real() / nrm;
  if (e2) out.sq_mean = close_environments(*e2, r).real() / nrm;
  return out;
}

double energy(const MatrixProductState& psi, const ModelSpec& spec, int offset, bool include_mu) {
  const auto terms = hamiltonian_bonds(spec, include_mu);
  if (offset < 0 || offset + spec.L > psi.length()) throw StructuralError("energy: chain does not fit state");
  MatrixProductState c = canonicalize(psi, offset);
  double e = 0.0;
  for (const auto& term : terms) {
    const int m = offset + term.site;
    const SymTensor theta = c.two_site(m);
    const SymTensor op = bond_operator(term.matrix, c.space(m), c.space(m + 1));
    const cplx v = inner_product(theta, apply_bond_operator(op, theta)) / theta.norm_sq();
    if (std::abs(v.imag()) > 1e-10 * std::max(1.0, std::abs(v.real())))
      throw NumericalError("energy: bond expectation has an imaginary part");
    e += v.real();
    if (term.site + 2 < spec.L) c.move_center_right();
  }
  return e;
}

}  // namespace metts
