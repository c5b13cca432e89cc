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

#include "metts/propagator.hpp"

#include <cmath>
#include <map>
#include <string>

#include "metts/errors.hpp"

namespace metts {

Layer layer_of_bond(int bond) { return bond % 2 == 1 ? Layer::even : Layer::odd; }

SweepSchedule SweepSchedule::second_order() {
  return {{{Layer::even, 0.5}, {Layer::odd, 1.0}, {Layer::even, 0.5}}};
}

SweepSchedule SweepSchedule::forest_ruth() {
  constexpr double xi = 0.1786178958448091;
  constexpr double lambda = -0.2123418310626054;
  constexpr double chi = -0.06626458266981849;
  return {{{Layer::even, xi},
           {Layer::odd, 0.5 * (1.0 - 2.0 * lambda)},
           {Layer::even, chi},
           {Layer::odd, lambda},
           {Layer::even, 1.0 - 2.0 * (chi + xi)},
           {Layer::odd, lambda},
           {Layer::even, chi},
           {Layer::odd, 0.5 * (1.0 - 2.0 * lambda)},
           {Layer::even, xi}}};
}

void SweepSchedule::validate() const {
  double even = 0.0, odd = 0.0;
  for (const auto& st : stages) (st.layer == Layer::even ? even : odd) += st.coefficient;
  if (std::abs(even - 1.0) > 1e-12 || std::abs(odd - 1.0) > 1e-12)
    throw DomainError("SweepSchedule: coefficients of each layer must sum to 1");
}

Eigen::MatrixXcd gate_from_term(const Eigen::MatrixXcd& term, cplx step) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(term);
  if (es.info() != Eigen::Success) throw NumericalError("gate_from_term: eigensolver failed");
  const Eigen::VectorXcd f = (-step * es.eigenvalues().cast<cplx>()).array().exp();
  return es.eigenvectors() * f.asDiagonal() * es.eigenvectors().adjoint();
}

GateLayer make_layer(const std::vector<BondTerm>& terms, cplx step, const MatrixProductState& like, int offset) {
  GateLayer layer;
  for (const auto& t : terms) {
    const int b = offset + t.site;
    if (b < 0 || b + 1 >= like.length()) throw StructuralError("make_layer: bond outside the chain");
    layer.gates.push_back({b, bond_operator(gate_from_term(t.matrix, step), like.space(b), like.space(b + 1))});
  }
  std::sort(layer.gates.begin(), layer.gates.end(), [](const Gate& a, const Gate& b) { return a.bond < b.bond; });
  return layer;
}

namespace {

void bring_center(MatrixProductState& psi, int bond) {
  if (!psi.center()) {
    psi = canonicalize(std::move(psi), bond);
    return;
  }
  while (*psi.center() < bond) psi.move_center_right();
  while (*psi.center() > bond + 1) psi.move_center_left();
}

double apply_op(MatrixProductState& psi, const SymTensor& op, int bond, const TruncationSpec& spec,
                bool normalize) {
  bring_center(psi, bond);
  const SymTensor theta = apply_bond_operator(op, psi.two_site(bond));
  const SvdResult svd = psi.split_two_site(theta, bond, spec, normalize);
  return svd.discarded_weight / svd.norm_sq;
}

}  // namespace

double apply_gate(MatrixProductState& psi, const Eigen::MatrixXcd& gate, int bond, const TruncationSpec& spec) {
  if (bond < 0 || bond + 1 >= psi.length()) throw StructuralError("apply_gate: bond outside the chain");
  return apply_op(psi, bond_operator(gate, psi.space(bond), psi.space(bond + 1)), bond, spec, false);
}

double apply_layer(MatrixProductState& psi, const GateLayer& layer, const TruncationSpec& spec, bool normalize) {
  double d = 0.0;
  for (const auto& g : layer.gates) d += apply_op(psi, g.op, g.bond, spec, normalize);
  return d;
}

CompiledEvolution compile_imaginary(const std::vector<BondTerm>& terms, double beta_half, double dtau,
                                    const SweepSchedule& schedule, const MatrixProductState& like, int offset) {
  if (!(beta_half >= 0.0)) throw DomainError("evolve_imaginary: beta_half must be non-negative");
  if (!(dtau > 0.0)) throw DomainError("evolve_imaginary: dtau must be positive");
  schedule.validate();
  const double ratio = beta_half / dtau;
  const long steps = std::lround(ratio);
  if (std::abs(steps * dtau - beta_half) > 1e-12 * std::max(1.0, beta_half))
    throw DomainError("evolve_imaginary: dtau does not divide beta_half");

  std::vector<BondTerm> even, odd;
  for (const auto& t : terms) (layer_of_bond(t.site) == Layer::even ? even : odd).push_back(t);

  std::vector<SweepStage> merged;
  for (long k = 0; k < steps; ++k)
    for (const auto& st : schedule.stages) {
      if (!merged.empty() && merged.back().layer == st.layer)
        merged.back().coefficient += st.coefficient;
      else
        merged.push_back(st);
    }

  CompiledEvolution out;
  std::map<std::pair<int, double>, int> seen;
  for (const auto& st : merged) {
    const auto& group = st.layer == Layer::even ? even : odd;
    if (group.empty()) continue;
    const auto key = std::make_pair(static_cast<int>(st.layer), st.coefficient);
    auto it = seen.find(key);
    if (it == seen.end()) {
      it = seen.emplace(key, static_cast<int>(out.layers.size())).first;
      out.layers.push_back(make_layer(group, st.coefficient * dtau, like, offset));
    }
    out.order.push_back(it->second);
  }
  return out;
}

CompiledEvolution compile_symmetric_unitary(const ModelSpec& model, double tau, int n, Sense sense,
                                            const MatrixProductState& like, int offset) {
  if (!(tau >= 0.0)) throw DomainError("apply_symmetric_unitary: tau must be non-negative");
  if (n < 1) throw DomainError("apply_symmetric_unitary: n must be positive");
  CompiledEvolution out;
  if (tau == 0.0) return out;
  const auto h = trotter_hamiltonians(model);
  const double s = tau / n;
  const cplx step = sense == Sense::forward ? cplx(0.0, s) : cplx(0.0, -s);
  out.layers.push_back(make_layer(h.even, step, like, offset));
  out.layers.push_back(make_layer(h.odd, step, like, offset));
  for (int k = 0; k < n; ++k) {
    // exp(-is H_even) exp(-is H_odd) acts on a ket odd layer first.
    if (sense == Sense::forward) {
      out.order.push_back(1);
      out.order.push_back(0);
    } else {
      out.order.push_back(0);
      out.order.push_back(1);
    }
  }
  return out;
}

EvolutionResult run_compiled(MatrixProductState psi, const CompiledEvolution& evolution,
                             const TruncationSpec& spec, bool normalize) {
  EvolutionResult res{std::move(psi), 0.0, 0};
  for (int idx : evolution.order) {
    const double d = apply_layer(res.state, evolution.layers[idx], spec, normalize);
    if (d > 1e3 * spec.cutoff && d > 1e-14) ++res.truncation_warnings;
    res.total_discarded += d;
  }
  return res;
}

EvolutionResult evolve_imaginary(MatrixProductState psi, const std::vector<BondTerm>& terms, double beta_half,
                                 double dtau, const SweepSchedule& schedule, const TruncationSpec& spec,
                                 int offset) {
  const auto compiled = compile_imaginary(terms, beta_half, dtau, schedule, psi, offset);
  return run_compiled(std::move(psi), compiled, spec, true);
}

EvolutionResult apply_symmetric_unitary(MatrixProductState psi, double tau, int n, const ModelSpec& model,
                                        const TruncationSpec& spec, Sense sense, int offset) {
  const auto compiled = compile_symmetric_unitary(model, tau, n, sense, psi, offset);
  return run_compiled(std::move(psi), compiled, spec, false);
}

}  // namespace metts
