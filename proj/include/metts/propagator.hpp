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

#ifndef METTS_PROPAGATOR_HPP
#define METTS_PROPAGATOR_HPP

#include <Eigen/Dense>
#include <vector>

#include "metts/model.hpp"
#include "metts/mps.hpp"

namespace metts {

/// Bond layers. `even` is the support of H_even (0-based bonds 1, 3, ...),
/// `odd` that of H_odd (0-based bonds 0, 2, ...).
enum class Layer { even, odd };

Layer layer_of_bond(int bond);

struct SweepStage {
  Layer layer;
  double coefficient;
};

/// Product-formula stage list for one time step.
struct SweepSchedule {
  std::vector<SweepStage> stages;

  /// exp(-dt/2 A_even) exp(-dt A_odd) exp(-dt/2 A_even).
  static SweepSchedule second_order();
  /// Fourth-order position-extended Forest-Ruth-like scheme of Omelyan,
  /// Mryglod and Folk (Comput. Phys. Commun. 146, 188 (2002)).
  static SweepSchedule forest_ruth();

  /// Coefficients of each layer must sum to one.
  void validate() const;
};

/// exp(-step * term) through the Hermitian eigendecomposition of term.
Eigen::MatrixXcd gate_from_term(const Eigen::MatrixXcd& term, cplx step);

struct Gate {
  int bond;  // MPS bond: acts on sites (bond, bond+1)
  SymTensor op;
};

/// Gates of one layer in ascending bond order; gates within a layer have
/// disjoint support.
struct GateLayer {
  std::vector<Gate> gates;
};

/// exp(-step * term) for every term of `terms`, placed at MPS bond
/// offset + term.site.
GateLayer make_layer(const std::vector<BondTerm>& terms, cplx step, const MatrixProductState& like,
                     int offset);

/// Applies `gate` (a matrix on the bond's two local spaces) to bond
/// (bond, bond+1) and re-splits with truncation. Returns the discarded weight
/// relative to the squared norm of the updated two-site tensor.
double apply_gate(MatrixProductState& psi, const Eigen::MatrixXcd& gate, int bond,
                  const TruncationSpec& spec);

/// Applies one layer; returns the summed relative discarded weight.
/// With `normalize` every two-site update is rescaled to unit norm.
double apply_layer(MatrixProductState& psi, const GateLayer& layer, const TruncationSpec& spec,
                   bool normalize);

/// Distinct gate layers plus the order in which to apply them.
struct CompiledEvolution {
  std::vector<GateLayer> layers;
  std::vector<int> order;

  bool empty() const { return order.empty(); }
};

/// Imaginary-time sweep over round(beta_half / dtau) steps. Consecutive
/// stages on the same layer are merged into one exponential.
CompiledEvolution compile_imaginary(const std::vector<BondTerm>& terms, double beta_half, double dtau,
                                    const SweepSchedule& schedule, const MatrixProductState& like,
                                    int offset = 0);

enum class Sense { forward, adjoint };

/// [U_T(tau/n)]^n or its adjoint; empty when tau == 0.
CompiledEvolution compile_symmetric_unitary(const ModelSpec& model, double tau, int n, Sense sense,
                                            const MatrixProductState& like, int offset = 0);

struct EvolutionResult {
  MatrixProductState state;
  double total_discarded = 0.0;
  /// Layers whose discarded weight exceeded 1e3 * cutoff.
  int truncation_warnings = 0;
};

EvolutionResult run_compiled(MatrixProductState psi, const CompiledEvolution& evolution,
                             const TruncationSpec& spec, bool normalize);

/// Normalized e^{-beta_half H} psi by TEBD with the given schedule. The
/// terms are placed at MPS bonds offset + term.site.
EvolutionResult evolve_imaginary(MatrixProductState psi, const std::vector<BondTerm>& terms,
                                 double beta_half, double dtau, const SweepSchedule& schedule,
                                 const TruncationSpec& spec, int offset = 0);

/// [U_T(tau/n)]^n psi with U_T(s) = exp(-is H_even) exp(-is H_odd), or the
/// adjoint, which runs the layers in reverse with conjugated gates.
EvolutionResult apply_symmetric_unitary(MatrixProductState psi, double tau, int n, const ModelSpec& model,
                                        const TruncationSpec& spec, Sense sense,
                                        int offset = 0);

}  // namespace metts

#endif  // METTS_PROPAGATOR_HPP
