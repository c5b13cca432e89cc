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

#ifndef METTS_SAMPLER_HPP
#define METTS_SAMPLER_HPP

#include <cstdint>
#include <functional>
#include <string>

#include "metts/model.hpp"
#include "metts/mps.hpp"
#include "metts/propagator.hpp"
#include "metts/rng.hpp"

namespace metts {

enum class Ensemble { canonical, grand_canonical };
enum class Parity { even, odd };

std::string to_string(Parity p);
std::string to_string(Ensemble e);

struct ChainConfig {
  ModelSpec model;
  double beta = 1.0;
  double dtau = 0.0625;
  SweepSchedule schedule = SweepSchedule::second_order();
  /// Rotation time and repetition count of [U_T(tau/n)]^n; tau = 0 disables it.
  double tau = 0.0;
  int n = 1;
  Ensemble ensemble = Ensemble::canonical;
  long n_samples = 1;
  long burn_in = 32;
  std::uint64_t seed = 0;
  TruncationSpec trunc{1 << 20, 1e-10};
  /// Canonical: all L sites. Grand canonical: the L-2 inner physical sites.
  CpsConfig initial;
  /// Record <H - mu N> instead of <H>.
  bool energy_includes_mu = false;

  void validate() const;
};

/// Configuration carried between steps. With `rotated` set the represented
/// state is [U_T(tau/n)]^n |config>.
struct ChainState {
  CpsConfig config;
  bool rotated = false;
};

struct SampleRecord {
  long step = 0;
  Parity parity = Parity::even;
  double energy = 0.0;
  double n_total = 0.0;
  double n_total_sq = 0.0;
  int max_bond = 1;
  double discarded = 0.0;
  double wall_seconds = 0.0;

  friend bool operator==(const SampleRecord&, const SampleRecord&) = default;
};

/// Chain-invariant data: Hamiltonian gates and rotation gates compiled once.
class ChainContext {
 public:
  explicit ChainContext(ChainConfig config);

  const ChainConfig& config() const { return config_; }
  /// MPS site of the first physical site (1 with edge ancillas).
  int offset() const { return config_.ensemble == Ensemble::grand_canonical ? 1 : 0; }
  MatrixProductState build(const CpsConfig& config) const;

  const CompiledEvolution& imaginary() const { return imaginary_; }
  const CompiledEvolution& forward() const { return forward_; }
  const CompiledEvolution& adjoint() const { return adjoint_; }

 private:
  ChainConfig config_;
  CompiledEvolution imaginary_, forward_, adjoint_;
};

struct StepOutcome {
  ChainState next;
  SampleRecord record;
};

/// One METTS step. Even steps collapse onto the occupation basis, odd steps
/// onto the rotated basis [U_T(tau/n)]^n |k>.
StepOutcome metts_step_canonical(const ChainState& state, long step, const ChainContext& ctx, Rng& rng);

/// Hybrid step: the two edge sites stay purified with ancillas and are reset
/// after every collapse; only the inner physical sites are sampled.
StepOutcome metts_step_grand(const ChainState& state, long step, const ChainContext& ctx, Rng& rng);

/// Ancilla, phys_1 ... phys_L, ancilla with each edge pair in
/// sum_n |n>|n> / sqrt(d) and the inner sites in `inner`.
MatrixProductState hybrid_reset_and_build(const CpsConfig& inner, const ModelSpec& model);

/// Default starting configuration: unit-filled Mott state for the canonical
/// chain, empty inner sites for the grand-canonical one.
CpsConfig default_initial(const ModelSpec& model, Ensemble ensemble, int particles);

/// Runs burn_in + n_samples steps; records with step < burn_in are burn-in.
void run_chain(const ChainConfig& config, const std::function<void(const SampleRecord&)>& sink);

}  // namespace metts

#endif  // METTS_SAMPLER_HPP
