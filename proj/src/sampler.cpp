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

#include "metts/sampler.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>

#include "metts/errors.hpp"

namespace metts {

std::string to_string(Parity p) { return p == Parity::even ? "even" : "odd"; }
std::string to_string(Ensemble e) { return e == Ensemble::canonical ? "canonical" : "grand_canonical"; }

void ChainConfig::validate() const {
  model.validate();
  trunc.validate();
  schedule.validate();
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw DomainError("ChainConfig: beta must be non-negative");
  if (!(dtau > 0.0)) throw DomainError("ChainConfig: dtau must be positive");
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw DomainError("ChainConfig: tau must be non-negative");
  if (n < 1) throw DomainError("ChainConfig: n must be at least 1");
  if (n_samples < 1) throw DomainError("ChainConfig: n_samples must be positive");
  if (burn_in < 0) throw DomainError("ChainConfig: burn_in must be non-negative");
  const int expected = ensemble == Ensemble::canonical ? model.L : model.L - 2;
  if (initial.size() != expected)
    throw DomainError("ChainConfig: initial configuration must cover " + std::to_string(expected) + " sites");
  for (int occ : initial.occupations)
    if (occ < 0 || occ >= model.local_dim()) throw DomainError("ChainConfig: initial occupation out of range");
}

CpsConfig default_initial(const ModelSpec& model, Ensemble ensemble, int particles) {
  if (ensemble == Ensemble::grand_canonical) return {std::vector<int>(model.L - 2, 0)};
  if (particles < 0 || particles > model.L * (model.local_dim() - 1))
    throw DomainError("default_initial: particle number does not fit the chain");
  CpsConfig c{std::vector<int>(model.L, particles / model.L)};
  for (int m = 0; m < particles % model.L; ++m) ++c.occupations[m];
  return c;
}

MatrixProductState hybrid_reset_and_build(const CpsConfig& inner, const ModelSpec& model) {
  model.validate();
  const int L = model.L;
  const int d = model.local_dim();
  if (inner.size() != L - 2) throw StructuralError("hybrid_reset_and_build: inner configuration must cover L-2 sites");
  const LocalSpace phys = LocalSpace::boson(d);
  const LocalSpace anc = LocalSpace::ancilla(d);
  const double amp = 1.0 / std::sqrt(static_cast<double>(d));

  std::vector<LocalSpace> spaces{anc};
  for (int m = 0; m < L; ++m) spaces.push_back(phys);
  spaces.push_back(anc);

  auto single = [](int q, Direction dir) { return ChargeIndex({{q, 1}}, dir); };
  auto ladder = [d](int base, Direction dir) {
    std::vector<Sector> s;
    for (int k = 0; k < d; ++k) s.push_back({base + k, 1});
    return ChargeIndex(std::move(s), dir);
  };

  std::vector<SymTensor> sites;
  // Left pair: bond charges -(d-1) .. 0; ancilla state s pairs with n = d-1-s.
  SymTensor a0({single(0, Direction::in), anc.index(Direction::in), ladder(-(d - 1), Direction::out)}, 0);
  for (int s = 0; s < d; ++s) a0.block({0, s, s}).values()[0] = 1.0;
  sites.push_back(std::move(a0));
  SymTensor p1({ladder(-(d - 1), Direction::in), phys.index(Direction::in), single(0, Direction::out)}, 0);
  for (int n = 0; n < d; ++n) p1.block({d - 1 - n, n, 0}).values()[0] = amp;
  sites.push_back(std::move(p1));

  int cum = 0;
  for (int occ : inner.occupations) {
    if (occ < 0 || occ >= d) throw DomainError("hybrid_reset_and_build: occupation out of range");
    SymTensor t({single(cum, Direction::in), phys.index(Direction::in), single(cum + occ, Direction::out)}, 0);
    t.block({0, occ, 0}).values()[0] = 1.0;
    sites.push_back(std::move(t));
    cum += occ;
  }

  // Right pair: bond charges cum .. cum+d-1.
  SymTensor pl({single(cum, Direction::in), phys.index(Direction::in), ladder(cum, Direction::out)}, 0);
  for (int n = 0; n < d; ++n) pl.block({0, n, n}).values()[0] = 1.0;
  sites.push_back(std::move(pl));
  SymTensor a1({ladder(cum, Direction::in), anc.index(Direction::in), single(cum, Direction::out)}, 0);
  for (int n = 0; n < d; ++n) a1.block({n, d - 1 - n, 0}).values()[0] = amp;
  sites.push_back(std::move(a1));

  return MatrixProductState(std::move(sites), std::move(spaces), L + 1);
}

ChainContext::ChainContext(ChainConfig config) : config_(std::move(config)) {
  config_.validate();
  const MatrixProductState like = build(config_.initial);
  const int off = offset();
  const auto terms = hamiltonian_bonds(config_.model, true);
  imaginary_ = compile_imaginary(terms, 0.5 * config_.beta, config_.dtau, config_.schedule, like, off);
  forward_ = compile_symmetric_unitary(config_.model, config_.tau, config_.n, Sense::forward, like, off);
  adjoint_ = compile_symmetric_unitary(config_.model, config_.tau, config_.n, Sense::adjoint, like, off);
}

MatrixProductState ChainContext::build(const CpsConfig& config) const {
  if (config_.ensemble == Ensemble::grand_canonical) return hybrid_reset_and_build(config, config_.model);
  return from_cps(config, config_.model.local_dim());
}

namespace {

StepOutcome metts_step(const ChainState& state, long step, const ChainContext& ctx, Rng& rng) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  const ChainConfig& cfg = ctx.config();
  const bool grand = cfg.ensemble == Ensemble::grand_canonical;
  const int L = cfg.model.L;
  const int off = ctx.offset();

  StepOutcome out;
  SampleRecord& rec = out.record;
  rec.step = step;
  rec.parity = step % 2 == 0 ? Parity::even : Parity::odd;
  try {
    MatrixProductState psi = ctx.build(state.config);
    if (state.rotated) {
      auto r = run_compiled(std::move(psi), ctx.forward(), cfg.trunc, false);
      rec.discarded += r.total_discarded;
      psi = std::move(r.state);
    }
    auto evolved = run_compiled(std::move(psi), ctx.imaginary(), cfg.trunc, true);
    rec.discarded += evolved.total_discarded;
    MatrixProductState phi = std::move(evolved.state);
    normalize(phi);

    rec.energy = energy(phi, cfg.model, off, cfg.energy_includes_mu);
    const NumberMoments nm = number_total(phi, off, L);
    rec.n_total = nm.mean;
    rec.n_total_sq = nm.sq_mean;
    rec.max_bond = phi.max_bond();

    const bool rotate = step % 2 == 1 && !ctx.adjoint().empty();
    if (rotate) {
      auto r = run_compiled(std::move(phi), ctx.adjoint(), cfg.trunc, false);
      rec.discarded += r.total_discarded;
      phi = std::move(r.state);
      normalize(phi);
    }

    if (grand) {
      out.next.config.occupations.clear();
      if (L > 2) {
        CollapseResult c = collapse_to_cps(std::move(phi), rng, 2, L - 1);
        out.next.config = std::move(c.config);
      }
      if (std::abs(out.next.config.total() - state.config.total()) > 2)
        throw StructuralError("hybrid step changed the inner particle number by more than two");
    } else {
      const int charge = phi.global_charge();
      CollapseResult c = collapse_to_cps(std::move(phi), rng, 0, L - 1);
      if (c.config.total() != charge)
        throw StructuralError("collapse produced a configuration outside the particle-number sector");
      out.next.config = std::move(c.config);
    }
    out.next.rotated = rotate;
  } catch (const NumericalError& e) {
    throw NumericalError("METTS step " + std::to_string(step) + ": " + e.what());
  }
  rec.wall_seconds = std::chrono::duration<double>(clock::now() - start).count();
  return out;
}

}  // namespace

StepOutcome metts_step_canonical(const ChainState& state, long step, const ChainContext& ctx, Rng& rng) {
  if (ctx.config().ensemble != Ensemble::canonical) throw DomainError("metts_step_canonical: chain is grand canonical");
  return metts_step(state, step, ctx, rng);
}

StepOutcome metts_step_grand(const ChainState& state, long step, const ChainContext& ctx, Rng& rng) {
  if (ctx.config().ensemble != Ensemble::grand_canonical) throw DomainError("metts_step_grand: chain is canonical");
  return metts_step(state, step, ctx, rng);
}

void run_chain(const ChainConfig& config, const std::function<void(const SampleRecord&)>& sink) {
  const ChainContext ctx(config);
  Rng rng(config.seed);
  ChainState state{config.initial, false};
  const long total = config.burn_in + config.n_samples;
  for (long step = 0; step < total; ++step) {
    StepOutcome o = metts_step(state, step, ctx, rng);
    sink(o.record);
    state = std::move(o.next);
  }
}

}  // namespace metts
