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

// Acceptance gate: one PASS/FAIL line per criterion. With arguments only the
// listed criteria run.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>
#include <string>

#include "metts/edref.hpp"
#include "metts/errors.hpp"
#include "metts/oracle.hpp"
#include "metts/propagator.hpp"
#include "metts/sampler.hpp"
#include "metts/stats.hpp"
#include "test_support.hpp"

using namespace metts;

namespace {

constexpr double kEdEnergy = -0.9373;

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [failed]");
  }
};

std::string fmt(double x, int prec = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", prec, x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ModelSpec table_one_model(double U) {
  ModelSpec s;
  s.L = 6;
  s.U = U;
  s.n_max = 6;
  s.u_prime = U;
  return s;
}

double mean_of(const std::vector<double>& x) {
  double m = 0.0;
  for (double v : x) m += v;
  return m / x.size();
}

void ed_energy(Verdict& v) {
  const auto t0 = std::chrono::steady_clock::now();
  const ModelSpec s = table_one_model(1.0);
  const FockBasis b = enumerate_basis(6, 6, 6);
  const Eigen::MatrixXd H = dense_hamiltonian(s, b);
  const double e = thermal_expectation(H, H, 0.25);
  const double t = seconds_since(t0);
  v.require(std::abs(e - kEdEnergy) <= 5e-4, "<H>/J = " + fmt(e) + " vs -0.9373 +- 5e-4");
  v.require(t < 10.0, "runtime " + fmt(t, 3) + " s < 10 s");
}

void basis_count(Verdict& v) {
  const int n = enumerate_basis(6, 6, 6).size();
  v.require(n == 462, "basis size " + std::to_string(n) + " == 462");
}

void slme_weak_coupling(Verdict& v) {
  const auto t0 = std::chrono::steady_clock::now();
  const ModelSpec s = table_one_model(1.0);
  const FockBasis b = enumerate_basis(6, 6, 6);
  const double beta = 0.25;
  const double b0 = slme(transition_matrix(s, b, beta, 0.0, 1, 1.0)).bound;
  v.require(b0 >= 50.0 && b0 <= 200.0, "tau=0 bound " + fmt(b0) + " in [50, 200]");

  std::vector<double> with_u, without_u, taus;
  for (int k = 1; k <= 20; ++k) {
    const double tau = 0.2 * k;
    taus.push_back(tau);
    with_u.push_back(slme(transition_matrix(s, b, beta, tau, 2, 1.0)).bound);
    without_u.push_back(slme(transition_matrix(s, b, beta, tau, 2, 0.0)).bound);
  }
  const double at_one = with_u[4];
  v.require(at_one <= 3.0, "tau=1 n=2 U'=U bound " + fmt(at_one) + " <= 3");
  bool decreasing = b0 > with_u[0];
  for (int k = 1; k < 5; ++k) decreasing = decreasing && with_u[k] < with_u[k - 1];
  v.require(decreasing, "U'=U bound decreasing up to tau=1");

  // Revival: a local maximum at least 20% above the preceding local minimum.
  double best_ratio = 0.0, at_min = 0.0, at_max = 0.0, tau_max = 0.0;
  double last_min = -1.0;
  for (int k = 1; k + 1 < 20; ++k) {
    const double x = without_u[k];
    if (x < without_u[k - 1] && x <= without_u[k + 1]) last_min = x;
    if (x > without_u[k - 1] && x >= without_u[k + 1] && last_min > 0.0 && x / last_min > best_ratio) {
      best_ratio = x / last_min;
      at_min = last_min;
      at_max = x;
      tau_max = taus[k];
    }
  }
  v.require(best_ratio >= 1.2, "U'=0 revival: max " + fmt(at_max) + " at tau=" + fmt(tau_max, 3) +
                                   " vs preceding min " + fmt(at_min) + " (ratio " + fmt(best_ratio, 4) + " >= 1.2)");
  const double t = seconds_since(t0);
  v.require(t < 600.0, "runtime " + fmt(t, 3) + " s < 600 s");
}

void slme_strong_coupling(Verdict& v) {
  const auto t0 = std::chrono::steady_clock::now();
  const ModelSpec s = table_one_model(20.0);
  const FockBasis b = enumerate_basis(6, 6, 6);
  const double zero = slme(transition_matrix(s, b, 0.25, 1.0, 2, 0.0)).bound;
  const double full = slme(transition_matrix(s, b, 0.25, 1.0, 2, 20.0)).bound;
  v.require(zero < full, "U/J=20 tau=1 n=2: bound(U'=0) " + fmt(zero) + " < bound(U'=U) " + fmt(full));
  const double t = seconds_since(t0);
  v.require(t < 600.0, "runtime " + fmt(t, 3) + " s < 600 s");
}

void stationarity(Verdict& v) {
  const ModelSpec s = table_one_model(1.0);
  const FockBasis b = enumerate_basis(6, 6, 6);
  const Eigen::MatrixXd H = dense_hamiltonian(s, b);
  const double r0 = stationarity_check(transition_matrix(s, b, 0.25, 0.0, 1, 1.0), H, 0.25);
  const double r1 = stationarity_check(transition_matrix(s, b, 0.25, 1.0, 2, 1.0), H, 0.25);
  v.require(r0 < 1e-9, "tau=0 residual " + fmt(r0, 3) + " < 1e-9");
  v.require(r1 < 1e-9, "tau=1 n=2 U'=U residual " + fmt(r1, 3) + " < 1e-9");
}

void free_fermions(Verdict& v) {
  const FreeFermionSpec spec{50, 1.0, 5.0, -2.0};
  const GrandCanonicalValues g = grand_canonical(spec);
  v.require(std::abs(g.kappa - 11.866) <= 1e-3, "kappa*J = " + fmt(g.kappa, 8) + " vs 11.866 +- 1e-3");
  const double h = 1e-4;
  FreeFermionSpec up = spec, down = spec;
  up.mu += h;
  down.mu -= h;
  const double fd = (grand_canonical(up).n_mean - grand_canonical(down).n_mean) / (2 * h);
  const double rel = std::abs(fd - g.kappa) / g.kappa;
  v.require(rel < 1e-6, "finite difference relative deviation " + fmt(rel, 3) + " < 1e-6");
}

struct ChainSummary {
  double mean = 0.0;
  double sigma_b = 0.0;
  double R = 0.0;
  bool lower_bound = false;
  double seconds = 0.0;
};

ChainSummary canonical_chain(double tau, std::uint64_t seed) {
  ChainConfig c;
  c.model = table_one_model(1.0);
  c.beta = 0.25;
  c.dtau = 0.03125;
  c.tau = tau;
  c.n = 2;
  c.n_samples = 1 << 14;
  c.burn_in = 64;
  c.seed = seed;
  c.trunc = {1 << 20, 1e-10};
  c.initial = default_initial(c.model, Ensemble::canonical, 6);
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> e;
  run_chain(c, [&](const SampleRecord& r) {
    if (r.step >= c.burn_in) e.push_back(r.energy);
  });
  const RCurve rc = r_curve(e);
  return {mean_of(e), rc.saturated().sigma_b, rc.saturated_R, rc.lower_bound, seconds_since(t0)};
}

void canonical_metts(Verdict& v) {
  const ChainSummary g = canonical_chain(1.0, 1);
  const ChainSummary ng = canonical_chain(0.0, 1);
  v.require(std::abs(g.mean - kEdEnergy) <= 3.0 * g.sigma_b,
            "gates: <H>/J = " + fmt(g.mean) + " +- " + fmt(g.sigma_b, 3) + " within 3 sigma of -0.9373");
  v.require(g.R <= 4.0, "gates: R = " + fmt(g.R, 4) + (g.lower_bound ? " (lower bound)" : "") + " <= 4");
  v.require(ng.R >= 15.0, "no gates: R = " + fmt(ng.R, 4) + (ng.lower_bound ? " (lower bound)" : "") + " >= 15");
  v.require(g.R < ng.R, "R(gates) < R(no gates)");
  v.detail << "; no-gates <H>/J = " << fmt(ng.mean) << " +- " << fmt(ng.sigma_b, 3);
  const double t = g.seconds + ng.seconds;
  v.require(t < 3600.0, "runtime " + fmt(t, 4) + " s");
}

struct GrandSummary {
  JackknifeResult kappa;
  double R = 0.0;
  bool lower_bound = false;
  int max_jump = 0;
  double seconds = 0.0;
};

GrandSummary grand_chain(double tau, long samples, std::uint64_t seed) {
  ChainConfig c;
  c.model.L = 20;
  c.model.hardcore = true;
  c.model.mu = -2.0;
  c.beta = 5.0;
  c.dtau = 0.025;
  c.tau = tau;
  c.n = 2;
  c.ensemble = Ensemble::grand_canonical;
  c.burn_in = 64;
  c.n_samples = samples;
  c.seed = seed;
  c.trunc = {1 << 20, 1e-10};
  c.initial = default_initial(c.model, Ensemble::grand_canonical, 0);
  const auto t0 = std::chrono::steady_clock::now();
  const ChainContext ctx(c);
  Rng rng(c.seed);
  ChainState st{c.initial, false};
  std::vector<double> n, n2;
  GrandSummary out;
  for (long step = 0; step < c.burn_in + c.n_samples; ++step) {
    const StepOutcome o = metts_step_grand(st, step, ctx, rng);
    out.max_jump = std::max(out.max_jump, std::abs(o.next.config.total() - st.config.total()));
    if (step >= c.burn_in) {
      n.push_back(o.record.n_total);
      n2.push_back(o.record.n_total_sq);
    }
    st = o.next;
  }
  const RCurve rc = r_curve(n);
  out.R = rc.saturated_R;
  out.lower_bound = rc.lower_bound;
  out.kappa = jackknife_kappa(n, n2, c.beta, rc.saturated().block_size);
  out.seconds = seconds_since(t0);
  return out;
}

void grand_metts(Verdict& v) {
  const double exact = grand_canonical({20, 1.0, 5.0, -2.0}).kappa;
  const GrandSummary g = grand_chain(3.6, 1 << 12, 1);
  const GrandSummary ng = grand_chain(0.0, 1 << 11, 1);
  v.require(std::abs(g.kappa.mean - exact) <= 2.0 * g.kappa.sigma,
            "kappa*J = " + fmt(g.kappa.mean) + " +- " + fmt(g.kappa.sigma, 3) + " within 2 sigma of " + fmt(exact));
  v.require(g.max_jump <= 2 && ng.max_jump <= 2,
            "max per-step change of inner N " + std::to_string(std::max(g.max_jump, ng.max_jump)) + " <= 2");
  v.require(g.R < ng.R, "R(gates) = " + fmt(g.R, 4) + (g.lower_bound ? " (lower bound)" : "") + " < R(no gates) = " +
                            fmt(ng.R, 4) + (ng.lower_bound ? " (lower bound)" : ""));
  v.detail << "; no-gates kappa*J = " << fmt(ng.kappa.mean) << " +- " << fmt(ng.kappa.sigma, 3);
  v.require(true, "runtime " + fmt(g.seconds + ng.seconds, 4) + " s");
}

void property_suites(Verdict& v) {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 g(2024);

  // Charge conservation and SVD reconstruction on random tensors.
  bool charges = true, svd_ok = true;
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<ChargeIndex> idx{testing::random_index(g, Direction::in, 3, 4), testing::random_index(g, Direction::in),
                                 testing::random_index(g, Direction::out, 3, 4)};
    const SymTensor t = testing::random_tensor(idx, trial % 3 - 1, g);
    if (t.norm() == 0.0) continue;
    const SvdResult s = svd_truncate(t, {0, 1}, {1 + trial % 3, trial % 2 ? 0.05 : 0.0});
    try {
      s.u.check_invariants();
      s.v.check_invariants();
      contract(conj(t), t, {{0, 0}}).check_invariants();
    } catch (const StructuralError&) {
      charges = false;
    }
    const SymTensor us = scale_along(s.u, 2, s.values);
    const DenseArray rec = to_dense(contract(us, s.v, {{2, 0}}));
    const DenseArray ref = to_dense(t);
    double err = 0.0;
    for (std::size_t k = 0; k < ref.size(); ++k) err += std::norm(rec.values()[k] - ref.values()[k]);
    svd_ok = svd_ok && err <= s.discarded_weight + 1e-12;
  }
  v.require(charges, "charge conservation");
  v.require(svd_ok, "SVD reconstruction bound");

  // Collapse distribution against dense amplitudes, L = 4.
  {
    MatrixProductState psi = testing::random_mps(4, 3, 4, g);
    normalize(psi);
    const Eigen::VectorXcd amp = testing::mps_to_vector(psi);
    Rng rng(5);
    const int draws = 20000;
    std::map<int, int> counts;
    for (int k = 0; k < draws; ++k) ++counts[testing::config_index(collapse_to_cps(psi, rng).config.occupations, 3)];
    double chi2 = 0.0;
    int bins = 0;
    for (int i = 0; i < amp.size(); ++i) {
      const double e = draws * std::norm(amp(i));
      if (e < 1e-9) continue;
      const double o = counts.contains(i) ? counts[i] : 0;
      chi2 += (o - e) * (o - e) / e;
      ++bins;
    }
    const double dof = bins - 1;
    v.require(chi2 < dof + 5.0 * std::sqrt(2.0 * dof),
              "collapse chi-square " + fmt(chi2, 4) + " over " + std::to_string(bins - 1) + " dof");
  }

  // Unitarity of the rotation and its adjoint.
  {
    ModelSpec s;
    s.L = 4;
    s.U = 1.0;
    s.n_max = 2;
    s.u_prime = 1.0;
    MatrixProductState psi = testing::random_mps(4, 3, 4, g);
    normalize(psi);
    const EvolutionResult f = apply_symmetric_unitary(psi, 1.0, 2, s, TruncationSpec::exact(), Sense::forward);
    const EvolutionResult b = apply_symmetric_unitary(f.state, 1.0, 2, s, TruncationSpec::exact(), Sense::adjoint);
    const double dn = std::abs(norm(f.state) - 1.0);
    const double back = (testing::mps_to_vector(b.state) - testing::mps_to_vector(psi)).norm();
    v.require(dn < 1e-12 && back < 1e-10, "rotation unitarity (norm drift " + fmt(dn, 2) + ", round trip " +
                                              fmt(back, 2) + ")");
  }

  // Second-order Trotter error scaling.
  {
    ModelSpec s;
    s.L = 4;
    s.U = 1.5;
    s.n_max = 2;
    MatrixProductState psi = testing::random_mps(4, 3, 4, g);
    normalize(psi);
    const Eigen::VectorXcd exact = [&] {
      Eigen::VectorXcd x = testing::dense_exp(testing::full_hamiltonian(s), 0.5) * testing::mps_to_vector(psi);
      return Eigen::VectorXcd(x / x.norm());
    }();
    auto err = [&](double dt) {
      const EvolutionResult r = evolve_imaginary(psi, hamiltonian_bonds(s), 0.5, dt, SweepSchedule::second_order(),
                                                 TruncationSpec::exact());
      Eigen::VectorXcd x = testing::mps_to_vector(r.state);
      const cplx o = x.dot(exact);
      return (x * (o / std::abs(o)) - exact).norm();
    };
    const double ratio = err(0.125) / err(0.0625);
    v.require(ratio > 3.5 && ratio < 4.5, "Trotter error ratio at halved step " + fmt(ratio, 4) + " ~ 4");
  }

  // Blocking on iid and AR(1) data, jackknife against blocking.
  {
    std::normal_distribution<double> nd;
    std::vector<double> iid(100000), ar(1000000);
    for (auto& x : iid) x = nd(g);
    const double rho = 0.6;
    double a = nd(g) / std::sqrt(1 - rho * rho);
    for (auto& x : ar) x = a = rho * a + nd(g);
    const double r_iid = blocking(iid, 100).R;
    const double r_ar = r_curve(ar).saturated_R;
    const double target = (1 + rho) / (1 - rho);
    v.require(std::abs(r_iid - 1.0) < 0.2, "iid R " + fmt(r_iid, 4) + " ~ 1");
    v.require(std::abs(r_ar - target) < 0.15 * target, "AR(1) R " + fmt(r_ar, 4) + " ~ " + fmt(target, 4));
    const std::span<const double> head(ar.data(), 65536);
    const JackknifeResult j = jackknife({head}, 64, [](std::span<const double> m) { return m[0]; });
    const double sb = blocking(head, 64).sigma_b;
    v.require(std::abs(j.sigma - sb) < 1e-10 * sb, "jackknife of the mean equals sigma_b");
  }
  const double t = seconds_since(t0);
  v.require(t < 600.0, "runtime " + fmt(t, 3) + " s < 600 s");
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::pair<std::string, std::function<void(Verdict&)>>> criteria{
      {1, {"ED thermal energy", ed_energy}},
      {2, {"basis count", basis_count}},
      {3, {"SLME sweep U/J=1", slme_weak_coupling}},
      {4, {"SLME U/J=20", slme_strong_coupling}},
      {5, {"stationarity", stationarity}},
      {6, {"free-fermion oracle", free_fermions}},
      {7, {"canonical METTS L=6", canonical_metts}},
      {8, {"grand-canonical hybrid METTS L=20", grand_metts}},
      {9, {"property suites", property_suites}},
  };
  std::vector<int> selected;
  for (int k = 1; k < argc; ++k) selected.push_back(std::atoi(argv[k]));
  if (selected.empty())
    for (const auto& [k, _] : criteria) selected.push_back(k);

  int failures = 0;
  for (int k : selected) {
    const auto it = criteria.find(k);
    if (it == criteria.end()) {
      std::printf("criterion %d FAIL: unknown criterion\n", k);
      ++failures;
      continue;
    }
    Verdict v;
    try {
      it->second.second(v);
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    std::printf("criterion %d %s: %s: %s\n", k, v.pass ? "PASS" : "FAIL", it->second.first.c_str(),
                v.detail.str().c_str());
    std::fflush(stdout);
    failures += v.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
